use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigen-decomposition of the g-self-adjoint operator `g⁻¹A` for a
/// symmetric bilinear form `A`.
#[derive(Debug, Clone)]
pub struct OperatorSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// g-orthonormal eigenvectors, `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Solves `A v = μ g v` through the Cholesky factor `g = L Lᵀ`: the matrix
/// `L⁻¹ A L⁻ᵀ` is symmetric and similar to `g⁻¹A`, and `v = L⁻ᵀ y` is
/// g-unit whenever `y` is Euclidean-unit.
pub fn operator_spectrum(g: &DMatrix<f64>, a: &DMatrix<f64>) -> OperatorSpectrum {
    let n = g.nrows();
    let l = g
        .clone()
        .cholesky()
        .expect("metric is positive definite")
        .l();
    let l_inv = l
        .clone()
        .try_inverse()
        .expect("cholesky factor is invertible");
    let mut sym = &l_inv * a * l_inv.transpose();
    // exact symmetry before the symmetric solver
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (sym[(i, j)] + sym[(j, i)]);
            sym[(i, j)] = m;
            sym[(j, i)] = m;
        }
    }
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let lt_inv = l_inv.transpose();
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let y: DVector<f64> = eig.eigenvectors.column(k).into_owned();
            (&lt_inv * y).iter().copied().collect()
        })
        .collect();
    OperatorSpectrum { values, vectors }
}

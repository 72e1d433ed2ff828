//! Pointwise curvature tensors from a metric jet.
//!
//! Sign convention: `R(X,Y,Z,W) = g(R(X,Y)Z, W)` with
//! `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, so the unit sphere has
//! `R_ijkl = g_il g_jk − g_ik g_jl` and `K(u,v) = R(u,v,v,u) / |u∧v|²`.

use nalgebra::DMatrix;

use crate::expr::MAX_DIM;

use super::array::Tensor;
use super::dual::{Dual, Scalar};
use super::metric_jet::MetricJet;

/// Curvature tensors at a point, in coordinate components.
#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `gamma[[k, i, j]] = Γ^k_ij`
    pub gamma: Tensor<3>,
    pub riemann: Tensor<4>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub schouten: DMatrix<f64>,
    pub weyl: Tensor<4>,
    /// `C_ijk = (∇_i S)_jk − (∇_j S)_ik`
    pub cotton: Tensor<3>,
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `R(a, b, c, d)` for vectors.
    pub fn riemann_apply(&self, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if c[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s += a[i] * b[j] * c[k] * d[l] * self.riemann[[i, j, k, l]];
                    }
                }
            }
        }
        s
    }

    /// Coordinate max-norm.
    pub fn weyl_norm(&self) -> f64 {
        self.weyl.max_abs()
    }

    pub fn cotton_norm(&self) -> f64 {
        self.cotton.max_abs()
    }
}

/// Γ, Riemann, Ricci, scalar curvature and Schouten tensor for any scalar
/// type. Inputs are flat row-major arrays: `g[a*n+b]`, `dg[(a*n+b)*n+c] =
/// ∂_c g_ab`, `ddg[((a*n+b)*n+c)*n+d] = ∂_c ∂_d g_ab`.
struct Core<T> {
    gamma: Vec<T>,
    riemann: Vec<T>,
    ricci: Vec<T>,
    scalar: T,
    schouten: Vec<T>,
}

fn core<T: Scalar>(n: usize, g: &[T], ginv: &[T], dg: &[T], ddg: &[T]) -> Core<T> {
    let i2 = |a: usize, b: usize| a * n + b;
    let i3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;

    // first kind: Γ_{c,ab} = ½(∂_a g_bc + ∂_b g_ac − ∂_c g_ab)
    let mut gamma1 = vec![T::zero(); n * n * n];
    for c in 0..n {
        for a in 0..n {
            for b in a..n {
                let v = (dg[i3(b, c, a)] + dg[i3(a, c, b)] - dg[i3(a, b, c)]).scale(0.5);
                gamma1[i3(c, a, b)] = v;
                gamma1[i3(c, b, a)] = v;
            }
        }
    }
    let mut gamma = vec![T::zero(); n * n * n];
    for k in 0..n {
        for a in 0..n {
            for b in a..n {
                let mut s = T::zero();
                for c in 0..n {
                    s = s + ginv[i2(k, c)] * gamma1[i3(c, a, b)];
                }
                gamma[i3(k, a, b)] = s;
                gamma[i3(k, b, a)] = s;
            }
        }
    }

    // M_abcd = ½(∂b∂c g_ad + ∂a∂d g_bc − ∂b∂d g_ac − ∂a∂c g_bd)
    //          + Γ_{f,bc} Γ^f_ad − Γ_{f,bd} Γ^f_ac,   R_abcd = −M_abcd
    let mut riemann = vec![T::zero(); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut m = (ddg[i4(a, d, b, c)] + ddg[i4(b, c, a, d)]
                        - ddg[i4(a, c, b, d)]
                        - ddg[i4(b, d, a, c)])
                        .scale(0.5);
                    for f in 0..n {
                        m = m + gamma1[i3(f, b, c)] * gamma[i3(f, a, d)]
                            - gamma1[i3(f, b, d)] * gamma[i3(f, a, c)];
                    }
                    riemann[i4(a, b, c, d)] = -m;
                }
            }
        }
    }

    // Ric_jk = g^{il} R_ijkl
    let mut ricci = vec![T::zero(); n * n];
    for j in 0..n {
        for k in j..n {
            let mut s = T::zero();
            for i in 0..n {
                for l in 0..n {
                    s = s + ginv[i2(i, l)] * riemann[i4(i, j, k, l)];
                }
            }
            ricci[i2(j, k)] = s;
            ricci[i2(k, j)] = s;
        }
    }
    let mut scalar = T::zero();
    for j in 0..n {
        for k in 0..n {
            scalar = scalar + ginv[i2(j, k)] * ricci[i2(j, k)];
        }
    }

    let mut schouten = vec![T::zero(); n * n];
    if n > 2 {
        let nf = n as f64;
        for j in 0..n {
            for k in 0..n {
                schouten[i2(j, k)] = (ricci[i2(j, k)]
                    - (scalar * g[i2(j, k)]).scale(1.0 / (2.0 * (nf - 1.0))))
                .scale(1.0 / (nf - 2.0));
            }
        }
    }
    Core {
        gamma,
        riemann,
        ricci,
        scalar,
        schouten,
    }
}

fn dual_from(value: f64, grad_of: impl Fn(usize) -> f64, n: usize) -> Dual {
    let mut grad = [0.0; MAX_DIM];
    for (i, g) in grad.iter_mut().enumerate().take(n) {
        *g = grad_of(i);
    }
    Dual::new(value, grad)
}

/// Γ, Riemann, Ricci, scalar, Schouten, Weyl and Cotton at the jet's point.
///
/// The whole chain is evaluated once in dual numbers so the Schouten tensor
/// comes out together with its coordinate gradient; the Cotton tensor then
/// only needs the Christoffel correction. In dimension 2 the Schouten, Weyl
/// and Cotton tensors are left at zero.
pub fn curvature_pack(jet: &MetricJet) -> CurvaturePack {
    let n = jet.dim();
    let idx = |flat: usize, rank: usize| {
        let mut out = [0usize; 4];
        let mut f = flat;
        for slot in (0..rank).rev() {
            out[slot] = f % n;
            f /= n;
        }
        out
    };

    let g: Vec<Dual> = (0..n * n)
        .map(|k| {
            let [a, b, ..] = idx(k, 2);
            dual_from(jet.g[(a, b)], |i| jet.dg[[a, b, i]], n)
        })
        .collect();
    // ∂_i g^{ab} = −g^{ac} ∂_i g_cd g^{db}
    let ginv: Vec<Dual> = (0..n * n)
        .map(|k| {
            let [a, b, ..] = idx(k, 2);
            dual_from(
                jet.g_inv[(a, b)],
                |i| {
                    let mut s = 0.0;
                    for c in 0..n {
                        for d in 0..n {
                            s -= jet.g_inv[(a, c)] * jet.dg[[c, d, i]] * jet.g_inv[(d, b)];
                        }
                    }
                    s
                },
                n,
            )
        })
        .collect();
    let dg: Vec<Dual> = (0..n * n * n)
        .map(|k| {
            let [a, b, c, _] = idx(k, 3);
            dual_from(jet.dg[[a, b, c]], |i| jet.ddg[[a, b, c, i]], n)
        })
        .collect();
    let ddg: Vec<Dual> = (0..n * n * n * n)
        .map(|k| {
            let [a, b, c, d] = idx(k, 4);
            dual_from(jet.ddg[[a, b, c, d]], |i| jet.dddg[[a, b, c, d, i]], n)
        })
        .collect();

    let c = core(n, &g, &ginv, &dg, &ddg);

    let gamma = Tensor::from_fn(n, |[k, i, j]| c.gamma[(k * n + i) * n + j].value);
    let riemann = Tensor::from_fn(n, |[i, j, k, l]| c.riemann[((i * n + j) * n + k) * n + l].value);
    let ricci = DMatrix::from_fn(n, n, |i, j| c.ricci[i * n + j].value);
    let schouten = DMatrix::from_fn(n, n, |i, j| c.schouten[i * n + j].value);
    let g0 = &jet.g;

    let weyl = if n > 2 {
        Tensor::from_fn(n, |[i, j, k, l]| {
            riemann[[i, j, k, l]]
                - (g0[(j, k)] * schouten[(i, l)] - g0[(i, k)] * schouten[(j, l)]
                    + g0[(i, l)] * schouten[(j, k)]
                    - g0[(j, l)] * schouten[(i, k)])
        })
    } else {
        Tensor::zeros(n)
    };

    // (∇_i S)_jk = ∂_i S_jk − Γ^l_ij S_lk − Γ^l_ik S_jl
    let nabla_s = |i: usize, j: usize, k: usize| {
        let mut v = c.schouten[j * n + k].grad[i];
        for l in 0..n {
            v -= gamma[[l, i, j]] * schouten[(l, k)] + gamma[[l, i, k]] * schouten[(j, l)];
        }
        v
    };
    let mut cotton = Tensor::zeros(n);
    if n > 2 {
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = nabla_s(i, j, k) - nabla_s(j, i, k);
                    cotton[[i, j, k]] = v;
                    cotton[[j, i, k]] = -v;
                }
            }
        }
    }

    CurvaturePack {
        g: jet.g.clone(),
        g_inv: jet.g_inv.clone(),
        gamma,
        riemann,
        ricci,
        scalar: c.scalar.value,
        schouten,
        weyl,
        cotton,
    }
}

/// Curvature from plain `f64` arithmetic, skipping the Cotton tensor. Used
/// where only pointwise curvature is needed, e.g. inside finite-difference
/// stencils.
pub(crate) fn schouten_only(jet: &MetricJet) -> (DMatrix<f64>, f64) {
    let n = jet.dim();
    let g: Vec<f64> = jet.g.iter().copied().collect();
    let ginv: Vec<f64> = jet.g_inv.iter().copied().collect();
    // nalgebra is column-major; g and g_inv are symmetric so the flat order
    // is the same either way
    let c = core(n, &g, &ginv, jet.dg.as_slice(), jet.ddg.as_slice());
    (DMatrix::from_fn(n, n, |i, j| c.schouten[i * n + j]), c.scalar)
}

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::CompiledMetric;

use super::array::Tensor;

/// Metric components and their coordinate derivatives up to order three at
/// one point.
///
/// Derivative blocks put the metric indices first:
/// `dg[[a, b, i]] = ∂_i g_ab`, `ddg[[a, b, i, j]] = ∂_i ∂_j g_ab`, and so on.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub point: Vec<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub dg: Tensor<3>,
    pub ddg: Tensor<4>,
    pub dddg: Tensor<5>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `g(u, v)`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * self.g[(i, j)] * v[j];
            }
        }
        s
    }

    /// Index lowering `v_i = g_ij v^j`.
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.g[(i, j)] * v[j]).sum()).collect()
    }
}

/// Evaluates the metric and its derivative jets at `p`.
pub fn metric_jet(cm: &CompiledMetric, p: &[f64]) -> Result<MetricJet> {
    let n = cm.dimension();
    let jets = cm.jets(p)?;
    let g = jets.values();
    let g_inv = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateMetric {
            point: p.to_vec(),
            min_eigenvalue: 0.0,
        })?
        .inverse();
    let dg = Tensor::from_fn(n, |[a, b, i]| jets.get(a, b).d1(i));
    let ddg = Tensor::from_fn(n, |[a, b, i, j]| jets.get(a, b).d2(i, j));
    let dddg = Tensor::from_fn(n, |[a, b, i, j, k]| jets.get(a, b).d3(i, j, k));
    Ok(MetricJet {
        point: p.to_vec(),
        g,
        g_inv,
        dg,
        ddg,
        dddg,
    })
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::curvature::CurvaturePack;
use super::metric_jet::MetricJet;
use super::spectrum::{operator_spectrum, OperatorSpectrum};

/// Relative Gram-determinant threshold below which a plane counts as
/// degenerate.
pub const PLANE_EPS: f64 = 1e-12;

/// Sectional curvature `K(span(u, v)) = R(u,v,v,u) / (|u|²|v|² − g(u,v)²)`.
pub fn sectional(jet: &MetricJet, pack: &CurvaturePack, u: &[f64], v: &[f64]) -> Result<f64> {
    let uu = jet.inner(u, u);
    let vv = jet.inner(v, v);
    let uv = jet.inner(u, v);
    let gram = uu * vv - uv * uv;
    if !(gram > PLANE_EPS * uu * vv) {
        return Err(Error::DegeneratePlane { gram });
    }
    Ok(pack.riemann_apply(u, v, v, u) / gram)
}

/// Source of reproducible random 2-planes, orthonormal with respect to the
/// metric at one point.
pub struct PlaneSampler {
    rng: ChaCha8Rng,
}

impl PlaneSampler {
    pub fn new(seed: u64) -> PlaneSampler {
        PlaneSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A standard Gaussian coordinate vector.
    pub fn gaussian(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.rng.sample(StandardNormal)).collect()
    }

    /// Gram–Schmidt of two Gaussian vectors with respect to `g`; redraws in
    /// the (measure-zero) degenerate case.
    pub fn plane(&mut self, jet: &MetricJet) -> (Vec<f64>, Vec<f64>) {
        let n = jet.dim();
        loop {
            let mut u = self.gaussian(n);
            let mut v = self.gaussian(n);
            let nu = jet.inner(&u, &u).sqrt();
            if !(nu > 1e-8) {
                continue;
            }
            u.iter_mut().for_each(|x| *x /= nu);
            let c = jet.inner(&u, &v);
            v.iter_mut().zip(&u).for_each(|(y, x)| *y -= c * x);
            let nv = jet.inner(&v, &v).sqrt();
            if !(nv > 1e-8) {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            return (u, v);
        }
    }
}

/// Mean sectional curvature `R / (n(n−1))`.
pub fn mean_curvature(pack: &CurvaturePack) -> f64 {
    let n = pack.dim() as f64;
    pack.scalar / (n * (n - 1.0))
}

/// Pointwise anisotropy `sup_σ |K(σ) − R/(n(n−1))|`, estimated from
/// `samples` random planes. When the horizontal and vertical curvatures of
/// a quasi-constant point are known they are the extremal values and are
/// included exactly.
pub fn anisotropy(
    jet: &MetricJet,
    pack: &CurvaturePack,
    samples: usize,
    seed: u64,
    extremal: Option<(f64, f64)>,
) -> f64 {
    let mean = mean_curvature(pack);
    let mut sampler = PlaneSampler::new(seed);
    let mut best = 0.0_f64;
    for _ in 0..samples {
        let (u, v) = sampler.plane(jet);
        // orthonormal pair, so the denominator is one
        let k = pack.riemann_apply(&u, &v, &v, &u);
        best = best.max((k - mean).abs());
    }
    if let Some((h, n)) = extremal {
        best = best.max((h - mean).abs()).max((n - mean).abs());
    }
    best
}

/// Spectrum of the Schouten operator `g⁻¹S`, ascending.
pub fn schouten_spectrum(pack: &CurvaturePack) -> OperatorSpectrum {
    operator_spectrum(&pack.g, &pack.schouten)
}

/// Spectrum of the Ricci operator `g⁻¹Ric`, ascending.
pub fn ricci_spectrum(pack: &CurvaturePack) -> OperatorSpectrum {
    operator_spectrum(&pack.g, &pack.ricci)
}

/// Weitzenböck curvature of degree `m`,
/// `G_m = (n−m) Σ_{i≤m} λ_i + m Σ_{i>m} λ_i` over the ascending Schouten
/// eigenvalues.
pub fn weitzenboeck_gm(pack: &CurvaturePack, m: usize) -> Result<f64> {
    let n = pack.dim();
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!("degree {m} outside 1..={}", n - 1)));
    }
    let ev = schouten_spectrum(pack).values;
    let low: f64 = ev[..m].iter().sum();
    let high: f64 = ev[m..].iter().sum();
    Ok((n - m) as f64 * low + m as f64 * high)
}

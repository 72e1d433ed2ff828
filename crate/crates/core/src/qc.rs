//! Classification of points as isotropic, quasi-constant (1-QC) or neither,
//! and the derived line field ξ, curvature pair (H, N), leaf curvature λ
//! and umbilicity factor α.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::CompiledMetric;
use crate::tensor::{
    curvature_pack, metric_jet, operator_spectrum, schouten_only, CurvaturePack, MetricJet,
    OperatorSpectrum, PlaneSampler,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    Isotropic,
    Qc,
    NonQc,
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointClass::Isotropic => "isotropic",
            PointClass::Qc => "qc",
            PointClass::NonQc => "non-qc",
        })
    }
}

/// Numerical knobs shared by the analysis routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Relative Schouten-spectrum spread below which a point is isotropic.
    pub tol_iso: f64,
    /// Largest decomposition residual accepted for a QC point.
    pub tol_qc: f64,
    /// Finite-difference step for gradients of H and of the line field.
    pub fd_step: f64,
    /// Random planes added to the eigenframe planes in the residual check.
    pub residual_planes: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol_iso: 1e-7,
            tol_qc: 1e-6,
            fd_step: 1e-4,
            residual_planes: 24,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcReport {
    pub class: PointClass,
    /// Unit line-field representative, sign normalized; absent at isotropic
    /// points.
    pub xi: Option<Vec<f64>>,
    pub h: f64,
    pub n: f64,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub decomposition_residual: f64,
    /// `|N − H|`
    pub schouten_gap: f64,
    pub tol_iso: f64,
    pub tol_qc: f64,
}

/// A line-field representative at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFieldSample {
    pub point: Vec<f64>,
    pub xi: Vec<f64>,
}

/// How the Schouten spectrum splits.
#[derive(Debug, Clone)]
pub(crate) enum Split {
    Isotropic { mean: f64 },
    /// Simple eigenvalue at index `simple` of the ascending spectrum.
    Candidate { simple: usize, h: f64, n: f64 },
    /// No clean `(n−1, 1)` split; still carries the closer guess.
    Ambiguous { simple: usize, h: f64, n: f64 },
}

pub(crate) fn split_spectrum(values: &[f64], scalar: f64, tol_iso: f64) -> Split {
    let dim = values.len();
    let nf = dim as f64;
    let scale = tol_iso * (1.0 + scalar.abs());
    let (lo, hi) = (values[0], values[dim - 1]);
    if hi - lo < scale {
        return Split::Isotropic {
            mean: scalar / (nf * (nf - 1.0)),
        };
    }
    let spread_low = hi - values[1];
    let spread_high = values[dim - 2] - lo;
    let (simple, cluster, gap) = if spread_low <= spread_high {
        (0, &values[1..], values[1] - lo)
    } else {
        (dim - 1, &values[..dim - 1], hi - values[dim - 2])
    };
    let h = 2.0 * cluster.iter().sum::<f64>() / cluster.len() as f64;
    let n = values[simple] + h / 2.0;
    if gap < scale {
        Split::Ambiguous { simple, h, n }
    } else {
        Split::Candidate { simple, h, n }
    }
}

/// Makes the first component of largest magnitude positive.
pub fn normalize_sign(v: &[f64]) -> Vec<f64> {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter().map(|x| -x).collect()
    } else {
        v.to_vec()
    }
}

/// Largest `|K(σ) − (H sin²∠(ξ,σ) + N cos²∠(ξ,σ))|` over the eigenframe
/// coordinate planes, their pairwise diagonals and `extra` random planes.
/// With `xi = None` the model is the constant `h`.
pub fn decomposition_residual(
    jet: &MetricJet,
    pack: &CurvaturePack,
    frame: &[Vec<f64>],
    xi: Option<&[f64]>,
    h: f64,
    n: f64,
    extra: usize,
    seed: u64,
) -> f64 {
    let dim = jet.dim();
    let model = |u: &[f64], v: &[f64]| match xi {
        Some(x) => {
            let a = jet.inner(x, u);
            let b = jet.inner(x, v);
            let c2 = a * a + b * b;
            h * (1.0 - c2) + n * c2
        }
        None => h,
    };
    let mut worst = 0.0_f64;
    let mut check = |u: &[f64], v: &[f64]| {
        let k = pack.riemann_apply(u, v, v, u);
        worst = worst.max((k - model(u, v)).abs());
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..dim {
        for b in a + 1..dim {
            check(&frame[a], &frame[b]);
            // (e_a + e_b)/√2 against the remaining frame vectors
            let d: Vec<f64> = frame[a].iter().zip(&frame[b]).map(|(x, y)| s * (x + y)).collect();
            for c in (0..dim).filter(|&c| c != a && c != b) {
                check(&d, &frame[c]);
            }
            let e: Vec<f64> = frame[a].iter().zip(&frame[b]).map(|(x, y)| s * (x - y)).collect();
            check(&d, &e);
        }
    }
    let mut sampler = PlaneSampler::new(seed);
    for _ in 0..extra {
        let (u, v) = sampler.plane(jet);
        check(&u, &v);
    }
    worst
}

/// Classifies one point from its curvature.
pub fn classify_point(jet: &MetricJet, pack: &CurvaturePack, settings: &Settings) -> Result<QcReport> {
    let dim = jet.dim();
    if dim < 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: dim,
        });
    }
    let spec = operator_spectrum(&pack.g, &pack.schouten);
    Ok(report_from_spectrum(jet, pack, &spec, settings))
}

fn report_from_spectrum(
    jet: &MetricJet,
    pack: &CurvaturePack,
    spec: &OperatorSpectrum,
    settings: &Settings,
) -> QcReport {
    let base = |class, xi, h, n, residual| QcReport {
        class,
        xi,
        h,
        n,
        lambda: None,
        alpha: None,
        decomposition_residual: residual,
        schouten_gap: (n - h).abs(),
        tol_iso: settings.tol_iso,
        tol_qc: settings.tol_qc,
    };
    let extra = settings.residual_planes;
    match split_spectrum(&spec.values, pack.scalar, settings.tol_iso) {
        Split::Isotropic { mean } => {
            let r = decomposition_residual(jet, pack, &spec.vectors, None, mean, mean, extra, settings.seed);
            base(PointClass::Isotropic, None, mean, mean, r)
        }
        Split::Ambiguous { simple, h, n } => {
            let xi = normalize_sign(&spec.vectors[simple]);
            let r = decomposition_residual(jet, pack, &spec.vectors, Some(&xi), h, n, extra, settings.seed);
            base(PointClass::NonQc, None, h, n, r)
        }
        Split::Candidate { simple, h, n, .. } => {
            let xi = normalize_sign(&spec.vectors[simple]);
            let r = decomposition_residual(jet, pack, &spec.vectors, Some(&xi), h, n, extra, settings.seed);
            let class = if r <= settings.tol_qc {
                PointClass::Qc
            } else {
                PointClass::NonQc
            };
            base(class, Some(xi), h, n, r)
        }
    }
}

/// Smoothly extended `(H, N)`: eigen-extracted at non-isotropic points,
/// `R/(n(n−1))` for both at isotropic ones.
pub fn hn_fields(cm: &CompiledMetric, p: &[f64], tol_iso: f64) -> Result<(f64, f64)> {
    let jet = metric_jet(cm, p)?;
    let (s, scalar) = schouten_only(&jet);
    let spec = operator_spectrum(&jet.g, &s);
    Ok(match split_spectrum(&spec.values, scalar, tol_iso) {
        Split::Isotropic { mean } => (mean, mean),
        Split::Candidate { h, n, .. } | Split::Ambiguous { h, n, .. } => (h, n),
    })
}

/// `(ξ, horizontal frame, H, N)` at a non-isotropic point, from the cheap
/// curvature path.
pub(crate) struct LocalFrame {
    pub jet: MetricJet,
    pub xi: Vec<f64>,
    pub horizontal: Vec<Vec<f64>>,
    pub h: f64,
    pub n: f64,
}

pub(crate) fn local_frame(cm: &CompiledMetric, p: &[f64], tol_iso: f64) -> Result<LocalFrame> {
    let jet = metric_jet(cm, p)?;
    let (s, scalar) = schouten_only(&jet);
    let spec = operator_spectrum(&jet.g, &s);
    match split_spectrum(&spec.values, scalar, tol_iso) {
        Split::Isotropic { .. } => Err(Error::NearIsotropic { gap: 0.0 }),
        Split::Candidate { simple, h, n, .. } | Split::Ambiguous { simple, h, n } => {
            let xi = normalize_sign(&spec.vectors[simple]);
            let horizontal = spec
                .vectors
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != simple)
                .map(|(_, v)| v.clone())
                .collect();
            Ok(LocalFrame { jet, xi, horizontal, h, n })
        }
    }
}

/// The sign-normalized line field at `p`.
pub fn line_field_sample(cm: &CompiledMetric, p: &[f64], tol_iso: f64) -> Result<LineFieldSample> {
    let f = local_frame(cm, p, tol_iso)?;
    Ok(LineFieldSample {
        point: p.to_vec(),
        xi: f.xi,
    })
}

/// `ξ` at `q`, oriented to agree with `reference`.
pub(crate) fn aligned_xi(cm: &CompiledMetric, q: &[f64], reference: &[f64], tol_iso: f64) -> Result<(Vec<f64>, LocalFrame)> {
    let f = local_frame(cm, q, tol_iso)?;
    let overlap = f.jet.inner(&f.xi, reference);
    if overlap.abs() < 0.1 {
        return Err(Error::SignAlignmentFailure { overlap });
    }
    let xi = if overlap < 0.0 {
        f.xi.iter().map(|x| -x).collect()
    } else {
        f.xi.clone()
    };
    Ok((xi, f))
}

/// Central difference with one Richardson step: `(4 D(h/2) − D(h)) / 3`.
pub(crate) fn richardson<F>(h: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let d = |f: &mut F, s: f64| -> Result<f64> { Ok((f(s)? - f(-s)?) / (2.0 * s)) };
    let coarse = d(&mut f, h)?;
    let fine = d(&mut f, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

pub(crate) fn shifted(p: &[f64], i: usize, s: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] += s;
    q
}

/// Leaf curvature and umbilicity factor at a QC point.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafCurvature {
    pub lambda: f64,
    pub alpha: f64,
    /// Coordinate gradient `∂_i H`.
    pub grad_h: Vec<f64>,
    /// `‖grad H‖²`
    pub grad_h_norm2: f64,
}

/// `α = ξ(H) / (2(N − H))` and `λ = H + α²`, with `grad H` by Richardson
/// central differences of [`hn_fields`].
pub fn leaf_curvature(cm: &CompiledMetric, p: &[f64], settings: &Settings) -> Result<LeafCurvature> {
    let jet = metric_jet(cm, p)?;
    let pack = curvature_pack(&jet);
    let report = classify_point(&jet, &pack, settings)?;
    leaf_curvature_from(cm, p, &jet, &report, settings)
}

pub(crate) fn leaf_curvature_from(
    cm: &CompiledMetric,
    p: &[f64],
    jet: &MetricJet,
    report: &QcReport,
    settings: &Settings,
) -> Result<LeafCurvature> {
    if report.class == PointClass::NonQc {
        return Err(Error::NotQuasiConstant {
            class: report.class.to_string(),
        });
    }
    if report.schouten_gap <= 10.0 * settings.tol_iso {
        return Err(Error::NearIsotropic {
            gap: report.schouten_gap,
        });
    }
    let xi = report.xi.as_ref().expect("QC report carries xi");
    let dim = jet.dim();
    let grad_h = (0..dim)
        .map(|i| richardson(settings.fd_step, |s| Ok(hn_fields(cm, &shifted(p, i, s), settings.tol_iso)?.0)))
        .collect::<Result<Vec<f64>>>()?;
    let xi_h: f64 = xi.iter().zip(&grad_h).map(|(a, b)| a * b).sum();
    let mut grad_h_norm2 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            grad_h_norm2 += jet.g_inv[(i, j)] * grad_h[i] * grad_h[j];
        }
    }
    let alpha = xi_h / (2.0 * (report.n - report.h));
    Ok(LeafCurvature {
        lambda: report.h + alpha * alpha,
        alpha,
        grad_h,
        grad_h_norm2,
    })
}

/// Full pointwise analysis: classification plus λ and α where defined.
pub fn analyze_point(cm: &CompiledMetric, p: &[f64], settings: &Settings) -> Result<(MetricJet, CurvaturePack, QcReport)> {
    let jet = metric_jet(cm, p)?;
    let pack = curvature_pack(&jet);
    let mut report = classify_point(&jet, &pack, settings)?;
    if report.class == PointClass::Qc && report.schouten_gap > 10.0 * settings.tol_iso {
        let lc = leaf_curvature_from(cm, p, &jet, &report, settings)?;
        report.lambda = Some(lc.lambda);
        report.alpha = Some(lc.alpha);
    }
    Ok((jet, pack, report))
}

/// `|dη(X, Y)|` for a g-orthonormal basis `{X, Y}` of `ξ^⊥`, where
/// `η = g(ξ, ·)` and `ξ` is sign-aligned over the difference stencil.
/// Zero exactly when the horizontal distribution is integrable at `p`
/// (dimension 3 only).
pub fn integrability_check(cm: &CompiledMetric, p: &[f64], settings: &Settings) -> Result<f64> {
    let dim = cm.dimension();
    if dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: dim,
        });
    }
    let jet = metric_jet(cm, p)?;
    let pack = curvature_pack(&jet);
    let report = classify_point(&jet, &pack, settings)?;
    if report.class == PointClass::Isotropic || report.schouten_gap <= 10.0 * settings.tol_iso {
        return Err(Error::NearIsotropic {
            gap: report.schouten_gap,
        });
    }
    if report.class != PointClass::Qc {
        return Err(Error::NotQuasiConstant {
            class: report.class.to_string(),
        });
    }
    let centre = local_frame(cm, p, settings.tol_iso)?;
    let xi0 = centre.xi.clone();
    // ∂_i η_j
    let mut d_eta = [[0.0; 3]; 3];
    for (i, row) in d_eta.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = richardson(settings.fd_step, |s| {
                let q = shifted(p, i, s);
                let (xi, f) = aligned_xi(cm, &q, &xi0, settings.tol_iso)?;
                Ok(f.jet.lower(&xi)[j])
            })?;
        }
    }
    let (x, y) = (&centre.horizontal[0], &centre.horizontal[1]);
    let mut v = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            v += (d_eta[i][j] - d_eta[j][i]) * x[i] * y[j];
        }
    }
    Ok(v.abs())
}

#[cfg(test)]
mod tests;

//! Codimension-one immersion data for quasi-constant metrics: the ambient
//! curvature κ, the second fundamental form, Gauss and Codazzi residuals,
//! plus hyperboloid-model geometry.

mod gauss_n3;
mod hyperboloid;
mod rotational;

pub use gauss_n3::{gauss_n3_residuals, solve_gauss_n3, GaussBranch, GaussN3Solution};
pub use hyperboloid::{
    ball_volume, cap_radius, euclidean_cap_radius, gauss_map, geodesic_velocity, hypersphere_curvature,
    minkowski, normal_flow, sphere_area, BoundaryPoint, HyperboloidPoint,
};
pub use rotational::{rotational_immersion, RotationalSample};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::CompiledMetric;
use crate::qc::{hn_fields, richardson, shifted, split_spectrum, PointClass, QcReport, Settings, Split};
use crate::tensor::{curvature_pack, metric_jet, operator_spectrum, schouten_only, CurvaturePack, MetricJet};

/// Ambient curvature choice from the sampled minimum of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaChoice {
    pub kappa: f64,
    pub min_h: f64,
    /// Grid point attaining the minimum.
    pub argmin: Vec<f64>,
    pub samples: usize,
}

/// `κ = 1 − min H` if `min H ≤ 0`, else `0`.
pub fn kappa_from_min(min_h: f64) -> f64 {
    if min_h <= 0.0 {
        1.0 - min_h
    } else {
        0.0
    }
}

/// `κ` from the minimum of `H` over `grid`, a stand-in for the infimum.
pub fn choose_kappa(cm: &CompiledMetric, grid: &[Vec<f64>], tol_iso: f64) -> Result<KappaChoice> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let mut min_h = f64::INFINITY;
    let mut argmin = grid[0].clone();
    for p in grid {
        let (h, _) = hn_fields(cm, p, tol_iso)?;
        if h < min_h {
            min_h = h;
            argmin = p.clone();
        }
    }
    Ok(KappaChoice {
        kappa: kappa_from_min(min_h),
        min_h,
        argmin,
        samples: grid.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionData {
    pub kappa: f64,
    pub h: DMatrix<f64>,
    pub gauss_residual: f64,
    pub codazzi_residual: f64,
}

fn build_h(g: &DMatrix<f64>, h_curv: f64, n_curv: f64, xi: Option<&[f64]>, kappa: f64, point: &[f64]) -> Result<DMatrix<f64>> {
    let operand = h_curv + kappa;
    if !(operand > 0.0) {
        return Err(Error::NonpositiveOperand {
            value: operand,
            point: point.to_vec(),
        });
    }
    let a = operand.sqrt();
    let mut h = g * a;
    if let Some(xi) = xi {
        let eta = g * nalgebra::DVector::from_column_slice(xi);
        h += (&eta * eta.transpose()) * ((n_curv - h_curv) / a);
    }
    Ok(h)
}

/// `h = √(H+κ) g + ((N−H)/√(H+κ)) η⊗η` with `η = g(ξ, ·)`.
///
/// `H`, `N` and `ξ` come from the `(n−1, 1)` split of the Schouten spectrum
/// taken without the isotropy threshold, so `h` tends continuously to
/// `√(H+κ) g` as the gap closes instead of dropping the `η⊗η` term at points
/// that are isotropic only to within `tol_iso`.
pub fn second_fundamental_form(jet: &MetricJet, report: &QcReport, kappa: f64) -> Result<DMatrix<f64>> {
    match report.class {
        PointClass::NonQc => Err(Error::NotQuasiConstant {
            class: report.class.to_string(),
        }),
        _ => h_from_spectrum(jet, kappa, &jet.point),
    }
}

fn h_from_spectrum(jet: &MetricJet, kappa: f64, point: &[f64]) -> Result<DMatrix<f64>> {
    let (s, scalar) = schouten_only(jet);
    let spec = operator_spectrum(&jet.g, &s);
    match split_spectrum(&spec.values, scalar, 0.0) {
        Split::Candidate { simple, h, n } | Split::Ambiguous { simple, h, n } => {
            build_h(&jet.g, h, n, Some(&spec.vectors[simple]), kappa, point)
        }
        Split::Isotropic { mean } => build_h(&jet.g, mean, mean, None, kappa, point),
    }
}

/// Max-norm of `R_ijkl − [−κ(g_jk g_il − g_ik g_jl) + h_jk h_il − h_ik h_jl]`
/// over `1 + max|R_ijkl|`.
pub fn gauss_residual(jet: &MetricJet, pack: &CurvaturePack, h: &DMatrix<f64>, kappa: f64) -> f64 {
    let n = jet.dim();
    let g = &jet.g;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let model = -kappa * (g[(j, k)] * g[(i, l)] - g[(i, k)] * g[(j, l)])
                        + h[(j, k)] * h[(i, l)]
                        - h[(i, k)] * h[(j, l)];
                    worst = worst.max((pack.riemann[[i, j, k, l]] - model).abs());
                }
            }
        }
    }
    worst / (1.0 + pack.riemann.max_abs())
}

/// Class of `q` and `h` from the cheap curvature path.
fn h_field(cm: &CompiledMetric, q: &[f64], kappa: f64, tol_iso: f64) -> Result<(PointClass, DMatrix<f64>)> {
    let jet = metric_jet(cm, q)?;
    let (s, scalar) = schouten_only(&jet);
    let spec = operator_spectrum(&jet.g, &s);
    let class = match split_spectrum(&spec.values, scalar, tol_iso) {
        Split::Isotropic { .. } => PointClass::Isotropic,
        Split::Candidate { .. } => PointClass::Qc,
        Split::Ambiguous { .. } => return Ok((PointClass::NonQc, DMatrix::zeros(q.len(), q.len()))),
    };
    Ok((class, h_from_spectrum(&jet, kappa, q)?))
}

/// `max |(∇_i h)_jk − (∇_j h)_ik| / (1 + max|h|)` with `∂h` by Richardson
/// central differences of the `h` field.
pub fn codazzi_residual(cm: &CompiledMetric, p: &[f64], kappa: f64, settings: &Settings) -> Result<f64> {
    let n = cm.dimension();
    let jet = metric_jet(cm, p)?;
    let pack = curvature_pack(&jet);
    let (class, h) = h_field(cm, p, kappa, settings.tol_iso)?;
    if class == PointClass::NonQc {
        return Err(Error::NotQuasiConstant {
            class: class.to_string(),
        });
    }
    let mut dh = vec![DMatrix::zeros(n, n); n];
    for (i, slot) in dh.iter_mut().enumerate() {
        for j in 0..n {
            for k in j..n {
                let v = richardson(settings.fd_step, |s| {
                    let q = shifted(p, i, s);
                    let (c, hq) = h_field(cm, &q, kappa, settings.tol_iso)?;
                    // h is continuous across the isotropic boundary, not across non-QC points
                    if c == PointClass::NonQc {
                        return Err(Error::StencilClassificationChange { point: p.to_vec() });
                    }
                    Ok(hq[(j, k)])
                })?;
                slot[(j, k)] = v;
                slot[(k, j)] = v;
            }
        }
    }
    let gam = &pack.gamma;
    let nabla = |i: usize, j: usize, k: usize| {
        let mut v = dh[i][(j, k)];
        for l in 0..n {
            v -= gam[[l, i, j]] * h[(l, k)] + gam[[l, i, k]] * h[(j, l)];
        }
        v
    };
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                worst = worst.max((nabla(i, j, k) - nabla(j, i, k)).abs());
            }
        }
    }
    Ok(worst / (1.0 + h.abs().max()))
}

/// `h` with both residuals at one point.
pub fn immersion_data(cm: &CompiledMetric, p: &[f64], kappa: f64, settings: &Settings) -> Result<ImmersionData> {
    let jet = metric_jet(cm, p)?;
    let pack = curvature_pack(&jet);
    let report = crate::qc::classify_point(&jet, &pack, settings)?;
    let h = second_fundamental_form(&jet, &report, kappa)?;
    let gauss = gauss_residual(&jet, &pack, &h, kappa);
    let codazzi = codazzi_residual(cm, p, kappa, settings)?;
    Ok(ImmersionData {
        kappa,
        h,
        gauss_residual: gauss,
        codazzi_residual: codazzi,
    })
}

//! Curves inside curvature leaves (integral manifolds of `D = ξ^⊥`), the
//! transversal ξ-flow, umbilicity of the leaves and the holonomy defect of
//! `D` around small loops.

use std::fmt;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::metric::CompiledMetric;
use crate::qc::{aligned_xi, analyze_point, local_frame, richardson, shifted, PointClass, Settings};
use crate::tensor::{curvature_pack, metric_jet};

/// A curve traced inside one curvature leaf, with per-point monitors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeafTrace {
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    pub h_values: Vec<f64>,
    pub n_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub umbilicity_residuals: Vec<f64>,
    pub step: f64,
    pub method: &'static str,
    pub direction_seed: u64,
}

fn drift(values: &[f64]) -> f64 {
    values.first().map_or(0.0, |&v0| values.iter().fold(0.0_f64, |m, v| m.max((v - v0).abs())))
}

impl LeafTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `max |H_i − H_0|`
    pub fn h_drift(&self) -> f64 {
        drift(&self.h_values)
    }

    /// `max |λ_i − λ_0|`
    pub fn lambda_drift(&self) -> f64 {
        drift(&self.lambda_values)
    }

    pub fn max_umbilicity(&self) -> f64 {
        self.umbilicity_residuals.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    /// CSV with columns `step, x0.., H, N, lambda, alpha, umbilicity_residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let dim = self.dimension;
        let mut header = vec!["step".to_string()];
        header.extend((0..dim).map(|i| format!("x{i}")));
        header.extend(["H", "N", "lambda", "alpha", "umbilicity_residual"].map(String::from));
        w.write_record(&header).map_err(io)?;
        for (k, p) in self.points.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(p.iter().map(|v| format!("{v:.16e}")));
            for col in [
                &self.h_values,
                &self.n_values,
                &self.lambda_values,
                &self.alpha_values,
                &self.umbilicity_residuals,
            ] {
                row.push(col.get(k).map_or(String::new(), |v| format!("{v:.16e}")));
            }
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))
    }
}

/// An aborted trace together with everything recorded before the abort.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceError {
    pub error: Error,
    pub partial: LeafTrace,
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} points)", self.error, self.partial.len())
    }
}

impl std::error::Error for TraceError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<TraceError> for Error {
    fn from(e: TraceError) -> Error {
        e.error
    }
}

/// `‖II − α g|_D‖_F / (1 + |α|)` at `p`, where `II(X, Y) = g(∇_X ξ, Y)` on
/// a g-orthonormal basis of `D` and `∂ξ` comes from Richardson differences
/// of the sign-aligned line field. `alpha` overrides the computed factor.
pub fn umbilicity_at(cm: &CompiledMetric, p: &[f64], alpha: Option<f64>, settings: &Settings) -> Result<f64> {
    let (jet, pack, report) = analyze_point(cm, p, settings)?;
    if report.class != PointClass::Qc {
        return Err(Error::NotQuasiConstant {
            class: report.class.to_string(),
        });
    }
    let alpha = match alpha.or(report.alpha) {
        Some(a) => a,
        None => {
            return Err(Error::NearIsotropic {
                gap: report.schouten_gap,
            })
        }
    };
    let xi = report.xi.expect("QC report carries xi");
    let frame = local_frame(cm, p, settings.tol_iso)?;
    let n = jet.dim();
    // dxi[i][k] = ∂_i ξ^k
    let mut dxi = vec![vec![0.0; n]; n];
    for (i, row) in dxi.iter_mut().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = richardson(settings.fd_step, |s| Ok(aligned_xi(cm, &shifted(p, i, s), &xi, settings.tol_iso)?.0[k]))?;
        }
    }
    let nabla = |x: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let mut v = 0.0;
                for i in 0..n {
                    let mut c = dxi[i][k];
                    for j in 0..n {
                        c += pack.gamma[[k, i, j]] * xi[j];
                    }
                    v += x[i] * c;
                }
                v
            })
            .collect()
    };
    let basis = &frame.horizontal;
    let mut frob = 0.0;
    for (a, ea) in basis.iter().enumerate() {
        let d = nabla(ea);
        for (b, eb) in basis.iter().enumerate() {
            let ii = jet.inner(&d, eb);
            let target = if a == b { alpha } else { 0.0 };
            frob += (ii - target).powi(2);
        }
    }
    Ok(frob.sqrt() / (1.0 + alpha.abs()))
}

/// Largest umbilicity deviation along a trace.
pub fn umbilicity_residual(cm: &CompiledMetric, trace: &LeafTrace, settings: &Settings) -> Result<f64> {
    let mut worst = 0.0_f64;
    for p in &trace.points {
        worst = worst.max(umbilicity_at(cm, p, None, settings)?);
    }
    Ok(worst)
}

/// Unit horizontal drift `(w − g(w,ξ)ξ)/|·|` at `q`; independent of the
/// sign of ξ.
fn horizontal_drift(cm: &CompiledMetric, q: &[f64], w: &[f64], settings: &Settings) -> Result<Vec<f64>> {
    let f = local_frame(cm, q, settings.tol_iso)?;
    let c = f.jet.inner(w, &f.xi);
    let v: Vec<f64> = w.iter().zip(&f.xi).map(|(a, x)| a - c * x).collect();
    let norm = f.jet.inner(&v, &v).sqrt();
    let wn = f.jet.inner(w, w).sqrt();
    if !(norm > 1e-8 * wn) {
        return Err(Error::StepTooLarge { point: q.to_vec() });
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

fn rk4<F>(p: &[f64], h: f64, mut field: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: f64, x: &[f64]| -> Vec<f64> { p.iter().zip(x).map(|(pi, xi)| pi + a * xi).collect() };
    let k1 = field(p)?;
    let k2 = field(&axpy(h / 2.0, &k1))?;
    let k3 = field(&axpy(h / 2.0, &k2))?;
    let k4 = field(&axpy(h, &k3))?;
    Ok((0..p.len())
        .map(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn left_region(step: usize, class: impl ToString, point: &[f64]) -> Error {
    Error::LeftQcRegion {
        step,
        class: class.to_string(),
        point: point.to_vec(),
    }
}

/// Traces a curve tangent to `D` from `p0` with fixed-step RK4. The drift
/// is the horizontal part of a coordinate direction drawn from
/// `direction_seed`; H, N, λ, α and the umbilicity deviation are recorded
/// at every accepted point.
pub fn integrate_leaf(
    cm: &CompiledMetric,
    p0: &[f64],
    n_steps: usize,
    step: f64,
    direction_seed: u64,
    settings: &Settings,
) -> std::result::Result<LeafTrace, TraceError> {
    let mut trace = LeafTrace {
        dimension: cm.dimension(),
        step,
        method: "rk4",
        direction_seed,
        ..LeafTrace::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(direction_seed);
    let w: Vec<f64> = (0..cm.dimension()).map(|_| StandardNormal.sample(&mut rng)).collect();

    let mut p = p0.to_vec();
    for k in 0..=n_steps {
        if let Err(error) = record(cm, &p, k, settings, &mut trace) {
            return Err(TraceError { error, partial: trace });
        }
        if k == n_steps {
            break;
        }
        match rk4(&p, step, |q| horizontal_drift(cm, q, &w, settings)) {
            Ok(next) => p = next,
            Err(Error::NearIsotropic { .. }) => {
                let error = left_region(k + 1, PointClass::Isotropic, &p);
                return Err(TraceError { error, partial: trace });
            }
            Err(error) => return Err(TraceError { error, partial: trace }),
        }
    }
    Ok(trace)
}

fn record(cm: &CompiledMetric, p: &[f64], k: usize, settings: &Settings, trace: &mut LeafTrace) -> Result<()> {
    if !cm.contains(p) {
        return Err(Error::Domain(format!("trace left the chart domain at {p:?}")));
    }
    let (_, _, report) = analyze_point(cm, p, settings)?;
    let (lambda, alpha) = match (report.class, report.lambda, report.alpha) {
        (PointClass::Qc, Some(l), Some(a)) => (l, a),
        (PointClass::Qc, _, _) => return Err(left_region(k, "near-isotropic", p)),
        (class, _, _) => return Err(left_region(k, class, p)),
    };
    let umb = umbilicity_at(cm, p, Some(alpha), settings)?;
    trace.points.push(p.to_vec());
    trace.h_values.push(report.h);
    trace.n_values.push(report.n);
    trace.lambda_values.push(lambda);
    trace.alpha_values.push(alpha);
    trace.umbilicity_residuals.push(umb);
    Ok(())
}

/// Integral curve of the sign-aligned line field.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct XiFlowTrace {
    pub points: Vec<Vec<f64>>,
    pub h_values: Vec<f64>,
    pub n_values: Vec<f64>,
    /// `max_a |g(∇_ξ ξ, X_a)|` over a g-orthonormal basis of `D`.
    pub geodesicity: Vec<f64>,
    /// `|g(ξ, ξ) − 1|`
    pub unit_defect: Vec<f64>,
    pub step: f64,
}

/// `|g(∇_ξ ξ, X_a)|` maximized over the horizontal frame at `p`, with `ξ`
/// aligned to `reference`.
fn geodesicity_at(cm: &CompiledMetric, p: &[f64], reference: &[f64], settings: &Settings) -> Result<(f64, Vec<f64>)> {
    let (xi, frame) = aligned_xi(cm, p, reference, settings.tol_iso)?;
    let jet = &frame.jet;
    let pack = curvature_pack(jet);
    let n = jet.dim();
    let mut acc = vec![0.0; n];
    for i in 0..n {
        for (k, a) in acc.iter_mut().enumerate() {
            let d = richardson(settings.fd_step, |s| Ok(aligned_xi(cm, &shifted(p, i, s), &xi, settings.tol_iso)?.0[k]))?;
            let mut c = d;
            for j in 0..n {
                c += pack.gamma[[k, i, j]] * xi[j];
            }
            *a += xi[i] * c;
        }
    }
    let worst = frame
        .horizontal
        .iter()
        .fold(0.0_f64, |m, x| m.max(jet.inner(&acc, x).abs()));
    Ok((worst, xi))
}

fn isotropic_as_exit(step: usize, point: &[f64]) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::NearIsotropic { .. } => left_region(step, PointClass::Isotropic, point),
        e => e,
    }
}

/// RK4 flow of the line field, oriented continuously from its sign at `p0`.
pub fn xi_flow(cm: &CompiledMetric, p0: &[f64], t_end: f64, step: f64, settings: &Settings) -> Result<XiFlowTrace> {
    let mut out = XiFlowTrace {
        step,
        ..XiFlowTrace::default()
    };
    let mut reference = local_frame(cm, p0, settings.tol_iso).map_err(isotropic_as_exit(0, p0))?.xi;
    let steps = (t_end / step).round().max(0.0) as usize;
    let mut p = p0.to_vec();
    for k in 0..=steps {
        let frame = local_frame(cm, &p, settings.tol_iso).map_err(isotropic_as_exit(k, &p))?;
        let (geo, xi) = geodesicity_at(cm, &p, &reference, settings).map_err(isotropic_as_exit(k, &p))?;
        out.points.push(p.clone());
        out.h_values.push(frame.h);
        out.n_values.push(frame.n);
        out.geodesicity.push(geo);
        out.unit_defect.push((frame.jet.inner(&xi, &xi) - 1.0).abs());
        reference = xi;
        if k == steps {
            break;
        }
        let r = &reference;
        p = rk4(&p, step, |q| Ok(aligned_xi(cm, q, r, settings.tol_iso)?.0)).map_err(isotropic_as_exit(k + 1, &p))?;
        if !cm.contains(&p) {
            return Err(Error::Domain(format!("flow left the chart domain at {p:?}")));
        }
    }
    Ok(out)
}

/// Transports `p0` around a coordinate square of side `loop_scale`,
/// centred at `p0` and lifted horizontally, and returns the displacement
/// along ξ divided by the metric area of the square (dimension 3). For
/// small loops this approaches `|dη(X, Y)|`.
pub fn holonomy_defect(cm: &CompiledMetric, p0: &[f64], loop_scale: f64, settings: &Settings) -> Result<f64> {
    let dim = cm.dimension();
    if dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: dim,
        });
    }
    let (_, _, report) = analyze_point(cm, p0, settings)?;
    match report.class {
        PointClass::Qc => {}
        PointClass::Isotropic => return Err(left_region(0, PointClass::Isotropic, p0)),
        c => return Err(left_region(0, c, p0)),
    }
    let start = local_frame(cm, p0, settings.tol_iso)?;
    let eta0 = start.jet.lower(&start.xi);
    // solve for the coordinate in which ξ is most transverse
    let k = (0..3).fold(0, |b, i| if eta0[i].abs() > eta0[b].abs() { i } else { b });
    let [a, b] = match k {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let lift = |q: &[f64], axis: usize| -> Result<Vec<f64>> {
        let f = local_frame(cm, q, settings.tol_iso).map_err(isotropic_as_exit(0, q))?;
        let eta = f.jet.lower(&f.xi);
        let mut v = vec![0.0; 3];
        v[axis] = 1.0;
        v[k] = -eta[axis] / eta[k];
        Ok(v)
    };
    let s = loop_scale;
    let mut p = p0.to_vec();
    p[a] -= s / 2.0;
    p[b] -= s / 2.0;
    let start_k = p[k];
    const SUBSTEPS: usize = 8;
    let h = s / SUBSTEPS as f64;
    for (axis, sign) in [(a, 1.0), (b, 1.0), (a, -1.0), (b, -1.0)] {
        for _ in 0..SUBSTEPS {
            p = rk4(&p, sign * h, |q| lift(q, axis))?;
        }
    }
    let displacement = eta0[k] * (p[k] - start_k);
    let va = lift(p0, a)?;
    let vb = lift(p0, b)?;
    let jet = metric_jet(cm, p0)?;
    let gram = jet.inner(&va, &va) * jet.inner(&vb, &vb) - jet.inner(&va, &vb).powi(2);
    Ok(displacement.abs() / (s * s * gram.sqrt()))
}

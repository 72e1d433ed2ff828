//! Explicit hypersurfaces of revolution realizing `dr² + f(r)² g_{S^{n−1}}`
//! in `H^{n+1}_κ` (hyperboloid model) or in `R^{n+1}` when `κ = 0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{BinaryOp, Expr, Jet3, UnaryOp};
use crate::tensor::{operator_spectrum, OperatorSpectrum};

use super::hyperboloid::HyperboloidPoint;

#[derive(Debug, Clone)]
pub struct RotationalSample {
    pub point: HyperboloidPoint,
    /// Unit normal, oriented so the principal curvature along the sphere
    /// factor is positive.
    pub normal: Vec<f64>,
    pub induced_metric: DMatrix<f64>,
    pub second_form: DMatrix<f64>,
    /// `G⁻¹ h`
    pub shape_operator: DMatrix<f64>,
    /// Principal curvatures, ascending.
    pub principal: Vec<f64>,
}

/// Unit sphere embedding `ω(θ_1, …, θ_{n−1}) ∈ R^n` with angles in
/// coordinates `1..n`.
fn sphere_embedding(n: usize) -> Vec<Expr> {
    let sin = |i: usize| Expr::unary(UnaryOp::Sin, Expr::var(i));
    let cos = |i: usize| Expr::unary(UnaryOp::Cos, Expr::var(i));
    let mut out = Vec::with_capacity(n);
    let mut prefix: Option<Expr> = None;
    let times = |p: &Option<Expr>, e: Expr| match p {
        Some(p) => Expr::binary(BinaryOp::Mul, p.clone(), e),
        None => e,
    };
    for i in 1..n {
        out.push(times(&prefix, cos(i)));
        prefix = Some(times(&prefix, sin(i)));
    }
    out.push(prefix.unwrap_or_else(|| Expr::constant(1.0)));
    out
}

/// Vector orthogonal to the rows of `m` (`k × (k+1)`), by cofactors.
fn cofactor_null(m: &DMatrix<f64>) -> Vec<f64> {
    let cols = m.ncols();
    (0..cols)
        .map(|k| {
            let minor = m.clone().remove_column(k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect()
}

fn profile(f: &Expr, r: f64) -> Result<[f64; 3]> {
    let j: Jet3 = f.eval_jet3(&[r])?;
    Ok([j.value, j.d1(0), j.d2(0, 0)])
}

/// The rotational hypersurface through the chart point `p = (r, θ…)`.
///
/// For `κ > 0` the immersion is `X = (f ω, ρ sinh(√κ u), ρ cosh(√κ u))` with
/// `ρ = √(f² + 1/κ)` and `u' = √(1 + κf² − f'²)/(κρ²)`, `u(r_ref) = 0`; for
/// `κ = 0` it is `X = (f ω, z)` with `z' = √(1 − f'²)`, `z(r_ref) = 0`.
pub fn rotational_immersion(f: &Expr, kappa: f64, p: &[f64], r_ref: f64) -> Result<RotationalSample> {
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least one sphere angle".into()));
    }
    if f.max_var().is_some_and(|v| v > 0) {
        return Err(Error::InvalidArgument("warp may only depend on x0".into()));
    }
    if !(kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa = {kappa}")));
    }
    let r = p[0];
    let [fv, f1, f2] = profile(f, r)?;
    if !(fv > 0.0) {
        return Err(Error::Domain(format!("warp f({r}) = {fv} is not positive")));
    }
    let omega: Vec<Jet3> = sphere_embedding(n)
        .iter()
        .map(|e| e.eval_jet3(p))
        .collect::<Result<_>>()?;

    // (a, b) is the meridian part: two coordinates for κ > 0, one for κ = 0
    let (tail, tail_1, tail_2): (Vec<f64>, Vec<f64>, Vec<f64>) = if kappa > 0.0 {
        let s = kappa.sqrt();
        let disc_at = |t: f64| -> Result<(f64, f64)> {
            let [fv, f1, _] = profile(f, t)?;
            Ok((1.0 + kappa * fv * fv - f1 * f1, fv * fv + 1.0 / kappa))
        };
        let (disc, rho2) = disc_at(r)?;
        if disc < 0.0 {
            return Err(Error::ProfileDomainError { r, discriminant: disc });
        }
        let u_prime = |t: f64| {
            disc_at(t)
                .map(|(d, rho2)| d.sqrt() / (kappa * rho2))
                .unwrap_or(f64::NAN)
        };
        let u = if r == r_ref {
            0.0
        } else {
            let out = quadrature::integrate(u_prime, r_ref, r, 1e-14);
            if !out.integral.is_finite() {
                return Err(Error::ProfileDomainError { r, discriminant: f64::NAN });
            }
            out.integral
        };
        let rho = rho2.sqrt();
        let rho_1 = fv * f1 / rho;
        let rho_2 = (f1 * f1 + fv * f2) / rho - (fv * f1).powi(2) / rho.powi(3);
        let sq = disc.sqrt();
        let u1 = sq / (kappa * rho2);
        // d/dr of √D/(κρ²) with D' = 2f'(κf − f'')
        let d1 = 2.0 * f1 * (kappa * fv - f2);
        let u2 = if sq > 0.0 {
            d1 / (2.0 * sq * kappa * rho2) - sq * 2.0 * fv * f1 / (kappa * rho2 * rho2)
        } else if d1 == 0.0 {
            0.0
        } else {
            return Err(Error::ProfileDomainError { r, discriminant: disc });
        };
        let (sh, ch) = ((s * u).sinh(), (s * u).cosh());
        let w1 = s * u1;
        let w2 = s * u2;
        (
            vec![rho * sh, rho * ch],
            vec![rho_1 * sh + rho * w1 * ch, rho_1 * ch + rho * w1 * sh],
            vec![
                rho_2 * sh + 2.0 * rho_1 * w1 * ch + rho * w2 * ch + rho * w1 * w1 * sh,
                rho_2 * ch + 2.0 * rho_1 * w1 * sh + rho * w2 * sh + rho * w1 * w1 * ch,
            ],
        )
    } else {
        let disc_at = |t: f64| -> Result<f64> {
            let [_, f1, _] = profile(f, t)?;
            Ok(1.0 - f1 * f1)
        };
        let disc = disc_at(r)?;
        if disc < 0.0 {
            return Err(Error::ProfileDomainError { r, discriminant: disc });
        }
        let z = if r == r_ref {
            0.0
        } else {
            let out = quadrature::integrate(|t| disc_at(t).map(f64::sqrt).unwrap_or(f64::NAN), r_ref, r, 1e-14);
            if !out.integral.is_finite() {
                return Err(Error::ProfileDomainError { r, discriminant: f64::NAN });
            }
            out.integral
        };
        let z1 = disc.sqrt();
        let z2 = if z1 > 0.0 {
            -f1 * f2 / z1
        } else if f1 * f2 == 0.0 {
            0.0
        } else {
            return Err(Error::ProfileDomainError { r, discriminant: disc });
        };
        (vec![z], vec![z1], vec![z2])
    };

    let dim = n + tail.len();
    let x: Vec<f64> = omega.iter().map(|w| fv * w.value).chain(tail.iter().copied()).collect();
    // first derivatives X_a and second derivatives X_ab
    let first = |a: usize| -> Vec<f64> {
        if a == 0 {
            omega.iter().map(|w| f1 * w.value).chain(tail_1.iter().copied()).collect()
        } else {
            omega.iter().map(|w| fv * w.d1(a)).chain(tail.iter().map(|_| 0.0)).collect()
        }
    };
    let second = |a: usize, b: usize| -> Vec<f64> {
        match (a, b) {
            (0, 0) => omega.iter().map(|w| f2 * w.value).chain(tail_2.iter().copied()).collect(),
            (0, c) | (c, 0) => omega.iter().map(|w| f1 * w.d1(c)).chain(tail.iter().map(|_| 0.0)).collect(),
            _ => omega.iter().map(|w| fv * w.d2(a, b)).chain(tail.iter().map(|_| 0.0)).collect(),
        }
    };
    let point = HyperboloidPoint { coords: x.clone(), kappa };
    let tangents: Vec<Vec<f64>> = (0..n).map(first).collect();

    // rows ⟨w, ·⟩ for w in {X (κ > 0), X_a}
    let mut rows: Vec<Vec<f64>> = Vec::new();
    if kappa > 0.0 {
        rows.push(x.clone());
    }
    rows.extend(tangents.iter().cloned());
    let lowered = DMatrix::from_fn(rows.len(), dim, |i, j| {
        if kappa > 0.0 && j == dim - 1 {
            -rows[i][j]
        } else {
            rows[i][j]
        }
    });
    let mut normal = cofactor_null(&lowered);
    let nn = point.inner(&normal, &normal);
    if !(nn > 0.0) {
        return Err(Error::Domain(format!("degenerate normal at r = {r}")));
    }
    normal.iter_mut().for_each(|c| *c /= nn.sqrt());

    let induced = DMatrix::from_fn(n, n, |a, b| point.inner(&tangents[a], &tangents[b]));
    let mut h = DMatrix::from_fn(n, n, |a, b| point.inner(&second(a, b), &normal));
    // orient by the sphere-factor principal curvature h_11 / G_11
    if h[(1, 1)] < 0.0 {
        h = -h;
        normal.iter_mut().for_each(|c| *c = -*c);
    }
    let g_inv = induced
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain(format!("singular induced metric at r = {r}")))?;
    let shape = &g_inv * &h;
    let OperatorSpectrum { values, .. } = operator_spectrum(&induced, &h);
    Ok(RotationalSample {
        point,
        normal,
        induced_metric: induced,
        second_form: h,
        shape_operator: shape,
        principal: values,
    })
}

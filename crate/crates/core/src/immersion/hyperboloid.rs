//! Hyperbolic space `H^{m}_κ` as the upper sheet of `⟨x, x⟩ = −1/κ` in
//! Minkowski space (last coordinate timelike), and the Euclidean case
//! `κ = 0`.

use crate::error::{Error, Result};

/// Tolerance for the tangency and unit-norm checks on ambient vectors.
const AMBIENT_EPS: f64 = 1e-9;

/// `⟨x, y⟩ = Σ x_i y_i − x_last y_last`
pub fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() - 1;
    x[..m].iter().zip(&y[..m]).map(|(a, b)| a * b).sum::<f64>() - x[m] * y[m]
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// A point of the ambient space form: on the hyperboloid for `κ > 0`, in
/// Euclidean space for `κ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidPoint {
    pub coords: Vec<f64>,
    pub kappa: f64,
}

impl HyperboloidPoint {
    /// `(0, …, 0, 1/√κ)`
    pub fn base(dim: usize, kappa: f64) -> Result<HyperboloidPoint> {
        if !(kappa > 0.0) {
            return Err(Error::FlatAmbient);
        }
        let mut coords = vec![0.0; dim + 1];
        coords[dim] = 1.0 / kappa.sqrt();
        Ok(HyperboloidPoint { coords, kappa })
    }

    /// Inner product of the ambient space.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        if self.kappa > 0.0 {
            minkowski(x, y)
        } else {
            euclid(x, y)
        }
    }

    /// `|⟨x, x⟩ + 1/κ|`, zero on the sheet.
    pub fn sheet_defect(&self) -> f64 {
        (minkowski(&self.coords, &self.coords) + 1.0 / self.kappa).abs()
    }

    fn check_normal(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                found: v.len(),
            });
        }
        let scale = 1.0 + euclid(&self.coords, &self.coords).sqrt();
        let inner = self.inner(&self.coords, v);
        if self.kappa > 0.0 && inner.abs() > AMBIENT_EPS * scale {
            return Err(Error::NotTangent { inner });
        }
        let norm = self.inner(v, v);
        if (norm - 1.0).abs() > AMBIENT_EPS {
            return Err(Error::NotUnitNormal { norm });
        }
        Ok(())
    }
}

/// Endpoint at infinity of a geodesic ray.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    /// Future null vector `x + v/√κ`, Euclidean-normalized.
    pub null: Vec<f64>,
    /// Spatial part of the null vector over its last coordinate: a unit
    /// vector on the celestial sphere.
    pub celestial: Vec<f64>,
}

/// Limit point of the geodesic `t ↦ exp_x(t v)` on the sphere at infinity.
pub fn gauss_map(x: &HyperboloidPoint, v: &[f64]) -> Result<BoundaryPoint> {
    if !(x.kappa > 0.0) {
        return Err(Error::FlatAmbient);
    }
    x.check_normal(v)?;
    let s = x.kappa.sqrt();
    let l: Vec<f64> = x.coords.iter().zip(v).map(|(a, b)| a + b / s).collect();
    let m = l.len() - 1;
    let norm = euclid(&l, &l).sqrt();
    Ok(BoundaryPoint {
        null: l.iter().map(|c| c / norm).collect(),
        celestial: l[..m].iter().map(|c| c / l[m]).collect(),
    })
}

/// `exp_x(t v) = x cosh(√κ t) + (v/√κ) sinh(√κ t)`; `x + t v` when `κ = 0`.
pub fn normal_flow(x: &HyperboloidPoint, v: &[f64], t: f64) -> Result<HyperboloidPoint> {
    x.check_normal(v)?;
    let coords = if x.kappa > 0.0 {
        let s = x.kappa.sqrt();
        let (sh, ch) = ((s * t).sinh(), (s * t).cosh());
        x.coords.iter().zip(v).map(|(a, b)| a * ch + b / s * sh).collect()
    } else {
        x.coords.iter().zip(v).map(|(a, b)| a + t * b).collect()
    };
    Ok(HyperboloidPoint { coords, kappa: x.kappa })
}

/// Velocity of the same geodesic at time `t`.
pub fn geodesic_velocity(x: &HyperboloidPoint, v: &[f64], t: f64) -> Result<Vec<f64>> {
    x.check_normal(v)?;
    if x.kappa > 0.0 {
        let s = x.kappa.sqrt();
        let (sh, ch) = ((s * t).sinh(), (s * t).cosh());
        Ok(x.coords.iter().zip(v).map(|(a, b)| a * s * sh + b * ch).collect())
    } else {
        Ok(v.to_vec())
    }
}

/// Radius of the geodesic sphere with intrinsic curvature `h_s` in
/// `H_κ`, `d = artanh(√(κ/(H_S+κ)))/√κ`, evaluated as `asinh(√(κ/H_S))/√κ`
/// to avoid cancellation for large `H_S`.
pub fn cap_radius(h_s: f64, kappa: f64) -> Result<f64> {
    if !(h_s > 0.0) {
        return Err(Error::NoCap(h_s));
    }
    if kappa == 0.0 {
        return Err(Error::FlatAmbient);
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("kappa = {kappa}")));
    }
    let s = kappa.sqrt();
    Ok((s / h_s.sqrt()).asinh() / s)
}

/// Radius of a Euclidean sphere of curvature `h_s`.
pub fn euclidean_cap_radius(h_s: f64) -> Result<f64> {
    if !(h_s > 0.0) {
        return Err(Error::NoCap(h_s));
    }
    Ok(1.0 / h_s.sqrt())
}

/// Intrinsic curvature `κ / sinh²(√κ d)` of the geodesic sphere of radius
/// `d`; `1/d²` when `κ = 0`.
pub fn hypersphere_curvature(d: f64, kappa: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("radius d = {d}")));
    }
    if !(kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa = {kappa}")));
    }
    if kappa == 0.0 {
        return Ok(1.0 / (d * d));
    }
    let sh = (kappa.sqrt() * d).sinh();
    Ok(kappa / (sh * sh))
}

/// Volume of the unit sphere `S^{m}`, by `|S^m| = 2π/(m−1) |S^{m−2}|`.
pub fn sphere_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (m - 1) as f64 * sphere_area(m - 2),
    }
}

/// Volume of the geodesic `n`-ball in `H^n_κ` whose boundary sphere has
/// intrinsic curvature `lambda`.
pub fn ball_volume(lambda: f64, kappa: f64, n: usize) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidLambda(lambda));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension {n}")));
    }
    if !(kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!("kappa = {kappa}")));
    }
    if kappa == 0.0 {
        let r = euclidean_cap_radius(lambda)?;
        return Ok(sphere_area(n - 1) / n as f64 * r.powi(n as i32));
    }
    let r = cap_radius(lambda, kappa)?;
    let s = kappa.sqrt();
    let integrand = |t: f64| ((s * t).sinh() / s).powi(n as i32 - 1);
    let scale = r * integrand(r);
    let out = quadrature::integrate(integrand, 0.0, r, 1e-15 * scale.max(f64::MIN_POSITIVE));
    Ok(sphere_area(n - 1) * out.integral)
}

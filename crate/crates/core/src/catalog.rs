//! Built-in metrics with known curvature, and a builder for warped metrics
//! over chains of caps, tubes and space-form pieces.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, BinaryOp, Expr, UnaryOp};
use crate::metric::MetricSpec;
use crate::qc::PointClass;

/// `name = value` parameter overrides.
pub type Params = BTreeMap<String, String>;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Textbook closed form for a model space or warped product.
    ClosedForm,
    /// Independent computation (brute-force plane sampling or hand
    /// differentiation), not a quoted value.
    Computed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub class: Option<PointClass>,
    pub h: Option<f64>,
    pub n: Option<f64>,
    pub note: &'static str,
    pub basis: Basis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameter names and default values.
    pub defaults: &'static [(&'static str, &'static str)],
    pub truth: GroundTruth,
}

pub const HEISENBERG_H: f64 = -0.75;
pub const HEISENBERG_N: f64 = 0.25;

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "euclidean",
            summary: "flat R^n, identity metric",
            defaults: &[("n", "3")],
            truth: GroundTruth {
                class: Some(PointClass::Isotropic),
                h: Some(0.0),
                n: Some(0.0),
                note: "flat",
                basis: Basis::ClosedForm,
            },
        },
        CatalogEntry {
            name: "sphere",
            summary: "round sphere of curvature k > 0, polar chart",
            defaults: &[("n", "3"), ("k", "1")],
            truth: GroundTruth {
                class: Some(PointClass::Isotropic),
                h: None,
                n: None,
                note: "H = N = k",
                basis: Basis::ClosedForm,
            },
        },
        CatalogEntry {
            name: "hyperbolic",
            summary: "hyperbolic space of curvature k < 0, upper half-space chart",
            defaults: &[("n", "3"), ("k", "-1")],
            truth: GroundTruth {
                class: Some(PointClass::Isotropic),
                h: None,
                n: None,
                note: "H = N = k",
                basis: Basis::ClosedForm,
            },
        },
        CatalogEntry {
            name: "warped",
            summary: "dr^2 + f(r)^2 g_sphere with f an expression in x0",
            defaults: &[("n", "3"), ("f", "2 + sin(x0)"), ("lo", "-3"), ("hi", "3")],
            truth: GroundTruth {
                class: Some(PointClass::Qc),
                h: None,
                n: None,
                note: "H = (1 - f'^2)/f^2, N = -f''/f, xi = d/dr",
                basis: Basis::ClosedForm,
            },
        },
        CatalogEntry {
            name: "heisenberg",
            summary: "left-invariant metric dx^2 + dy^2 + (dz - x dy)^2",
            defaults: &[],
            truth: GroundTruth {
                class: Some(PointClass::Qc),
                h: Some(HEISENBERG_H),
                n: Some(HEISENBERG_N),
                note: "orthonormal frame with [X,Y] = Z; xi = Z",
                basis: Basis::Computed,
            },
        },
        CatalogEntry {
            name: "hopf_cylinder",
            summary: "product of the unit (n-1)-sphere with an interval",
            defaults: &[("n", "3"), ("length", "2")],
            truth: GroundTruth {
                class: Some(PointClass::Qc),
                h: Some(1.0),
                n: Some(0.0),
                note: "xi along the interval",
                basis: Basis::ClosedForm,
            },
        },
        CatalogEntry {
            name: "capsule",
            summary: "cap - tube - cap chain joined by flat blends",
            defaults: &[("n", "3"), ("k", "1"), ("rho", "1"), ("tube", "2"), ("delta", "0.2")],
            truth: GroundTruth {
                class: None,
                h: None,
                n: None,
                note: "isotropic caps; tube interior QC with H = 1/rho^2, N = 0",
                basis: Basis::ClosedForm,
            },
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogName(name.to_string()))
}

struct Args<'a> {
    entry: &'a CatalogEntry,
    params: &'a Params,
}

impl Args<'_> {
    fn raw(&self, key: &str) -> &str {
        self.params.get(key).map(String::as_str).unwrap_or_else(|| {
            self.entry
                .defaults
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .expect("default present")
        })
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let s = self.raw(key);
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::BadParams(format!("{key} = `{s}` is not a number")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let s = self.raw(key);
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::BadParams(format!("{key} = `{s}` is not a non-negative integer")))
    }
}

/// Builds the named catalog metric; `params` overrides the defaults.
pub fn builtin(name: &str, params: &Params) -> Result<MetricSpec> {
    let entry = entry(name)?;
    if let Some(k) = params.keys().find(|k| !entry.defaults.iter().any(|(d, _)| d == k)) {
        return Err(Error::BadParams(format!("`{name}` has no parameter `{k}`")));
    }
    let a = Args {
        entry: &entry,
        params,
    };
    match name {
        "euclidean" => euclidean(a.usize("n")?),
        "sphere" => sphere(a.usize("n")?, a.f64("k")?),
        "hyperbolic" => hyperbolic(a.usize("n")?, a.f64("k")?),
        "warped" => {
            let n = a.usize("n")?;
            check_dim(n)?;
            let f = parse_expr(a.raw("f"), n)?;
            if f.max_var().is_some_and(|v| v > 0) {
                return Err(Error::BadParams("warp may only depend on x0".into()));
            }
            warped(n, f, [a.f64("lo")?, a.f64("hi")?])
        }
        "heisenberg" => heisenberg(),
        "hopf_cylinder" => hopf_cylinder(a.usize("n")?, a.f64("length")?),
        "capsule" => capsule(
            a.usize("n")?,
            a.f64("k")?,
            a.f64("rho")?,
            a.f64("tube")?,
            a.f64("delta")?,
        ),
        _ => unreachable!("entry lookup succeeded"),
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (2..=crate::expr::MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::BadParams(format!("n = {n} outside 2..=6")))
    }
}

/// Constants are kept non-negative so the printed form re-parses to the
/// same tree.
fn c(v: f64) -> Expr {
    if v < 0.0 {
        un(UnaryOp::Neg, Expr::constant(-v))
    } else {
        Expr::constant(v)
    }
}

fn x(i: usize) -> Expr {
    Expr::var(i)
}

fn un(op: UnaryOp, a: Expr) -> Expr {
    Expr::unary(op, a)
}

fn bin(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    Expr::binary(op, a, b)
}

fn sq(a: Expr) -> Expr {
    bin(BinaryOp::Pow, a, c(2.0))
}

fn mul(a: Expr, b: Expr) -> Expr {
    bin(BinaryOp::Mul, a, b)
}

fn add(a: Expr, b: Expr) -> Expr {
    bin(BinaryOp::Add, a, b)
}

fn sub(a: Expr, b: Expr) -> Expr {
    bin(BinaryOp::Sub, a, b)
}

fn div(a: Expr, b: Expr) -> Expr {
    bin(BinaryOp::Div, a, b)
}

/// `c·e`, dropping unit factors.
fn scaled(k: f64, e: Expr) -> Expr {
    if k < 0.0 {
        un(UnaryOp::Neg, scaled(-k, e))
    } else if k == 1.0 {
        e
    } else {
        mul(c(k), e)
    }
}

fn names_for(n: usize, first: &str) -> Vec<String> {
    let mut v = vec![first.to_string()];
    for i in 1..n {
        v.push(if i == n - 1 { "phi".to_string() } else { format!("theta{i}") });
    }
    v
}

/// Angular domain of the sphere coordinates `x1 .. x_{n-1}`, kept away
/// from the coordinate singularities.
fn sphere_domain(n: usize) -> Vec<[f64; 2]> {
    (1..n)
        .map(|i| if i == n - 1 { [0.0, 2.0 * PI] } else { [0.3, PI - 0.3] })
        .collect()
}

pub fn euclidean(n: usize) -> Result<MetricSpec> {
    check_dim(n)?;
    let coords = (0..n).map(|i| format!("x{i}")).collect();
    MetricSpec::diagonal(coords, vec![[-1.0, 1.0]; n], vec![c(1.0); n])
}

/// Warped metric `dx0² + f(x0)² g_{S^{n−1}}` in polar sphere coordinates.
pub fn warped(n: usize, f: Expr, r_range: [f64; 2]) -> Result<MetricSpec> {
    check_dim(n)?;
    if !(r_range[0] < r_range[1]) {
        return Err(Error::BadParams(format!("empty interval [{}, {}]", r_range[0], r_range[1])));
    }
    let f2 = sq(f);
    let mut entries = vec![c(1.0)];
    let mut acc = f2;
    for i in 1..n {
        entries.push(acc.clone());
        acc = mul(acc, sq(un(UnaryOp::Sin, x(i))));
    }
    let mut domain = vec![r_range];
    domain.extend(sphere_domain(n));
    MetricSpec::diagonal(names_for(n, "r"), domain, entries)
}

pub fn sphere(n: usize, k: f64) -> Result<MetricSpec> {
    if !(k > 0.0) {
        return Err(Error::BadParams(format!("sphere needs k > 0, got {k}")));
    }
    let s = k.sqrt();
    // sin(√k r)/√k
    let f = if k == 1.0 {
        un(UnaryOp::Sin, x(0))
    } else {
        div(un(UnaryOp::Sin, scaled(s, x(0))), c(s))
    };
    warped(n, f, [0.2 / s, (PI - 0.2) / s])
}

/// Upper half-space chart `g = δ / (|k| x_{n−1}²)`.
pub fn hyperbolic(n: usize, k: f64) -> Result<MetricSpec> {
    check_dim(n)?;
    if !(k < 0.0) {
        return Err(Error::BadParams(format!("hyperbolic needs k < 0, got {k}")));
    }
    let e = div(c(1.0), scaled(-k, sq(x(n - 1))));
    let mut domain = vec![[-1.0, 1.0]; n];
    domain[n - 1] = [0.5, 2.0];
    let coords = (0..n).map(|i| format!("x{i}")).collect();
    MetricSpec::diagonal(coords, domain, vec![e; n])
}

/// `dx² + dy² + (dz − x dy)²`
pub fn heisenberg() -> Result<MetricSpec> {
    let z = c(0.0);
    let table = vec![
        vec![c(1.0), z.clone(), z.clone()],
        vec![z.clone(), add(c(1.0), sq(x(0))), un(UnaryOp::Neg, x(0))],
        vec![z.clone(), z.clone(), c(1.0)],
    ];
    MetricSpec::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![[-1.0, 1.0]; 3],
        table,
    )
}

/// `dt² + g_{S^{n−1}}` on an interval of the given length.
pub fn hopf_cylinder(n: usize, length: f64) -> Result<MetricSpec> {
    if !(length > 0.0) {
        return Err(Error::BadParams(format!("length must be positive, got {length}")));
    }
    warped(n, c(1.0), [-length / 2.0, length / 2.0])
}

/// Cap of curvature `k`, tube of radius `rho` and length `tube`, cap again.
/// The caps are sized so that they meet the tube with matching radius.
pub fn capsule(n: usize, k: f64, rho: f64, tube: f64, delta: f64) -> Result<MetricSpec> {
    if !(k > 0.0 && rho > 0.0 && rho * k.sqrt() <= 1.0) {
        return Err(Error::BadParams(format!(
            "capsule needs k > 0, rho > 0 and rho sqrt(k) <= 1 (k = {k}, rho = {rho})"
        )));
    }
    let cap = (rho * k.sqrt()).asin() / k.sqrt();
    graph_build(
        n,
        &GraphBuildSpec {
            segments: vec![
                Segment::Cap { k, length: cap },
                Segment::Tube { rho, length: tube },
                Segment::Cap { k, length: cap },
            ],
            delta,
        },
    )
}

/// `flat(t)/(flat(t) + flat(δ − t))` with `flat(t) = exp(−1/t)` for `t > 0`:
/// 0 for `t ≤ 0`, 1 for `t ≥ δ`, smooth and infinitely flat at both ends.
pub fn flat_bump(t: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadDelta(delta));
    }
    let a = crate::expr::flat(t);
    let b = crate::expr::flat(delta - t);
    Ok(a / (a + b))
}

fn bump_expr(t0: f64, delta: f64) -> Expr {
    let a = un(UnaryOp::Flat, sub(x(0), c(t0)));
    let b = un(UnaryOp::Flat, sub(c(t0 + delta), x(0)));
    div(a.clone(), add(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Constant curvature `k > 0` closing off the chain; allowed only at
    /// either end.
    Cap { k: f64, length: f64 },
    /// Constant radius.
    Tube { rho: f64, length: f64 },
    /// Constant curvature `k`, continuing the previous value and slope.
    FormPiece { k: f64, length: f64 },
}

impl Segment {
    fn length(&self) -> f64 {
        match *self {
            Segment::Cap { length, .. } | Segment::Tube { length, .. } | Segment::FormPiece { length, .. } => {
                length
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphBuildSpec {
    pub segments: Vec<Segment>,
    /// Width of each blend, placed right after its junction.
    pub delta: f64,
}

/// Solution of `f'' = −k f` with `f(t0) = a`, `f'(t0) = b`.
#[derive(Debug, Clone, Copy)]
struct Profile {
    k: f64,
    t0: f64,
    a: f64,
    b: f64,
}

impl Profile {
    fn value(&self, t: f64) -> f64 {
        self.value_slope(t).0
    }

    fn value_slope(&self, t: f64) -> (f64, f64) {
        let s = t - self.t0;
        let (a, b, k) = (self.a, self.b, self.k);
        if k > 0.0 {
            let w = k.sqrt();
            ((a * (w * s).cos() + b / w * (w * s).sin()), (-a * w * (w * s).sin() + b * (w * s).cos()))
        } else if k < 0.0 {
            let w = (-k).sqrt();
            ((a * (w * s).cosh() + b / w * (w * s).sinh()), (a * w * (w * s).sinh() + b * (w * s).cosh()))
        } else {
            (a + b * s, b)
        }
    }

    fn expr(&self) -> Expr {
        let s = if self.t0 == 0.0 { x(0) } else { sub(x(0), c(self.t0)) };
        let (a, b, k) = (self.a, self.b, self.k);
        if k == 0.0 {
            return match (a, b) {
                (_, 0.0) => c(a),
                (0.0, _) => scaled(b, s),
                _ => add(c(a), scaled(b, s)),
            };
        }
        let w = k.abs().sqrt();
        let (cf, sf) = if k > 0.0 {
            (UnaryOp::Cos, UnaryOp::Sin)
        } else {
            (UnaryOp::Cosh, UnaryOp::Sinh)
        };
        let arg = scaled(w, s);
        let even = scaled(a, un(cf, arg.clone()));
        let odd = scaled(b / w, un(sf, arg));
        match (a, b) {
            (0.0, _) => odd,
            (_, 0.0) => even,
            _ => add(even, odd),
        }
    }
}

/// Warped metric `dt² + f(t)² g_{S^{n−1}}` whose warp follows the segment
/// profiles exactly and switches between consecutive profiles by a flat
/// blend over `[junction, junction + δ]`.
pub fn graph_build(n: usize, spec: &GraphBuildSpec) -> Result<MetricSpec> {
    check_dim(n)?;
    let delta = spec.delta;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::BadDelta(delta));
    }
    let segs = &spec.segments;
    if segs.is_empty() {
        return Err(Error::BadParams("no segments".into()));
    }
    for (i, s) in segs.iter().enumerate() {
        let len = s.length();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::BadParams(format!("segment {i} has length {len}")));
        }
        if i > 0 && len <= delta {
            return Err(Error::BadParams(format!("segment {i} is shorter than the blend width")));
        }
        match *s {
            Segment::Cap { k, .. } => {
                if !(k > 0.0) {
                    return Err(Error::BadParams(format!("cap {i} needs k > 0")));
                }
                if i != 0 && i != segs.len() - 1 {
                    return Err(Error::BadParams(format!("cap {i} is not at an end of the chain")));
                }
            }
            Segment::Tube { rho, .. } => {
                if !(rho > 0.0) {
                    return Err(Error::BadParams(format!("tube {i} needs rho > 0")));
                }
            }
            Segment::FormPiece { k, .. } => {
                if !k.is_finite() {
                    return Err(Error::BadParams(format!("form piece {i} has curvature {k}")));
                }
            }
        }
    }
    let total: f64 = segs.iter().map(Segment::length).sum();

    let mut profiles: Vec<Profile> = Vec::new();
    let mut starts = Vec::new();
    let mut t = 0.0;
    for (i, s) in segs.iter().enumerate() {
        let prev = profiles.last().map(|p: &Profile| p.value_slope(t));
        let profile = match *s {
            Segment::Cap { k, .. } if i == 0 => Profile { k, t0: 0.0, a: 0.0, b: 1.0 },
            // closing cap, vanishing at the far end
            Segment::Cap { k, .. } => Profile { k, t0: total, a: 0.0, b: -1.0 },
            Segment::Tube { rho, .. } => Profile { k: 0.0, t0: t, a: rho, b: 0.0 },
            Segment::FormPiece { k, .. } => match prev {
                Some((a, b)) => Profile { k, t0: t, a, b },
                None => return Err(Error::BadParams("a chain cannot start with a form piece".into())),
            },
        };
        if let Some((left, _)) = prev {
            let right = profile.value(t);
            if (left - right).abs() > 1e-9 * (1.0 + left.abs().max(right.abs())) {
                return Err(Error::JunctionMismatch { t, left, right });
            }
        }
        profiles.push(profile);
        starts.push(t);
        t += s.length();
    }

    let mut f = profiles[0].expr();
    for i in 1..profiles.len() {
        let jump = sub(profiles[i].expr(), profiles[i - 1].expr());
        f = add(f, mul(bump_expr(starts[i], delta), jump));
    }

    let closed_start = matches!(segs[0], Segment::Cap { .. });
    let closed_end = segs.len() > 1 && matches!(segs[segs.len() - 1], Segment::Cap { .. })
        || segs.len() == 1 && closed_start && {
            let Segment::Cap { k, length } = segs[0] else { unreachable!() };
            (k.sqrt() * length - PI).abs() < 1e-12
        };
    let margin = 0.02 * total;
    let lo = if closed_start { margin } else { 0.0 };
    let hi = if closed_end { total - margin } else { total };

    const SAMPLES: usize = 2000;
    for s in 0..=SAMPLES {
        let t = lo + (hi - lo) * s as f64 / SAMPLES as f64;
        let value = f.eval(&[t])?;
        if !(value > 0.0) {
            return Err(Error::NonpositiveWarp { t, value });
        }
    }
    warped(n, f, [lo, hi])
}

//! Metric specifications and their compiled, evaluatable form.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet3, ParseError, Parser, Tape};

/// Relative threshold for the positive-definiteness check, scaled by the
/// largest diagonal entry of `g`.
pub const PD_EPS: f64 = 1e-12;

/// A Riemannian metric `g_ij(x)` on a box-shaped coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    dimension: usize,
    coords: Vec<String>,
    domain: Vec<[f64; 2]>,
    /// Upper triangle, row-major: (0,0), (0,1), .., (0,n-1), (1,1), ..
    components: Vec<Expr>,
}

fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl MetricSpec {
    /// Builds a spec from a full component table; `components[i][j]` for
    /// `j < i` is ignored.
    pub fn new(
        coords: Vec<String>,
        domain: Vec<[f64; 2]>,
        components: Vec<Vec<Expr>>,
    ) -> Result<MetricSpec> {
        let n = domain.len();
        if !(2..=crate::expr::MAX_DIM).contains(&n) {
            return Err(Error::Spec(format!("dimension {n} outside 2..=6")));
        }
        if coords.len() != n || components.len() != n || components.iter().any(|r| r.len() != n) {
            return Err(Error::Spec("coords, domain and components disagree on dimension".into()));
        }
        for (k, [lo, hi]) in domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Spec(format!("bad domain interval {k}: [{lo}, {hi}]")));
            }
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in components.into_iter().enumerate() {
            for (j, e) in row.into_iter().enumerate().skip(i) {
                if e.max_var().is_some_and(|v| v >= n) {
                    return Err(Error::Spec(format!("component {i}{j} uses a variable beyond x{}", n - 1)));
                }
                upper.push(e);
            }
        }
        Ok(MetricSpec {
            dimension: n,
            coords,
            domain,
            components: upper,
        })
    }

    /// Diagonal metric `diag(entries)`.
    pub fn diagonal(coords: Vec<String>, domain: Vec<[f64; 2]>, entries: Vec<Expr>) -> Result<MetricSpec> {
        let n = entries.len();
        let mut full = vec![vec![Expr::Const(0.0); n]; n];
        for (i, e) in entries.into_iter().enumerate() {
            full[i][i] = e;
        }
        MetricSpec::new(coords, domain, full)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[packed(self.dimension, i, j)]
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dimension
            && p.iter().zip(&self.domain).all(|(x, [lo, hi])| *lo <= *x && *x <= *hi)
    }

    /// Parses the TOML document format:
    ///
    /// ```toml
    /// dimension = 2
    /// coords = ["theta", "phi"]
    /// domain = [[0.1, 3.0], [-3.0, 3.0]]
    /// [g]
    /// "00" = "1"
    /// "11" = "sin(theta)^2"
    /// ```
    ///
    /// Absent entries are zero; only keys `"ij"` with `i <= j` are accepted.
    pub fn from_toml_str(src: &str) -> Result<MetricSpec> {
        let file: MetricFile = toml::from_str(src).map_err(|e| Error::Spec(e.to_string()))?;
        file.into_spec()
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<MetricSpec> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
        MetricSpec::from_toml_str(&src)
    }

    pub fn to_toml_string(&self) -> String {
        let n = self.dimension;
        let mut g = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let e = self.component(i, j);
                if *e != Expr::Const(0.0) {
                    g.insert(format!("{i}{j}"), e.to_string());
                }
            }
        }
        let file = MetricFile {
            dimension: n,
            coords: Some(self.coords.clone()),
            domain: self.domain.clone(),
            g,
        };
        toml::to_string(&file).expect("metric spec serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricFile {
    dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<String>>,
    domain: Vec<[f64; 2]>,
    #[serde(default)]
    g: BTreeMap<String, String>,
}

impl MetricFile {
    fn into_spec(self) -> Result<MetricSpec> {
        let n = self.dimension;
        if !(2..=crate::expr::MAX_DIM).contains(&n) {
            return Err(Error::Spec(format!("dimension {n} outside 2..=6")));
        }
        if self.domain.len() != n {
            return Err(Error::Spec(format!("domain has {} intervals, expected {n}", self.domain.len())));
        }
        let coords = match self.coords {
            Some(c) if c.len() == n => c,
            Some(c) => {
                return Err(Error::Spec(format!("coords has {} names, expected {n}", c.len())));
            }
            None => (0..n).map(|i| format!("x{i}")).collect(),
        };
        let parser = Parser::new(n, &coords).map_err(Error::Parse)?;
        let mut full = vec![vec![Expr::Const(0.0); n]; n];
        let mut errors: Vec<(String, ParseError)> = Vec::new();
        for (key, src) in &self.g {
            let (i, j) = parse_key(key, n)?;
            match parser.parse(src) {
                Ok(e) => full[i][j] = e,
                Err(e) => errors.push((key.clone(), e)),
            }
        }
        if !errors.is_empty() {
            return Err(Error::Compile(errors));
        }
        MetricSpec::new(coords, self.domain, full)
    }
}

fn parse_key(key: &str, n: usize) -> Result<(usize, usize)> {
    let digits: Vec<usize> = key.chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
    if key.len() != 2 || digits.len() != 2 {
        return Err(Error::Spec(format!("component key `{key}` must be two digits")));
    }
    let (i, j) = (digits[0], digits[1]);
    if i >= n || j >= n {
        return Err(Error::Spec(format!("component key `{key}` out of range for dimension {n}")));
    }
    if i > j {
        return Err(Error::Spec(format!(
            "component key `{key}` is in the lower triangle; use \"{j}{i}\""
        )));
    }
    Ok((i, j))
}

/// Component jets of `g` at one point, symmetric by construction.
#[derive(Debug, Clone)]
pub struct ComponentJets {
    n: usize,
    jets: Vec<Jet3>,
}

impl ComponentJets {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet3 {
        &self.jets[packed(self.n, i, j)]
    }

    pub fn values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).value)
    }
}

/// Immutable, shareable evaluator for a [`MetricSpec`].
#[derive(Debug, Clone)]
pub struct CompiledMetric {
    spec: MetricSpec,
    tape: Tape,
}

impl CompiledMetric {
    pub fn spec(&self) -> &MetricSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.spec.contains(p)
    }

    /// Jets of all components at `p`, after checking that `g(p)` is
    /// positive definite.
    pub fn jets(&self, p: &[f64]) -> Result<ComponentJets> {
        let n = self.dimension();
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        let jets = ComponentJets {
            n,
            jets: self.tape.eval_jets(p)?,
        };
        check_positive_definite(&jets.values(), p)?;
        Ok(jets)
    }

    /// `g(p)` only.
    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dimension();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.spec.component(i, j).eval(p)?;
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        check_positive_definite(&out, p)?;
        Ok(out)
    }
}

fn check_positive_definite(g: &DMatrix<f64>, p: &[f64]) -> Result<()> {
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite metric component at {p:?}")));
    }
    let scale = g.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let min_eigenvalue = SymmetricEigen::new(g.clone()).eigenvalues.min();
    if scale == 0.0 || min_eigenvalue <= PD_EPS * scale {
        return Err(Error::DegenerateMetric {
            point: p.to_vec(),
            min_eigenvalue,
        });
    }
    Ok(())
}

/// Compiles every component into a single shared evaluation tape.
pub fn compile_metric(spec: MetricSpec) -> CompiledMetric {
    let n = spec.dimension;
    let mut exprs = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            exprs.push(spec.component(i, j).clone());
        }
    }
    let tape = Tape::compile(n, &exprs);
    CompiledMetric { spec, tape }
}

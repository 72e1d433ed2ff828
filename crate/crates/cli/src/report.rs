//! Report envelope and per-point records shared by the commands.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use qcgeom::qc::{PointClass, QcReport, Settings};
use qcgeom::tensor::{anisotropy, weitzenboeck_gm, CurvaturePack, MetricJet};
use qcgeom::MetricSpec;

use crate::failure::Failure;
use crate::json;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report<C, R, S> {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub spec_hash: String,
    pub command: C,
    pub seed: u64,
    pub settings: Settings,
    pub records: Vec<R>,
    pub summary: S,
}

impl<C: Serialize, R: Serialize, S: Serialize> Report<C, R, S> {
    pub fn new(spec: &MetricSpec, command: C, settings: Settings, records: Vec<R>, summary: S) -> Self {
        Report {
            schema: SCHEMA,
            tool: "qcgeom",
            version: env!("CARGO_PKG_VERSION"),
            spec_hash: spec_hash(spec),
            command,
            seed: settings.seed,
            settings,
            records,
            summary,
        }
    }

    /// Writes to `path`, or stdout when absent.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), Failure> {
        let bytes = json::to_bytes(self).map_err(|e| Failure::input(format!("json: {e}")))?;
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

/// SHA-256 of the canonical TOML form, so formatting of the input file does
/// not matter.
pub fn spec_hash(spec: &MetricSpec) -> String {
    hex::encode(Sha256::digest(spec.to_toml_string().as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Isotropic,
    /// `|H − N| < ε` but not isotropic.
    VEpsilon,
    QcOutside,
    NonQc,
}

impl Region {
    pub fn of(report: &QcReport, epsilon: f64) -> Region {
        match report.class {
            PointClass::Isotropic => Region::Isotropic,
            PointClass::NonQc => Region::NonQc,
            PointClass::Qc if report.schouten_gap < epsilon => Region::VEpsilon,
            PointClass::Qc => Region::QcOutside,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub class: PointClass,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub xi: Option<Vec<f64>>,
    pub decomposition_residual: f64,
    pub schouten_gap: f64,
    #[serde(rename = "G_1")]
    pub g1: f64,
    #[serde(rename = "G_2")]
    pub g2: f64,
    pub anisotropy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

impl PointRecord {
    pub fn new(p: &[f64], jet: &MetricJet, pack: &CurvaturePack, report: QcReport, planes: usize, seed: u64) -> Self {
        let extremal = (report.class == PointClass::Qc).then_some((report.h, report.n));
        PointRecord {
            point: p.to_vec(),
            class: report.class,
            h: report.h,
            n: report.n,
            lambda: report.lambda,
            alpha: report.alpha,
            xi: report.xi,
            decomposition_residual: report.decomposition_residual,
            schouten_gap: report.schouten_gap,
            g1: weitzenboeck_gm(pack, 1).expect("dimension >= 3"),
            g2: weitzenboeck_gm(pack, 2).expect("dimension >= 3"),
            anisotropy: anisotropy(jet, pack, planes, seed, extremal),
            region: None,
        }
    }
}

/// Per-point seed, independent of scheduling.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Range {
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl Range {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Range {
        values.into_iter().fold(Range::default(), |r, v| Range {
            min: Some(r.min.map_or(v, |m| m.min(v))),
            max: Some(r.max.map_or(v, |m| m.max(v))),
        })
    }
}

//! One function per subcommand.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use qcgeom::catalog::{self, Params};
use qcgeom::immersion::{
    choose_kappa, codazzi_residual, gauss_residual, kappa_from_min, second_fundamental_form, solve_gauss_n3,
    GaussBranch,
};
use qcgeom::leaf::{holonomy_defect, integrate_leaf, LeafTrace};
use qcgeom::qc::{analyze_point, integrability_check, PointClass, Settings};
use qcgeom::tensor::{ricci_spectrum, schouten_spectrum, weitzenboeck_gm};
use qcgeom::{compile_metric, CompiledMetric, Error, MetricSpec};

use crate::failure::{exit_kind, ExitKind, Failure};
use crate::grid::{parse_point, Grid};
use crate::report::{point_seed, PointRecord, Range, Region, Report};

pub struct Loaded {
    pub spec: MetricSpec,
    pub cm: CompiledMetric,
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let spec = MetricSpec::from_toml_file(path)?;
    let cm = compile_metric(spec.clone());
    Ok(Loaded { spec, cm })
}

fn require_inside(cm: &CompiledMetric, p: &[f64]) -> Result<(), Failure> {
    if cm.contains(p) {
        Ok(())
    } else {
        Err(Failure::domain(format!(
            "point {p:?} is outside the chart domain {:?}",
            cm.spec().domain()
        )))
    }
}

fn grid_inside(cm: &CompiledMetric, grid: &Grid) -> Result<(), Failure> {
    for (axis, [lo, hi]) in grid.axes.iter().zip(cm.spec().domain()) {
        if axis.lo < *lo || axis.hi > *hi {
            return Err(Failure::domain(format!(
                "grid axis {}:{} leaves the chart domain [{lo}, {hi}]",
                axis.lo, axis.hi
            )));
        }
    }
    Ok(())
}

fn with_point(p: &[f64]) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure {
        kind: exit_kind(&e),
        message: format!("at {p:?}: {e}"),
    }
}

// ---------------------------------------------------------------- analyze

#[derive(Debug, Serialize)]
pub struct AnalyzeCommand {
    pub name: &'static str,
    pub point: Vec<f64>,
    pub planes: usize,
}

#[derive(Debug, Serialize)]
pub struct CurvatureSummary {
    pub scalar: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub schouten_eigenvalues: Vec<f64>,
    pub weyl_norm: f64,
    pub cotton_norm: f64,
    /// `G_1 … G_{n−1}`
    pub weitzenboeck: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeSummary {
    pub curvature: CurvatureSummary,
    /// `|dη(X, Y)|` on the horizontal plane (dimension 3, QC points).
    pub integrability_residual: Option<f64>,
}

pub fn analyze(
    loaded: &Loaded,
    point: &str,
    planes: usize,
    settings: Settings,
) -> Result<Report<AnalyzeCommand, PointRecord, AnalyzeSummary>, Failure> {
    let cm = &loaded.cm;
    let p = parse_point(point, cm.dimension()).map_err(Failure::input)?;
    require_inside(cm, &p)?;
    let (jet, pack, report) = analyze_point(cm, &p, &settings).map_err(with_point(&p))?;
    let n = cm.dimension();
    let integrability_residual = if n == 3 && report.lambda.is_some() {
        Some(integrability_check(cm, &p, &settings).map_err(with_point(&p))?)
    } else {
        None
    };
    let curvature = CurvatureSummary {
        scalar: pack.scalar,
        ricci_eigenvalues: ricci_spectrum(&pack).values,
        schouten_eigenvalues: schouten_spectrum(&pack).values,
        weyl_norm: pack.weyl_norm(),
        cotton_norm: pack.cotton_norm(),
        weitzenboeck: (1..n).map(|m| weitzenboeck_gm(&pack, m).expect("1 <= m < n")).collect(),
    };
    let record = PointRecord::new(&p, &jet, &pack, report, planes, point_seed(settings.seed, 0));
    Ok(Report::new(
        &loaded.spec,
        AnalyzeCommand {
            name: "analyze",
            point: p,
            planes,
        },
        settings,
        vec![record],
        AnalyzeSummary {
            curvature,
            integrability_residual,
        },
    ))
}

// ---------------------------------------------------------------- scan

#[derive(Debug, Serialize)]
pub struct ScanCommand {
    pub name: &'static str,
    pub grid: Grid,
    pub epsilon: f64,
    pub planes: usize,
}

#[derive(Debug, Default, Serialize)]
pub struct RegionCounts {
    pub isotropic: usize,
    pub v_epsilon: usize,
    pub qc_outside: usize,
    pub non_qc: usize,
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub points: usize,
    pub counts: RegionCounts,
    #[serde(rename = "H")]
    pub h: Range,
    #[serde(rename = "N")]
    pub n: Range,
    pub lambda: Range,
    /// `1 − min H` when `min H ≤ 0`, else 0, over the grid.
    pub kappa: Option<f64>,
}

pub fn scan(
    loaded: &Loaded,
    grid: &str,
    epsilon: f64,
    planes: usize,
    settings: Settings,
) -> Result<Report<ScanCommand, PointRecord, ScanSummary>, Failure> {
    let cm = &loaded.cm;
    let grid = Grid::parse(grid, cm.dimension()).map_err(Failure::input)?;
    if !(epsilon > 0.0) {
        return Err(Failure::input(format!("epsilon must be positive, got {epsilon}")));
    }
    grid_inside(cm, &grid)?;
    let records = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let (jet, pack, report) = analyze_point(cm, &p, &settings).map_err(with_point(&p))?;
            let region = Region::of(&report, epsilon);
            let mut rec = PointRecord::new(&p, &jet, &pack, report, planes, point_seed(settings.seed, i));
            rec.region = Some(region);
            Ok(rec)
        })
        .collect::<Vec<Result<PointRecord, Failure>>>()
        .into_iter()
        .collect::<Result<Vec<_>, Failure>>()?;

    let mut counts = RegionCounts::default();
    for r in &records {
        match r.region.expect("set above") {
            Region::Isotropic => counts.isotropic += 1,
            Region::VEpsilon => counts.v_epsilon += 1,
            Region::QcOutside => counts.qc_outside += 1,
            Region::NonQc => counts.non_qc += 1,
        }
    }
    let meaningful = || records.iter().filter(|r| r.class != PointClass::NonQc);
    let h = Range::of(meaningful().map(|r| r.h));
    let summary = ScanSummary {
        points: records.len(),
        counts,
        h,
        n: Range::of(meaningful().map(|r| r.n)),
        lambda: Range::of(records.iter().filter_map(|r| r.lambda)),
        kappa: h.min.map(kappa_from_min),
    };
    Ok(Report::new(
        &loaded.spec,
        ScanCommand {
            name: "scan",
            grid,
            epsilon,
            planes,
        },
        settings,
        records,
        summary,
    ))
}

// ---------------------------------------------------------------- leaf

#[derive(Debug, Serialize)]
pub struct LeafCommand {
    pub name: &'static str,
    pub point: Vec<f64>,
    pub steps: usize,
    pub step: f64,
    pub direction_seed: u64,
    pub holonomy_scale: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct LeafRecord {
    pub step: usize,
    pub point: Vec<f64>,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub umbilicity_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct Holonomy {
    pub loop_scale: f64,
    pub defect: f64,
    pub integrability_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct LeafSummary {
    pub points: usize,
    pub method: &'static str,
    #[serde(rename = "H_drift")]
    pub h_drift: f64,
    pub lambda_drift: f64,
    pub max_umbilicity_residual: f64,
    pub aborted: Option<String>,
    pub holonomy: Option<Holonomy>,
}

pub struct LeafArgs<'a> {
    pub point: &'a str,
    pub steps: usize,
    pub step: f64,
    pub direction_seed: u64,
    pub holonomy: Option<f64>,
    pub csv: Option<&'a PathBuf>,
}

pub type LeafReport = Report<LeafCommand, LeafRecord, LeafSummary>;

/// Runs the trace. An aborted trace still yields a report (and CSV); the
/// failure is returned next to it.
pub fn leaf(loaded: &Loaded, args: LeafArgs<'_>, settings: Settings) -> Result<(LeafReport, Option<Failure>), Failure> {
    let cm = &loaded.cm;
    let p0 = parse_point(args.point, cm.dimension()).map_err(Failure::input)?;
    if !(args.step > 0.0 && args.step.is_finite()) {
        return Err(Failure::input(format!("step must be positive, got {}", args.step)));
    }
    require_inside(cm, &p0)?;

    let (trace, abort) = match integrate_leaf(cm, &p0, args.steps, args.step, args.direction_seed, &settings) {
        Ok(t) => (t, None),
        Err(e) => {
            let failure = Failure {
                kind: ExitKind::TraceAborted,
                message: e.to_string(),
            };
            (e.partial, Some(failure))
        }
    };
    let trace = LeafTrace {
        step: args.step,
        method: "rk4",
        direction_seed: args.direction_seed,
        ..trace
    };
    if let Some(path) = args.csv {
        let file = std::fs::File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        trace.write_csv(std::io::BufWriter::new(file))?;
    }

    let holonomy = match (args.holonomy, &abort) {
        (Some(scale), None) => Some(Holonomy {
            loop_scale: scale,
            defect: holonomy_defect(cm, &p0, scale, &settings).map_err(with_point(&p0))?,
            integrability_residual: integrability_check(cm, &p0, &settings).map_err(with_point(&p0))?,
        }),
        _ => None,
    };

    let records = (0..trace.len())
        .map(|k| LeafRecord {
            step: k,
            point: trace.points[k].clone(),
            h: trace.h_values[k],
            n: trace.n_values[k],
            lambda: trace.lambda_values[k],
            alpha: trace.alpha_values[k],
            umbilicity_residual: trace.umbilicity_residuals[k],
        })
        .collect();
    let summary = LeafSummary {
        points: trace.len(),
        method: trace.method,
        h_drift: trace.h_drift(),
        lambda_drift: trace.lambda_drift(),
        max_umbilicity_residual: trace.max_umbilicity(),
        aborted: abort.as_ref().map(|f| f.message.clone()),
        holonomy,
    };
    let report = Report::new(
        &loaded.spec,
        LeafCommand {
            name: "leaf",
            point: p0,
            steps: args.steps,
            step: args.step,
            direction_seed: args.direction_seed,
            holonomy_scale: args.holonomy,
        },
        settings,
        records,
        summary,
    );
    Ok((report, abort))
}

// ---------------------------------------------------------------- immerse

#[derive(Debug, Serialize)]
pub struct ImmerseCommand {
    pub name: &'static str,
    pub grid: Grid,
    pub kappa_grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Unique,
    Family,
    None,
}

#[derive(Debug, Serialize)]
pub struct GaussSystem {
    pub mu: f64,
    pub nu: f64,
    pub branch: Branch,
    pub nu_sign: i8,
}

#[derive(Debug, Serialize)]
pub struct ImmerseRecord {
    pub point: Vec<f64>,
    pub class: PointClass,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub gauss_residual: Option<f64>,
    pub codazzi_residual: Option<f64>,
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_system: Option<GaussSystem>,
}

#[derive(Debug, Default, Serialize)]
pub struct BranchCounts {
    pub unique_positive: usize,
    pub unique_negative: usize,
    pub family: usize,
}

#[derive(Debug, Serialize)]
pub struct ImmerseSummary {
    pub kappa: f64,
    pub min_h: f64,
    pub kappa_argmin: Vec<f64>,
    pub kappa_samples: usize,
    pub points: usize,
    pub skipped: usize,
    pub max_gauss_residual: Option<f64>,
    pub max_codazzi_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branches: Option<BranchCounts>,
}

fn gauss_system(h: f64, n: f64, kappa: f64, tol: f64) -> Result<GaussSystem, Error> {
    let mu = h + kappa;
    let mut nu = n + kappa;
    if nu.abs() <= tol * (1.0 + mu.abs()) {
        nu = 0.0;
    }
    let sol = solve_gauss_n3(mu, nu)?;
    Ok(GaussSystem {
        mu,
        nu,
        branch: match sol.branch {
            GaussBranch::Unique => Branch::Unique,
            GaussBranch::Family => Branch::Family,
            GaussBranch::None => Branch::None,
        },
        nu_sign: if nu > 0.0 {
            1
        } else if nu < 0.0 {
            -1
        } else {
            0
        },
    })
}

pub fn immerse(
    loaded: &Loaded,
    grid: &str,
    kappa_grid: Option<&str>,
    settings: Settings,
) -> Result<Report<ImmerseCommand, ImmerseRecord, ImmerseSummary>, Failure> {
    let cm = &loaded.cm;
    let dim = cm.dimension();
    let grid = Grid::parse(grid, dim).map_err(Failure::input)?;
    let kgrid = match kappa_grid {
        Some(src) => Grid::parse(src, dim).map_err(Failure::input)?,
        None => grid.clone(),
    };
    grid_inside(cm, &grid)?;
    grid_inside(cm, &kgrid)?;
    let kpoints = kgrid.points();
    let choice = choose_kappa(cm, &kpoints, settings.tol_iso)?;
    let kappa = choice.kappa;

    let records = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let (jet, pack, report) = analyze_point(cm, &p, &settings).map_err(with_point(&p))?;
            let mut rec = ImmerseRecord {
                point: p.clone(),
                class: report.class,
                h: report.h,
                n: report.n,
                gauss_residual: None,
                codazzi_residual: None,
                note: None,
                gauss_system: None,
            };
            if report.class == PointClass::NonQc {
                rec.note = Some("not quasi-constant".into());
                return Ok(rec);
            }
            let h = second_fundamental_form(&jet, &report, kappa).map_err(with_point(&p))?;
            rec.gauss_residual = Some(gauss_residual(&jet, &pack, &h, kappa));
            match codazzi_residual(cm, &p, kappa, &settings) {
                Ok(c) => rec.codazzi_residual = Some(c),
                Err(e @ (Error::StencilClassificationChange { .. } | Error::NotQuasiConstant { .. })) => {
                    rec.note = Some(e.to_string())
                }
                Err(e) => return Err(with_point(&p)(e)),
            }
            if dim == 3 {
                rec.gauss_system = Some(gauss_system(report.h, report.n, kappa, settings.tol_iso).map_err(with_point(&p))?);
            }
            Ok(rec)
        })
        .collect::<Vec<Result<ImmerseRecord, Failure>>>()
        .into_iter()
        .collect::<Result<Vec<_>, Failure>>()?;

    let max = |f: fn(&ImmerseRecord) -> Option<f64>| records.iter().filter_map(f).reduce(f64::max);
    let branches = (dim == 3).then(|| {
        let mut c = BranchCounts::default();
        for g in records.iter().filter_map(|r| r.gauss_system.as_ref()) {
            match (g.branch, g.nu_sign) {
                (Branch::Unique, s) if s > 0 => c.unique_positive += 1,
                (Branch::Unique, _) => c.unique_negative += 1,
                (Branch::Family, _) => c.family += 1,
                (Branch::None, _) => {}
            }
        }
        c
    });
    let summary = ImmerseSummary {
        kappa,
        min_h: choice.min_h,
        kappa_argmin: choice.argmin,
        kappa_samples: choice.samples,
        points: records.len(),
        skipped: records.iter().filter(|r| r.gauss_residual.is_none()).count(),
        max_gauss_residual: max(|r| r.gauss_residual),
        max_codazzi_residual: max(|r| r.codazzi_residual),
        branches,
    };
    Ok(Report::new(
        &loaded.spec,
        ImmerseCommand {
            name: "immerse",
            grid,
            kappa_grid: kgrid,
        },
        settings,
        records,
        summary,
    ))
}

// ---------------------------------------------------------------- catalog

pub fn catalog_list() -> String {
    let mut out = String::new();
    for e in catalog::entries() {
        let defaults: Vec<String> = e.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("{:<14} {}\n", e.name, e.summary));
        if !defaults.is_empty() {
            out.push_str(&format!("{:<14} defaults: {}\n", "", defaults.join(", ")));
        }
        out.push_str(&format!("{:<14} expected: {}\n", "", e.truth.note));
    }
    out
}

pub fn catalog_emit(name: &str, params: &[(String, String)]) -> Result<String, Failure> {
    let params: Params = params.iter().cloned().collect();
    Ok(catalog::builtin(name, &params)?.to_toml_string())
}

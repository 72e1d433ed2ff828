//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p qcgeom-cli --test acceptance`. Exits nonzero if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

use qcgeom::catalog::{self, Params};
use qcgeom::expr::parse_expr;
use qcgeom::immersion::{
    ball_volume, cap_radius, choose_kappa, codazzi_residual, gauss_n3_residuals, gauss_residual,
    hypersphere_curvature, rotational_immersion, second_fundamental_form, solve_gauss_n3, GaussBranch,
    GaussN3Solution,
};
use qcgeom::leaf::{holonomy_defect, integrate_leaf};
use qcgeom::qc::{analyze_point, classify_point, integrability_check, PointClass, Settings};
use qcgeom::tensor::{
    anisotropy, curvature_pack, metric_jet, ricci_spectrum, schouten_spectrum, sectional, weitzenboeck_gm,
    PlaneSampler,
};
use qcgeom::{compile_metric, CompiledMetric, Error};

type Outcome = Result<String, String>;

fn cat(name: &str, params: &[(&str, &str)]) -> CompiledMetric {
    let p: Params = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    compile_metric(catalog::builtin(name, &p).unwrap())
}

fn random_points(cm: &CompiledMetric, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = cm.spec().domain().to_vec();
    (0..count)
        .map(|_| {
            dom.iter()
                .map(|[lo, hi]| {
                    let m = 0.02 * (hi - lo);
                    rng.random_range(lo + m..hi - m)
                })
                .collect()
        })
        .collect()
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure!(
        elapsed.as_secs_f64() < limit,
        "{what} took {:.1} s, limit {limit} s",
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn constant_curvature() -> Outcome {
    let start = Instant::now();
    let s = Settings::default();
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut count = 0;
    for n in [3usize, 4, 5] {
        let ns = n.to_string();
        let cases = [
            ("sphere", [1.0, 4.0, 0.5][n - 3]),
            ("hyperbolic", [-1.0, -2.0, -0.5][n - 3]),
            ("euclidean", 0.0),
        ];
        for (name, k) in cases {
            let ks = k.to_string();
            let cm = if name == "euclidean" {
                cat(name, &[("n", &ns)])
            } else {
                cat(name, &[("n", &ns), ("k", &ks)])
            };
            for (i, p) in random_points(&cm, 100, 1 + n as u64).iter().enumerate() {
                let jet = metric_jet(&cm, p).map_err(|e| e.to_string())?;
                let pack = curvature_pack(&jet);
                let rep = classify_point(&jet, &pack, &s).map_err(|e| e.to_string())?;
                ensure!(rep.class == PointClass::Isotropic, "{name} n={n} {p:?} is {}", rep.class);
                let dh = (rep.h - k).abs();
                ensure!(dh < 1e-8, "{name} n={n} {p:?}: |H - k| = {dh:.2e}");
                let wc = pack.weyl_norm().max(pack.cotton_norm());
                ensure!(wc < 1e-9, "{name} n={n} {p:?}: Weyl/Cotton {wc:.2e}");
                let an = anisotropy(&jet, &pack, 64, i as u64, None);
                ensure!(an < 1e-8, "{name} n={n} {p:?}: anisotropy {an:.2e}");
                worst = (worst.0.max(dh), worst.1.max(wc), worst.2.max(an));
                count += 1;
            }
        }
    }
    within(start.elapsed(), 10.0, "constant-curvature sweep")?;
    Ok(format!(
        "{count} points, max |H-k| {:.1e}, max Weyl/Cotton {:.1e}, max anisotropy {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn qc_decomposition() -> Outcome {
    let start = Instant::now();
    let s = Settings::default();
    let mut sampler = PlaneSampler::new(2024);
    let mut worst = 0.0_f64;
    let mut planes = 0;
    for (name, params) in [
        ("warped", &[][..]),
        ("warped", &[("n", "4")][..]),
        ("heisenberg", &[][..]),
    ] {
        let cm = cat(name, params);
        for p in random_points(&cm, 100, 7) {
            let jet = metric_jet(&cm, &p).map_err(|e| e.to_string())?;
            let pack = curvature_pack(&jet);
            let rep = classify_point(&jet, &pack, &s).map_err(|e| e.to_string())?;
            ensure!(rep.class != PointClass::NonQc, "{name} {p:?} is non-QC");
            for _ in 0..100 {
                let (u, v) = sampler.plane(&jet);
                let k = sectional(&jet, &pack, &u, &v).map_err(|e| e.to_string())?;
                let c2 = match &rep.xi {
                    Some(xi) => jet.inner(&u, xi).powi(2) + jet.inner(&v, xi).powi(2),
                    None => 0.0,
                };
                let err = (k - (rep.h * (1.0 - c2) + rep.n * c2)).abs();
                ensure!(err < 1e-7, "{name} {p:?}: |K - model| = {err:.2e}");
                worst = worst.max(err);
                planes += 1;
            }
        }
    }
    within(start.elapsed(), 30.0, "decomposition sweep")?;
    Ok(format!("{planes} planes, max error {worst:.1e}"))
}

fn close_sorted(got: &[f64], mut want: Vec<f64>) -> f64 {
    want.sort_by(f64::total_cmp);
    got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn spectrum_identities() -> Outcome {
    let s = Settings::default();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (name, params) in [
        ("warped", &[][..]),
        ("warped", &[("n", "4")][..]),
        ("warped", &[("n", "5")][..]),
        ("heisenberg", &[][..]),
        ("hopf_cylinder", &[("n", "4")][..]),
    ] {
        let cm = cat(name, params);
        let n = cm.dimension();
        let nf = n as f64;
        for p in random_points(&cm, 50, 3) {
            let jet = metric_jet(&cm, &p).map_err(|e| e.to_string())?;
            let pack = curvature_pack(&jet);
            let rep = classify_point(&jet, &pack, &s).map_err(|e| e.to_string())?;
            if rep.class != PointClass::Qc {
                continue;
            }
            let (h, nn) = (rep.h, rep.n);
            let mut ric = vec![(nf - 2.0) * h + nn; n - 1];
            ric.push((nf - 1.0) * nn);
            let mut sch = vec![h / 2.0; n - 1];
            sch.push(nn - h / 2.0);
            let m = h.min(nn);
            let mut errs = vec![
                close_sorted(&ricci_spectrum(&pack).values, ric),
                close_sorted(&schouten_spectrum(&pack).values, sch),
                (weitzenboeck_gm(&pack, 1).unwrap() - (nn + (nf - 2.0) * m)).abs(),
                (weitzenboeck_gm(&pack, 2).unwrap() - (2.0 * nn + (nf - 2.0) * h + (nf - 4.0) * m)).abs(),
            ];
            if n >= 4 {
                let g3 = 3.0 * nn + 2.0 * (nf - 3.0) * h + (nf - 6.0) * m;
                errs.push((weitzenboeck_gm(&pack, 3).unwrap() - g3).abs());
            }
            let e = errs.into_iter().fold(0.0, f64::max);
            ensure!(e < 1e-8, "{name} {p:?}: error {e:.2e}");
            worst = worst.max(e);
            count += 1;
        }
    }
    ensure!(count > 100, "only {count} QC points sampled");
    Ok(format!("{count} QC points, Ricci/Schouten/G_m max error {worst:.1e}"))
}

fn heisenberg_fixture() -> Outcome {
    let s = Settings::default();
    let cm = cat("heisenberg", &[]);
    let points = random_points(&cm, 50, 41);
    let (mut h_rng, mut n_rng) = ([f64::INFINITY, -f64::INFINITY], [f64::INFINITY, -f64::INFINITY]);
    let mut alpha_max = 0.0_f64;
    let mut cotton_min = f64::INFINITY;
    for p in &points {
        let (_, pack, rep) = analyze_point(&cm, p, &s).map_err(|e| e.to_string())?;
        ensure!(rep.class == PointClass::Qc, "{p:?} is {}", rep.class);
        let (alpha, lambda) = (rep.alpha.ok_or("missing alpha")?, rep.lambda.ok_or("missing lambda")?);
        ensure!((lambda - rep.h).abs() < 1e-10, "{p:?}: lambda {lambda} vs H {}", rep.h);
        alpha_max = alpha_max.max(alpha.abs());
        h_rng = [h_rng[0].min(rep.h), h_rng[1].max(rep.h)];
        n_rng = [n_rng[0].min(rep.n), n_rng[1].max(rep.n)];
        cotton_min = cotton_min.min(pack.cotton_norm());
    }
    ensure!(h_rng[1] - h_rng[0] < 1e-8, "H varies over {h_rng:?}");
    ensure!(n_rng[1] - n_rng[0] < 1e-8, "N varies over {n_rng:?}");
    ensure!(h_rng[1] < 0.0 && n_rng[0] > 0.0, "sign pattern H < 0 < N violated");
    ensure!(alpha_max < 1e-6, "|alpha| up to {alpha_max:.2e}");
    ensure!(cotton_min > 1e-3, "Cotton norm down to {cotton_min:.2e}");
    let mut integ = Vec::new();
    let mut hol = Vec::new();
    for p in points.iter().take(10) {
        integ.push(integrability_check(&cm, p, &s).map_err(|e| e.to_string())?);
        hol.push(holonomy_defect(&cm, p, 0.05, &s).map_err(|e| e.to_string())?);
    }
    for (what, v) in [("integrability", &integ), ("holonomy", &hol)] {
        let off = v.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
        ensure!(off < 0.05, "{what} residual off 1 by {off:.3}");
    }
    Ok(format!(
        "H = {:.10}, N = {:.10} at {} points (constancy and H < 0 < N asserted, values not pinned), \
         max|alpha| {alpha_max:.1e}, integrability {:.4}, holonomy {:.4}, min Cotton {cotton_min:.3}",
        h_rng[0],
        n_rng[0],
        points.len(),
        integ[0],
        hol[0]
    ))
}

/// `h + c g` with `c = 0.1 (1 + max|h|)`.
fn corrupted(h: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    h + g * (0.1 * (1.0 + h.abs().max()))
}

fn gauss_codazzi() -> Outcome {
    let s = Settings::default();
    let mut worst_gauss = 0.0_f64;
    let mut worst_codazzi = 0.0_f64;
    let mut min_bad = f64::INFINITY;
    let mut checked = 0;
    let mut skipped = 0;
    let mut metrics = 0;
    for (name, params) in [
        ("euclidean", &[][..]),
        ("sphere", &[][..]),
        ("hyperbolic", &[][..]),
        ("warped", &[][..]),
        ("warped", &[("n", "4")][..]),
        ("hopf_cylinder", &[][..]),
        ("capsule", &[][..]),
    ] {
        let cm = cat(name, params);
        let points = random_points(&cm, 100, 53);
        let kappa = choose_kappa(&cm, &points, s.tol_iso).map_err(|e| e.to_string())?.kappa;
        metrics += 1;
        for p in &points {
            let jet = metric_jet(&cm, p).map_err(|e| e.to_string())?;
            let pack = curvature_pack(&jet);
            let rep = classify_point(&jet, &pack, &s).map_err(|e| e.to_string())?;
            if rep.class == PointClass::NonQc {
                skipped += 1;
                continue;
            }
            let h = second_fundamental_form(&jet, &rep, kappa).map_err(|e| e.to_string())?;
            let gauss = gauss_residual(&jet, &pack, &h, kappa);
            ensure!(gauss < 1e-8, "{name} {p:?}: Gauss residual {gauss:.2e}");
            let bad = gauss_residual(&jet, &pack, &corrupted(&h, &jet.g), kappa);
            ensure!(bad > 1e-3, "{name} {p:?}: corrupted h passes Gauss ({bad:.2e})");
            let codazzi = match codazzi_residual(&cm, p, kappa, &s) {
                Ok(c) => c,
                // difference stencil crosses a class boundary
                Err(Error::StencilClassificationChange { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(format!("{name} {p:?}: {e}")),
            };
            ensure!(codazzi < 1e-6, "{name} {p:?}: Codazzi residual {codazzi:.2e}");
            worst_gauss = worst_gauss.max(gauss);
            worst_codazzi = worst_codazzi.max(codazzi);
            min_bad = min_bad.min(bad);
            checked += 1;
        }
    }
    // Heisenberg is not conformally flat, so the construction does not apply
    let heis = cat("heisenberg", &[]);
    let hk = choose_kappa(&heis, &[vec![0.0; 3]], s.tol_iso).map_err(|e| e.to_string())?.kappa;
    let heis_codazzi = codazzi_residual(&heis, &[0.1, 0.2, 0.3], hk, &s).map_err(|e| e.to_string())?;
    Ok(format!(
        "{metrics} metrics, {checked} points ({skipped} non-QC or stencil-straddling skipped), \
         max Gauss {worst_gauss:.1e}, max Codazzi {worst_codazzi:.1e}, corrupted h min Gauss {min_bad:.1e}; \
         heisenberg excluded (not conformally flat), its Codazzi residual {heis_codazzi:.3}"
    ))
}

fn rotational() -> Outcome {
    let s = Settings::default();
    let mut worst_g = 0.0_f64;
    let mut worst_k = 0.0_f64;
    let mut count = 0;
    for (params, f_src) in [
        (&[][..], "2 + sin(x0)"),
        (&[("n", "4")][..], "2 + sin(x0)"),
        (&[("f", "1 + 0.3*x0^2"), ("lo", "-2"), ("hi", "2")][..], "1 + 0.3*x0^2"),
    ] {
        let cm = cat("warped", params);
        let n = cm.dimension();
        let f = parse_expr(f_src, n).map_err(|e| e.to_string())?;
        let points = random_points(&cm, 50, 61);
        let kappa = choose_kappa(&cm, &points, s.tol_iso).map_err(|e| e.to_string())?.kappa;
        for p in &points {
            let sample = rotational_immersion(&f, kappa, p, 0.0).map_err(|e| format!("{f_src} {p:?}: {e}"))?;
            let jet = metric_jet(&cm, p).map_err(|e| e.to_string())?;
            let pack = curvature_pack(&jet);
            let rep = classify_point(&jet, &pack, &s).map_err(|e| e.to_string())?;
            let dg = (&sample.induced_metric - &jet.g).abs().max();
            ensure!(dg < 1e-8, "{f_src} {p:?}: metric error {dg:.2e}");
            let a = (rep.h + kappa).sqrt();
            let mut want = vec![a; n - 1];
            want.push((rep.n + kappa) / a);
            let dk = close_sorted(&sample.principal, want);
            ensure!(dk < 1e-6, "{f_src} {p:?}: principal curvature error {dk:.2e}");
            worst_g = worst_g.max(dg);
            worst_k = worst_k.max(dk);
            count += 1;
        }
    }
    Ok(format!(
        "{count} points on 3 warped specs, metric error {worst_g:.1e}, principal curvature error {worst_k:.1e}"
    ))
}

fn cap_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut worst = 0.0_f64;
    let mut samples = 0;
    for kappa in [0.5, 1.0, 2.0] {
        let mut hs: Vec<f64> = (0..200).map(|_| 10f64.powf(rng.random_range(-6.0..3.0))).collect();
        hs.extend([1e-12, 1e3, 1.0, kappa]);
        for h_s in hs {
            let d = cap_radius(h_s, kappa).map_err(|e| e.to_string())?;
            let back = hypersphere_curvature(d, kappa).map_err(|e| e.to_string())?;
            let rel = (back - h_s).abs() / h_s;
            ensure!(rel < 1e-12, "kappa {kappa}, H_S {h_s:e}: relative error {rel:.2e}");
            worst = worst.max(rel);
            samples += 1;
        }
        for h_s in [0.0, -1e-9, -3.0] {
            ensure!(
                matches!(cap_radius(h_s, kappa), Err(Error::NoCap(_))),
                "H_S = {h_s} did not yield NoCap"
            );
        }
        for n in 2..=6 {
            let lambdas: Vec<f64> = (0..40).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
            let vols = lambdas
                .iter()
                .map(|&l| ball_volume(l, kappa, n))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| e.to_string())?;
            ensure!(
                vols.windows(2).all(|w| w[1] < w[0]),
                "ball volume not decreasing in lambda (kappa {kappa}, n {n})"
            );
            let tail = ball_volume(1e12, kappa, n).map_err(|e| e.to_string())?;
            ensure!(tail < 1e-10 * vols[0], "ball volume at lambda = 1e12 is {tail:e}");
        }
    }
    Ok(format!(
        "{samples} round trips, max relative error {worst:.1e}; NoCap for H_S <= 0; \
         ball volume decreasing in lambda and vanishing as lambda grows"
    ))
}

fn gauss_n3_system() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let mu = rng.random_range(0.01..10.0);
        let nu = rng.random_range(0.01..10.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let sol = solve_gauss_n3(mu, nu).map_err(|e| e.to_string())?;
        ensure!(sol.branch == GaussBranch::Unique, "({mu}, {nu}) gave {:?}", sol.branch);
        let h = sol.h.ok_or("unique branch without h")?;
        let r = gauss_n3_residuals(mu, nu, &h).iter().map(|x| x.abs()).fold(0.0, f64::max);
        ensure!(r < 1e-12, "({mu}, {nu}): residual {r:.2e}");
        worst = worst.max(r);
    }
    let mu = 1.7;
    let sol = solve_gauss_n3(mu, 0.0).map_err(|e| e.to_string())?;
    ensure!(sol.branch == GaussBranch::Family, "nu = 0 gave {:?}", sol.branch);
    let mut fam_worst = 0.0_f64;
    for _ in 0..5 {
        let h11 = rng.random_range(0.2..3.0);
        let h12 = rng.random_range(-2.0..2.0);
        let h = GaussN3Solution::family_member(mu, h11, h12).map_err(|e| e.to_string())?;
        ensure!(h[2][2] == 0.0 && h[0][2] == 0.0 && h[1][2] == 0.0, "family member {h:?}");
        let r = gauss_n3_residuals(mu, 0.0, &h).iter().map(|x| x.abs()).fold(0.0, f64::max);
        ensure!(r < 1e-12, "family member residual {r:.2e}");
        fam_worst = fam_worst.max(r);
    }
    Ok(format!(
        "20 unique solutions, max residual {worst:.1e}; nu = 0 gives the family, 5 members with \
         h33 = h13 = h23 = 0, max residual {fam_worst:.1e}"
    ))
}

fn leaf_traces() -> Outcome {
    let s = Settings::default();
    let (mut hd, mut ld, mut um) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut traces = 0;
    for (params, p0) in [
        (&[][..], vec![1.0, 1.5, 3.0]),
        (&[("n", "4")][..], vec![-2.0, 1.6, 1.4, 3.0]),
        (&[("f", "1 + 0.3*x0^2"), ("lo", "-2"), ("hi", "2")][..], vec![0.8, 1.5, 3.0]),
    ] {
        let cm = cat("warped", params);
        for seed in 0..3 {
            let t = integrate_leaf(&cm, &p0, 200, 0.005, seed, &s).map_err(|e| e.to_string())?;
            ensure!(t.len() == 201, "trace has {} points", t.len());
            let (h0, l0) = (t.h_values[0], t.lambda_values[0]);
            ensure!(t.h_drift() < 1e-6 * (1.0 + h0.abs()), "H drift {:.2e}", t.h_drift());
            ensure!(t.lambda_drift() < 1e-5 * (1.0 + l0.abs()), "lambda drift {:.2e}", t.lambda_drift());
            ensure!(t.max_umbilicity() < 1e-5, "umbilicity {:.2e}", t.max_umbilicity());
            for k in 0..t.len() {
                let (l, h, a) = (t.lambda_values[k], t.h_values[k], t.alpha_values[k]);
                ensure!(l == h + a * a, "lambda != H + alpha^2 at step {k}");
            }
            hd = hd.max(t.h_drift());
            ld = ld.max(t.lambda_drift());
            um = um.max(t.max_umbilicity());
            traces += 1;
        }
    }
    Ok(format!(
        "{traces} traces of 200 steps, max H drift {hd:.1e}, lambda drift {ld:.1e}, umbilicity {um:.1e}, \
         lambda = H + alpha^2 exact"
    ))
}

fn qcgeom(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qcgeom"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "qcgeom {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn emit(dir: &Path, name: &str, params: &[&str]) -> Result<PathBuf, String> {
    let path = dir.join(format!("{name}{}.toml", params.join("_")));
    let mut args = vec!["catalog", "emit", name, "-o", path.to_str().unwrap()];
    for p in params {
        args.extend(["--param", p]);
    }
    qcgeom(&args)?;
    Ok(path)
}

fn num(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("not a number: {v}"))
}

fn capsule_scan() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for (rho, k) in [(1.0_f64, 1.0_f64), (0.5, 1.0)] {
        let (tube, delta) = (2.0, 0.2);
        let params = [format!("rho={rho}"), format!("k={k}")];
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let m = emit(dir.path(), "capsule", &params)?;
        let cap = (rho * k.sqrt()).asin() / k.sqrt();
        let total = 2.0 * cap + tube;
        let (lo, hi) = (0.02 * total + 1e-9, 0.98 * total - 1e-9);
        let grid = format!("{lo}:{hi}:100,0.5:2.6:10,0.1:6.1:10");
        let start = Instant::now();
        let out = qcgeom(&["scan", "-m", m.to_str().unwrap(), "--grid", &grid, "--threads", "8"])?;
        let elapsed = start.elapsed();
        within(elapsed, 60.0, "capsule scan")?;
        let report: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let records = report["records"].as_array().ok_or("no records")?;
        ensure!(records.len() == 10_000, "{} records", records.len());
        let (mut caps, mut tubes, mut worst, mut min_lambda) = (0, 0, 0.0_f64, f64::INFINITY);
        for rec in records {
            let r = num(&rec["point"][0])?;
            let class = rec["class"].as_str().unwrap_or("");
            if r < cap || r > cap + tube + delta {
                ensure!(class == "isotropic", "cap point r = {r} is {class}");
                caps += 1;
            } else if r > cap + delta && r < cap + tube {
                ensure!(class == "qc", "tube point r = {r} is {class}");
                let err = (num(&rec["H"])? - 1.0 / (rho * rho)).abs().max(num(&rec["N"])?.abs());
                ensure!(err < 1e-6, "tube point r = {r}: (H, N) off by {err:.2e}");
                let lambda = num(&rec["lambda"])?;
                ensure!(lambda > 0.0, "tube point r = {r}: lambda = {lambda}");
                worst = worst.max(err);
                min_lambda = min_lambda.min(lambda);
                tubes += 1;
            }
        }
        ensure!(caps > 0 && tubes > 0, "caps {caps}, tubes {tubes}");
        lines.push(format!(
            "rho {rho}: {caps} isotropic cap points, {tubes} QC tube points, (H,N) error {worst:.1e}, \
             min lambda {min_lambda:.3}, 10^4 points in {:.1} s",
            elapsed.as_secs_f64()
        ));
    }
    Ok(lines.join("; "))
}

fn determinism() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let warped = emit(dir.path(), "warped", &[])?;
    let capsule = emit(dir.path(), "capsule", &[])?;
    let heis = emit(dir.path(), "heisenberg", &[])?;
    let (w, c, h) = (warped.to_str().unwrap(), capsule.to_str().unwrap(), heis.to_str().unwrap());
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("analyze", vec!["analyze", "-m", w, "-p", "1.0,1.2,0.4"]),
        ("scan", vec!["scan", "-m", c, "--grid", "0.2:4.9:40,0.5:2.5:4,0.1:6:4"]),
        ("leaf", vec!["leaf", "-m", h, "-p", "0.1,0.2,0.3", "--steps", "50", "--holonomy", "0.05"]),
        ("immerse", vec!["immerse", "-m", w, "--grid", "-2.5:2.5:20,0.5:2.5:3,0.1:6:3"]),
    ];
    let mut runs = 0;
    for (label, args) in &commands {
        let mut reference: Option<Vec<u8>> = None;
        for threads in ["1", "2", "8", "8"] {
            let mut full = args.clone();
            full.extend(["--seed", "7", "--threads", threads]);
            let out = qcgeom(&full)?;
            serde_json::from_slice::<Value>(&out).map_err(|e| format!("{label}: {e}"))?;
            match &reference {
                None => reference = Some(out),
                Some(r) => ensure!(*r == out, "{label} output differs at {threads} threads"),
            }
            runs += 1;
        }
    }
    let a = qcgeom(&["catalog", "emit", "capsule"])?;
    let b = qcgeom(&["catalog", "emit", "capsule"])?;
    ensure!(a == b, "catalog emit differs between runs");
    Ok(format!(
        "{runs} runs of analyze/scan/leaf/immerse at 1, 2 and 8 threads byte-identical; catalog emit stable"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("constant-curvature sanity", constant_curvature),
        ("QC decomposition", qc_decomposition),
        ("spectrum identities", spectrum_identities),
        ("Heisenberg fixture", heisenberg_fixture),
        ("Gauss-Codazzi", gauss_codazzi),
        ("rotational cross-check", rotational),
        ("cap/hypersphere inverse", cap_identity),
        ("n=3 Gauss system", gauss_n3_system),
        ("leaf properties", leaf_traces),
        ("cap-tube-cap scan", capsule_scan),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Pipeline invariants checked on random points of every catalog metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcgeom::catalog::{self, Params};
use qcgeom::immersion::{choose_kappa, gauss_residual, second_fundamental_form};
use qcgeom::qc::{analyze_point, classify_point, PointClass, QcReport, Settings};
use qcgeom::tensor::{
    curvature_pack, metric_jet, ricci_spectrum, schouten_spectrum, sectional, weitzenboeck_gm, CurvaturePack,
    MetricJet, PlaneSampler,
};
use qcgeom::{compile_metric, CompiledMetric};

fn cat(name: &str, params: &[(&str, &str)]) -> CompiledMetric {
    let p: Params = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    compile_metric(catalog::builtin(name, &p).unwrap())
}

/// Every catalog entry at its defaults plus a few higher-dimensional and
/// rescaled variants.
fn all_metrics() -> Vec<(String, CompiledMetric)> {
    let mut out: Vec<(String, CompiledMetric)> = catalog::names()
        .into_iter()
        .map(|n| (n.to_string(), cat(n, &[])))
        .collect();
    for (name, params) in [
        ("sphere", &[("n", "4"), ("k", "4")][..]),
        ("hyperbolic", &[("n", "4"), ("k", "-2")][..]),
        ("warped", &[("n", "4")][..]),
        ("warped", &[("n", "5"), ("f", "cosh(x0)"), ("lo", "-1"), ("hi", "1")][..]),
        ("hopf_cylinder", &[("n", "5")][..]),
        ("capsule", &[("n", "4"), ("rho", "0.5")][..]),
    ] {
        out.push((format!("{name}{params:?}"), cat(name, params)));
    }
    out
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

fn pack_at(cm: &CompiledMetric, p: &[f64]) -> (MetricJet, CurvaturePack) {
    let jet = metric_jet(cm, p).unwrap();
    let pack = curvature_pack(&jet);
    (jet, pack)
}

#[test]
fn riemann_symmetries_and_schouten_trace() {
    for (name, cm) in all_metrics() {
        let n = cm.dimension();
        for p in random_points(&cm, 100, 11) {
            let (_, pack) = pack_at(&cm, &p);
            let r = &pack.riemann;
            let scale = 1.0 + r.max_abs();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let v = r[[i, j, k, l]];
                            let bianchi = v + r[[i, k, l, j]] + r[[i, l, j, k]];
                            assert!((v + r[[j, i, k, l]]).abs() < 1e-10 * scale, "{name} {p:?}");
                            assert!((v + r[[i, j, l, k]]).abs() < 1e-10 * scale, "{name} {p:?}");
                            assert!((v - r[[k, l, i, j]]).abs() < 1e-10 * scale, "{name} {p:?}");
                            assert!(bianchi.abs() < 1e-10 * scale, "{name} {p:?}");
                        }
                    }
                }
            }
            let trace: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| pack.g_inv[(i, j)] * pack.schouten[(i, j)])
                .sum();
            let want = pack.scalar / (2.0 * (n as f64 - 1.0));
            assert!((trace - want).abs() < 1e-10 * (1.0 + pack.scalar.abs()), "{name} {p:?}");
            if n == 3 {
                assert!(pack.weyl_norm() < 1e-10 * scale, "{name}");
            }
        }
    }
}

#[test]
fn cotton_vanishes_for_constant_curvature() {
    for (name, params) in [
        ("euclidean", &[("n", "3")][..]),
        ("euclidean", &[("n", "5")][..]),
        ("sphere", &[][..]),
        ("sphere", &[("n", "4"), ("k", "4")][..]),
        ("hyperbolic", &[][..]),
        ("hyperbolic", &[("n", "5"), ("k", "-0.5")][..]),
    ] {
        let cm = cat(name, params);
        for p in random_points(&cm, 50, 5) {
            let (_, pack) = pack_at(&cm, &p);
            assert!(pack.cotton_norm() < 1e-10, "{name} {params:?} {p:?}: {}", pack.cotton_norm());
            assert!(pack.weyl_norm() < 1e-10 * (1.0 + pack.riemann.max_abs()));
        }
    }
}

fn close_sorted(got: &[f64], mut want: Vec<f64>, tol: f64) -> bool {
    want.sort_by(f64::total_cmp);
    got.iter().zip(&want).all(|(a, b)| (a - b).abs() < tol)
}

#[test]
fn qc_operator_spectra_and_weitzenboeck_closed_forms() {
    let s = Settings::default();
    for (name, params) in [
        ("warped", &[][..]),
        ("warped", &[("n", "4")][..]),
        ("warped", &[("n", "5")][..]),
        ("heisenberg", &[][..]),
        ("hopf_cylinder", &[][..]),
        ("hopf_cylinder", &[("n", "4")][..]),
        ("hopf_cylinder", &[("n", "5")][..]),
    ] {
        let cm = cat(name, params);
        let n = cm.dimension();
        let nf = n as f64;
        let mut checked = 0;
        for p in random_points(&cm, 100, 3) {
            let (jet, pack) = pack_at(&cm, &p);
            let rep = classify_point(&jet, &pack, &s).unwrap();
            if rep.class != PointClass::Qc {
                continue;
            }
            checked += 1;
            let (h, nn) = (rep.h, rep.n);
            let tol = 1e-8 * (1.0 + h.abs() + nn.abs());
            let mut ric = vec![(nf - 2.0) * h + nn; n - 1];
            ric.push((nf - 1.0) * nn);
            assert!(close_sorted(&ricci_spectrum(&pack).values, ric, tol), "{name} {p:?}");
            let mut sch = vec![h / 2.0; n - 1];
            sch.push(nn - h / 2.0);
            assert!(close_sorted(&schouten_spectrum(&pack).values, sch, tol), "{name} {p:?}");

            let m = h.min(nn);
            let g1 = nn + (nf - 2.0) * m;
            let g2 = 2.0 * nn + (nf - 2.0) * h + (nf - 4.0) * m;
            assert!((weitzenboeck_gm(&pack, 1).unwrap() - g1).abs() < tol, "{name} G1");
            assert!((weitzenboeck_gm(&pack, 2).unwrap() - g2).abs() < tol, "{name} G2");
            assert!((g2 - (pack.scalar / (nf - 1.0) + (nf - 4.0) * m)).abs() < tol);
            if n >= 4 {
                let g3 = 3.0 * nn + 2.0 * (nf - 3.0) * h + (nf - 6.0) * m;
                assert!((weitzenboeck_gm(&pack, 3).unwrap() - g3).abs() < tol, "{name} G3");
            }
        }
        assert!(checked > 50, "{name}: only {checked} QC points");
    }
}

/// `K(π) = H sin²θ + N cos²θ` where `cos²θ` is the squared length of the
/// projection of ξ onto `π`.
fn decomposed(jet: &MetricJet, rep: &QcReport, u: &[f64], v: &[f64]) -> f64 {
    let xi = rep.xi.as_ref().unwrap();
    let c2 = jet.inner(u, xi).powi(2) + jet.inner(v, xi).powi(2);
    rep.h * (1.0 - c2) + rep.n * c2
}

#[test]
fn sectional_curvature_decomposes_on_qc_points() {
    let s = Settings::default();
    let mut sampler = PlaneSampler::new(99);
    for (name, cm) in all_metrics() {
        let n = cm.dimension();
        for p in random_points(&cm, 100, 17) {
            let (jet, pack, rep) = analyze_point(&cm, &p, &s).unwrap();
            let scale = 1.0 + rep.h.abs() + rep.n.abs();
            match rep.class {
                PointClass::Qc => {
                    for _ in 0..100 {
                        let (u, v) = sampler.plane(&jet);
                        let k = sectional(&jet, &pack, &u, &v).unwrap();
                        let want = decomposed(&jet, &rep, &u, &v);
                        assert!((k - want).abs() < 1e-8 * scale, "{name} {p:?}: {k} vs {want}");
                    }
                    // extremal planes
                    let xi = rep.xi.clone().unwrap();
                    let (a, b) = sampler.plane(&jet);
                    let proj = |w: &[f64]| -> Vec<f64> {
                        let c = jet.inner(w, &xi);
                        w.iter().zip(&xi).map(|(wi, x)| wi - c * x).collect()
                    };
                    let (ha, hb) = (proj(&a), proj(&b));
                    let k_perp = sectional(&jet, &pack, &ha, &hb).unwrap();
                    assert!((k_perp - rep.h).abs() < 1e-8 * scale, "{name} K(D)");
                    let k_par = sectional(&jet, &pack, &xi, &ha).unwrap();
                    assert!((k_par - rep.n).abs() < 1e-8 * scale, "{name} K(xi)");

                    if let (Some(lambda), Some(alpha)) = (rep.lambda, rep.alpha) {
                        assert_eq!(lambda, rep.h + alpha * alpha, "{name}");
                        assert!(lambda - rep.h >= 0.0);
                    }
                }
                PointClass::Isotropic => {
                    let want = pack.scalar / (n * (n - 1)) as f64;
                    assert!((rep.h - want).abs() <= s.tol_iso * (1.0 + want.abs()), "{name} {p:?}");
                }
                PointClass::NonQc => {
                    assert!(name == "heisenberg" || name.starts_with("capsule"), "{name} {p:?} is non-QC");
                }
            }
        }
    }
}

#[test]
fn gauss_equation_holds_with_sampled_kappa() {
    let s = Settings::default();
    for (name, cm) in all_metrics() {
        let points = random_points(&cm, 60, 23);
        let kappa = choose_kappa(&cm, &points, s.tol_iso).unwrap().kappa;
        let mut checked = 0;
        for p in &points {
            let (jet, pack) = pack_at(&cm, p);
            let rep = classify_point(&jet, &pack, &s).unwrap();
            if rep.class == PointClass::NonQc || rep.h + kappa <= 0.0 {
                continue;
            }
            let h = second_fundamental_form(&jet, &rep, kappa).unwrap();
            let res = gauss_residual(&jet, &pack, &h, kappa);
            assert!(res < 1e-8, "{name} {p:?}: {res}");
            checked += 1;
        }
        assert!(checked > 0, "{name}");
    }
}

#[test]
fn catalog_annotations_are_reproduced() {
    let s = Settings::default();
    for entry in catalog::entries() {
        let cm = cat(entry.name, &[]);
        let truth = &entry.truth;
        for p in random_points(&cm, 30, 29) {
            let (jet, pack) = pack_at(&cm, &p);
            let rep = classify_point(&jet, &pack, &s).unwrap();
            if let Some(class) = truth.class {
                assert_eq!(rep.class, class, "{} {p:?}", entry.name);
            }
            if let Some(h) = truth.h {
                assert!((rep.h - h).abs() < 1e-8, "{} H = {}", entry.name, rep.h);
            }
            if let Some(n) = truth.n {
                assert!((rep.n - n).abs() < 1e-8, "{} N = {}", entry.name, rep.n);
            }
            match entry.name {
                "sphere" => assert!((rep.h - 1.0).abs() < 1e-8 && (rep.n - 1.0).abs() < 1e-8),
                "hyperbolic" => assert!((rep.h + 1.0).abs() < 1e-8 && (rep.n + 1.0).abs() < 1e-8),
                "warped" => {
                    let r = p[0];
                    let f = 2.0 + r.sin();
                    let h = r.sin().powi(2) / (f * f);
                    let nn = r.sin() / f;
                    assert!((rep.h - h).abs() < 1e-8 && (rep.n - nn).abs() < 1e-8, "{p:?}");
                }
                _ => {}
            }
        }
    }
}

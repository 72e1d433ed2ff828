use proptest::prelude::*;

use crate::catalog::{self, Params};
use crate::expr::parse_expr;
use crate::metric::{compile_metric, CompiledMetric};
use crate::tensor::{curvature_pack, metric_jet, sectional, PlaneSampler};

use super::*;

fn cat(name: &str, params: &[(&str, &str)]) -> CompiledMetric {
    let p: Params = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    compile_metric(catalog::builtin(name, &p).unwrap())
}

fn bulge() -> CompiledMetric {
    cat("warped", &[])
}

/// Closed forms for f = 2 + sin r.
fn bulge_closed(r: f64) -> (f64, f64, f64) {
    let (s, c) = r.sin_cos();
    let f = 2.0 + s;
    ((1.0 - c * c) / (f * f), s / f, f)
}

#[test]
fn sphere_is_isotropic() {
    let cm = cat("sphere", &[("n", "4")]);
    let (_, _, r) = analyze_point(&cm, &[1.0, 0.9, 1.3, 2.0], &Settings::default()).unwrap();
    assert_eq!(r.class, PointClass::Isotropic);
    assert!((r.h - 1.0).abs() < 1e-10 && (r.n - 1.0).abs() < 1e-10);
    assert!(r.xi.is_none() && r.lambda.is_none());
}

#[test]
fn warped_point_is_qc_along_radius() {
    let cm = bulge();
    let p = [1.0, 1.2, 0.7];
    let (jet, pack, r) = analyze_point(&cm, &p, &Settings::default()).unwrap();
    assert_eq!(r.class, PointClass::Qc);
    assert!(r.decomposition_residual < 1e-8);
    let (h, n, f) = bulge_closed(p[0]);
    assert!((r.h - h).abs() < 1e-10 && (r.n - n).abs() < 1e-10);
    let xi = r.xi.as_ref().unwrap();
    assert!((xi[0] - 1.0).abs() < 1e-10 && xi[1].abs() < 1e-10 && xi[2].abs() < 1e-10);
    assert!((jet.inner(xi, xi) - 1.0).abs() < 1e-10);
    // leaves are round spheres of radius f
    let lambda = r.lambda.unwrap();
    assert!((lambda - 1.0 / (f * f)).abs() < 1e-8);
    assert!((r.alpha.unwrap() - p[0].cos() / f).abs() < 1e-8);

    let mut sampler = PlaneSampler::new(11);
    for _ in 0..1000 {
        let (u, v) = sampler.plane(&jet);
        let k = sectional(&jet, &pack, &u, &v).unwrap();
        let c2 = jet.inner(xi, &u).powi(2) + jet.inner(xi, &v).powi(2);
        assert!((k - (h * (1.0 - c2) + n * c2)).abs() < 1e-8);
    }
}

#[test]
fn extremal_planes() {
    let cm = bulge();
    let jet = metric_jet(&cm, &[0.4, 1.0, 2.0]).unwrap();
    let pack = curvature_pack(&jet);
    let r = classify_point(&jet, &pack, &Settings::default()).unwrap();
    let f = local_frame(&cm, &[0.4, 1.0, 2.0], 1e-7).unwrap();
    let k_h = sectional(&jet, &pack, &f.horizontal[0], &f.horizontal[1]).unwrap();
    let k_n = sectional(&jet, &pack, &f.xi, &f.horizontal[1]).unwrap();
    assert!((k_h - r.h).abs() < 1e-8);
    assert!((k_n - r.n).abs() < 1e-8);
}

#[test]
fn heisenberg_origin() {
    let cm = cat("heisenberg", &[]);
    let (_, pack, r) = analyze_point(&cm, &[0.0; 3], &Settings::default()).unwrap();
    assert_eq!(r.class, PointClass::Qc);
    assert!(r.h < 0.0 && 0.0 < r.n);
    assert!((r.h - catalog::HEISENBERG_H).abs() < 1e-12);
    assert!((r.n - catalog::HEISENBERG_N).abs() < 1e-12);
    assert!(r.decomposition_residual < 1e-8);
    let xi = r.xi.as_ref().unwrap();
    assert!((xi[2] - 1.0).abs() < 1e-12);
    assert!(r.alpha.unwrap().abs() < 1e-8);
    assert!((r.lambda.unwrap() - r.h).abs() < 1e-12);
    assert!(pack.cotton_norm() > 0.1);
    let d = integrability_check(&cm, &[0.0; 3], &Settings::default()).unwrap();
    assert!((d - 1.0).abs() < 1e-4, "{d}");
}

#[test]
fn hn_fields_examples() {
    let flat = cat("euclidean", &[]);
    assert_eq!(hn_fields(&flat, &[0.1, 0.2, 0.3], 1e-7).unwrap(), (0.0, 0.0));
    let hyp = cat("hyperbolic", &[("n", "4")]);
    let (h, n) = hn_fields(&hyp, &[0.1, 0.2, 0.3, 1.1], 1e-7).unwrap();
    assert!((h + 1.0).abs() < 1e-12 && (n + 1.0).abs() < 1e-12);
    let heis = cat("heisenberg", &[]);
    for p in [[0.3, -0.5, 0.9], [-0.8, 0.1, 0.2]] {
        let (h, n) = hn_fields(&heis, &p, 1e-7).unwrap();
        assert!((h - catalog::HEISENBERG_H).abs() < 1e-12 && (n - catalog::HEISENBERG_N).abs() < 1e-12);
    }
}

#[test]
fn leaf_curvature_cases() {
    let s = Settings::default();
    let hyp = compile_metric(catalog::warped(3, parse_expr("sinh(x0)", 3).unwrap(), [0.5, 2.0]).unwrap());
    assert!(matches!(
        leaf_curvature(&hyp, &[1.0, 1.0, 1.0], &s),
        Err(Error::NearIsotropic { .. })
    ));

    let cm = bulge();
    // H = N = 0 at r = 0: the two closed-form curvatures cross there
    assert!(matches!(
        leaf_curvature(&cm, &[0.0, 1.0, 1.0], &s),
        Err(Error::NearIsotropic { .. })
    ));
    for r in [0.3, 1.0, -2.0] {
        let lc = leaf_curvature(&cm, &[r, 1.0, 1.0], &s).unwrap();
        let (h, n, f) = bulge_closed(r);
        let dh = 4.0 * r.sin() * r.cos() / f.powi(3);
        let alpha = dh / (2.0 * (n - h));
        assert!((lc.alpha - alpha).abs() < 1e-6);
        assert!((lc.lambda - (h + alpha * alpha)).abs() < 1e-6);
        let computed_h = hn_fields(&cm, &[r, 1.0, 1.0], s.tol_iso).unwrap().0;
        assert_eq!(lc.lambda, computed_h + lc.alpha * lc.alpha);
        let other = h + lc.grad_h_norm2 / (4.0 * (h - n).powi(2));
        assert!((lc.lambda - other).abs() < 1e-8 * (1.0 + lc.lambda.abs()));
    }
}

#[test]
fn integrability_cases() {
    let s = Settings::default();
    let d = integrability_check(&bulge(), &[0.7, 1.0, 2.0], &s).unwrap();
    assert!(d < 1e-6, "{d}");
    let s3 = cat("sphere", &[]);
    assert!(matches!(
        integrability_check(&s3, &[1.0, 1.0, 1.0], &s),
        Err(Error::NearIsotropic { .. })
    ));
    let four = cat("sphere", &[("n", "4")]);
    assert!(matches!(
        integrability_check(&four, &[1.0, 1.0, 1.0, 1.0], &s),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn ambiguous_split_is_non_qc() {
    match split_spectrum(&[0.0, 1.0, 2.0], 3.0, 1e-7) {
        Split::Candidate { .. } => {}
        other => panic!("{other:?}"),
    }
    match split_spectrum(&[0.0, 1e-9, 2.0 * 1e-9 + 1e-6], 0.0, 1e-7) {
        Split::Candidate { simple: 2, .. } => {}
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        split_spectrum(&[0.0, 3e-8, 1.2e-7], 0.0, 1e-7),
        Split::Ambiguous { .. }
    ));
}

#[test]
fn sign_normalization() {
    assert_eq!(normalize_sign(&[0.1, -0.9, 0.9]), vec![-0.1, 0.9, -0.9]);
    assert_eq!(normalize_sign(&[-0.0, 0.0]), vec![-0.0, 0.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_is_sign_invariant(r in -2.8f64..2.8, a in 0.4f64..2.7, b in 0.0f64..6.2) {
        let cm = bulge();
        let jet = metric_jet(&cm, &[r, a, b]).unwrap();
        let pack = curvature_pack(&jet);
        let s = Settings::default();
        let rep = classify_point(&jet, &pack, &s).unwrap();
        if let Some(xi) = rep.xi.as_ref() {
            let flipped: Vec<f64> = xi.iter().map(|v| -v).collect();
            prop_assert_eq!(&normalize_sign(&flipped), xi);
            let spec = crate::tensor::schouten_spectrum(&pack);
            let plus = decomposition_residual(&jet, &pack, &spec.vectors, Some(xi), rep.h, rep.n, 8, 3);
            let minus = decomposition_residual(&jet, &pack, &spec.vectors, Some(&flipped), rep.h, rep.n, 8, 3);
            prop_assert_eq!(plus.to_bits(), minus.to_bits());
        }
    }
}

//! Randomized property suites: algebraic identities of the operator layer,
//! interpolation/floor inequalities of the weight statistics, and structural
//! invariants of the classifier (scale invariance, determinism under
//! parallelism, star-shapedness). Random draws are seeded, so every run
//! exercises the same instances.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tgspectra::operators::{
    apply_tg, compression_matrix, operator_norm_estimate, resolvent_apply, TruncatedOperator,
};
use tgspectra::series::PowerSeries;
use tgspectra::spaces::SpaceSpec;
use tgspectra::spectra::{self, ClassifyConfig, MapConfig};
use tgspectra::symbols::SymbolSpec;
use tgspectra::weights::{
    a2_characteristic_scales, ainfty_characteristic_scales, ArcDyadicTree, CharacteristicReport,
    CircleScales,
};
use tgspectra::{exec, io};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_coeffs(rng: &mut StdRng, degree: usize, amp: f64) -> Vec<Complex64> {
    (0..=degree)
        .map(|_| c(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
        .collect()
}

// ---------------------------------------------------------------------------
// Operator identities
// ---------------------------------------------------------------------------

/// `(I - T_g/lambda) R_g(lambda) h = h` coefficient-by-coefficient through
/// the working degree, on 50 random (g, lambda, h) triples with |lambda| >= 1.
#[test]
fn resolvent_identity_on_random_triples() {
    let mut rng = StdRng::seed_from_u64(0x7265736f6c76);
    let workdeg = 48;
    for trial in 0..50 {
        let gdeg = rng.gen_range(1..=6);
        let hdeg = rng.gen_range(0..=6);
        // Symbols are normalized to g(0) = 0 (only g' enters T_g).
        let mut gc = random_coeffs(&mut rng, gdeg, 1.0);
        gc[0] = c(0.0, 0.0);
        let g = PowerSeries::new(gc);
        let h = PowerSeries::new(random_coeffs(&mut rng, hdeg, 1.0));
        let lambda = Complex64::from_polar(
            rng.gen_range(1.0..3.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let r = resolvent_apply(&g, lambda, &h, workdeg).unwrap();
        let lhs = r.sub(&apply_tg(&g, &r, workdeg).scale(lambda.inv()));
        let mut residual = 0.0f64;
        for k in 0..=workdeg {
            residual = residual.max((lhs.coeff(k) - h.coeff(k)).norm());
        }
        assert!(
            residual < 1e-8,
            "trial {trial}: residual {residual:e} for lambda = {lambda}"
        );
    }
}

/// `e^{s} * e^{-s} = 1` in truncated arithmetic.
#[test]
fn exp_series_inverse_roundtrip() {
    let mut rng = StdRng::seed_from_u64(0x657870);
    let workdeg = 32;
    for _ in 0..20 {
        let s = PowerSeries::new(random_coeffs(&mut rng, 8, 0.8));
        let pos = s.exp(c(1.0, 0.0), workdeg).unwrap();
        let neg = s.exp(c(-1.0, 0.0), workdeg).unwrap();
        let prod = pos.multiply(&neg, workdeg);
        assert!((prod.coeff(0) - c(1.0, 0.0)).norm() < 1e-10);
        for k in 1..=workdeg {
            assert!(prod.coeff(k).norm() < 1e-10, "k={k}: {}", prod.coeff(k));
        }
    }
}

/// Largest singular value from power iteration matches a dense SVD.
#[test]
fn operator_norm_matches_dense_svd() {
    let mut rng = StdRng::seed_from_u64(0x737664);
    let space = SpaceSpec::hardy(2.0).unwrap();
    for trial in 0..30 {
        let n = rng.gen_range(2..=10);
        let data: Vec<Complex64> = (0..n * n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let t = TruncatedOperator::from_rows(n, space, data.clone());
        let estimate = operator_norm_estimate(&t, 1e-12).unwrap();
        let dense = nalgebra::DMatrix::from_fn(n, n, |r, col| data[r * n + col]);
        let exact = dense
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0f64, f64::max);
        assert!(
            (estimate - exact).abs() <= 1e-6 * exact.max(1.0),
            "trial {trial}: power iteration {estimate} vs svd {exact}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// T_g is linear in its argument.
    #[test]
    fn tg_linearity_random(
        gre in proptest::collection::vec(-1.0f64..1.0, 2..6),
        f1 in proptest::collection::vec(-1.0f64..1.0, 1..6),
        f2 in proptest::collection::vec(-1.0f64..1.0, 1..6),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let g = PowerSeries::new(gre.iter().map(|&x| c(x, -0.3 * x)).collect());
        let f1 = PowerSeries::new(f1.iter().map(|&x| c(x, 0.5 * x)).collect());
        let f2 = PowerSeries::new(f2.iter().map(|&x| c(-x, x)).collect());
        let (a, b) = (c(a, 0.1), c(b, -0.2));
        let workdeg = 16;
        let lhs = apply_tg(&g, &f1.scale(a).add(&f2.scale(b)), workdeg);
        let rhs = apply_tg(&g, &f1, workdeg)
            .scale(a)
            .add(&apply_tg(&g, &f2, workdeg).scale(b));
        for k in 0..=workdeg {
            prop_assert!((lhs.coeff(k) - rhs.coeff(k)).norm() < 1e-12);
        }
    }

    /// The A2 statistic is invariant under w -> 1/w (the two averaged
    /// factors swap).
    #[test]
    fn a2_duality_under_inversion(
        seed in proptest::collection::vec(-1.5f64..1.5, 8),
    ) {
        // Smooth log-weight from a short trigonometric sum.
        let m = 1024;
        let logs: Vec<f64> = (0..m)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                seed.iter()
                    .enumerate()
                    .map(|(k, &a)| a * ((k + 1) as f64 * theta).cos())
                    .sum()
            })
            .collect();
        let neg: Vec<f64> = logs.iter().map(|x| -x).collect();
        let tree = ArcDyadicTree::new(7).unwrap();
        let direct = a2_characteristic_scales(&CircleScales::from_log_samples(&logs).unwrap(), &tree).unwrap();
        let inverted = a2_characteristic_scales(&CircleScales::from_log_samples(&neg).unwrap(), &tree).unwrap();
        for i in 0..3 {
            let (x, y) = (direct.refinement.values[i], inverted.refinement.values[i]);
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "scale {i}: {x} vs {y}");
        }
    }
}

// ---------------------------------------------------------------------------
// Weight statistic inequalities
// ---------------------------------------------------------------------------

fn trig_log_weight(rng: &mut StdRng, m: usize, terms: usize, amp: f64) -> Vec<f64> {
    let coeffs: Vec<(f64, f64)> = (0..terms)
        .map(|_| (rng.gen_range(-amp..amp), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, phase))| a * ((k + 1) as f64 * theta + phase).cos())
                .sum()
        })
        .collect()
}

fn assert_am_gm_floor(report: &CharacteristicReport) {
    for lm in &report.levels {
        assert!(
            lm.max >= 1.0 - 1e-12,
            "{} level {} fell below the AM-GM floor: {}",
            report.condition,
            lm.level,
            lm.max
        );
    }
    for v in report.refinement.values {
        assert!(v >= 1.0 - 1e-12, "{} refinement value {v}", report.condition);
    }
}

/// Level-by-level Hölder interpolation on 20 random weight pairs: for
/// `w = u^t v^(1-t)`, each refinement value of the characteristic satisfies
/// `C(w) <= C(u)^t C(v)^(1-t)`, for both the A∞ mean-ratio statistic and
/// the A2 product statistic. Every report also respects the AM-GM floor.
#[test]
fn log_convexity_holder_on_weight_pairs() {
    let mut rng = StdRng::seed_from_u64(0x686f6c646572);
    let m = 1024;
    let tree = ArcDyadicTree::new(7).unwrap();
    for trial in 0..20 {
        let lu = trig_log_weight(&mut rng, m, 6, 1.2);
        let lv = trig_log_weight(&mut rng, m, 6, 1.2);
        let t = rng.gen_range(0.05..0.95);
        let lw: Vec<f64> = lu
            .iter()
            .zip(lv.iter())
            .map(|(&a, &b)| t * a + (1.0 - t) * b)
            .collect();
        for stat in ["ainfty", "a2"] {
            let run = |logs: &[f64]| {
                let scales = CircleScales::from_log_samples(logs).unwrap();
                if stat == "ainfty" {
                    ainfty_characteristic_scales(&scales, &tree).unwrap()
                } else {
                    a2_characteristic_scales(&scales, &tree).unwrap()
                }
            };
            let (ru, rv, rw) = (run(&lu), run(&lv), run(&lw));
            for i in 0..3 {
                let bound = ru.refinement.values[i].powf(t) * rv.refinement.values[i].powf(1.0 - t);
                assert!(
                    rw.refinement.values[i] <= bound * (1.0 + 1e-9),
                    "trial {trial} {stat} scale {i}: C(w) = {} > bound {bound}",
                    rw.refinement.values[i]
                );
            }
            assert_am_gm_floor(&ru);
            assert_am_gm_floor(&rv);
            assert_am_gm_floor(&rw);
        }
    }
}

// ---------------------------------------------------------------------------
// Classifier invariants
// ---------------------------------------------------------------------------

/// `classify(c·g, c·lambda) = classify(g, lambda)`: both criteria depend on
/// the symbol and the point only through g/lambda.
#[test]
fn classification_is_scale_invariant() {
    let scale = c(0.7, -1.1);
    let cases: [(SymbolSpec, Complex64); 3] = [
        (SymbolSpec::cesaro_log(), c(1.0, 0.0)),
        (SymbolSpec::cesaro_log(), c(3.0, 0.0)),
        (SymbolSpec::blaschke(c(0.3, 0.0)).unwrap(), c(1.5, 0.0)),
    ];
    let space = SpaceSpec::hardy(2.0).unwrap();
    for (g, lambda) in cases {
        let base = spectra::classify_point(&g, lambda, space, ClassifyConfig::default()).unwrap();
        let scaled = spectra::classify_point(
            &SymbolSpec::scaled(scale, g.clone()),
            scale * lambda,
            space,
            ClassifyConfig::default(),
        )
        .unwrap();
        assert_eq!(base.label, scaled.label, "symbol {} at {lambda}", g.name);
    }
}

/// Map cells are identical bytes regardless of the parallelism degree.
#[test]
fn spectrum_map_is_thread_count_invariant() {
    let g = SymbolSpec::cesaro_log();
    let space = SpaceSpec::hardy(2.0).unwrap();
    let cfg = |threads: usize| MapConfig {
        re_lo: -0.5,
        re_hi: 2.5,
        im_lo: -1.5,
        im_hi: 1.5,
        nx: 12,
        ny: 12,
        threads,
    };
    let a = spectra::spectrum_map(&g, space, &cfg(1), ClassifyConfig::default()).unwrap();
    let b = spectra::spectrum_map(&g, space, &cfg(4), ClassifyConfig::default()).unwrap();
    assert_eq!(io::render_json(&a), io::render_json(&b));
    assert!(exec::default_threads() < usize::MAX); // exercise the env default
}

/// Star-shapedness about the origin holds on small maps of library symbols.
#[test]
fn star_shape_holds_on_small_library_maps() {
    let space = SpaceSpec::hardy(2.0).unwrap();
    let map_cfg = MapConfig {
        re_lo: -0.5,
        re_hi: 2.5,
        im_lo: -1.5,
        im_hi: 1.5,
        nx: 20,
        ny: 20,
        threads: 1,
    };
    for g in [SymbolSpec::cesaro_log(), SymbolSpec::power_log(0.5)] {
        let map = spectra::spectrum_map(&g, space, &map_cfg, ClassifyConfig::default()).unwrap();
        let violations = spectra::star_shape_check(&map);
        assert!(
            violations.is_empty(),
            "{}: {} star violations",
            g.name,
            violations.len()
        );
    }
}

/// Compression norms are monotone in the truncation size (nested
/// compressions of the same operator).
#[test]
fn compression_norms_monotone_in_truncation() {
    let space = SpaceSpec::hardy(2.0).unwrap();
    let g = SymbolSpec::cesaro_log().series(64);
    let mut prev = 0.0;
    for n in [8, 16, 32, 64] {
        let a = compression_matrix(&g, space, n).unwrap();
        let norm = operator_norm_estimate(&a, 1e-10).unwrap();
        assert!(
            norm >= prev - 1e-9,
            "norm at n={n} was {norm}, below {prev}"
        );
        prev = norm;
    }
}

//! Cross-module checks against independently computed oracles: dense SVD
//! norms, closed-form chain products for nilpotent compressions, analytic
//! spectral disks, and the power-weight verdict tables with their
//! escalation protocol. Each test states its oracle before touching the
//! library code under test.

use nalgebra::DMatrix;
use tgspectra::operators::{
    compression_matrix, operator_norm_estimate, resolvent_probe, spectral_radius_estimate,
    TruncatedOperator,
};
use tgspectra::spaces::SpaceSpec;
use tgspectra::spectra::{spectrum_map, CellLabel, ClassifyConfig, MapConfig, SpectrumMap};
use tgspectra::symbols::SymbolSpec;
use tgspectra::tuning::{PROBE_J_MAX, PROBE_J_MIN, WEIGHT_CIRCLE_LEVELS, WEIGHT_CIRCLE_M};
use tgspectra::weights::{
    a2_characteristic, a2_characteristic_scales, ainfty_characteristic_scales,
    b2_characteristic_scales, ArcDyadicTree, CarlesonGrid, CircleScales, DiskScales, Verdict,
};
use tgspectra::Complex64;

/// Independent operator-norm oracle: the complex matrix is embedded as the
/// real 2N x 2N block matrix [[Re, -Im], [Im, Re]], whose largest singular
/// value equals the spectral norm of the complex matrix.
fn svd_norm_oracle(t: &TruncatedOperator) -> f64 {
    let n = (t.rows().len() as f64).sqrt() as usize;
    let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let e = t.entry(i % n, j % n);
        match (i >= n, j >= n) {
            (false, false) | (true, true) => e.re,
            (true, false) => e.im,
            (false, true) => -e.im,
        }
    });
    m.singular_values().max()
}

#[test]
fn power_iteration_matches_dense_svd_oracle() {
    let symbols = [
        SymbolSpec::cesaro_log(),
        SymbolSpec::monomial(1),
        SymbolSpec::blaschke(Complex64::new(0.5, 0.0)).unwrap(),
    ];
    let spaces = [
        SpaceSpec::hardy(2.0).unwrap(),
        SpaceSpec::bergman(2.0, 0.0).unwrap(),
        SpaceSpec::bergman(2.0, 1.0).unwrap(),
    ];
    for g in &symbols {
        for &space in &spaces {
            for n in [8, 24, 48] {
                let t = compression_matrix(&g.series(n), space, n).unwrap();
                let oracle = svd_norm_oracle(&t);
                let got = operator_norm_estimate(&t, 1e-12).unwrap();
                assert!(
                    (got - oracle).abs() <= 1e-8 * oracle.max(1.0),
                    "{} on {:?}, n={n}: power iteration {got} vs svd {oracle}",
                    g.name,
                    space
                );
            }
        }
    }
}

#[test]
fn cesaro_compression_norm_sits_in_the_predicted_band() {
    let n = 256;
    let g = SymbolSpec::cesaro_log().series(n);
    let t = compression_matrix(&g, SpaceSpec::hardy(2.0).unwrap(), n).unwrap();
    let oracle = svd_norm_oracle(&t);
    let got = operator_norm_estimate(&t, 1e-12).unwrap();
    assert!(
        (got - oracle).abs() <= 1e-8 * oracle,
        "power iteration {got} vs svd {oracle}"
    );
    // Finite sections underestimate the true norm (which is at least the
    // spectral radius 2 of the closed disk of radius 1 about 1) and grow
    // with the truncation; at N = 256 the value sits between 1.5 and 2.
    assert!(got > 1.5 && got <= 2.0, "norm at n=256: {got}");
}

#[test]
fn cesaro_root_norm_ladder_peaks_above_the_lower_bound() {
    let n = 256;
    let g = SymbolSpec::cesaro_log().series(n);
    let rho = spectral_radius_estimate(&g, SpaceSpec::hardy(2.0).unwrap(), n, 32, 1).unwrap();
    assert_eq!(rho.len(), 32);
    // The compression is strictly lower triangular, hence nilpotent: the
    // root norms peak at small n (rho_1 = ||A|| ~ 1.69) and then decay, so
    // only the running maximum carries spectral-radius evidence. All values
    // stay at or below the analytic radius 2.
    let peak = rho.iter().cloned().fold(0.0f64, f64::max);
    assert!(peak >= 1.5, "peak root norm {peak}, ladder {rho:?}");
    assert!(
        rho.iter().all(|&r| r <= 2.0 + 1e-9),
        "root norm above the analytic radius: {rho:?}"
    );
    assert!((peak - rho[0]).abs() < 1e-12, "peak should be rho_1");
}

#[test]
fn nilpotent_root_norms_match_chain_product_oracles() {
    let n = 256;
    let space = SpaceSpec::hardy(2.0).unwrap();

    // Oracle for g = z: A^32 has a single nonzero diagonal with entries
    // prod_{j=1..32} 1/(m+j) from column m, so its norm is the m = 0 value
    // 1/32! and rho_32 = (32!)^{-1/32}.
    let ln_fact: f64 = (1..=32).map(|j| f64::ln(j as f64)).sum();
    let oracle_z = (-ln_fact / 32.0).exp();
    let rho_z =
        spectral_radius_estimate(&SymbolSpec::monomial(1).series(n), space, n, 32, 1).unwrap();
    let got_z = *rho_z.last().unwrap();
    assert!(
        (got_z - oracle_z).abs() <= 1e-6 * oracle_z,
        "g=z: rho_32 {got_z} vs factorial oracle {oracle_z}"
    );

    // Oracle for g = z^3: single diagonal at offset 96 with column-m entry
    // prod_{j=1..32} 3/(m+3j); the maximum is again at m = 0, which equals
    // prod 3/(3j) = 1/32!.
    let mut best = f64::NEG_INFINITY;
    for m in 0..=(n - 96) {
        let ln_prod: f64 = (1..=32).map(|j| f64::ln(3.0 / (m as f64 + 3.0 * j as f64))).sum();
        best = best.max(ln_prod);
    }
    let oracle_z3 = (best / 32.0).exp();
    assert!((oracle_z3 - oracle_z).abs() < 1e-12 * oracle_z);
    let rho_z3 =
        spectral_radius_estimate(&SymbolSpec::monomial(3).series(n), space, n, 32, 1).unwrap();
    let got_z3 = *rho_z3.last().unwrap();
    assert!(
        (got_z3 - oracle_z3).abs() <= 1e-6 * oracle_z3,
        "g=z^3: rho_32 {got_z3} vs chain oracle {oracle_z3}"
    );

    // Oracle bracket for the Blaschke factor at a = 0.3: all step products
    // share one sign, so ||A^32|| is at least the single-step chain
    // 0.91^32/32! (g_1 = -(1-a^2) = -0.91), and the root norm stays well
    // below the crude 0.12 cap observed for this family.
    let b = SymbolSpec::blaschke(Complex64::new(0.3, 0.0)).unwrap();
    let rho_b = spectral_radius_estimate(&b.series(n), space, n, 32, 1).unwrap();
    let got_b = *rho_b.last().unwrap();
    let lower = 0.91 * oracle_z * (1.0 - 1e-9);
    assert!(
        got_b >= lower && got_b < 0.12,
        "blaschke: rho_32 {got_b} outside [{lower}, 0.12)"
    );
}

#[test]
fn resolvent_probe_exponent_separates_disk_interior_from_exterior() {
    // Analytic oracle for g = log 1/(1-z) on Hardy p = 2: lambda lies in
    // the spectrum iff Re(1/lambda) >= 1/2, i.e. |lambda - 1| <= 1.
    // At lambda = 1 the formal resolvent image of k_w leaves H^2, so the
    // fully-resolved probe ratios must climb along w -> 1 and the fitted
    // exponent comes out clearly positive; at the exterior point
    // lambda = 2.5 the resolvent is bounded and the fit stays flat.
    let g = SymbolSpec::cesaro_log();
    let space = SpaceSpec::hardy(2.0).unwrap();
    let radii: Vec<f64> = (PROBE_J_MIN..=PROBE_J_MAX)
        .map(|j| 1.0 - 0.5f64.powi(j as i32))
        .collect();
    let inside = resolvent_probe(&g, Complex64::new(1.0, 0.0), space, &radii).unwrap();
    let outside = resolvent_probe(&g, Complex64::new(2.5, 0.0), space, &radii).unwrap();
    assert!(
        inside.exponent > 0.15,
        "interior lambda should show growth, exponent {}",
        inside.exponent
    );
    assert!(
        inside.probes.last().unwrap().ratio > 5.0,
        "interior ratios should climb, got {:?}",
        inside.probes.last().unwrap().ratio
    );
    assert!(
        outside.exponent < 0.1,
        "exterior lambda should stay bounded, exponent {}",
        outside.exponent
    );
    for p in &outside.probes {
        assert!(p.ratio.is_finite() && p.ratio > 0.0);
    }
}

fn power_log(a: f64) -> impl Fn(f64) -> f64 {
    move |theta: f64| a * (2.0 * (theta / 2.0).sin()).abs().ln()
}

fn a2_verdict_fn(a: f64, m: usize, levels: usize) -> Verdict {
    let scales = CircleScales::from_log_fn(m, power_log(a)).unwrap();
    let tree = ArcDyadicTree::new(levels).unwrap();
    a2_characteristic_scales(&scales, &tree).unwrap().verdict
}

fn a2_verdict_samples(a: f64, m: usize, levels: usize) -> Verdict {
    let w: Vec<f64> = (0..m)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
            (2.0 * (theta / 2.0).sin()).abs().powf(a)
        })
        .collect();
    let tree = ArcDyadicTree::new(levels).unwrap();
    a2_characteristic(&w, &tree).unwrap().verdict
}

/// Shared escalation protocol: |a| < 1 must read bounded and |a| = 1.5
/// divergent at the default resolution; the boundary-adjacent |a| = 1.1 may
/// be inconclusive at the default depth but must turn divergent at the
/// escalated depth.
fn assert_power_table(mut verdict: impl FnMut(f64, usize, usize) -> Verdict, tag: &str) {
    for a in [0.5, -0.5, 0.9, -0.9] {
        assert_eq!(
            verdict(a, WEIGHT_CIRCLE_M, WEIGHT_CIRCLE_LEVELS),
            Verdict::Bounded,
            "{tag}: a = {a}"
        );
    }
    for a in [1.5, -1.5] {
        assert_eq!(
            verdict(a, WEIGHT_CIRCLE_M, WEIGHT_CIRCLE_LEVELS),
            Verdict::Divergent,
            "{tag}: a = {a}"
        );
    }
    for a in [1.1, -1.1] {
        let v = verdict(a, WEIGHT_CIRCLE_M, WEIGHT_CIRCLE_LEVELS);
        if v != Verdict::Divergent {
            assert_eq!(v, Verdict::Inconclusive, "{tag}: a = {a}");
            assert_eq!(
                verdict(a, 1 << 16, 13),
                Verdict::Divergent,
                "{tag}: a = {a} after escalation"
            );
        }
    }
}

#[test]
fn circle_power_table_function_path() {
    // Oracle: |1-e^{i theta}|^a lies in A_2 iff |a| < 1 (the conjugate
    // exponent pairs a and -a; integrability of the weight and its inverse
    // both fail at |a| = 1).
    assert_power_table(a2_verdict_fn, "function path");
}

#[test]
fn circle_power_table_sample_path() {
    assert_power_table(a2_verdict_samples, "sample path");
}

#[test]
fn disk_power_table_with_escalation() {
    // Oracle: (1-|z|^2)^beta lies in B_2 iff |beta| < 1.
    let verdict = |beta: f64, annuli: usize, m: usize| -> Verdict {
        let scales = DiskScales::from_log_fn(annuli, m, move |r, _| {
            let t = 1.0 - r;
            beta * (t * (2.0 - t)).ln()
        })
        .unwrap();
        let grid = CarlesonGrid::new(4).unwrap();
        b2_characteristic_scales(&scales, &grid).unwrap().verdict
    };
    for beta in [0.5, -0.5, 0.9, -0.9] {
        assert_eq!(verdict(beta, 12, 4096), Verdict::Bounded, "beta = {beta}");
    }
    for beta in [1.5, -1.5] {
        assert_eq!(verdict(beta, 12, 4096), Verdict::Divergent, "beta = {beta}");
    }
    for beta in [1.1, -1.1] {
        let v = verdict(beta, 12, 4096);
        if v != Verdict::Divergent {
            assert_eq!(v, Verdict::Inconclusive, "beta = {beta}");
            assert_eq!(
                verdict(beta, 13, 8192),
                Verdict::Divergent,
                "beta = {beta} after escalation"
            );
        }
    }
}

#[test]
fn composite_weight_beyond_the_critical_exponent_diverges() {
    // exp(Re(log 1/(1-z))/0.4) on the circle is |1-e^{i theta}|^{-2.5};
    // the exponent -2.5 <= -1 breaks integrability, so both scans must
    // report divergence.
    let scales = CircleScales::from_log_fn(WEIGHT_CIRCLE_M, power_log(-2.5)).unwrap();
    let tree = ArcDyadicTree::new(WEIGHT_CIRCLE_LEVELS).unwrap();
    let ainf = ainfty_characteristic_scales(&scales, &tree).unwrap();
    let a2 = a2_characteristic_scales(&scales, &tree).unwrap();
    assert_eq!(ainf.verdict, Verdict::Divergent);
    assert_eq!(a2.verdict, Verdict::Divergent);
}

/// Scores a map against the closed-form disk |lambda - center| <= radius:
/// (decided cells, agreeing cells, decided disagreements farther than two
/// cell diagonals from the oracle circle).
fn score_against_disk(map: &SpectrumMap, center: f64, radius: f64) -> (usize, usize, usize) {
    let band = 2.0 * map.dx().hypot(map.dy());
    let (mut decided, mut agree, mut far) = (0usize, 0usize, 0usize);
    for iy in 0..map.ny {
        for ix in 0..map.nx {
            let cell = map.cell(ix, iy);
            if !cell.label.is_decided() {
                continue;
            }
            let z = map.center(ix, iy);
            let dist = (z - Complex64::new(center, 0.0)).norm();
            let oracle_in = dist <= radius;
            let got_in = cell.label == CellLabel::Spectrum;
            decided += 1;
            if got_in == oracle_in {
                agree += 1;
            } else if (dist - radius).abs() > band {
                far += 1;
            }
        }
    }
    (decided, agree, far)
}

fn map_cfg(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64, nx: usize, ny: usize) -> MapConfig {
    MapConfig {
        re_lo,
        re_hi,
        im_lo,
        im_hi,
        nx,
        ny,
        threads: 1,
    }
}

fn assert_disk_map(map: &SpectrumMap, center: f64, radius: f64, tag: &str) {
    let (decided, agree, far) = score_against_disk(map, center, radius);
    assert!(decided > 0, "{tag}: no decided cells");
    let frac = agree as f64 / decided as f64;
    assert!(
        frac >= 0.97,
        "{tag}: only {agree}/{decided} = {frac:.4} of decided cells agree"
    );
    assert_eq!(far, 0, "{tag}: decided disagreements outside the band");
    assert!(map.label_counts()[1] > 0, "{tag}: no spectrum cells at all");
}

#[test]
fn hardy_map_agrees_with_the_analytic_disk() {
    // Oracle (Hardy p = 2): lambda in spectrum iff Re(1/lambda) >= 1/2,
    // i.e. the closed disk of radius 1 centered at 1.
    let g = SymbolSpec::cesaro_log();
    let map = spectrum_map(
        &g,
        SpaceSpec::hardy(2.0).unwrap(),
        &map_cfg(-0.5, 2.5, -1.5, 1.5, 40, 40),
        ClassifyConfig::default(),
    )
    .unwrap();
    assert_disk_map(&map, 1.0, 1.0, "hardy p=2");
}

#[test]
fn bergman_map_agrees_with_the_analytic_disk() {
    // Oracle (Bergman p = 2, alpha = 0): lambda in spectrum iff
    // Re(1/lambda) >= (2+alpha)/p = 1, the closed disk of radius 1/2 at 1/2.
    let g = SymbolSpec::cesaro_log();
    let map = spectrum_map(
        &g,
        SpaceSpec::bergman(2.0, 0.0).unwrap(),
        &map_cfg(-0.5, 1.5, -1.0, 1.0, 32, 32),
        ClassifyConfig::default(),
    )
    .unwrap();
    assert_disk_map(&map, 0.5, 0.5, "bergman alpha=0");
}

#[test]
fn hardy_p_scaling_moves_the_disk() {
    // Oracle: the spectral disk scales with p as |lambda - p/2| <= p/2
    // (Re(1/lambda) >= 1/p).
    let g = SymbolSpec::cesaro_log();
    let p1 = spectrum_map(
        &g,
        SpaceSpec::hardy(1.0).unwrap(),
        &map_cfg(-0.5, 1.5, -1.0, 1.0, 32, 32),
        ClassifyConfig::default(),
    )
    .unwrap();
    assert_disk_map(&p1, 0.5, 0.5, "hardy p=1");
    let p4 = spectrum_map(
        &g,
        SpaceSpec::hardy(4.0).unwrap(),
        &map_cfg(-0.5, 4.5, -2.5, 2.5, 40, 40),
        ClassifyConfig::default(),
    )
    .unwrap();
    assert_disk_map(&p4, 2.0, 2.0, "hardy p=4");
}

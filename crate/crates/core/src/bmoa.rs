//! BMO and Bloch norm estimation, the exponential-integrability level
//! λ(φ) = inf { λ > 0 : e^{φ/λ} ∈ A₂ }, distance-to-H^∞ proxies, and the
//! axes test for membership in the H^∞-closure of BMOA.
//!
//! The BMO norm here is the mean-oscillation norm over dyadic and
//! half-shifted arcs — the standard computable norm equivalent to the
//! duality norm. Distances derived from λ(φ) are therefore proxies: they
//! are two-sided comparable to the true distance through fixed but unknown
//! constants, and every report labels them as such.

use num_complex::Complex64;
use serde::Serialize;

use crate::grids::{CircleGrid, DiskGrid};
use crate::spaces::SpaceSpec;
use crate::spectra::{CellLabel, ClassifierContext, ClassifyConfig, SpectraError};
use crate::symbols::{SymbolError, SymbolSpec};
use crate::tuning::{
    AXES_POINTS, EXCLUSION_FACTOR, GJ_BRACKET_FACTOR, GJ_ENLARGE_MAX, WEIGHT_CIRCLE_LEVELS,
};
use crate::weights::{
    a2_characteristic_scales, ArcDyadicTree, CircleScales, Verdict, WeightError,
};

/// Errors from BMO-side computations.
#[derive(Debug, thiserror::Error)]
pub enum BmoaError {
    /// Even the enlarged bracket end keeps e^{φ/λ} divergent: the input is
    /// not resolvable as BMO at this resolution.
    #[error("no bracket: A2 scan still divergent at lambda = {lambda:.6e}")]
    NoBracket { lambda: f64 },
    /// A boundary sample was non-finite.
    #[error("non-finite boundary sample at index {index}")]
    NonFinite { index: usize },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Real samples of a boundary function on the half-step circle grid.
#[derive(Debug, Clone)]
pub struct RealBoundaryFunction {
    pub samples: Vec<f64>,
    /// Indices adjacent to declared singularities of the generating symbol
    /// (informational; samples there are finite).
    pub singular: Vec<usize>,
}

impl RealBoundaryFunction {
    pub fn from_samples(samples: Vec<f64>) -> Result<Self, BmoaError> {
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(BmoaError::NonFinite { index });
        }
        Ok(Self {
            samples,
            singular: Vec::new(),
        })
    }

    /// Evaluates a real function of the angle on the half-step grid.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self, BmoaError> {
        let samples = (0..m)
            .map(|j| f(2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64))
            .collect();
        Self::from_samples(samples)
    }

    /// Real and imaginary parts of a symbol's boundary values.
    pub fn components(g: &SymbolSpec, m: usize) -> Result<(Self, Self), BmoaError> {
        let grid = CircleGrid::new(1.0, m, 0.5);
        let b = g.boundary(&grid)?;
        let re = Self {
            samples: b.values.iter().map(|z| z.re).collect(),
            singular: b.singular_adjacent.clone(),
        };
        let im = Self {
            samples: b.values.iter().map(|z| z.im).collect(),
            singular: b.singular_adjacent,
        };
        Ok((re, im))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Mean-oscillation norm: the sup over dyadic and half-shifted arcs of
/// `avg_I |φ − avg_I φ|`. Samples are centered on the midpoint of their
/// range first, which leaves the value invariant and keeps constants exact.
pub fn bmo_norm(phi: &RealBoundaryFunction, tree: &ArcDyadicTree) -> Result<f64, BmoaError> {
    let m = phi.len();
    if !m.is_power_of_two() || m < 128 {
        return Err(WeightError::InvalidGrid(format!(
            "sample count must be a power of two >= 128, got {m}"
        ))
        .into());
    }
    if m < (1usize << (tree.levels() + 3)) {
        return Err(WeightError::GridTooCoarse {
            m,
            levels: tree.levels(),
        }
        .into());
    }
    let hi = phi.samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = phi.samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let mid = 0.5 * (hi + lo);
    let centered: Vec<f64> = phi.samples.iter().map(|x| x - mid).collect();
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0f64);
    for &x in &centered {
        prefix.push(prefix.last().unwrap() + x);
    }
    let mut best = 0.0f64;
    for l in 0..=tree.levels() {
        let alen = m >> l;
        if alen < 8 {
            break;
        }
        for fshift in [0usize, alen / 2] {
            for i in 0..(1usize << l) {
                let s = i * alen + fshift;
                let e = s + alen;
                let sum = if e <= m {
                    prefix[e] - prefix[s]
                } else {
                    prefix[m] - prefix[s] + prefix[e - m]
                };
                let mean = sum / alen as f64;
                let mut osc = 0.0;
                for j in s..e {
                    osc += (centered[j % m] - mean).abs();
                }
                best = best.max(osc / alen as f64);
            }
        }
    }
    Ok(best)
}

/// Bloch seminorm: max over the disk grid (plus the center point) of
/// `(1 − |z|²)·|g′(z)|`, with the derivative in closed form.
pub fn bloch_norm(g: &SymbolSpec, grid: &DiskGrid) -> f64 {
    let mut best = g.derivative_eval(Complex64::new(0.0, 0.0)).norm();
    for ring in &grid.rings {
        let factor = 1.0 - ring.radius * ring.radius;
        for j in 0..grid.m {
            let z = Complex64::from_polar(ring.radius, grid.theta(j));
            let v = factor * g.derivative_eval(z).norm();
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// One tested bisection candidate.
#[derive(Debug, Clone, Serialize)]
pub struct GJCandidate {
    pub lambda: f64,
    pub verdict: Verdict,
}

/// Bisection record for λ(φ).
#[derive(Debug, Clone, Serialize)]
pub struct GJReport {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub estimate: f64,
    pub uncertainty: f64,
    pub tested: Vec<GJCandidate>,
    /// True when bisection stopped on an inconclusive scan verdict (the
    /// candidate sits inside the critical band) rather than on the width
    /// tolerance.
    pub stopped_inconclusive: bool,
}

/// Computes λ(φ) = inf { λ > 0 : e^{φ/λ} ∈ A₂ } by bisection, running the
/// A₂ refinement scan at each candidate. The initial bracket is
/// [tol, 4·bmo_norm(φ)], with the upper end enlarged ×4 up to three times.
pub fn gj_level(
    phi: &RealBoundaryFunction,
    tree: &ArcDyadicTree,
    tol: f64,
) -> Result<GJReport, BmoaError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(WeightError::InvalidGrid(format!("tol must be positive, got {tol}")).into());
    }
    let mut tested = Vec::new();
    let mut probe = |lambda: f64| -> Result<Verdict, BmoaError> {
        let logs: Vec<f64> = phi.samples.iter().map(|x| x / lambda).collect();
        let scales = CircleScales::from_log_samples(&logs)?;
        let verdict = a2_characteristic_scales(&scales, tree)?.verdict;
        tested.push(GJCandidate { lambda, verdict });
        Ok(verdict)
    };
    let bmo = bmo_norm(phi, tree)?;
    // Degenerate input: a constant has level zero with nothing to scan.
    if bmo == 0.0 {
        return Ok(GJReport {
            lambda_lo: 0.0,
            lambda_hi: tol,
            estimate: 0.0,
            uncertainty: tol,
            tested,
            stopped_inconclusive: false,
        });
    }
    let mut lo = tol;
    match probe(lo)? {
        Verdict::Bounded => {
            // Already integrable at the smallest tested level.
            return Ok(GJReport {
                lambda_lo: 0.0,
                lambda_hi: tol,
                estimate: 0.0,
                uncertainty: tol,
                tested,
                stopped_inconclusive: false,
            });
        }
        Verdict::Inconclusive => {
            return Ok(GJReport {
                lambda_lo: 0.0,
                lambda_hi: tol,
                estimate: tol,
                uncertainty: tol,
                tested,
                stopped_inconclusive: true,
            });
        }
        Verdict::Divergent => {}
    }
    let mut hi = (GJ_BRACKET_FACTOR * bmo).max(2.0 * tol);
    let mut enlargements = 0u32;
    loop {
        match probe(hi)? {
            Verdict::Bounded => break,
            _ if enlargements < GJ_ENLARGE_MAX => {
                lo = lo.max(hi / GJ_BRACKET_FACTOR.powi(2));
                hi *= GJ_BRACKET_FACTOR;
                enlargements += 1;
            }
            _ => return Err(BmoaError::NoBracket { lambda: hi }),
        }
    }
    let mut estimate = 0.5 * (lo + hi);
    let mut stopped_inconclusive = false;
    for _ in 0..64 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Verdict::Bounded => hi = mid,
            Verdict::Divergent => lo = mid,
            Verdict::Inconclusive => {
                estimate = mid;
                stopped_inconclusive = true;
                break;
            }
        }
        estimate = 0.5 * (lo + hi);
    }
    Ok(GJReport {
        lambda_lo: lo,
        lambda_hi: hi,
        estimate,
        uncertainty: hi - lo,
        tested,
        stopped_inconclusive,
    })
}

/// One bisection candidate in a distance report, tagged by component.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceCandidate {
    pub component: String,
    pub lambda: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceVerdict {
    Zero,
    Positive,
}

/// Distance-to-H^∞ proxy report.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub verdicts: Vec<DistanceCandidate>,
    /// max(λ(Re g), λ(Im g)) — comparable to the distance of g to H^∞ up
    /// to fixed constants, not the exact distance.
    pub proxy_distance: f64,
    pub verdict: DistanceVerdict,
}

/// Estimates the distance of g to H^∞ through the levels of its boundary
/// components: distance zero (g in the closure) iff both λ(Re g) and
/// λ(Im g) fall below the tolerance.
pub fn dist_hinfty_report(
    g: &SymbolSpec,
    tree: &ArcDyadicTree,
    tol: f64,
) -> Result<DistanceReport, BmoaError> {
    let m = 1usize << (tree.levels() + 4);
    let (re, im) = RealBoundaryFunction::components(g, m)?;
    let gj_re = gj_level(&re, tree, tol)?;
    let gj_im = gj_level(&im, tree, tol)?;
    let mut verdicts = Vec::new();
    for c in &gj_re.tested {
        verdicts.push(DistanceCandidate {
            component: "re".into(),
            lambda: c.lambda,
            verdict: c.verdict,
        });
    }
    for c in &gj_im.tested {
        verdicts.push(DistanceCandidate {
            component: "im".into(),
            lambda: c.lambda,
            verdict: c.verdict,
        });
    }
    let lambda_re = gj_re.estimate;
    let lambda_im = gj_im.estimate;
    let proxy_distance = lambda_re.max(lambda_im);
    let verdict = if lambda_re < tol && lambda_im < tol {
        DistanceVerdict::Zero
    } else {
        DistanceVerdict::Positive
    };
    Ok(DistanceReport {
        lambda_re,
        lambda_im,
        verdicts,
        proxy_distance,
        verdict,
    })
}

/// Outcome of the axes test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureVerdict {
    InClosure,
    NotInClosure,
    Inconclusive,
}

/// One classified axes point.
#[derive(Debug, Clone, Serialize)]
pub struct AxesPoint {
    pub re: f64,
    pub im: f64,
    pub label: CellLabel,
}

/// Axes test report.
#[derive(Debug, Clone, Serialize)]
pub struct AxesReport {
    pub lambda_max: f64,
    pub eps0: f64,
    pub points: Vec<AxesPoint>,
    pub verdict: ClosureVerdict,
}

fn axes_scan(
    g: &SymbolSpec,
    space: SpaceSpec,
    _threads: usize,
) -> Result<AxesReport, SpectraError> {
    let tree = ArcDyadicTree::new(WEIGHT_CIRCLE_LEVELS)?;
    let m = 1usize << (tree.levels() + 4);
    let (re, im) = RealBoundaryFunction::components(g, m).map_err(|e| match e {
        BmoaError::Weight(w) => SpectraError::Weight(w),
        BmoaError::Symbol(s) => SpectraError::Symbol(s),
        other => SpectraError::Domain(other.to_string()),
    })?;
    let proxy = bmo_norm(&re, &tree).map_err(bmoa_to_spectra)?
        + bmo_norm(&im, &tree).map_err(bmoa_to_spectra)?;
    let lambda_max = (4.0 * proxy).max(1.0);
    let eps0 = EXCLUSION_FACTOR * lambda_max;
    let ctx = ClassifierContext::new(g, space, ClassifyConfig::default())?;
    let directions = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    let n = AXES_POINTS;
    let ratio = lambda_max / eps0;
    let mut points = Vec::with_capacity(4 * n);
    for dir in directions {
        for i in 0..n {
            let t = eps0 * ratio.powf(i as f64 / (n - 1) as f64);
            let lambda = dir * t;
            let cell = ctx.classify(lambda)?;
            points.push(AxesPoint {
                re: lambda.re,
                im: lambda.im,
                label: cell.label,
            });
        }
    }
    let any_spectrum = points.iter().any(|p| p.label == CellLabel::Spectrum);
    let all_resolvent = points.iter().all(|p| p.label == CellLabel::Resolvent);
    let verdict = if any_spectrum {
        ClosureVerdict::NotInClosure
    } else if all_resolvent {
        ClosureVerdict::InClosure
    } else {
        ClosureVerdict::Inconclusive
    };
    Ok(AxesReport {
        lambda_max,
        eps0,
        points,
        verdict,
    })
}

fn bmoa_to_spectra(e: BmoaError) -> SpectraError {
    match e {
        BmoaError::Weight(w) => SpectraError::Weight(w),
        BmoaError::Symbol(s) => SpectraError::Symbol(s),
        other => SpectraError::Domain(other.to_string()),
    }
}

/// Classifies λ along the four half-axes (±t, ±it, geometric ladder) on a
/// Hardy space: all-resolvent means g lies in the H^∞-closure of BMOA
/// (hence σ(T_g) = {0}), any spectrum point means it does not.
pub fn axes_test(
    g: &SymbolSpec,
    space: SpaceSpec,
    threads: usize,
) -> Result<AxesReport, SpectraError> {
    if !space.is_hardy() {
        return Err(SpectraError::Domain(
            "axes_test is a Hardy-space criterion; use bergman_axes_exploratory".into(),
        ));
    }
    axes_scan(g, space, threads)
}

/// The same scan on a Bergman space, exposed as exploratory output only:
/// whether the analogous closure equivalence holds there is open, so the
/// verdict field must not be read as a Bloch-closure claim.
pub fn bergman_axes_exploratory(
    g: &SymbolSpec,
    space: SpaceSpec,
    threads: usize,
) -> Result<AxesReport, SpectraError> {
    if space.is_hardy() {
        return Err(SpectraError::Domain(
            "expected a Bergman space; use axes_test for Hardy".into(),
        ));
    }
    axes_scan(g, space, threads)
}

//! Centralized numerical tuning constants.
//!
//! Every magic number that influences a verdict, a tolerance, or a default
//! grid size lives here with a short justification, so that calibration
//! changes happen in exactly one place and tests can reference the same
//! values the library uses.

/// Default working degree for power-series arithmetic (coefficients 0..=N).
pub const WORKDEG_DEFAULT: usize = 1024;

/// Default number of boundary samples for circle evaluation (power of two
/// so the FFT path is exact-length).
pub const BOUNDARY_M_DEFAULT: usize = 4096;

/// Hard cap on the magnitude of any single series coefficient produced by
/// `PowerSeries::exp`; beyond this the recurrence is declared overflowed.
pub const EXP_COEFF_CAP: f64 = 1e300;

/// Largest exponent fed to `f64::exp` when building weights from log-samples.
/// `exp(709.78)` is the f64 max; 700 leaves headroom for downstream sums.
pub const EXP_ARG_MAX: f64 = 700.0;

/// Refinement increment-ratio above which a weight characteristic is
/// declared divergent. For a power-type singularity the ratio equals
/// `4^(c-1)` where `c` is the exponent excess, so 1.03 sits well below the
/// mildest divergent case in the calibration set (`4^0.1 = 1.149`) while
/// staying above critical-exponent noise (ratio `= 1` exactly).
pub const REFINE_RATIO_DIVERGENT: f64 = 1.03;

/// Refinement increment-ratio below which the characteristic is declared
/// bounded (converging increments). Mildest bounded calibration case is
/// `4^(-0.1) = 0.871`.
pub const REFINE_RATIO_BOUNDED: f64 = 0.975;

/// Relative floor under which successive refinement increments count as
/// fully converged (bounded verdict regardless of their ratio).
pub const REFINE_CONVERGED_EPS: f64 = 1e-7;

/// Consistency gate for the divergent branch of the refinement policy.
/// A genuinely divergent characteristic grows geometrically, so its
/// increment ratio cannot exceed the value ratio `C2/C1` by much (an added
/// bounded offset only pushes the increment ratio *up to* the value ratio).
/// Under-resolved bounded oscillation shows the opposite signature:
/// accelerating increments on a near-flat plateau, with the increment ratio
/// far above the value ratio. Requiring
/// `increment_ratio <= GATE * C2/C1` keeps the former and demotes the
/// latter to inconclusive. Calibration: power-type divergent cases sit at
/// `<= 1.03` times the value ratio; the oscillatory false positives sit at
/// `>= 1.4` times it.
pub const REFINE_CONSISTENCY_GATE: f64 = 1.15;

/// Membership channel: growth ratio of truncated norms along the radius
/// ladder below which the boundary function is accepted as a member.
pub const MEMBERSHIP_GROWTH_PASS: f64 = 1.05;

/// Membership channel: growth ratio at or above which membership decisively
/// fails (all tail ratios must clear it). Anything between the two
/// thresholds leaves the channel undecided.
pub const MEMBERSHIP_GROWTH_FAIL: f64 = 1.12;

/// Radius ladder for Hardy membership tests: `r_j = 1 - 2^-j`.
pub const MEMBERSHIP_J_MIN: u32 = 3;
pub const MEMBERSHIP_J_MAX: u32 = 12;

/// Radius ladder for Bergman membership tests (partial area integrals).
pub const MEMBERSHIP_J_MAX_DISK: u32 = 10;

/// Samples per circle for membership-norm quadrature.
pub const MEMBERSHIP_M: usize = 1024;

/// Cells with `|lambda| < EXCLUSION_FACTOR * max |lambda on grid|` are
/// labeled `origin` and skipped (the resolvent scale `1/lambda` overflows).
pub const EXCLUSION_FACTOR: f64 = 0.05;

/// Classification-time circle weight scan: finest sampling density and
/// dyadic depth. The two coarser scales are `M/4` and `M/16`.
pub const CLASSIFY_CIRCLE_M: usize = 4096;
pub const CLASSIFY_CIRCLE_LEVELS: usize = 6;

/// Classification-time disk weight scan: finest angular density and box
/// depth (the annulus count is `DISK_ANNULI`). Divergent verdicts are
/// re-scanned at twice this density (see the classifier): bounded
/// oscillation of `exp(Im(g/lambda))` near `z = 1` is self-similar, so any
/// single density has aliasing bands that leak phantom growth into the
/// refinement statistic, but the aliasing bands of two densities do not
/// overlap while genuine power-type divergence reads identically at both.
pub const CLASSIFY_DISK_M: usize = 4096;
pub const CLASSIFY_DISK_LEVELS: usize = 4;

/// Standalone circle weight scans: default finest density and dyadic depth.
pub const WEIGHT_CIRCLE_M: usize = 16384;
pub const WEIGHT_CIRCLE_LEVELS: usize = 10;

/// Disk grid defaults: dyadic annuli count, angular samples, box levels.
pub const DISK_ANNULI: usize = 12;
pub const DISK_ANGULAR_M: usize = 4096;
pub const DISK_BOX_LEVELS: usize = 4;

/// Per-arc characteristic values are clamped at this magnitude (and the
/// verdict forced to divergent) instead of producing a non-finite f64,
/// which JSON cannot carry.
pub const WEIGHT_STAT_CLAMP: f64 = 1e300;

/// Gauss-Legendre nodes per annulus (radial quadrature).
pub const DISK_RADIAL_NODES: usize = 3;

/// Annulus-ladder step (in annuli) between disk refinement scales.
pub const DISK_LADDER_STEP: usize = 2;

/// Quasi-nilpotency: relative growth of the boundary sup of `|g|` allowed
/// when the sample count quadruples (channel a).
pub const SUP_STABILITY_TOL: f64 = 0.01;

/// Quasi-nilpotency: spectral-radius proxy threshold for the corroborating
/// channel (b). Never certifies on its own.
pub const RHO_QUASINIL_THRESHOLD: f64 = 0.25;

/// Spectral axes test: geometric sample points per half-axis.
pub const AXES_POINTS: usize = 24;

/// Garnett-Jones bisection: initial bracket is `[0, GJ_BRACKET_FACTOR * bmo]`,
/// enlarged at most `GJ_ENLARGE_MAX` times before giving up.
pub const GJ_BRACKET_FACTOR: f64 = 4.0;
pub const GJ_ENLARGE_MAX: u32 = 3;

/// Stability harness: minimum fraction of agreeing decided cells.
pub const STABILITY_MIN_AGREEMENT: f64 = 0.99;

/// Stability harness: disagreeing cells must lie within this many cells of
/// a label boundary in the reference map.
pub const STABILITY_BOUNDARY_CELLS: i64 = 2;

/// Star-shape check: interior scaling factors `t` sampled along each ray.
pub const STAR_T: [f64; 3] = [0.25, 0.5, 0.75];

/// Power iteration: convergence tolerance and iteration cap.
pub const POWER_ITER_TOL: f64 = 1e-10;
pub const POWER_ITER_MAX: usize = 10_000;

/// Compression / spectral-radius defaults.
pub const COMPRESSION_N_DEFAULT: usize = 256;
pub const RHO_N_MAX_DEFAULT: usize = 32;

/// Resolvent probe: radii `r = 1 - 2^-j` used for the growth-exponent fit.
pub const PROBE_J_MIN: u32 = 2;
pub const PROBE_J_MAX: u32 = 9;

/// Resolvent probe: working degree per kernel probe is
/// `PROBE_RESOLVE_FACTOR * ceil(1/(1-r))`. A kernel at radius `r` has
/// coefficient mass out to degree `~1/(1-r)`; a fixed multiple of that
/// keeps the truncation error of `R_g(lambda) k_r` at `e^{-2 * factor}`
/// relative, uniformly along the ladder, so the fitted growth exponent
/// reflects the operator rather than the cutoff.
pub const PROBE_RESOLVE_FACTOR: usize = 16;

/// Floor for the per-probe working degree (small radii need a minimum
/// resolution for the symbol itself).
pub const PROBE_DEG_MIN: usize = 64;

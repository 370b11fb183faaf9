//! Point classification of λ into resolvent set or spectrum of T_g,
//! λ-grid spectrum maps, and the star-shape / sector / stability /
//! quasi-nilpotence harnesses.
//!
//! A point λ ≠ 0 is classified by two independent numerical channels:
//!
//! * membership — does `e^{g/λ}` belong to the ambient space? Tested by
//!   the growth of circle means (Hardy) or partial disk integrals
//!   (Bergman) along dyadically approaching radii;
//! * weight — does `exp(p·Re(g/λ))` (times the Bergman density) satisfy
//!   the A∞/B∞ condition? Tested by the refinement scans in [`crate::weights`].
//!
//! Resolvent requires both to pass, a decisive failure of either marks
//! spectrum, and everything else stays undecided. Finite resolution can
//! never certify boundary points, so theorem harnesses treat undecided
//! cells as abstentions rather than failures.

use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

use crate::bmoa;
use crate::exec;
use crate::grids::{CircleGrid, DiskGrid};
use crate::operators;
use crate::spaces::SpaceSpec;
use crate::symbols::{SymbolError, SymbolSpec};
use crate::tuning::{
    BOUNDARY_M_DEFAULT, CLASSIFY_CIRCLE_LEVELS, CLASSIFY_CIRCLE_M, CLASSIFY_DISK_LEVELS,
    CLASSIFY_DISK_M, DISK_ANNULI, DISK_RADIAL_NODES, EXCLUSION_FACTOR, MEMBERSHIP_GROWTH_FAIL,
    MEMBERSHIP_GROWTH_PASS, MEMBERSHIP_J_MAX, MEMBERSHIP_J_MAX_DISK, MEMBERSHIP_J_MIN,
    MEMBERSHIP_M, RHO_QUASINIL_THRESHOLD, STABILITY_BOUNDARY_CELLS, STABILITY_MIN_AGREEMENT,
    STAR_T, SUP_STABILITY_TOL,
};
use crate::weights::{
    ainfty_characteristic_scales, binfty_characteristic_scales, ArcDyadicTree, CarlesonGrid,
    CircleScales, DiskRung, DiskScales, RingRow, Verdict, WeightError,
};

/// Errors from classification and harnesses.
#[derive(Debug, thiserror::Error)]
pub enum SpectraError {
    /// λ lies inside the exclusion radius where the criteria degenerate.
    #[error("lambda too close to the origin: |lambda| = {modulus:.3e} < {eps0:.3e}")]
    OverflowNearOrigin { modulus: f64, eps0: f64 },
    /// Invalid argument combination.
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Classification label of one λ-cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellLabel {
    Resolvent,
    Spectrum,
    Undecided,
    Origin,
}

impl CellLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellLabel::Resolvent => "resolvent",
            CellLabel::Spectrum => "spectrum",
            CellLabel::Undecided => "undecided",
            CellLabel::Origin => "origin",
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, CellLabel::Resolvent | CellLabel::Spectrum)
    }
}

/// One classified cell with its diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct CellRecord {
    pub label: CellLabel,
    /// Dyadic growth exponent of the membership integrals: the base-2 log
    /// of the mean ratio of the last integrals (0 for flat sequences).
    pub growth_exponent: f64,
    pub weight_verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CellRecord {
    fn origin() -> Self {
        Self {
            label: CellLabel::Origin,
            growth_exponent: 0.0,
            weight_verdict: None,
            note: None,
        }
    }

    fn undecided_with_note(note: String) -> Self {
        Self {
            label: CellLabel::Undecided,
            growth_exponent: 0.0,
            weight_verdict: None,
            note: Some(note),
        }
    }
}

/// Resolution knobs for classification. The defaults balance scan margin
/// against per-cell cost for full maps.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    /// Finest circle resolution of the weight scan (power of two).
    pub circle_m: usize,
    /// Dyadic arc depth of the circle weight scan.
    pub circle_levels: usize,
    /// Finest angular resolution of the disk weight scan (power of two).
    pub disk_m: usize,
    /// Carleson box depth of the disk weight scan.
    pub disk_levels: usize,
    /// Annulus depth of the disk weight scan.
    pub disk_annuli: usize,
    /// Samples per membership circle.
    pub membership_m: usize,
    /// Exclusion radius: classification errors out below it.
    pub eps0: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            circle_m: CLASSIFY_CIRCLE_M,
            circle_levels: CLASSIFY_CIRCLE_LEVELS,
            disk_m: CLASSIFY_DISK_M,
            disk_levels: CLASSIFY_DISK_LEVELS,
            disk_annuli: DISK_ANNULI,
            membership_m: MEMBERSHIP_M,
            eps0: 0.0,
        }
    }
}

/// Boundary samples of `g` split into real and imaginary parts.
struct UvRow {
    u: Vec<f64>,
    v: Vec<f64>,
}

fn uv_on_circle(g: &SymbolSpec, radius: f64, m: usize) -> Result<UvRow, SymbolError> {
    let grid = CircleGrid::new(radius, m, 0.5);
    let samples = g.boundary(&grid)?;
    Ok(UvRow {
        u: samples.values.iter().map(|z| z.re).collect(),
        v: samples.values.iter().map(|z| z.im).collect(),
    })
}

struct DiskCtxRing {
    annulus: usize,
    weight: f64,
    ln_density: f64,
    u: Vec<f64>,
    v: Vec<f64>,
}

struct DiskCtxRung {
    ktil: usize,
    m: usize,
    rings: Vec<DiskCtxRing>,
}

struct ShellRing {
    annulus: usize,
    weight: f64,
    ln_density: f64,
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Precomputed boundary/interior samples of one symbol in one space, shared
/// by every λ classified against it. Per λ only the exponents
/// `p·Re(g/λ) = p·(U·u − V·v)` with `1/λ = u + iv` are recomputed.
///
/// The `_confirm` triples hold the same scan geometry at twice the angular
/// density: a divergent weight verdict is only trusted when it reproduces
/// there, since aliasing of bounded boundary oscillation is density-specific
/// while genuine divergence is not.
pub struct ClassifierContext {
    space: SpaceSpec,
    cfg: ClassifyConfig,
    p: f64,
    circle: [UvRow; 3],
    circle_confirm: [UvRow; 3],
    member_circles: Vec<UvRow>,
    disk_rungs: Option<[DiskCtxRung; 3]>,
    disk_rungs_confirm: Option<[DiskCtxRung; 3]>,
    member_shells: Option<Vec<ShellRing>>,
}

impl ClassifierContext {
    pub fn new(
        g: &SymbolSpec,
        space: SpaceSpec,
        cfg: ClassifyConfig,
    ) -> Result<Self, SpectraError> {
        let m = cfg.circle_m;
        if !m.is_power_of_two() || m < 128 {
            return Err(SpectraError::Domain(format!(
                "circle_m must be a power of two >= 128, got {m}"
            )));
        }
        let circle = [
            uv_on_circle(g, 1.0, m / 16)?,
            uv_on_circle(g, 1.0, m / 4)?,
            uv_on_circle(g, 1.0, m)?,
        ];
        let circle_confirm = [
            uv_on_circle(g, 1.0, m / 8)?,
            uv_on_circle(g, 1.0, m / 2)?,
            uv_on_circle(g, 1.0, 2 * m)?,
        ];
        let (member_circles, disk_rungs, disk_rungs_confirm, member_shells) = match space {
            SpaceSpec::Hardy { .. } => {
                let mut circles = Vec::new();
                for j in MEMBERSHIP_J_MIN..=MEMBERSHIP_J_MAX {
                    let r = 1.0 - 0.5f64.powi(j as i32);
                    circles.push(uv_on_circle(g, r, cfg.membership_m)?);
                }
                (circles, None, None, None)
            }
            SpaceSpec::Bergman { alpha, .. } => {
                let build_rung = |ktil: usize, mr: usize| -> Result<DiskCtxRung, SpectraError> {
                    let grid = DiskGrid::dyadic_annuli(ktil, DISK_RADIAL_NODES, mr);
                    let mut rings = Vec::new();
                    for ring in grid.rings.iter().filter(|r| !r.is_sliver) {
                        let row = uv_on_circle(g, ring.radius, mr)?;
                        rings.push(DiskCtxRing {
                            annulus: ring.annulus,
                            weight: ring.weight,
                            ln_density: alpha * (1.0 - ring.radius * ring.radius).ln(),
                            u: row.u,
                            v: row.v,
                        });
                    }
                    Ok(DiskCtxRung {
                        ktil,
                        m: mr,
                        rings,
                    })
                };
                let k = cfg.disk_annuli;
                let rungs = [
                    build_rung(k - 4, cfg.disk_m / 16)?,
                    build_rung(k - 2, cfg.disk_m / 4)?,
                    build_rung(k, cfg.disk_m)?,
                ];
                let rungs_confirm = [
                    build_rung(k - 4, cfg.disk_m / 8)?,
                    build_rung(k - 2, cfg.disk_m / 2)?,
                    build_rung(k, 2 * cfg.disk_m)?,
                ];
                let shell_grid = DiskGrid::dyadic_annuli(
                    MEMBERSHIP_J_MAX_DISK as usize,
                    DISK_RADIAL_NODES,
                    cfg.membership_m,
                );
                let mut shells = Vec::new();
                for ring in shell_grid.rings.iter().filter(|r| !r.is_sliver) {
                    let row = uv_on_circle(g, ring.radius, cfg.membership_m)?;
                    shells.push(ShellRing {
                        annulus: ring.annulus,
                        weight: ring.weight,
                        ln_density: alpha * (1.0 - ring.radius * ring.radius).ln(),
                        u: row.u,
                        v: row.v,
                    });
                }
                (Vec::new(), Some(rungs), Some(rungs_confirm), Some(shells))
            }
        };
        Ok(Self {
            space,
            cfg,
            p: space.p(),
            circle,
            circle_confirm,
            member_circles,
            disk_rungs,
            disk_rungs_confirm,
            member_shells,
        })
    }

    pub fn config(&self) -> &ClassifyConfig {
        &self.cfg
    }

    /// Classifies one point. Errors inside the exclusion radius.
    pub fn classify(&self, lambda: Complex64) -> Result<CellRecord, SpectraError> {
        let modulus = lambda.norm();
        let floor = self.cfg.eps0.max(1e-12);
        if modulus < floor {
            return Err(SpectraError::OverflowNearOrigin {
                modulus,
                eps0: floor,
            });
        }
        let n = lambda.norm_sqr();
        let u = lambda.re / n;
        let v = -lambda.im / n;
        let weight_verdict = self.weight_verdict(u, v)?;
        let membership = match self.space {
            SpaceSpec::Hardy { .. } => self.hardy_membership(u, v),
            SpaceSpec::Bergman { .. } => self.bergman_membership(u, v),
        };
        let label = if weight_verdict == Verdict::Divergent || membership.pass == Some(false) {
            CellLabel::Spectrum
        } else if weight_verdict == Verdict::Bounded && membership.pass == Some(true) {
            CellLabel::Resolvent
        } else {
            CellLabel::Undecided
        };
        Ok(CellRecord {
            label,
            growth_exponent: membership.growth_exponent,
            weight_verdict: Some(weight_verdict),
            note: None,
        })
    }

    fn weight_verdict(&self, u: f64, v: f64) -> Result<Verdict, SpectraError> {
        let main = self.weight_scan(u, v, false)?;
        if main != Verdict::Divergent {
            return Ok(main);
        }
        // Genuine (power-type) divergence reads the same at any adequate
        // density; phantom growth from aliased boundary oscillation does
        // not. Only a divergence that reproduces at twice the density is
        // trusted.
        let confirm = self.weight_scan(u, v, true)?;
        Ok(if confirm == Verdict::Divergent {
            Verdict::Divergent
        } else {
            Verdict::Inconclusive
        })
    }

    fn weight_scan(&self, u: f64, v: f64, confirm: bool) -> Result<Verdict, SpectraError> {
        let p = self.p;
        let phi = |row: &UvRow| -> Vec<f64> {
            row.u
                .iter()
                .zip(row.v.iter())
                .map(|(&a, &b)| p * (a * u - b * v))
                .collect()
        };
        match self.space {
            SpaceSpec::Hardy { .. } => {
                let rows = if confirm {
                    &self.circle_confirm
                } else {
                    &self.circle
                };
                let scales =
                    CircleScales::from_logs(phi(&rows[0]), phi(&rows[1]), phi(&rows[2]))?;
                let tree = ArcDyadicTree::new(self.cfg.circle_levels)?;
                Ok(ainfty_characteristic_scales(&scales, &tree)?.verdict)
            }
            SpaceSpec::Bergman { .. } => {
                let rungs = if confirm {
                    self.disk_rungs_confirm.as_ref()
                } else {
                    self.disk_rungs.as_ref()
                }
                .expect("bergman context");
                let build = |rung: &DiskCtxRung| DiskRung {
                    ktil: rung.ktil,
                    m: rung.m,
                    rows: rung
                        .rings
                        .iter()
                        .map(|ring| RingRow {
                            annulus: ring.annulus,
                            weight: ring.weight,
                            logs: ring
                                .u
                                .iter()
                                .zip(ring.v.iter())
                                .map(|(&a, &b)| ring.ln_density + p * (a * u - b * v))
                                .collect(),
                        })
                        .collect(),
                };
                let scales =
                    DiskScales::from_rungs([build(&rungs[0]), build(&rungs[1]), build(&rungs[2])]);
                let carleson = CarlesonGrid::new(self.cfg.disk_levels)?;
                Ok(binfty_characteristic_scales(&scales, &carleson)?.verdict)
            }
        }
    }

    /// Hardy membership: log circle means of |e^{g/λ}|^p at radii
    /// 1 − 2^{-j}; pass when the last three ratios stay under the growth
    /// threshold, fail when any reaches the failure threshold.
    fn hardy_membership(&self, u: f64, v: f64) -> MembershipResult {
        let p = self.p;
        let ln_means: Vec<f64> = self
            .member_circles
            .iter()
            .map(|row| {
                let mut mx = f64::NEG_INFINITY;
                for (&a, &b) in row.u.iter().zip(row.v.iter()) {
                    mx = mx.max(p * (a * u - b * v));
                }
                let mut s = 0.0;
                for (&a, &b) in row.u.iter().zip(row.v.iter()) {
                    s += (p * (a * u - b * v) - mx).exp();
                }
                mx + (s / row.u.len() as f64).ln()
            })
            .collect();
        membership_from_ln(&ln_means)
    }

    /// Bergman membership: partial weighted-area integrals of |e^{g/λ}|^p
    /// over |z| < 1 − 2^{-j}, accumulated annulus by annulus.
    fn bergman_membership(&self, u: f64, v: f64) -> MembershipResult {
        let p = self.p;
        let alpha_factor = match self.space {
            SpaceSpec::Bergman { alpha, .. } => 1.0 + alpha,
            SpaceSpec::Hardy { .. } => unreachable!(),
        };
        let shells = self.member_shells.as_ref().expect("bergman context");
        let mf = self.cfg.membership_m as f64;
        // Contribution of each annulus, then cumulative partials.
        let jmax = MEMBERSHIP_J_MAX_DISK as usize;
        let mut annulus_sum = vec![0.0f64; jmax];
        for ring in shells {
            let mut s = 0.0;
            for (&a, &b) in ring.u.iter().zip(ring.v.iter()) {
                let e = ring.ln_density + p * (a * u - b * v);
                s += if e > 700.0 { f64::INFINITY } else { e.exp() };
            }
            annulus_sum[ring.annulus] += alpha_factor * ring.weight * s / mf;
        }
        let mut ln_partials = Vec::new();
        let mut acc = 0.0f64;
        for (k, add) in annulus_sum.iter().enumerate() {
            acc += add;
            let j = k + 1; // integral out to radius 1 - 2^{-(k+1)}
            if j >= MEMBERSHIP_J_MIN as usize {
                ln_partials.push(acc.ln());
            }
        }
        membership_from_ln(&ln_partials)
    }
}

struct MembershipResult {
    pass: Option<bool>,
    growth_exponent: f64,
}

fn membership_from_ln(ln_integrals: &[f64]) -> MembershipResult {
    let n = ln_integrals.len();
    if n < 4 {
        return MembershipResult {
            pass: None,
            growth_exponent: 0.0,
        };
    }
    let ratios: Vec<f64> = (n - 3..n)
        .map(|i| (ln_integrals[i] - ln_integrals[i - 1]).exp())
        .collect();
    // A decisive fail needs *every* tail ratio above the fail threshold:
    // a convergent-but-slow tail under oscillation can spike one ratio past
    // it, but sustained growth across all three rungs cannot be jitter.
    let pass = if ratios.iter().all(|r| *r < MEMBERSHIP_GROWTH_PASS) {
        Some(true)
    } else if ratios.iter().all(|r| !(*r < MEMBERSHIP_GROWTH_FAIL)) {
        Some(false)
    } else {
        None
    };
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let mut growth_exponent = mean.log2();
    if !growth_exponent.is_finite() {
        growth_exponent = if mean > 1.0 { 999.0 } else { -999.0 };
    }
    MembershipResult {
        pass,
        growth_exponent,
    }
}

/// Convenience single-point classification (builds a context per call).
pub fn classify_point(
    g: &SymbolSpec,
    lambda: Complex64,
    space: SpaceSpec,
    cfg: ClassifyConfig,
) -> Result<CellRecord, SpectraError> {
    ClassifierContext::new(g, space, cfg)?.classify(lambda)
}

// ---------------------------------------------------------------------------
// Spectrum maps
// ---------------------------------------------------------------------------

/// Rectangle and resolution of a λ-grid sweep.
#[derive(Debug, Clone, Copy)]
pub struct MapConfig {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
    pub nx: usize,
    pub ny: usize,
    pub threads: usize,
}

impl MapConfig {
    fn validate(&self) -> Result<(), SpectraError> {
        if !(self.re_hi > self.re_lo) || !(self.im_hi > self.im_lo) {
            return Err(SpectraError::Domain(
                "map rectangle must have positive extent".into(),
            ));
        }
        if self.nx < 2 || self.ny < 2 || self.nx * self.ny > 4_000_000 {
            return Err(SpectraError::Domain(format!(
                "map resolution {}x{} out of range",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

/// A classified λ-grid: cells in row-major order (`iy * nx + ix`), each cell
/// labeled at its center.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMap {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
    pub nx: usize,
    pub ny: usize,
    pub eps0: f64,
    pub cells: Vec<CellRecord>,
}

impl SpectrumMap {
    pub fn dx(&self) -> f64 {
        (self.re_hi - self.re_lo) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.im_hi - self.im_lo) / self.ny as f64
    }

    pub fn center(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.re_lo + (ix as f64 + 0.5) * self.dx(),
            self.im_lo + (iy as f64 + 0.5) * self.dy(),
        )
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &CellRecord {
        &self.cells[iy * self.nx + ix]
    }

    /// Grid cell containing a point, if inside the rectangle.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - self.re_lo) / self.dx();
        let fy = (z.im - self.im_lo) / self.dy();
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
        if ix >= self.nx || iy >= self.ny {
            None
        } else {
            Some((ix, iy))
        }
    }

    pub fn label_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for c in &self.cells {
            let k = match c.label {
                CellLabel::Resolvent => 0,
                CellLabel::Spectrum => 1,
                CellLabel::Undecided => 2,
                CellLabel::Origin => 3,
            };
            counts[k] += 1;
        }
        counts
    }

    /// Numerical stand-in for |σ(T_g)|: the largest modulus of a
    /// spectrum-labeled cell center plus one cell diagonal, or eps0 when no
    /// cell is labeled spectrum.
    pub fn spectrum_bound(&self) -> f64 {
        let mut best = 0.0f64;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if self.cell(ix, iy).label == CellLabel::Spectrum {
                    best = best.max(self.center(ix, iy).norm());
                }
            }
        }
        if best > 0.0 {
            best + self.dx().hypot(self.dy())
        } else {
            self.eps0
        }
    }

    /// CSV rows `re,im,label,growth_exponent,weight_verdict`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "re,im,label,growth_exponent,weight_verdict")?;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = self.center(ix, iy);
                let c = self.cell(ix, iy);
                let wv = match c.weight_verdict {
                    Some(Verdict::Bounded) => "bounded",
                    Some(Verdict::Divergent) => "divergent",
                    Some(Verdict::Inconclusive) => "inconclusive",
                    None => "none",
                };
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    crate::series::fmt_f64(z.re),
                    crate::series::fmt_f64(z.im),
                    c.label.as_str(),
                    crate::series::fmt_f64(c.growth_exponent),
                    wv
                )?;
            }
        }
        Ok(())
    }
}

/// Classifies every cell center of the rectangle. Cells inside the
/// exclusion radius are labeled origin; per-cell errors become undecided
/// cells carrying a note.
pub fn spectrum_map(
    g: &SymbolSpec,
    space: SpaceSpec,
    map_cfg: &MapConfig,
    classify_cfg: ClassifyConfig,
) -> Result<SpectrumMap, SpectraError> {
    map_cfg.validate()?;
    let dx = (map_cfg.re_hi - map_cfg.re_lo) / map_cfg.nx as f64;
    let dy = (map_cfg.im_hi - map_cfg.im_lo) / map_cfg.ny as f64;
    let center = |ix: usize, iy: usize| {
        Complex64::new(
            map_cfg.re_lo + (ix as f64 + 0.5) * dx,
            map_cfg.im_lo + (iy as f64 + 0.5) * dy,
        )
    };
    let mut max_mod = 0.0f64;
    for (ix, iy) in [
        (0, 0),
        (map_cfg.nx - 1, 0),
        (0, map_cfg.ny - 1),
        (map_cfg.nx - 1, map_cfg.ny - 1),
    ] {
        max_mod = max_mod.max(center(ix, iy).norm());
    }
    let eps0 = EXCLUSION_FACTOR * max_mod;
    let mut cfg = classify_cfg;
    cfg.eps0 = eps0;
    let ctx = ClassifierContext::new(g, space, cfg)?;
    let cells = exec::map_indexed(map_cfg.nx * map_cfg.ny, map_cfg.threads, |idx| {
        let (ix, iy) = (idx % map_cfg.nx, idx / map_cfg.nx);
        let lambda = center(ix, iy);
        if lambda.norm() < eps0 {
            return CellRecord::origin();
        }
        match ctx.classify(lambda) {
            Ok(cell) => cell,
            Err(e) => CellRecord::undecided_with_note(e.to_string()),
        }
    });
    Ok(SpectrumMap {
        re_lo: map_cfg.re_lo,
        re_hi: map_cfg.re_hi,
        im_lo: map_cfg.im_lo,
        im_hi: map_cfg.im_hi,
        nx: map_cfg.nx,
        ny: map_cfg.ny,
        eps0,
        cells,
    })
}

// ---------------------------------------------------------------------------
// Star-shape and sector harnesses
// ---------------------------------------------------------------------------

/// A spectrum cell whose inward ray passes through a resolvent cell.
#[derive(Debug, Clone, Serialize)]
pub struct StarViolation {
    pub from: (usize, usize),
    pub t: f64,
    pub through: (usize, usize),
}

/// Checks that the spectrum-labeled region is star-shaped about the origin
/// at checker resolution: for every spectrum cell λ and t in {0.25, 0.5,
/// 0.75}, the cell containing tλ must not be resolvent-labeled.
pub fn star_shape_check(map: &SpectrumMap) -> Vec<StarViolation> {
    let mut violations = Vec::new();
    for iy in 0..map.ny {
        for ix in 0..map.nx {
            if map.cell(ix, iy).label != CellLabel::Spectrum {
                continue;
            }
            let lambda = map.center(ix, iy);
            for &t in STAR_T.iter() {
                if let Some((jx, jy)) = map.locate(lambda * t) {
                    if map.cell(jx, jy).label == CellLabel::Resolvent {
                        violations.push(StarViolation {
                            from: (ix, iy),
                            t,
                            through: (jx, jy),
                        });
                    }
                }
            }
        }
    }
    violations
}

/// Half-angle of the sector at `r·λ` inscribed in the spectrum:
/// `min(arccos(r/r'), arcsin(r(1−r')|λ| / (r'·specbound)))`, clamped to
/// `[0, π/2]`.
pub fn sector_halfangle(
    r: f64,
    rp: f64,
    lambda: Complex64,
    specbound: f64,
) -> Result<f64, SpectraError> {
    if !(r > 0.0 && r < rp && rp < 1.0) {
        return Err(SpectraError::Domain(format!(
            "need 0 < r < r' < 1, got r = {r}, r' = {rp}"
        )));
    }
    let modulus = lambda.norm();
    if !(modulus > 0.0) || !(specbound >= modulus) {
        return Err(SpectraError::Domain(format!(
            "need specbound >= |lambda| > 0, got |lambda| = {modulus}, specbound = {specbound}"
        )));
    }
    let a1 = (r / rp).acos();
    let arg = r * (1.0 - rp) * modulus / (rp * specbound);
    let a2 = if arg >= 1.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        arg.asin()
    };
    Ok(a1.min(a2).clamp(0.0, std::f64::consts::FRAC_PI_2))
}

/// Result of sampling a sector against the map labels.
#[derive(Debug, Clone, Serialize)]
pub struct SectorReport {
    pub pass: bool,
    pub halfangle: f64,
    pub specbound: f64,
    pub checked: usize,
    pub outside: usize,
    pub counterexamples: Vec<(f64, f64)>,
}

/// Samples the circular sector (convex hull of the origin and the arc of
/// radius r|λ| about direction arg λ) at sub-cell density and verifies no
/// sample lands in a resolvent cell.
pub fn sector_inclusion_check(
    map: &SpectrumMap,
    lambda: Complex64,
    r: f64,
    rp: f64,
) -> Result<SectorReport, SpectraError> {
    let (ix, iy) = map.locate(lambda).ok_or_else(|| {
        SpectraError::Domain(format!("lambda {lambda} lies outside the map rectangle"))
    })?;
    let label = map.cell(ix, iy).label;
    if label != CellLabel::Spectrum {
        return Err(SpectraError::Domain(format!(
            "lambda {lambda} is in a {}-labeled cell, need spectrum",
            label.as_str()
        )));
    }
    let specbound = map.spectrum_bound();
    let halfangle = sector_halfangle(r, rp, lambda, specbound)?;
    let radius = r * lambda.norm();
    let dir = lambda.arg();
    let step = 0.5 * map.dx().min(map.dy());
    let nr = ((radius / step).ceil() as usize).max(2);
    let mut checked = 0usize;
    let mut outside = 0usize;
    let mut counterexamples = Vec::new();
    for i in 1..=nr {
        let rho = radius * i as f64 / nr as f64;
        let arc = 2.0 * halfangle * rho;
        let na = ((arc / step).ceil() as usize).max(1) + 1;
        for k in 0..na {
            let psi = if na == 1 {
                0.0
            } else {
                -halfangle + 2.0 * halfangle * k as f64 / (na - 1) as f64
            };
            let z = Complex64::from_polar(rho, dir + psi);
            match map.locate(z) {
                None => outside += 1,
                Some((jx, jy)) => {
                    checked += 1;
                    if map.cell(jx, jy).label == CellLabel::Resolvent {
                        counterexamples.push((z.re, z.im));
                    }
                }
            }
        }
    }
    Ok(SectorReport {
        pass: counterexamples.is_empty(),
        halfangle,
        specbound,
        checked,
        outside,
        counterexamples,
    })
}

// ---------------------------------------------------------------------------
// Quasi-nilpotence certificate and stability harness
// ---------------------------------------------------------------------------

/// Evidence gathered about σ(T_h) = {0}.
#[derive(Debug, Clone, Serialize)]
pub struct QuasinilReport {
    /// Sup of |h| on the boundary grid at the base and refined resolutions.
    pub sup_coarse: f64,
    pub sup_fine: f64,
    /// Channel (a): the sup norm is stable under refinement (h ∈ H^∞).
    pub sup_bounded: bool,
    /// Channel (b), corroborating only: compression spectral-radius ladder.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_corroborates: Option<bool>,
    /// Channel (c), Hardy only: axes classification verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes_in_closure: Option<bool>,
    pub verdict: bool,
}

/// Certifies (numerically) that a symbol generates a quasi-nilpotent T_g:
/// channel (a) sup-norm stability on refining boundary grids, channel (b)
/// compression spectral radii (reported, never decisive), channel (c) the
/// axes test on Hardy spaces. The verdict requires (a) or (c).
pub fn quasinil_certificate(
    g: &SymbolSpec,
    space: SpaceSpec,
    threads: usize,
) -> Result<QuasinilReport, SpectraError> {
    let sup_of = |m: usize| -> Result<f64, SpectraError> {
        let grid = CircleGrid::new(1.0, m, 0.5);
        let samples = g.boundary(&grid)?;
        Ok(samples
            .values
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max))
    };
    let sup_coarse = sup_of(BOUNDARY_M_DEFAULT)?;
    let sup_fine = sup_of(4 * BOUNDARY_M_DEFAULT)?;
    let sup_bounded = sup_fine <= sup_coarse * (1.0 + SUP_STABILITY_TOL) + 1e-12;
    let (rho, rho_corroborates) = if (space.p() - 2.0).abs() < 1e-12 {
        let series = g.series(128);
        match operators::spectral_radius_estimate(&series, space, 128, 8, threads) {
            Ok(seq) => {
                let last = *seq.last().unwrap_or(&f64::INFINITY);
                (Some(seq), Some(last < RHO_QUASINIL_THRESHOLD))
            }
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    let axes_in_closure = if space.is_hardy() && !sup_bounded {
        let report = bmoa::axes_test(g, space, threads)?;
        Some(report.verdict == bmoa::ClosureVerdict::InClosure)
    } else {
        None
    };
    let verdict = sup_bounded || axes_in_closure == Some(true);
    Ok(QuasinilReport {
        sup_coarse,
        sup_fine,
        sup_bounded,
        rho,
        rho_corroborates,
        axes_in_closure,
        verdict,
    })
}

/// One disagreeing cell between the base and perturbed maps.
#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub ix: usize,
    pub iy: usize,
    pub base: CellLabel,
    pub perturbed: CellLabel,
}

/// Comparison of σ(T_g) and σ(T_{g+h}) at map resolution.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    /// False when h failed the quasi-nilpotence certificate; the comparison
    /// is still reported but proves nothing about spectral stability.
    pub probative: bool,
    pub quasinil: QuasinilReport,
    /// Agreement rate over cells decided in both maps.
    pub agreement: f64,
    pub decided_both: usize,
    pub disagreements: Vec<Disagreement>,
    /// All disagreements lie within the boundary band of the base map.
    pub within_band: bool,
    pub pass: bool,
}

/// Runs the spectral-stability harness: maps g and g + h, then compares.
pub fn stability_harness(
    g: &SymbolSpec,
    h: &SymbolSpec,
    space: SpaceSpec,
    map_cfg: &MapConfig,
    classify_cfg: ClassifyConfig,
) -> Result<(StabilityReport, SpectrumMap, SpectrumMap), SpectraError> {
    let quasinil = quasinil_certificate(h, space, map_cfg.threads)?;
    let base = spectrum_map(g, space, map_cfg, classify_cfg)?;
    let sum = SymbolSpec::sum(g.clone(), h.clone());
    let perturbed = spectrum_map(&sum, space, map_cfg, classify_cfg)?;
    let mut decided_both = 0usize;
    let mut agree = 0usize;
    let mut disagreements = Vec::new();
    for iy in 0..base.ny {
        for ix in 0..base.nx {
            let a = base.cell(ix, iy).label;
            let b = perturbed.cell(ix, iy).label;
            if a.is_decided() && b.is_decided() {
                decided_both += 1;
                if a == b {
                    agree += 1;
                } else {
                    disagreements.push(Disagreement {
                        ix,
                        iy,
                        base: a,
                        perturbed: b,
                    });
                }
            }
        }
    }
    let agreement = if decided_both == 0 {
        1.0
    } else {
        agree as f64 / decided_both as f64
    };
    // Boundary band of the base map: undecided/origin cells and decided
    // cells adjacent to the opposite decided label.
    let mut band = vec![false; base.cells.len()];
    for iy in 0..base.ny {
        for ix in 0..base.nx {
            let label = base.cell(ix, iy).label;
            if !label.is_decided() {
                band[iy * base.nx + ix] = true;
                continue;
            }
            let mut boundary = false;
            if ix > 0 {
                let n = base.cell(ix - 1, iy).label;
                boundary |= n.is_decided() && n != label;
            }
            if ix + 1 < base.nx {
                let n = base.cell(ix + 1, iy).label;
                boundary |= n.is_decided() && n != label;
            }
            if iy > 0 {
                let n = base.cell(ix, iy - 1).label;
                boundary |= n.is_decided() && n != label;
            }
            if iy + 1 < base.ny {
                let n = base.cell(ix, iy + 1).label;
                boundary |= n.is_decided() && n != label;
            }
            band[iy * base.nx + ix] = boundary;
        }
    }
    let radius = STABILITY_BOUNDARY_CELLS;
    let within = |d: &Disagreement| -> bool {
        let (ix, iy) = (d.ix as i64, d.iy as i64);
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let (jx, jy) = (ix + dx, iy + dy);
                if jx < 0 || jy < 0 || jx >= base.nx as i64 || jy >= base.ny as i64 {
                    continue;
                }
                if band[jy as usize * base.nx + jx as usize] {
                    return true;
                }
            }
        }
        false
    };
    let within_band = disagreements.iter().all(within);
    let pass = quasinil.verdict && agreement >= STABILITY_MIN_AGREEMENT && within_band;
    let report = StabilityReport {
        probative: quasinil.verdict,
        quasinil,
        agreement,
        decided_both,
        disagreements,
        within_band,
        pass,
    };
    Ok((report, base, perturbed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hardy2() -> SpaceSpec {
        SpaceSpec::hardy(2.0).unwrap()
    }

    fn classify(g: &SymbolSpec, lambda: Complex64, space: SpaceSpec) -> CellRecord {
        classify_point(g, lambda, space, ClassifyConfig::default()).unwrap()
    }

    #[test]
    fn cesaro_hardy_points_match_the_resolvent_condition() {
        // For g = log 1/(1-z) on H^2 the resolvent set is exactly
        // Re(1/lambda) < 1/2, i.e. the exterior of the closed disk
        // D(1, 1).
        let g = SymbolSpec::cesaro_log();
        let ctx = ClassifierContext::new(&g, hardy2(), ClassifyConfig::default()).unwrap();
        let cases = [
            (Complex64::new(2.5, 0.0), CellLabel::Resolvent),
            (Complex64::new(1.0, 0.0), CellLabel::Spectrum),
            (Complex64::new(0.0, 1.0), CellLabel::Resolvent),
            (Complex64::new(0.5, 0.5), CellLabel::Spectrum),
            (Complex64::new(-0.4, 0.0), CellLabel::Resolvent),
            (Complex64::new(1.2, -0.9), CellLabel::Spectrum),
        ];
        for (lambda, expected) in cases {
            let cell = ctx.classify(lambda).unwrap();
            assert_eq!(cell.label, expected, "lambda = {lambda}");
        }
    }

    #[test]
    fn cesaro_bergman_point_is_spectrum() {
        // On the unweighted Bergman space (alpha = 0, p = 2) the spectrum
        // is D(1/2, 1/2); lambda = 0.75 lies inside.
        let g = SymbolSpec::cesaro_log();
        let space = SpaceSpec::bergman(2.0, 0.0).unwrap();
        let ctx = ClassifierContext::new(&g, space, ClassifyConfig::default()).unwrap();
        let inside = ctx.classify(Complex64::new(0.75, 0.0)).unwrap();
        assert_eq!(inside.label, CellLabel::Spectrum);
        let outside = ctx.classify(Complex64::new(1.4, 0.0)).unwrap();
        assert_eq!(outside.label, CellLabel::Resolvent);
    }

    #[test]
    fn bounded_symbols_classify_resolvent_everywhere_off_origin() {
        for g in [
            SymbolSpec::polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
            SymbolSpec::blaschke(Complex64::new(0.3, 0.0)).unwrap(),
        ] {
            let ctx = ClassifierContext::new(&g, hardy2(), ClassifyConfig::default()).unwrap();
            for lambda in [
                Complex64::new(0.3, 0.0),
                Complex64::new(-0.2, 0.1),
                Complex64::new(0.0, 0.4),
                Complex64::new(1.5, -1.0),
            ] {
                let cell = ctx.classify(lambda).unwrap();
                assert_eq!(cell.label, CellLabel::Resolvent, "{} at {lambda}", g.name);
            }
        }
    }

    #[test]
    fn classification_is_rotation_covariant() {
        let g = SymbolSpec::cesaro_log();
        let base = ClassifierContext::new(&g, hardy2(), ClassifyConfig::default()).unwrap();
        for phase in [Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)] {
            let rotated = SymbolSpec::scaled(phase, g.clone());
            let ctx = ClassifierContext::new(&rotated, hardy2(), ClassifyConfig::default()).unwrap();
            for lambda in [
                Complex64::new(1.5, 0.3),
                Complex64::new(0.4, -0.2),
                Complex64::new(-0.8, 0.0),
                Complex64::new(0.9, 0.9),
            ] {
                let a = base.classify(lambda).unwrap();
                let b = ctx.classify(phase * lambda).unwrap();
                assert_eq!(a.label, b.label, "phase {phase}, lambda {lambda}");
                assert_eq!(a.growth_exponent, b.growth_exponent);
            }
        }
    }

    #[test]
    fn classification_is_scale_invariant() {
        let g = SymbolSpec::cesaro_log();
        let base = ClassifierContext::new(&g, hardy2(), ClassifyConfig::default()).unwrap();
        for c in [2.0, 0.5] {
            let scaled = SymbolSpec::scaled(Complex64::new(c, 0.0), g.clone());
            let ctx = ClassifierContext::new(&scaled, hardy2(), ClassifyConfig::default()).unwrap();
            for lambda in [
                Complex64::new(1.5, 0.3),
                Complex64::new(0.7, 0.0),
                Complex64::new(0.0, -0.6),
            ] {
                let a = base.classify(lambda).unwrap();
                let b = ctx.classify(lambda * c).unwrap();
                assert_eq!(a.label, b.label, "c = {c}, lambda = {lambda}");
                assert_eq!(a.growth_exponent, b.growth_exponent);
                assert_eq!(a.weight_verdict, b.weight_verdict);
            }
        }
    }

    #[test]
    fn exclusion_radius_is_enforced() {
        let g = SymbolSpec::cesaro_log();
        let mut cfg = ClassifyConfig::default();
        cfg.eps0 = 0.1;
        match classify_point(&g, Complex64::new(0.05, 0.0), hardy2(), cfg) {
            Err(SpectraError::OverflowNearOrigin { .. }) => {}
            other => panic!("expected OverflowNearOrigin, got {other:?}"),
        }
    }

    #[test]
    fn zero_symbol_map_is_all_resolvent_off_origin() {
        let map_cfg = MapConfig {
            re_lo: -1.0,
            re_hi: 1.0,
            im_lo: -1.0,
            im_hi: 1.0,
            nx: 12,
            ny: 12,
            threads: 1,
        };
        let map = spectrum_map(
            &SymbolSpec::zero(),
            hardy2(),
            &map_cfg,
            ClassifyConfig::default(),
        )
        .unwrap();
        for cell in &map.cells {
            assert!(matches!(
                cell.label,
                CellLabel::Resolvent | CellLabel::Origin
            ));
        }
        assert!(star_shape_check(&map).is_empty());
    }

    #[test]
    fn star_checker_flags_synthetic_annulus() {
        // An annulus of spectrum labels with a resolvent core violates
        // star-shapedness; the checker must see it.
        let nx = 21;
        let ny = 21;
        let mut map = SpectrumMap {
            re_lo: -2.0,
            re_hi: 2.0,
            im_lo: -2.0,
            im_hi: 2.0,
            nx,
            ny,
            eps0: 0.05,
            cells: vec![
                CellRecord {
                    label: CellLabel::Resolvent,
                    growth_exponent: 0.0,
                    weight_verdict: None,
                    note: None,
                };
                nx * ny
            ],
        };
        for iy in 0..ny {
            for ix in 0..nx {
                let z = map.center(ix, iy);
                let r = z.norm();
                if (1.4..1.8).contains(&r) {
                    map.cells[iy * nx + ix].label = CellLabel::Spectrum;
                }
            }
        }
        assert!(!star_shape_check(&map).is_empty());
    }

    #[test]
    fn sector_halfangle_formula_values() {
        let lam = Complex64::new(1.0, 0.0);
        let v = sector_halfangle(0.5, 0.75, lam, 2.0).unwrap();
        assert!((v - (1.0f64 / 12.0).asin()).abs() < 1e-15);
        let w = sector_halfangle(0.1, 0.9, lam, 1.0).unwrap();
        assert!((w - (1.0f64 / 90.0).asin()).abs() < 1e-15);
        let tiny = sector_halfangle(0.75 * (1.0 - 1e-12), 0.75, lam, 2.0).unwrap();
        assert!(tiny < 1e-5);
        assert!(sector_halfangle(0.9, 0.5, lam, 2.0).is_err());
        assert!(sector_halfangle(0.5, 0.75, lam, 0.5).is_err());
    }

    #[test]
    fn membership_growth_thresholds() {
        // Flat sequence passes, strongly growing sequence fails, and a
        // sequence in the gray zone stays undecided.
        let flat: Vec<f64> = (0..8).map(|i| (i as f64) * 0.01).collect();
        assert_eq!(membership_from_ln(&flat).pass, Some(true));
        let growing: Vec<f64> = (0..8).map(|i| (i as f64) * 0.5).collect();
        assert_eq!(membership_from_ln(&growing).pass, Some(false));
        let gray: Vec<f64> = (0..8).map(|i| (i as f64) * 0.08).collect();
        assert_eq!(membership_from_ln(&gray).pass, None);
        let short = [0.0, 0.1];
        assert_eq!(membership_from_ln(&short).pass, None);
    }

    #[test]
    fn quasinil_certificate_decides_bounded_symbols() {
        let bounded = SymbolSpec::blaschke(Complex64::new(0.3, 0.0)).unwrap();
        let report = quasinil_certificate(&bounded, hardy2(), 1).unwrap();
        assert!(report.sup_bounded);
        assert!(report.verdict);
        let zero = quasinil_certificate(&SymbolSpec::zero(), hardy2(), 1).unwrap();
        assert!(zero.verdict);
    }

    #[test]
    fn quasinil_certificate_rejects_cesaro() {
        let g = SymbolSpec::cesaro_log();
        let report = quasinil_certificate(&g, hardy2(), 1).unwrap();
        assert!(!report.sup_bounded);
        assert_eq!(report.axes_in_closure, Some(false));
        assert!(!report.verdict);
        // Finite sections approach the true spectral radius 2 very slowly;
        // at N = 128 the n = 8 root norm sits near 0.93, far above the decay
        // a quasinilpotent compression would show (Volterra: ~0.08 at n = 32).
        if let Some(rho) = &report.rho {
            assert!(*rho.last().unwrap() > 0.5, "rho ladder {rho:?}");
            assert_eq!(report.rho_corroborates, Some(false));
        }
    }
}

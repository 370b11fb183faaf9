//! Subcommand implementations: resolve the merged configuration, call the
//! library, write the provenance-stamped report files, print a one-line
//! summary, and return the exit code.
//!
//! Exit-code contract: 0 pass/answer, 1 theorem-fail, 2 configuration,
//! 3 numerical, 4 inconclusive. Report bytes are a pure function of the
//! configuration (threads never changes them), so byte-comparing outputs
//! across parallelism degrees is a valid determinism check.

use std::path::PathBuf;

use serde::Serialize;

use tgspectra::bmoa::{self, ClosureVerdict, RealBoundaryFunction};
use tgspectra::io::{self, Provenance, Report};
use tgspectra::operators::{self, ResolventProbeReport};
use tgspectra::spaces::SpaceSpec;
use tgspectra::spectra::{
    self, CellRecord, ClassifyConfig, MapConfig, SpectrumMap, StarViolation,
};
use tgspectra::symbols::SymbolSpec;
use tgspectra::tuning::{
    COMPRESSION_N_DEFAULT, DISK_ANGULAR_M, DISK_ANNULI, DISK_BOX_LEVELS, PROBE_J_MAX, PROBE_J_MIN,
    RHO_N_MAX_DEFAULT, WEIGHT_CIRCLE_LEVELS, WEIGHT_CIRCLE_M,
};
use tgspectra::weights::{
    a2_characteristic_scales, ainfty_characteristic_scales, b2_characteristic_scales,
    binfty_characteristic_scales, ArcDyadicTree, CarlesonGrid, CharacteristicReport, CircleScales,
    DiskScales, Verdict,
};
use tgspectra::{exec, Complex64};

use crate::config::{CliError, Config};

const SYMBOL_KEYS: [&str; 3] = ["symbol.kind", "symbol.a", "symbol.coeffs"];
const H_KEYS: [&str; 3] = ["h.kind", "h.a", "h.coeffs"];
const MAP_KEYS: [&str; 6] = ["re-lo", "re-hi", "im-lo", "im-hi", "nx", "ny"];
const CLASSIFY_KEYS: [&str; 6] = [
    "circle-m",
    "circle-levels",
    "disk-m",
    "disk-levels",
    "disk-annuli",
    "membership-m",
];
const SPACE_KEYS: [&str; 3] = ["space", "p", "alpha"];

/// Resolved invocation state shared by every subcommand.
pub struct Ctx {
    pub cfg: Config,
    pub out_dir: PathBuf,
    pub prefix: String,
    pub command: &'static str,
}

impl Ctx {
    fn provenance(&self) -> Provenance {
        Provenance::new(
            "tgspectra",
            env!("CARGO_PKG_VERSION"),
            self.command,
            &self.cfg.effective(),
        )
    }

    fn path(&self, ext: &str) -> PathBuf {
        self.out_dir.join(format!("{}.{ext}", self.prefix))
    }

    fn write_report<T: Serialize>(&self, payload: &T) -> Result<PathBuf, CliError> {
        let provenance = self.provenance();
        let path = self.path("json");
        io::write_json(
            &path,
            &Report {
                provenance: &provenance,
                report: payload,
            },
        )?;
        Ok(path)
    }

    fn write_csv(&self, text: &str) -> Result<PathBuf, CliError> {
        let path = self.path("csv");
        io::write_text(&path, text)?;
        Ok(path)
    }

    fn check_keys(&self, groups: &[&[&str]]) -> Result<(), CliError> {
        let mut allowed: Vec<&str> = vec!["threads"];
        for g in groups {
            allowed.extend_from_slice(g);
        }
        self.cfg.check_keys(self.command, &allowed)
    }

    fn threads(&self) -> Result<usize, CliError> {
        match self.cfg.get("threads") {
            Some(v) => v.trim().parse().map_err(|_| {
                CliError::Config(format!(
                    "key 'threads' must be a non-negative integer, got '{v}'"
                ))
            }),
            None => Ok(exec::default_threads()),
        }
    }

    fn symbol(&self) -> Result<SymbolSpec, CliError> {
        Ok(SymbolSpec::from_kv("symbol", &|k| self.cfg.get(k))?)
    }

    fn space(&self) -> Result<SpaceSpec, CliError> {
        let kind = self.cfg.get("space").unwrap_or_else(|| "hardy".to_string());
        let p = self.cfg.get_f64("p", 2.0)?;
        match kind.as_str() {
            "hardy" => {
                if self.cfg.get("alpha").is_some() {
                    return Err(CliError::Config(
                        "key 'alpha' applies only to space=bergman".into(),
                    ));
                }
                Ok(SpaceSpec::hardy(p)?)
            }
            "bergman" => Ok(SpaceSpec::bergman(p, self.cfg.get_f64("alpha", 0.0)?)?),
            other => Err(CliError::Config(format!(
                "unknown space '{other}' (expected hardy or bergman)"
            ))),
        }
    }

    fn map_config(&self) -> Result<MapConfig, CliError> {
        Ok(MapConfig {
            re_lo: self.cfg.get_f64("re-lo", -0.5)?,
            re_hi: self.cfg.get_f64("re-hi", 2.5)?,
            im_lo: self.cfg.get_f64("im-lo", -1.5)?,
            im_hi: self.cfg.get_f64("im-hi", 1.5)?,
            nx: self.cfg.get_usize("nx", 160)?,
            ny: self.cfg.get_usize("ny", 160)?,
            threads: self.threads()?,
        })
    }

    fn classify_config(&self) -> Result<ClassifyConfig, CliError> {
        let d = ClassifyConfig::default();
        Ok(ClassifyConfig {
            circle_m: self.cfg.get_usize("circle-m", d.circle_m)?,
            circle_levels: self.cfg.get_usize("circle-levels", d.circle_levels)?,
            disk_m: self.cfg.get_usize("disk-m", d.disk_m)?,
            disk_levels: self.cfg.get_usize("disk-levels", d.disk_levels)?,
            disk_annuli: self.cfg.get_usize("disk-annuli", d.disk_annuli)?,
            membership_m: self.cfg.get_usize("membership-m", d.membership_m)?,
            eps0: self.cfg.get_f64("eps0", d.eps0)?,
        })
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}:{}", z.re, z.im)
    }
}

fn map_summary(map: &SpectrumMap) -> String {
    let [r, s, u, o] = map.label_counts();
    format!(
        "{} cells: resolvent={r} spectrum={s} undecided={u} origin={o}",
        map.cells.len()
    )
}

// ---------------------------------------------------------------------------
// spectrum-map
// ---------------------------------------------------------------------------

pub fn spectrum_map(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&SYMBOL_KEYS, &SPACE_KEYS, &MAP_KEYS, &CLASSIFY_KEYS])?;
    let g = ctx.symbol()?;
    let space = ctx.space()?;
    let map = spectra::spectrum_map(&g, space, &ctx.map_config()?, ctx.classify_config()?)?;
    let mut csv = Vec::new();
    map.write_csv(&mut csv)?;
    let csv_path = ctx.write_csv(std::str::from_utf8(&csv).expect("csv is ascii"))?;
    let json_path = ctx.write_report(&map)?;
    println!(
        "spectrum-map: {}; wrote {} and {}",
        map_summary(&map),
        csv_path.display(),
        json_path.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ClassifyPayload {
    lambda_re: f64,
    lambda_im: f64,
    cell: CellRecord,
}

pub fn classify(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&SYMBOL_KEYS, &SPACE_KEYS, &["lambda", "eps0"], &CLASSIFY_KEYS])?;
    let g = ctx.symbol()?;
    let space = ctx.space()?;
    let lambda = ctx.cfg.require_complex("lambda")?;
    let cell = spectra::classify_point(&g, lambda, space, ctx.classify_config()?)?;
    let code = if cell.label.is_decided() { 0 } else { 4 };
    let payload = ClassifyPayload {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        cell,
    };
    let path = ctx.write_report(&payload)?;
    println!(
        "classify: lambda={} label={} growth_exponent={}; wrote {}",
        fmt_complex(lambda),
        payload.cell.label.as_str(),
        payload.cell.growth_exponent,
        path.display()
    );
    Ok(code)
}

// ---------------------------------------------------------------------------
// radius
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RadiusPayload {
    n_trunc: usize,
    n_max: usize,
    /// `rho[i]` is the n-th root `||A^n||^{1/n}` at `n = i + 1`.
    rho: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe: Option<ResolventProbeReport>,
}

pub fn radius(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[
        &SYMBOL_KEYS,
        &SPACE_KEYS,
        &["n-trunc", "n-max", "lambda", "matrix"],
    ])?;
    let g = ctx.symbol()?;
    let space = ctx.space()?;
    let n_trunc = ctx.cfg.get_usize("n-trunc", COMPRESSION_N_DEFAULT)?;
    let n_max = ctx.cfg.get_usize("n-max", RHO_N_MAX_DEFAULT)?;
    let threads = ctx.threads()?;
    let series = g.series(n_trunc);
    let rho = operators::spectral_radius_estimate(&series, space, n_trunc, n_max, threads)?;
    if matches!(ctx.cfg.get("matrix").as_deref(), Some("true")) {
        let a = operators::compression_matrix(&series, space, n_trunc)?;
        let mut csv = Vec::new();
        a.write_csv(&mut csv)?;
        let path = ctx
            .out_dir
            .join(format!("{}_matrix.csv", ctx.prefix));
        io::write_text(&path, std::str::from_utf8(&csv).expect("csv is ascii"))?;
    }
    let probe = match ctx.cfg.get_complex("lambda")? {
        Some(lambda) => {
            let radii: Vec<f64> = (PROBE_J_MIN..=PROBE_J_MAX)
                .map(|j| 1.0 - 0.5f64.powi(j as i32))
                .collect();
            Some(operators::resolvent_probe(&g, lambda, space, &radii)?)
        }
        None => None,
    };
    let payload = RadiusPayload {
        n_trunc,
        n_max,
        rho,
        probe,
    };
    let path = ctx.write_report(&payload)?;
    let first = payload.rho.first().copied().unwrap_or(f64::NAN);
    let last = payload.rho.last().copied().unwrap_or(f64::NAN);
    match &payload.probe {
        Some(p) => println!(
            "radius: rho[1]={first} rho[{n_max}]={last} probe_exponent={}; wrote {}",
            p.exponent,
            path.display()
        ),
        None => println!(
            "radius: rho[1]={first} rho[{n_max}]={last}; wrote {}",
            path.display()
        ),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// weights
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct WeightsPayload {
    weight: String,
    report: CharacteristicReport,
}

enum WeightDomain {
    Circle,
    Disk,
}

pub fn weights(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[
        &["weight.kind", "weight.a", "weight.beta", "characteristic"],
        &["lambda", "m", "levels", "annuli", "angular-m", "box-levels"],
        &SYMBOL_KEYS,
    ])?;
    let kind = ctx.cfg.require("weight.kind")?;
    let characteristic = ctx
        .cfg
        .get("characteristic")
        .unwrap_or_else(|| match kind.as_str() {
            "disk-power" => "b2".to_string(),
            _ => "a2".to_string(),
        });
    let domain = match characteristic.as_str() {
        "a2" | "ainfty" => WeightDomain::Circle,
        "b2" | "binfty" => WeightDomain::Disk,
        other => {
            return Err(CliError::Config(format!(
                "unknown characteristic '{other}' (expected a2, ainfty, b2, or binfty)"
            )))
        }
    };

    // Log-weight on the boundary circle or on the disk, by weight family.
    let log_weight: Box<dyn Fn(f64, f64) -> f64> = match kind.as_str() {
        "constant" => Box::new(|_r, _theta| 0.0),
        "circle-power" => {
            if matches!(domain, WeightDomain::Disk) {
                return Err(CliError::Config(
                    "weight 'circle-power' is a circle weight; use characteristic a2 or ainfty"
                        .into(),
                ));
            }
            let a = ctx.cfg.get_f64("weight.a", f64::NAN)?;
            if !a.is_finite() {
                return Err(CliError::Config(
                    "weight 'circle-power' requires key 'weight.a'".into(),
                ));
            }
            // |1 - e^{i theta}| = 2 |sin(theta/2)|.
            Box::new(move |_r, theta| a * (2.0 * (theta / 2.0).sin().abs()).ln())
        }
        "disk-power" => {
            if matches!(domain, WeightDomain::Circle) {
                return Err(CliError::Config(
                    "weight 'disk-power' is a disk weight; use characteristic b2 or binfty".into(),
                ));
            }
            let beta = ctx.cfg.get_f64("weight.beta", f64::NAN)?;
            if !beta.is_finite() {
                return Err(CliError::Config(
                    "weight 'disk-power' requires key 'weight.beta'".into(),
                ));
            }
            Box::new(move |r, _theta| beta * (1.0 - r * r).ln())
        }
        "exp-of-symbol" => {
            let g = ctx.symbol()?;
            let lambda = ctx.cfg.require_complex("lambda")?;
            if lambda.norm_sqr() == 0.0 {
                return Err(CliError::Config("key 'lambda' must be nonzero".into()));
            }
            Box::new(move |r, theta| (g.eval(Complex64::from_polar(r, theta)) / lambda).re)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown weight.kind '{other}' (expected constant, circle-power, disk-power, \
                 or exp-of-symbol)"
            )))
        }
    };

    let report = match domain {
        WeightDomain::Circle => {
            let m = ctx.cfg.get_usize("m", WEIGHT_CIRCLE_M)?;
            let levels = ctx.cfg.get_usize("levels", WEIGHT_CIRCLE_LEVELS)?;
            let tree = ArcDyadicTree::new(levels)?;
            let scales = CircleScales::from_log_fn(m, |theta| log_weight(1.0, theta))?;
            match characteristic.as_str() {
                "a2" => a2_characteristic_scales(&scales, &tree)?,
                _ => ainfty_characteristic_scales(&scales, &tree)?,
            }
        }
        WeightDomain::Disk => {
            let annuli = ctx.cfg.get_usize("annuli", DISK_ANNULI)?;
            let angular_m = ctx.cfg.get_usize("angular-m", DISK_ANGULAR_M)?;
            let box_levels = ctx.cfg.get_usize("box-levels", DISK_BOX_LEVELS)?;
            let carleson = CarlesonGrid::new(box_levels)?;
            let scales = DiskScales::from_log_fn(annuli, angular_m, &log_weight)?;
            match characteristic.as_str() {
                "b2" => b2_characteristic_scales(&scales, &carleson)?,
                _ => binfty_characteristic_scales(&scales, &carleson)?,
            }
        }
    };

    let code = match report.verdict {
        Verdict::Inconclusive => 4,
        _ => 0,
    };
    let payload = WeightsPayload {
        weight: kind,
        report,
    };
    let path = ctx.write_report(&payload)?;
    let r = &payload.report;
    println!(
        "weights: {} {} verdict={:?} growth={} values=[{}, {}, {}]; wrote {}",
        payload.weight,
        r.condition,
        r.verdict,
        r.growth,
        r.refinement.values[0],
        r.refinement.values[1],
        r.refinement.values[2],
        path.display()
    );
    Ok(code)
}

// ---------------------------------------------------------------------------
// gj
// ---------------------------------------------------------------------------

pub fn gj(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&["phi.kind", "phi.a", "tol", "m", "levels"], &SYMBOL_KEYS])?;
    let levels = ctx.cfg.get_usize("levels", WEIGHT_CIRCLE_LEVELS)?;
    let tree = ArcDyadicTree::new(levels)?;
    let m = ctx.cfg.get_usize("m", 1usize << (levels + 4))?;
    let tol = ctx.cfg.get_f64("tol", 1e-2)?;
    let kind = ctx.cfg.require("phi.kind")?;
    let phi = match kind.as_str() {
        "zero" => RealBoundaryFunction::from_fn(m, |_| 0.0)?,
        "cos" => RealBoundaryFunction::from_fn(m, f64::cos)?,
        "power-log" => {
            let a = ctx.cfg.get_f64("phi.a", f64::NAN)?;
            if !a.is_finite() {
                return Err(CliError::Config(
                    "phi 'power-log' requires key 'phi.a'".into(),
                ));
            }
            // a * log|1 - e^{i theta}|.
            RealBoundaryFunction::from_fn(m, move |theta| {
                a * (2.0 * (theta / 2.0).sin().abs()).ln()
            })?
        }
        "re-symbol" | "im-symbol" => {
            let g = ctx.symbol()?;
            let (re, im) = RealBoundaryFunction::components(&g, m)?;
            if kind == "re-symbol" {
                re
            } else {
                im
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown phi.kind '{other}' (expected zero, cos, power-log, re-symbol, \
                 or im-symbol)"
            )))
        }
    };
    let report = bmoa::gj_level(&phi, &tree, tol)?;
    let path = ctx.write_report(&report)?;
    println!(
        "gj: estimate={} uncertainty={} inconclusive_stop={}; wrote {}",
        report.estimate,
        report.uncertainty,
        report.stopped_inconclusive,
        path.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// distance
// ---------------------------------------------------------------------------

pub fn distance(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&SYMBOL_KEYS, &["tol", "levels"]])?;
    let g = ctx.symbol()?;
    let levels = ctx.cfg.get_usize("levels", WEIGHT_CIRCLE_LEVELS)?;
    let tree = ArcDyadicTree::new(levels)?;
    let tol = ctx.cfg.get_f64("tol", 1e-2)?;
    let report = bmoa::dist_hinfty_report(&g, &tree, tol)?;
    let path = ctx.write_report(&report)?;
    println!(
        "distance: proxy={} verdict={:?}; wrote {}",
        report.proxy_distance,
        report.verdict,
        path.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn verify_stability(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[
        &SYMBOL_KEYS,
        &H_KEYS,
        &SPACE_KEYS,
        &MAP_KEYS,
        &CLASSIFY_KEYS,
    ])?;
    let g = ctx.symbol()?;
    let h = SymbolSpec::from_kv("h", &|k| ctx.cfg.get(k))?;
    let space = ctx.space()?;
    let (report, _base, _perturbed) =
        spectra::stability_harness(&g, &h, space, &ctx.map_config()?, ctx.classify_config()?)?;
    let code = if report.pass {
        0
    } else if !report.probative {
        4
    } else {
        1
    };
    let path = ctx.write_report(&report)?;
    println!(
        "verify stability: probative={} agreement={} within_band={} pass={}; wrote {}",
        report.probative,
        report.agreement,
        report.within_band,
        report.pass,
        path.display()
    );
    Ok(code)
}

#[derive(Serialize)]
struct StarPayload {
    pass: bool,
    spectrum_cells: usize,
    violations: Vec<StarViolation>,
}

pub fn verify_star(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&SYMBOL_KEYS, &SPACE_KEYS, &MAP_KEYS, &CLASSIFY_KEYS])?;
    let g = ctx.symbol()?;
    let space = ctx.space()?;
    let map = spectra::spectrum_map(&g, space, &ctx.map_config()?, ctx.classify_config()?)?;
    let violations = spectra::star_shape_check(&map);
    let payload = StarPayload {
        pass: violations.is_empty(),
        spectrum_cells: map.label_counts()[1],
        violations,
    };
    let path = ctx.write_report(&payload)?;
    println!(
        "verify star: {}; violations={} pass={}; wrote {}",
        map_summary(&map),
        payload.violations.len(),
        payload.pass,
        path.display()
    );
    Ok(if payload.pass { 0 } else { 1 })
}

pub fn verify_sector(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[
        &SYMBOL_KEYS,
        &SPACE_KEYS,
        &MAP_KEYS,
        &CLASSIFY_KEYS,
        &["lambda", "r", "r-prime"],
    ])?;
    let g = ctx.symbol()?;
    let space = ctx.space()?;
    let lambda = ctx.cfg.require_complex("lambda")?;
    let r = ctx.cfg.get_f64("r", 0.5)?;
    let rp = ctx.cfg.get_f64("r-prime", 0.75)?;
    let map = spectra::spectrum_map(&g, space, &ctx.map_config()?, ctx.classify_config()?)?;
    let report = spectra::sector_inclusion_check(&map, lambda, r, rp)?;
    let path = ctx.write_report(&report)?;
    println!(
        "verify sector: lambda={} halfangle={} checked={} counterexamples={} pass={}; wrote {}",
        fmt_complex(lambda),
        report.halfangle,
        report.checked,
        report.counterexamples.len(),
        report.pass,
        path.display()
    );
    Ok(if report.pass { 0 } else { 1 })
}

pub fn verify_closure(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&SYMBOL_KEYS, &["p"]])?;
    let g = ctx.symbol()?;
    let space = SpaceSpec::hardy(ctx.cfg.get_f64("p", 2.0)?)?;
    let report = bmoa::axes_test(&g, space, ctx.threads()?)?;
    let code = match report.verdict {
        ClosureVerdict::InClosure => 0,
        ClosureVerdict::NotInClosure => 1,
        ClosureVerdict::Inconclusive => 4,
    };
    let path = ctx.write_report(&report)?;
    println!(
        "verify closure: verdict={:?} lambda_max={} points={}; wrote {}",
        report.verdict,
        report.lambda_max,
        report.points.len(),
        path.display()
    );
    Ok(code)
}

pub fn verify_quasinil(ctx: &Ctx) -> Result<i32, CliError> {
    ctx.check_keys(&[&SYMBOL_KEYS, &SPACE_KEYS])?;
    let g = ctx.symbol()?;
    let space = ctx.space()?;
    let report = spectra::quasinil_certificate(&g, space, ctx.threads()?)?;
    let path = ctx.write_report(&report)?;
    println!(
        "verify quasinil: sup_bounded={} verdict={}; wrote {}",
        report.sup_bounded,
        report.verdict,
        path.display()
    );
    Ok(if report.verdict { 0 } else { 1 })
}

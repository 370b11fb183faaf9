//! Built-in analytic symbols `g` with exact Taylor coefficients, closed-form
//! point evaluation, and boundary sampling.
//!
//! The symbol library covers the families the rest of the crate is
//! calibrated against: the Cesàro log-symbol `log 1/(1-z)` and its real
//! multiples, polynomials, single Blaschke factors (normalized to
//! `g(0) = 0`), and explicit coefficient lists. Symbols compose by sum and
//! by complex scaling, which is what perturbation harnesses and rotation
//! tests consume.

use num_complex::Complex64;

use crate::grids::CircleGrid;
use crate::series::PowerSeries;

/// Errors from symbol construction or sampling.
#[derive(Debug, thiserror::Error)]
pub enum SymbolError {
    /// A boundary node coincides with a declared singularity.
    #[error("boundary node {index} coincides with a singularity of {name} (use an offset grid)")]
    SingularSample { index: usize, name: String },
    /// Invalid parameter (e.g. Blaschke point outside the open disk).
    #[error("invalid symbol parameter: {0}")]
    InvalidParameter(String),
    /// Unknown or malformed config keys.
    #[error("symbol config error: {0}")]
    Config(String),
}

/// The symbol families.
#[derive(Debug, Clone)]
pub enum SymbolKind {
    /// `g(z) = log 1/(1-z)`, the classical Cesàro symbol.
    CesaroLog,
    /// A polynomial with the given coefficients (constant term first).
    Polynomial(Vec<Complex64>),
    /// `g(z) = (a-z)/(1-conj(a) z) - a`, a single Blaschke factor shifted
    /// so `g(0) = 0`; requires `|a| < 1`.
    BlaschkeFactor(Complex64),
    /// `g(z) = a * log 1/(1-z)` for real `a`.
    PowerLog(f64),
    /// Explicit Taylor coefficients, taken as given (no normalization).
    ExplicitCoeffs(Vec<Complex64>),
    /// Pointwise sum of two symbols.
    Sum(Box<SymbolSpec>, Box<SymbolSpec>),
    /// Complex multiple of a symbol.
    Scaled(Complex64, Box<SymbolSpec>),
}

/// A named analytic symbol.
#[derive(Debug, Clone)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub name: String,
}

/// Boundary samples of a symbol on a circle grid.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    pub values: Vec<Complex64>,
    /// Indices of nodes adjacent to declared singularities (informational;
    /// values there are finite whenever construction succeeded).
    pub singular_adjacent: Vec<usize>,
}

impl SymbolSpec {
    pub fn cesaro_log() -> Self {
        Self {
            kind: SymbolKind::CesaroLog,
            name: "cesaro-log".into(),
        }
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self {
            kind: SymbolKind::Polynomial(coeffs),
            name: "polynomial".into(),
        }
    }

    /// The monomial `z^k` as a polynomial symbol.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self {
            kind: SymbolKind::Polynomial(coeffs),
            name: format!("z^{k}"),
        }
    }

    pub fn blaschke(a: Complex64) -> Result<Self, SymbolError> {
        if a.norm() >= 1.0 {
            return Err(SymbolError::InvalidParameter(format!(
                "Blaschke parameter must satisfy |a| < 1, got |a| = {}",
                a.norm()
            )));
        }
        Ok(Self {
            kind: SymbolKind::BlaschkeFactor(a),
            name: format!("blaschke({},{})", a.re, a.im),
        })
    }

    pub fn power_log(a: f64) -> Self {
        Self {
            kind: SymbolKind::PowerLog(a),
            name: format!("power-log({a})"),
        }
    }

    pub fn coeffs(c: Vec<Complex64>) -> Self {
        Self {
            kind: SymbolKind::ExplicitCoeffs(c),
            name: "coeffs".into(),
        }
    }

    pub fn sum(a: SymbolSpec, b: SymbolSpec) -> Self {
        let name = format!("{}+{}", a.name, b.name);
        Self {
            kind: SymbolKind::Sum(Box::new(a), Box::new(b)),
            name,
        }
    }

    pub fn scaled(c: Complex64, s: SymbolSpec) -> Self {
        let name = format!("({},{})*{}", c.re, c.im, s.name);
        Self {
            kind: SymbolKind::Scaled(c, Box::new(s)),
            name,
        }
    }

    /// The zero symbol.
    pub fn zero() -> Self {
        Self {
            kind: SymbolKind::Polynomial(vec![Complex64::new(0.0, 0.0)]),
            name: "zero".into(),
        }
    }

    /// Exact Taylor coefficients through degree `n`.
    pub fn series(&self, n: usize) -> PowerSeries {
        match &self.kind {
            SymbolKind::CesaroLog => cesaro_series(1.0, n),
            SymbolKind::PowerLog(a) => cesaro_series(*a, n),
            SymbolKind::Polynomial(c) | SymbolKind::ExplicitCoeffs(c) => {
                PowerSeries::new(c.clone()).truncated(n)
            }
            SymbolKind::BlaschkeFactor(a) => {
                // (a-z)/(1-conj(a) z) - a = sum_{k>=1} conj(a)^(k-1) (|a|^2 - 1) z^k
                let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
                let factor = Complex64::new(a.norm_sqr() - 1.0, 0.0);
                let ac = a.conj();
                let mut pow = Complex64::new(1.0, 0.0);
                for c in coeffs.iter_mut().skip(1) {
                    *c = pow * factor;
                    pow *= ac;
                }
                PowerSeries::new(coeffs)
            }
            SymbolKind::Sum(a, b) => a.series(n).add(&b.series(n)),
            SymbolKind::Scaled(c, s) => s.series(n).scale(*c),
        }
    }

    /// Closed-form evaluation at a point of the open disk (and on the
    /// circle away from singularities).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            SymbolKind::CesaroLog => -(Complex64::new(1.0, 0.0) - z).ln(),
            SymbolKind::PowerLog(a) => -(Complex64::new(1.0, 0.0) - z).ln() * *a,
            SymbolKind::Polynomial(c) | SymbolKind::ExplicitCoeffs(c) => horner(c, z),
            SymbolKind::BlaschkeFactor(a) => {
                (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z) - a
            }
            SymbolKind::Sum(a, b) => a.eval(z) + b.eval(z),
            SymbolKind::Scaled(c, s) => *c * s.eval(z),
        }
    }

    /// Closed-form evaluation of `g'` at a point.
    pub fn derivative_eval(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            SymbolKind::CesaroLog => (Complex64::new(1.0, 0.0) - z).inv(),
            SymbolKind::PowerLog(a) => (Complex64::new(1.0, 0.0) - z).inv() * *a,
            SymbolKind::Polynomial(c) | SymbolKind::ExplicitCoeffs(c) => {
                let d: Vec<Complex64> = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, ck)| ck * k as f64)
                    .collect();
                if d.is_empty() {
                    Complex64::new(0.0, 0.0)
                } else {
                    horner(&d, z)
                }
            }
            SymbolKind::BlaschkeFactor(a) => {
                let den = Complex64::new(1.0, 0.0) - a.conj() * z;
                Complex64::new(a.norm_sqr() - 1.0, 0.0) / (den * den)
            }
            SymbolKind::Sum(a, b) => a.derivative_eval(z) + b.derivative_eval(z),
            SymbolKind::Scaled(c, s) => *c * s.derivative_eval(z),
        }
    }

    /// Angles on the unit circle where the symbol's boundary extension is
    /// singular.
    pub fn singular_thetas(&self) -> Vec<f64> {
        match &self.kind {
            SymbolKind::CesaroLog | SymbolKind::PowerLog(_) => vec![0.0],
            SymbolKind::Polynomial(_)
            | SymbolKind::BlaschkeFactor(_)
            | SymbolKind::ExplicitCoeffs(_) => vec![],
            SymbolKind::Sum(a, b) => {
                let mut v = a.singular_thetas();
                for t in b.singular_thetas() {
                    if !v.iter().any(|&u| (u - t).abs() < 1e-14) {
                        v.push(t);
                    }
                }
                v
            }
            SymbolKind::Scaled(_, s) => s.singular_thetas(),
        }
    }

    /// True when the symbol has no closed-form boundary extension and must
    /// be sampled through its series at a slightly interior radius.
    fn needs_series_boundary(&self) -> bool {
        match &self.kind {
            SymbolKind::ExplicitCoeffs(_) => true,
            SymbolKind::Sum(a, b) => a.needs_series_boundary() || b.needs_series_boundary(),
            SymbolKind::Scaled(_, s) => s.needs_series_boundary(),
            _ => false,
        }
    }

    /// Samples the symbol on a circle grid.
    ///
    /// Closed-form kinds are evaluated exactly; explicit-coefficient
    /// symbols are evaluated through their series at radius
    /// `min(grid.radius, 1 - 1/M)`. At radius 1, a node closer than
    /// `~1e-12` radians to a declared singularity is an error (offset
    /// grids never trigger it).
    pub fn boundary(&self, grid: &CircleGrid) -> Result<BoundarySamples, SymbolError> {
        let sing = self.singular_thetas();
        let tau = 2.0 * std::f64::consts::PI;
        let mut singular_adjacent = Vec::new();
        if grid.radius >= 1.0 {
            for j in 0..grid.m {
                let th = grid.theta(j) % tau;
                for &s in &sing {
                    let mut d = (th - s).abs() % tau;
                    if d > tau / 2.0 {
                        d = tau - d;
                    }
                    if d < 1e-12 {
                        return Err(SymbolError::SingularSample {
                            index: j,
                            name: self.name.clone(),
                        });
                    }
                    if d < tau / grid.m as f64 {
                        singular_adjacent.push(j);
                    }
                }
            }
        }
        let values = if self.needs_series_boundary() {
            let radius = grid.radius.min(1.0 - 1.0 / grid.m as f64);
            let series = self.series(self.series_degree_hint(grid.m));
            let vals = series.evaluate_on_circle(radius, grid.m, grid.offset);
            vals
        } else {
            (0..grid.m).map(|j| self.eval(grid.point(j))).collect()
        };
        Ok(BoundarySamples {
            values,
            singular_adjacent,
        })
    }

    fn series_degree_hint(&self, m: usize) -> usize {
        match &self.kind {
            SymbolKind::ExplicitCoeffs(c) => (c.len() - 1).min(m.saturating_sub(1)),
            SymbolKind::Sum(a, b) => a.series_degree_hint(m).max(b.series_degree_hint(m)),
            SymbolKind::Scaled(_, s) => s.series_degree_hint(m),
            _ => m.saturating_sub(1),
        }
    }

    /// Builds a symbol from flat config keys under the given prefix
    /// (e.g. `symbol.kind=blaschke`, `symbol.a=0.5:0.1`,
    /// `symbol.coeffs=0,1,0.5`).
    pub fn from_kv(
        prefix: &str,
        get: &dyn Fn(&str) -> Option<String>,
    ) -> Result<Self, SymbolError> {
        let kind = get(&format!("{prefix}.kind"))
            .ok_or_else(|| SymbolError::Config(format!("missing key {prefix}.kind")))?;
        match kind.as_str() {
            "cesaro-log" => Ok(Self::cesaro_log()),
            "power-log" => {
                let a = get(&format!("{prefix}.a"))
                    .ok_or_else(|| SymbolError::Config(format!("missing key {prefix}.a")))?;
                let a: f64 = a.trim().parse().map_err(|_| {
                    SymbolError::Config(format!("{prefix}.a must be a real number"))
                })?;
                Ok(Self::power_log(a))
            }
            "blaschke" => {
                let a = get(&format!("{prefix}.a"))
                    .ok_or_else(|| SymbolError::Config(format!("missing key {prefix}.a")))?;
                let a = parse_complex(&a)
                    .ok_or_else(|| SymbolError::Config(format!("{prefix}.a must be re[:im]")))?;
                Self::blaschke(a)
            }
            "polynomial" | "coeffs" => {
                let c = get(&format!("{prefix}.coeffs")).ok_or_else(|| {
                    SymbolError::Config(format!("missing key {prefix}.coeffs"))
                })?;
                let coeffs = parse_complex_list(&c).ok_or_else(|| {
                    SymbolError::Config(format!(
                        "{prefix}.coeffs must be a comma-separated list of re[:im]"
                    ))
                })?;
                if coeffs.is_empty() {
                    return Err(SymbolError::Config(format!("{prefix}.coeffs is empty")));
                }
                if kind == "polynomial" {
                    Ok(Self::polynomial(coeffs))
                } else {
                    Ok(Self::coeffs(coeffs))
                }
            }
            other => Err(SymbolError::Config(format!(
                "unknown {prefix}.kind '{other}' (expected cesaro-log, power-log, blaschke, polynomial, or coeffs)"
            ))),
        }
    }
}

fn cesaro_series(a: f64, n: usize) -> PowerSeries {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = Complex64::new(a / k as f64, 0.0);
    }
    PowerSeries::new(coeffs)
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ck in c.iter().rev() {
        acc = acc * z + ck;
    }
    acc
}

/// Parses `re` or `re:im` into a complex number.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Some((re, im)) = s.split_once(':') {
        Some(Complex64::new(
            re.trim().parse().ok()?,
            im.trim().parse().ok()?,
        ))
    } else {
        Some(Complex64::new(s.parse().ok()?, 0.0))
    }
}

/// Parses a comma-separated list of `re[:im]` entries.
pub fn parse_complex_list(s: &str) -> Option<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

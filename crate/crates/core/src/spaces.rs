//! Hardy and weighted Bergman space descriptors.
//!
//! For `p = 2` both families have orthogonal monomials, so norms and
//! reproducing kernels are available through coefficients; for `p != 2`
//! norms are evaluated by quadrature (boundary circle for Hardy, disk grid
//! for Bergman).

use num_complex::Complex64;

use crate::grids::DiskGrid;
use crate::series::PowerSeries;

/// Errors from space construction.
#[derive(Debug, thiserror::Error)]
pub enum SpaceError {
    #[error("invalid space parameter: {0}")]
    InvalidParameter(String),
}

/// Hardy `H^p` or weighted Bergman `L^{p,alpha}_a` space of the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceSpec {
    Hardy { p: f64 },
    Bergman { p: f64, alpha: f64 },
}

impl SpaceSpec {
    pub fn hardy(p: f64) -> Result<Self, SpaceError> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(SpaceError::InvalidParameter(format!(
                "Hardy exponent must satisfy p > 0, got {p}"
            )));
        }
        Ok(SpaceSpec::Hardy { p })
    }

    pub fn bergman(p: f64, alpha: f64) -> Result<Self, SpaceError> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(SpaceError::InvalidParameter(format!(
                "Bergman exponent must satisfy p > 0, got {p}"
            )));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(SpaceError::InvalidParameter(format!(
                "Bergman weight must satisfy alpha > -1, got {alpha}"
            )));
        }
        Ok(SpaceSpec::Bergman { p, alpha })
    }

    pub fn p(&self) -> f64 {
        match self {
            SpaceSpec::Hardy { p } => *p,
            SpaceSpec::Bergman { p, .. } => *p,
        }
    }

    pub fn is_hardy(&self) -> bool {
        matches!(self, SpaceSpec::Hardy { .. })
    }

    /// Squared norm of the monomial `z^n` in the `p = 2` space:
    /// 1 for Hardy, `n! Gamma(alpha+2) / Gamma(n+alpha+2)` for Bergman
    /// (computed by the stable product recurrence).
    pub fn monomial_norm_sq(&self, n: usize) -> f64 {
        match self {
            SpaceSpec::Hardy { .. } => 1.0,
            SpaceSpec::Bergman { alpha, .. } => {
                let mut m = 1.0f64;
                for k in 1..=n {
                    m *= k as f64 / (k as f64 + alpha + 1.0);
                }
                m
            }
        }
    }

    /// All squared monomial norms through degree `n` (one pass).
    pub fn monomial_norms_sq(&self, n: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(n + 1);
        let mut m = 1.0f64;
        v.push(1.0);
        for k in 1..=n {
            if let SpaceSpec::Bergman { alpha, .. } = self {
                m *= k as f64 / (k as f64 + alpha + 1.0);
            }
            v.push(m);
        }
        v
    }

    /// `p = 2` norm via coefficients: `sqrt(sum |c_k|^2 ||z^k||^2)`.
    pub fn coeff_norm(&self, f: &PowerSeries) -> f64 {
        let norms = self.monomial_norms_sq(f.degree());
        let mut acc = 0.0f64;
        for (k, c) in f.coeffs().iter().enumerate() {
            acc += c.norm_sqr() * norms[k];
        }
        acc.sqrt()
    }

    /// Coefficients of the reproducing kernel `k_w` of the `p = 2` space,
    /// through the given degree. Hardy: `sum conj(w)^n z^n`; Bergman:
    /// `(1 - conj(w) z)^{-(2+alpha)}`.
    pub fn kernel_coeffs(&self, w: Complex64, degree: usize) -> PowerSeries {
        let wc = w.conj();
        let mut coeffs = Vec::with_capacity(degree + 1);
        match self {
            SpaceSpec::Hardy { .. } => {
                let mut pow = Complex64::new(1.0, 0.0);
                for _ in 0..=degree {
                    coeffs.push(pow);
                    pow *= wc;
                }
            }
            SpaceSpec::Bergman { alpha, .. } => {
                let mut c = Complex64::new(1.0, 0.0);
                coeffs.push(c);
                for n in 1..=degree {
                    c = c * wc * (n as f64 + 1.0 + alpha) / n as f64;
                    coeffs.push(c);
                }
            }
        }
        PowerSeries::new(coeffs)
    }

    /// Exact `p = 2` norm of the reproducing kernel at `w`.
    pub fn kernel_norm(&self, w: Complex64) -> f64 {
        let d = 1.0 - w.norm_sqr();
        match self {
            SpaceSpec::Hardy { .. } => (1.0 / d).sqrt(),
            SpaceSpec::Bergman { alpha, .. } => d.powf(-(2.0 + alpha) / 2.0),
        }
    }

    /// Quadrature `p`-norm of a truncated series: Hardy uses the circle of
    /// radius `1 - 1/m`; Bergman integrates `|f|^p (alpha+1)(1-|z|^2)^alpha`
    /// on the given disk grid (pass the grid used elsewhere in the run for
    /// consistency).
    pub fn quadrature_norm(&self, f: &PowerSeries, m: usize, disk: Option<&DiskGrid>) -> f64 {
        match self {
            SpaceSpec::Hardy { p } => {
                let r = 1.0 - 1.0 / m as f64;
                let vals = f.evaluate_on_circle(r, m, 0.5);
                let mean: f64 =
                    vals.iter().map(|v| v.norm().powf(*p)).sum::<f64>() / m as f64;
                mean.powf(1.0 / p)
            }
            SpaceSpec::Bergman { p, alpha } => {
                let grid_owned;
                let grid = match disk {
                    Some(g) => g,
                    None => {
                        grid_owned = DiskGrid::dyadic_annuli(
                            crate::tuning::DISK_ANNULI,
                            crate::tuning::DISK_RADIAL_NODES,
                            m,
                        );
                        &grid_owned
                    }
                };
                let mut acc = 0.0f64;
                for ring in &grid.rings {
                    let vals = f.evaluate_on_circle(ring.radius, grid.m, 0.5);
                    let mean: f64 =
                        vals.iter().map(|v| v.norm().powf(*p)).sum::<f64>() / grid.m as f64;
                    let t2 = 1.0 - ring.radius * ring.radius;
                    acc += ring.weight * (alpha + 1.0) * t2.powf(*alpha) * mean;
                }
                acc.powf(1.0 / p)
            }
        }
    }
}

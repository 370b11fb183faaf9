//! The operator layer: `T_g`, multiplication operators, the resolvent
//! `R_g(lambda)`, finite compressions in the `p = 2` monomial basis, and
//! norm / spectral-radius estimation.
//!
//! `T_g f(z) = Integral_0^z f(w) g'(w) dw`, so on coefficients
//! `c_k = (1/k) sum_{m<k} f_m b_{k-1-m}` with `b_j = (j+1) g_{j+1}`.
//! The resolvent of the singular integral equation is
//! `R_g(lambda) h = h(0) e^{g/lambda} + e^{g/lambda} Integral_0^z e^{-g/lambda} h'`.

use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;

use crate::exec;
use crate::series::{fmt_f64, PowerSeries, SeriesError};
use crate::spaces::SpaceSpec;
use crate::symbols::SymbolSpec;
use crate::tuning::{POWER_ITER_MAX, POWER_ITER_TOL, PROBE_DEG_MIN, PROBE_RESOLVE_FACTOR};

/// Errors from operator computations.
#[derive(Debug, thiserror::Error)]
pub enum OperatorError {
    /// The resolvent scale overflowed the series exponential.
    #[error("resolvent exponential overflow (lambda too small relative to g): {0}")]
    Overflow(#[from] SeriesError),
    /// `lambda = 0` passed where the resolvent needs `lambda != 0`.
    #[error("resolvent requires lambda != 0")]
    ZeroLambda,
    /// Matrix models exist only for the p = 2 spaces.
    #[error("unsupported space for matrix compression: p = {p} (only p = 2)")]
    UnsupportedSpace { p: f64 },
    /// Power iteration failed to converge within the iteration cap.
    #[error("power iteration did not converge within {cap} iterations (tol {tol:e})")]
    NonConvergence { cap: usize, tol: f64 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Applies `T_g` to `f`, truncated at `workdeg`.
pub fn apply_tg(g: &PowerSeries, f: &PowerSeries, workdeg: usize) -> PowerSeries {
    let mut out = vec![Complex64::new(0.0, 0.0); workdeg + 1];
    // b_j = (j+1) g_{j+1} are the coefficients of g'.
    let dg = g.derivative();
    let b = dg.coeffs();
    for (k, o) in out.iter_mut().enumerate().skip(1) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mmax = (k - 1).min(f.degree());
        for m in 0..=mmax {
            let j = k - 1 - m;
            if j <= dg.degree() {
                acc += f.coeff(m) * b[j];
            }
        }
        *o = acc / k as f64;
    }
    PowerSeries::new(out)
}

/// Applies the multiplication operator `M_h` (truncated Cauchy product).
pub fn apply_mh(h: &PowerSeries, f: &PowerSeries, workdeg: usize) -> PowerSeries {
    h.multiply(f, workdeg)
}

/// Applies the resolvent `R_g(lambda)` to `h`:
/// `h(0) e^{g/lambda} + e^{g/lambda} Integral_0^z e^{-g/lambda} h'`.
pub fn resolvent_apply(
    g: &PowerSeries,
    lambda: Complex64,
    h: &PowerSeries,
    workdeg: usize,
) -> Result<PowerSeries, OperatorError> {
    if lambda.norm_sqr() == 0.0 {
        return Err(OperatorError::ZeroLambda);
    }
    let s = lambda.inv();
    let eg = g.exp(s, workdeg)?;
    let eginv = g.exp(-s, workdeg)?;
    let integrand = eginv.multiply(&h.derivative(), workdeg);
    let integral = integrand.primitive().truncated(workdeg);
    let tail = eg.multiply(&integral, workdeg);
    Ok(eg.scale(h.coeff(0)).add(&tail))
}

/// Finite compression `P_N T P_N` in the orthonormal monomial basis of a
/// `p = 2` space; entries stored row-major.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub n: usize,
    pub space: SpaceSpec,
    data: Vec<Complex64>,
}

impl TruncatedOperator {
    pub fn from_rows(n: usize, space: SpaceSpec, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, space, data }
    }

    pub fn entry(&self, k: usize, m: usize) -> Complex64 {
        self.data[k * self.n + m]
    }

    pub fn rows(&self) -> &[Complex64] {
        &self.data
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, yk) in y.iter_mut().enumerate() {
            let row = &self.data[k * self.n..(k + 1) * self.n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            *yk = acc;
        }
        y
    }

    /// `y = A* x` (conjugate transpose).
    pub fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, &xk) in x.iter().enumerate() {
            let row = &self.data[k * self.n..(k + 1) * self.n];
            for (m, a) in row.iter().enumerate() {
                y[m] += a.conj() * xk;
            }
        }
        y
    }

    /// Matrix product `self * rhs`, parallelized over rows with a fixed
    /// per-row summation order (results are bitwise independent of the
    /// thread count).
    pub fn matmul(&self, rhs: &TruncatedOperator, threads: usize) -> TruncatedOperator {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let rows = exec::map_indexed(n, threads, |k| {
            let arow = &self.data[k * n..(k + 1) * n];
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (j, &a) in arow.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let brow = &rhs.data[j * n..(j + 1) * n];
                for (o, &b) in out.iter_mut().zip(brow.iter()) {
                    *o += a * b;
                }
            }
            out
        });
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend_from_slice(&row);
        }
        TruncatedOperator {
            n,
            space: self.space,
            data,
        }
    }

    /// Writes the matrix as CSV with header `k,n,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), OperatorError> {
        writeln!(w, "k,n,re,im")?;
        for k in 0..self.n {
            for m in 0..self.n {
                let e = self.entry(k, m);
                writeln!(w, "{},{},{},{}", k, m, fmt_f64(e.re), fmt_f64(e.im))?;
            }
        }
        Ok(())
    }
}

/// Compression of `T_g` to the first `n` orthonormal monomials of a
/// `p = 2` space. Hardy entries are `b_{k-1-m}/k` for `k > m`; Bergman
/// entries carry the monomial-norm ratio `||z^k|| / ||z^m||`.
pub fn compression_matrix(
    g: &PowerSeries,
    space: SpaceSpec,
    n: usize,
) -> Result<TruncatedOperator, OperatorError> {
    if (space.p() - 2.0).abs() > 1e-12 {
        return Err(OperatorError::UnsupportedSpace { p: space.p() });
    }
    let dg = g.derivative();
    let b = dg.coeffs();
    let norms_sq = space.monomial_norms_sq(n.saturating_sub(1));
    let norms: Vec<f64> = norms_sq.iter().map(|m| m.sqrt()).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 1..n {
        for m in 0..k {
            let j = k - 1 - m;
            if j <= dg.degree() {
                data[k * n + m] = b[j] / k as f64 * (norms[k] / norms[m]);
            }
        }
    }
    Ok(TruncatedOperator {
        n,
        space,
        data,
    })
}

/// Compression of the multiplication operator `M_h` (entries
/// `h_{k-m} ||z^k|| / ||z^m||` for `k >= m`).
pub fn multiplication_matrix(
    h: &PowerSeries,
    space: SpaceSpec,
    n: usize,
) -> Result<TruncatedOperator, OperatorError> {
    if (space.p() - 2.0).abs() > 1e-12 {
        return Err(OperatorError::UnsupportedSpace { p: space.p() });
    }
    let norms_sq = space.monomial_norms_sq(n.saturating_sub(1));
    let norms: Vec<f64> = norms_sq.iter().map(|m| m.sqrt()).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        for m in 0..=k {
            let j = k - m;
            if j <= h.degree() {
                data[k * n + m] = h.coeff(j) * (norms[k] / norms[m]);
            }
        }
    }
    Ok(TruncatedOperator {
        n,
        space,
        data,
    })
}

/// Largest singular value by power iteration on `A* A` with the
/// deterministic all-ones start vector.
pub fn operator_norm_estimate(t: &TruncatedOperator, tol: f64) -> Result<f64, OperatorError> {
    let n = t.n;
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut sigma_sq_prev = -1.0f64;
    for _ in 0..POWER_ITER_MAX {
        let av = t.apply(&v);
        let w = t.apply_adjoint(&av);
        let norm_w: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm_w == 0.0 {
            return Ok(0.0);
        }
        // Rayleigh quotient <A*Av, v> = ||Av||^2 for the current unit v.
        let sigma_sq: f64 = av.iter().map(|c| c.norm_sqr()).sum();
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / norm_w;
        }
        if sigma_sq_prev >= 0.0
            && (sigma_sq - sigma_sq_prev).abs() <= tol * sigma_sq.max(1e-300)
        {
            return Ok(sigma_sq.sqrt());
        }
        sigma_sq_prev = sigma_sq;
    }
    Err(OperatorError::NonConvergence {
        cap: POWER_ITER_MAX,
        tol,
    })
}

/// Spectral-radius proxy ladder: `rho_n = ||(P_N T_g P_N)^n||^{1/n}` for
/// `n = 1..=n_max`, via exact matrix powers of the compression. Each
/// `rho_n` is a lower-bound diagnostic for the spectral radius of the
/// compression (the truncation bias is one-sided: it underestimates).
pub fn spectral_radius_estimate(
    g: &PowerSeries,
    space: SpaceSpec,
    n_trunc: usize,
    n_max: usize,
    threads: usize,
) -> Result<Vec<f64>, OperatorError> {
    let a = compression_matrix(g, space, n_trunc)?;
    let mut powers = a.clone();
    let mut rho = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let norm = operator_norm_estimate(&powers, POWER_ITER_TOL)?;
        rho.push(norm.powf(1.0 / n as f64));
        if n < n_max {
            powers = powers.matmul(&a, threads);
        }
    }
    Ok(rho)
}

/// One probe of the resolvent on a normalized reproducing kernel.
#[derive(Debug, Clone, Serialize)]
pub struct KernelProbe {
    /// The kernel point (on the positive real axis).
    pub w: f64,
    /// `||R_g(lambda) k_w|| / ||k_w||`.
    pub ratio: f64,
}

/// Report of resolvent growth along a radius ladder of kernel probes.
#[derive(Debug, Clone, Serialize)]
pub struct ResolventProbeReport {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub probes: Vec<KernelProbe>,
    /// Least-squares slope of `ln ratio` against `ln 1/(1-w)`; a clearly
    /// positive exponent is diagnostic evidence of spectral blow-up.
    pub exponent: f64,
}

/// Working degree that fully resolves a kernel probe at radius `r`.
fn probe_workdeg(r: f64) -> usize {
    let scale = (1.0 / (1.0 - r)).ceil() as usize;
    (PROBE_RESOLVE_FACTOR * scale).max(PROBE_DEG_MIN)
}

/// Probes `R_g(lambda)` on normalized reproducing kernels `k_w` at
/// `w = radius` on the positive real axis (toward the typical boundary
/// singularity of library symbols) and fits the growth exponent.
///
/// Each probe runs at its own working degree, scaled with `1/(1-r)` so the
/// kernel (and its resolvent image) is resolved to the same relative
/// accuracy at every rung; a fixed degree would cap the computable norm at
/// the sharpest radii and drag the fitted exponent toward zero or below.
pub fn resolvent_probe(
    g: &SymbolSpec,
    lambda: Complex64,
    space: SpaceSpec,
    radii: &[f64],
) -> Result<ResolventProbeReport, OperatorError> {
    let max_deg = radii
        .iter()
        .map(|&r| {
            assert!(r > 0.0 && r < 1.0, "probe radii must lie in (0, 1)");
            probe_workdeg(r)
        })
        .max()
        .unwrap_or(PROBE_DEG_MIN);
    let gs = g.series(max_deg);
    let mut probes = Vec::with_capacity(radii.len());
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let workdeg = probe_workdeg(r);
        let w = Complex64::new(r, 0.0);
        let k = space.kernel_coeffs(w, workdeg);
        let rk = resolvent_apply(&gs, lambda, &k, workdeg)?;
        let num = if (space.p() - 2.0).abs() < 1e-12 {
            space.coeff_norm(&rk)
        } else {
            space.quadrature_norm(&rk, 4 * workdeg.next_power_of_two(), None)
        };
        let den = if (space.p() - 2.0).abs() < 1e-12 {
            space.coeff_norm(&k)
        } else {
            space.quadrature_norm(&k, 4 * workdeg.next_power_of_two(), None)
        };
        let ratio = num / den;
        probes.push(KernelProbe { w: r, ratio });
        xs.push((1.0 / (1.0 - r)).ln());
        ys.push(ratio.max(1e-300).ln());
    }
    let exponent = least_squares_slope(&xs, &ys);
    Ok(ResolventProbeReport {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        probes,
        exponent,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

//! Truncated power series with complex coefficients.
//!
//! A [`PowerSeries`] stores coefficients `c_0..=c_deg` of an analytic
//! function on the unit disk. All arithmetic is exact coefficient
//! arithmetic up to an explicit working degree; nothing here is adaptive.
//! Boundary evaluation on uniform circle grids goes through an FFT so that
//! a full grid of `m` samples costs `O(m log m)` rather than `O(m * deg)`.

use num_complex::Complex64;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use std::io::{BufRead, Write};

use crate::tuning::EXP_COEFF_CAP;

/// Errors produced by series arithmetic.
#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    /// A coefficient became non-finite (NaN or infinity).
    #[error("non-finite coefficient at index {index} during {context}")]
    NonFinite { index: usize, context: &'static str },
    /// The exponential recurrence exceeded the coefficient magnitude cap.
    #[error("series exponential overflowed at coefficient {index} (|c| > {cap:e})")]
    Overflow { index: usize, cap: f64 },
    /// Malformed CSV input.
    #[error("series CSV parse error at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    /// An I/O failure while reading or writing series data.
    #[error("series I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// A truncated power series `sum_{k=0}^{deg} c_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from explicit coefficients (constant term first).
    /// An empty vector is normalized to the zero series of degree 0.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    /// The zero series padded to the given degree.
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); degree + 1],
        }
    }

    /// The constant series `[c]`.
    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The constant series `[1]`.
    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// Highest stored coefficient index.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `c_k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Immutable view of the raw coefficient slice.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Copy truncated (or zero-padded) to exactly `degree + 1` coefficients.
    pub fn truncated(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, Complex64::new(0.0, 0.0));
        coeffs.truncate(degree + 1);
        Self { coeffs }
    }

    /// Termwise derivative. The derivative of a constant is the zero
    /// series `[0]` (degree 0), mirroring how a one-term series degrades.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Self { coeffs }
    }

    /// Termwise antiderivative with vanishing constant term; the degree
    /// grows by one.
    pub fn primitive(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / (k as f64 + 1.0));
        }
        Self { coeffs }
    }

    /// Scalar multiple `c * f`.
    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Sum, padded to the longer degree.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(k) + other.coeff(k);
        }
        Self { coeffs }
    }

    /// Difference, padded to the longer degree.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(k) - other.coeff(k);
        }
        Self { coeffs }
    }

    /// Cauchy product truncated at `workdeg`.
    pub fn multiply(&self, other: &Self, workdeg: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); workdeg + 1];
        let da = self.degree().min(workdeg);
        for (i, a) in self.coeffs.iter().take(da + 1).enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let jmax = (workdeg - i).min(other.degree());
            for (j, b) in other.coeffs.iter().take(jmax + 1).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// `exp(scale * f)` truncated at `workdeg`, via the first-order ODE
    /// recurrence: writing `E = exp(s f)`, `E' = s f' E` gives
    ///
    /// ```text
    /// E_0 = exp(s f_0),
    /// E_k = (s / k) * sum_{j=1}^{k} j f_j E_{k-j}   (k >= 1).
    /// ```
    ///
    /// Fails with [`SeriesError::Overflow`] if any coefficient magnitude
    /// exceeds [`EXP_COEFF_CAP`], and with [`SeriesError::NonFinite`] if a
    /// coefficient degenerates.
    pub fn exp(&self, scale: Complex64, workdeg: usize) -> Result<Self, SeriesError> {
        let s = scale;
        let mut e = vec![Complex64::new(0.0, 0.0); workdeg + 1];
        e[0] = (s * self.coeff(0)).exp();
        if !e[0].is_finite() {
            return Err(SeriesError::NonFinite {
                index: 0,
                context: "exp",
            });
        }
        let df = self.degree();
        for k in 1..=workdeg {
            let mut acc = Complex64::new(0.0, 0.0);
            let jmax = k.min(df);
            for j in 1..=jmax {
                acc += self.coeffs[j] * (j as f64) * e[k - j];
            }
            let ek = s * acc / k as f64;
            if !ek.is_finite() {
                return Err(SeriesError::NonFinite {
                    index: k,
                    context: "exp",
                });
            }
            if ek.norm() > EXP_COEFF_CAP {
                return Err(SeriesError::Overflow {
                    index: k,
                    cap: EXP_COEFF_CAP,
                });
            }
            e[k] = ek;
        }
        Ok(Self { coeffs: e })
    }

    /// Horner evaluation at a single point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Values on the uniform circle grid
    /// `z_j = radius * exp(i * 2*pi * (j + offset) / m)`, `j = 0..m`,
    /// computed with one inverse FFT. Coefficients beyond index `m - 1`
    /// fold onto `k mod m` after absorbing `radius^k` and the offset
    /// phase, which keeps the fold exact.
    pub fn evaluate_on_circle(&self, radius: f64, m: usize, offset: f64) -> Vec<Complex64> {
        assert!(m > 0, "circle grid needs at least one sample");
        let mut buf = vec![
            FftComplex {
                re: 0.0f64,
                im: 0.0f64
            };
            m
        ];
        let mut rk = 1.0f64;
        let step = 2.0 * std::f64::consts::PI / m as f64;
        for (k, c) in self.coeffs.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, step * offset * k as f64);
            let v = c * rk * phase;
            let slot = k % m;
            buf[slot].re += v.re;
            buf[slot].im += v.im;
            rk *= radius;
            if rk == 0.0 {
                break;
            }
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(m);
        fft.process(&mut buf);
        buf.into_iter().map(|v| Complex64::new(v.re, v.im)).collect()
    }

    /// Recovers coefficients `c_0..=degree` from `m` uniform samples on the
    /// circle of the given radius (offset 0). Requires `degree < m`; the
    /// result is exact when the true degree is below `m`, otherwise the
    /// tail aliases.
    pub fn from_circle_samples(
        samples: &[Complex64],
        radius: f64,
        degree: usize,
    ) -> Result<Self, SeriesError> {
        let m = samples.len();
        assert!(degree < m, "degree must be below the sample count");
        let mut buf: Vec<FftComplex<f64>> = samples
            .iter()
            .map(|c| FftComplex { re: c.re, im: c.im })
            .collect();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut buf);
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut rk = 1.0f64;
        for (k, v) in buf.iter().take(degree + 1).enumerate() {
            let c = Complex64::new(v.re, v.im) / (m as f64 * rk);
            if !c.is_finite() {
                return Err(SeriesError::NonFinite {
                    index: k,
                    context: "from_circle_samples",
                });
            }
            coeffs.push(c);
            rk *= radius;
        }
        Ok(Self { coeffs })
    }

    /// Writes the series as CSV with header `index,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), SeriesError> {
        writeln!(w, "index,re,im")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{},{},{}", k, fmt_f64(c.re), fmt_f64(c.im))?;
        }
        Ok(())
    }

    /// Reads a series from CSV produced by [`PowerSeries::write_csv`].
    /// Indices must be contiguous from 0.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, SeriesError> {
        let mut coeffs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if lineno == 0 && trimmed.starts_with("index") {
                continue;
            }
            let mut parts = trimmed.split(',');
            let idx: usize = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| SeriesError::Csv {
                    line: lineno + 1,
                    reason: "missing or invalid index".into(),
                })?;
            let re: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| SeriesError::Csv {
                    line: lineno + 1,
                    reason: "missing or invalid real part".into(),
                })?;
            let im: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| SeriesError::Csv {
                    line: lineno + 1,
                    reason: "missing or invalid imaginary part".into(),
                })?;
            if idx != coeffs.len() {
                return Err(SeriesError::Csv {
                    line: lineno + 1,
                    reason: format!("expected index {}, found {}", coeffs.len(), idx),
                });
            }
            coeffs.push(Complex64::new(re, im));
        }
        if coeffs.is_empty() {
            return Err(SeriesError::Csv {
                line: 0,
                reason: "no coefficient rows".into(),
            });
        }
        Ok(Self { coeffs })
    }
}

/// Shortest round-trip float formatting (Rust's `Display` for `f64`).
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{}", x)
}

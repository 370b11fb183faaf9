//! Spectral analysis of generalized Cesàro integration operators
//! `T_g f(z) = integral_0^z f(w) g'(w) dw` on Hardy and weighted Bergman
//! spaces of the unit disk.
//!
//! The crate provides:
//! - a truncated power-series engine ([`series`]) with FFT boundary
//!   evaluation;
//! - analytic symbol constructors ([`symbols`]) and space descriptors
//!   ([`spaces`]);
//! - the operator layer ([`operators`]): `T_g`, resolvent application,
//!   finite compressions, norm and spectral-radius estimates;
//! - dyadic weight scans ([`weights`]) deciding Muckenhoupt-type circle
//!   conditions and Békollé-Bonami-type disk conditions by refinement;
//! - pointwise spectral classification and grid maps ([`spectra`]) with
//!   geometric cross-checks (star-shapedness, sector inclusion) and a
//!   quasi-nilpotency certificate;
//! - BMO-distance machinery ([`bmoa`]): Garnett-Jones level estimates,
//!   distance-to-`H^infty` reports, and spectral axes scans;
//! - deterministic report serialization ([`io`]) and a small parallel
//!   execution helper ([`exec`]) with a sequential fallback build.

pub mod bmoa;
pub mod exec;
pub mod grids;
pub mod io;
pub mod operators;
pub mod series;
pub mod spaces;
pub mod spectra;
pub mod symbols;
pub mod tuning;
pub mod weights;

pub use num_complex::Complex64;

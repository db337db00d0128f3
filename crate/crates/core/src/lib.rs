//! A nonlinear Schrödinger equation whose nonlinearity is a regularized
//! Kullback-Leibler term at a length scale `L`.
//!
//! The equation is
//! `iħ ψ_t = -(ħ²/2m) ψ'' + V ψ + F(p) ψ` with `p = |ψ|²` and
//! `F(p) = (E/η⁴)[ln(p/D₊) + 1 - (1-η)p/D₊ - η p₋/D₋] + (ħ²/2m)(√p)''/√p`,
//! where `p± = p(x ± ηL)`, `D₊ = (1-η)p + ηp₊`, `D₋ = (1-η)p₋ + ηp` and `E L² = ħ²/4m`.
//! `η = 0` is linear quantum mechanics.
//!
//! Modules, bottom up:
//! * [`grid`]: grids, wavefunctions, densities, shifts and Laplacians.
//! * [`measures`]: KL, Fisher and Shannon functionals, numeric functional derivatives.
//! * [`nonlinearity`]: `F(p)` and its two parts.
//! * [`dynamics`]: RK4 propagation with conservation diagnostics.
//! * [`spectra`]: linear eigenstates, first-order shifts, minimization over η.
//! * [`exact`]: exact half-line eigenstates and the matching cotangent potential.
//! * [`io`]: TOML experiment configs, sweeps, CSV tables and run manifests.
//!
//! See `examples/` for one runnable program per capability.

pub mod dynamics;
pub mod error;
pub mod exact;
pub mod grid;
pub mod io;
pub mod measures;
pub mod nonlinearity;
pub mod spectra;

pub use error::{Error, Result};
pub use grid::{Boundary, Density, Grid, NonlinearParams, PhysConstants, ShiftFill, Wavefunction};
pub use num_complex::Complex64;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{neighbor, Boundary, Density, NonlinearParams, PhysConstants, ShiftFill, Wavefunction};
use crate::nonlinearity::nonlinear_term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMethod {
    /// `∫ p F(p) dx` on the unperturbed density.
    NumericExpectation,
    /// The universal η-factor of states with nodes.
    NodeProfile,
    /// The calibrated small-L integral for nodeless densities.
    NodelessIntegral,
    /// Closed form for the oscillator ground state.
    GaussianClosedForm,
}

impl ShiftMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShiftMethod::NumericExpectation => "numeric_expectation",
            ShiftMethod::NodeProfile => "node_profile",
            ShiftMethod::NodelessIntegral => "nodeless_integral",
            ShiftMethod::GaussianClosedForm => "gaussian_closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    pub eta: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub state_index: usize,
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    pub method: ShiftMethod,
}

/// First-order energy shift `∫ p F(p) dx` of an unperturbed state.
pub fn first_order_shift_numeric(
    state: &Wavefunction,
    state_index: usize,
    params: &NonlinearParams,
    consts: &PhysConstants,
    fill: &ShiftFill,
) -> Result<ShiftResult> {
    let p = state.density();
    let f = nonlinear_term(&p, params, consts, fill)?;
    let integrand: Vec<f64> = p.values().iter().zip(f.values()).map(|(a, b)| a * b).collect();
    let delta_e = p.grid().integrate(&integrand);
    if !delta_e.is_finite() {
        return Err(Error::NonFinite("energy shift".into()));
    }
    Ok(ShiftResult {
        eta: params.eta(),
        length: params.length(),
        state_index,
        delta_e,
        method: ShiftMethod::NumericExpectation,
    })
}

fn check_unit_interval(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

/// `√(η(1-η)) (1-4η)`: the η-dependence of the leading shift of any state with nodes.
pub fn node_shift_eta_profile(eta: f64) -> Result<f64> {
    check_unit_interval(eta)?;
    Ok((eta * (1.0 - eta)).sqrt() * (1.0 - 4.0 * eta))
}

/// Oscillator ground-state shift in units of `ħω`: `η²(1-η)(1-3η)/4 · (L/a)²`,
/// `a = √(ħ/mω)`.
pub fn sho_ground_shift_closed(eta: f64, l_over_a: f64) -> Result<f64> {
    check_unit_interval(eta)?;
    Ok(eta * eta * (1.0 - eta) * (1.0 - 3.0 * eta) / 4.0 * l_over_a * l_over_a)
}

/// Multiplies the nodeless integral. Fixed once by requiring that the Gaussian
/// `e^{-x²/a²}` reproduce [`sho_ground_shift_closed`]; for that density the bracketed
/// integral is `24 (1-η)(1-3η) / a⁴` exactly.
pub const NODELESS_CALIBRATION: f64 = 1.0 / 96.0;

/// Small-`L` shift of a nodeless state:
/// `(ħ²/m) · NODELESS_CALIBRATION · L² η² ∫ dx/p³ [6(2-3η)² p'⁴ - 12(3-8η+6η²) p p'² p''
/// + 4 p² p' p''' + p² (3 p''² - 2 p p'''')]`.
///
/// Derivatives are central differences. On Dirichlet grids the two samples at each end,
/// whose stencils would reach the ghost points, are left out of the sum.
pub fn nodeless_shift_integral(p: &Density, eta: f64, length: f64, consts: &PhysConstants) -> Result<f64> {
    check_unit_interval(eta)?;
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::Domain(format!("length must be positive, got {length}")));
    }
    let v = p.values();
    let peak = p.max();
    if let Some(k) = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])) {
        if v[k] < 1e-6 * peak {
            return Err(Error::NodeDetected { x: p.grid().x(k) });
        }
    }
    let grid = p.grid();
    let b = grid.boundary();
    let h = grid.dx();
    let (c4, c2) = (6.0 * (2.0 - 3.0 * eta).powi(2), 12.0 * (3.0 - 8.0 * eta + 6.0 * eta * eta));
    let range = match b {
        Boundary::Periodic => 0..v.len(),
        Boundary::Dirichlet => 2..v.len() - 2,
    };
    let mut sum = 0.0;
    for k in range {
        let at = |o: isize| neighbor(v, k, o, b);
        let (m2, m1, p0, p1, p2) = (at(-2), at(-1), v[k], at(1), at(2));
        let d1 = (p1 - m1) / (2.0 * h);
        let d2 = (p1 - 2.0 * p0 + m1) / (h * h);
        let d3 = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
        let d4 = (p2 - 4.0 * p1 + 6.0 * p0 - 4.0 * m1 + m2) / (h * h * h * h);
        let bracket = c4 * d1.powi(4) - c2 * p0 * d1 * d1 * d2
            + 4.0 * p0 * p0 * d1 * d3
            + p0 * p0 * (3.0 * d2 * d2 - 2.0 * p0 * d4);
        sum += bracket / (p0 * p0 * p0);
    }
    let hbar2_over_m = consts.hbar * consts.hbar / consts.mass;
    Ok(hbar2_over_m * NODELESS_CALIBRATION * length * length * eta * eta * sum * h)
}

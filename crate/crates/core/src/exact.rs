//! Exact half-line eigenstates `ψ = C e^{-κx} α(x)` with `α` periodic of period `ηL`,
//! their energies and bounds, residual checks, and the linear potential with a
//! cotangent singularity that supports the same state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Potential;
use crate::error::{Error, Result};
use crate::grid::{
    laplacian, laplacian_fourth_order, Boundary, ExteriorDensity, Grid, NonlinearParams, PhysConstants, ShiftFill,
    Wavefunction, DENSITY_FLOOR_REL,
};
use crate::nonlinearity::{log1p_minus_ratio, nonlinear_term};

/// Largest admissible `exp(-2 κ x_max)`: the truncated tail must be negligible.
pub const MAX_TAIL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub index: u32,
    pub amplitude: f64,
}

/// `α(x) = Σ_j a_j sin(2π j x / P)`: real, periodic with period `P`, zero at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicProfile {
    harmonics: Vec<Harmonic>,
}

impl PeriodicProfile {
    pub fn new(harmonics: Vec<Harmonic>) -> Result<Self> {
        if harmonics.is_empty() || harmonics.iter().all(|h| h.amplitude == 0.0) {
            return Err(Error::Domain("periodic profile needs at least one non-zero harmonic".into()));
        }
        if let Some(h) = harmonics.iter().find(|h| h.index == 0 || !h.amplitude.is_finite()) {
            return Err(Error::Domain(format!("invalid harmonic {h:?}: index must be >= 1, amplitude finite")));
        }
        Ok(Self { harmonics })
    }

    /// `sin(2π x / P)`.
    pub fn sine() -> Self {
        Self { harmonics: vec![Harmonic { index: 1, amplitude: 1.0 }] }
    }

    pub fn from_pairs(pairs: &[(u32, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(index, amplitude)| Harmonic { index, amplitude }).collect())
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.harmonics.iter().map(|h| Harmonic { index: h.index, amplitude: h.amplitude * factor }).collect())
    }

    /// `α` at `x = r/m` periods. Each phase is reduced with integer arithmetic, so zeros
    /// of every sine (at multiples of half a turn) come out exactly zero.
    pub fn value_at_fraction(&self, r: u64, m: u64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| {
                let turns = (r % m) * u64::from(h.index) % m;
                if (2 * turns) % m == 0 {
                    0.0
                } else {
                    h.amplitude * (2.0 * std::f64::consts::PI * turns as f64 / m as f64).sin()
                }
            })
            .sum()
    }

    pub fn value(&self, x: f64, period: f64) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.amplitude * (2.0 * std::f64::consts::PI * f64::from(h.index) * x / period).sin())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolutionSpec {
    pub kappa: f64,
    pub alpha: PeriodicProfile,
    pub params: NonlinearParams,
}

impl ExactSolutionSpec {
    pub fn new(kappa: f64, alpha: PeriodicProfile, params: NonlinearParams) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        check_open_eta(&params)?;
        Ok(Self { kappa, alpha, params })
    }

    /// `γ = exp(-2 κ η L)`: the density ratio `p(x + ηL) / p(x)`.
    pub fn gamma(&self) -> f64 {
        (-2.0 * self.kappa * self.params.shift_distance()).exp()
    }

    /// Normalization constant `C` of the state built on `grid`.
    pub fn norm_constant(&self, grid: &Grid) -> Result<f64> {
        let raw = self.raw_values(grid)?;
        let norm: f64 = raw.iter().map(|v| v * v).sum::<f64>() * grid.dx();
        if !(norm > 1e-300) {
            return Err(Error::ZeroNorm);
        }
        Ok(1.0 / norm.sqrt())
    }

    fn raw_values(&self, grid: &Grid) -> Result<Vec<f64>> {
        if !grid.is_half_line() {
            return Err(Error::InvalidGrid("exact states need a half-line grid (Grid::half_line)".into()));
        }
        let m = self.params.shift_steps(grid)? as u64;
        let tail = (-2.0 * self.kappa * grid.x_max()).exp();
        if tail > MAX_TAIL {
            return Err(Error::DomainTooShort { tail });
        }
        Ok((0..grid.len())
            .map(|k| {
                let i = k as u64 + 1; // x_k = (k + 1) dx
                (-self.kappa * grid.x(k)).exp() * self.alpha.value_at_fraction(i, m)
            })
            .collect())
    }

    /// Density beyond both ends of the grid, continued with `p(x ± ηL) = γ^{±1} p(x)`.
    /// Used as the shift fill when propagating the state.
    pub fn exterior_fill(&self, state: &Wavefunction) -> Result<ShiftFill> {
        let grid = state.grid();
        let m = self.params.shift_steps(grid)?;
        let n = grid.len();
        if m >= n {
            return Err(Error::StepTooLarge { steps: m as isize, n_points: n });
        }
        let p = state.density();
        let v = p.values();
        let gamma = self.gamma();
        // left[j] sits at index -(j + 1) = (m - j - 1) - m
        let left = (0..m).map(|j| v[m - j - 1] / gamma).collect();
        // right[j] sits at index n + j = (n + j - m) + m
        let right = (0..m).map(|j| v[n + j - m] * gamma).collect();
        Ok(ShiftFill::Exterior(ExteriorDensity { left, right }))
    }
}

fn check_open_eta(params: &NonlinearParams) -> Result<()> {
    let eta = params.eta();
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(())
}

/// `ψ = C e^{-κx} α(x)` on a half-line grid, normalized.
pub fn build_exact_state(spec: &ExactSolutionSpec, grid: &Grid) -> Result<Wavefunction> {
    let raw = spec.raw_values(grid)?;
    Wavefunction::from_real(*grid, &raw)?.normalized()
}

/// `(E/η⁴)(1 - ln D - 1/D)` with `D = 1 + η(γ - 1)`, evaluated without cancellation for
/// small `κηL`.
pub fn exact_energy(kappa: f64, params: &NonlinearParams) -> Result<f64> {
    check_open_eta(params)?;
    if !(kappa >= 0.0) {
        return Err(Error::Domain(format!("kappa must be non-negative, got {kappa}")));
    }
    let eta = params.eta();
    // 1 - D = η (1 - γ)
    let w = -eta * (-2.0 * kappa * params.shift_distance()).exp_m1();
    Ok(-params.energy_scale() / eta.powi(4) * log1p_minus_ratio(-w))
}

/// `(lower, upper)` with `upper = 0` and `lower` the `κ → ∞` energy
/// `(E/η⁴)(1 - ln(1-η) - 1/(1-η))`.
pub fn exact_energy_bounds(params: &NonlinearParams) -> Result<(f64, f64)> {
    check_open_eta(params)?;
    let eta = params.eta();
    Ok((-params.energy_scale() / eta.powi(4) * log1p_minus_ratio(-eta), 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub max_residual: f64,
    pub excluded_fraction: f64,
    pub excluded_points: usize,
}

/// Marks grid points within `radius` of a node, and points whose partner at `±shift`
/// is off the grid or below the density floor.
fn exclusion_mask(psi: &Wavefunction, radius: f64, shift: usize) -> Vec<bool> {
    let grid = psi.grid();
    let v = psi.values();
    let n = v.len();
    let floor = DENSITY_FLOOR_REL * v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let mut nodes: Vec<isize> = Vec::new();
    if grid.boundary() == Boundary::Dirichlet {
        nodes.push(-1);
        nodes.push(n as isize);
    }
    for k in 0..n {
        if v[k].norm_sqr() < floor {
            nodes.push(k as isize);
        }
        let next = match grid.boundary() {
            Boundary::Periodic => v[(k + 1) % n],
            Boundary::Dirichlet if k + 1 < n => v[k + 1],
            Boundary::Dirichlet => continue,
        };
        if (v[k] * next.conj()).re < 0.0 {
            nodes.push(k as isize);
            nodes.push(k as isize + 1);
        }
    }
    let reach = (radius / grid.dx() * (1.0 + 1e-9)).floor() as isize;
    let mut excluded = vec![false; n];
    for &node in &nodes {
        for j in (node - reach)..=(node + reach) {
            let idx = match grid.boundary() {
                Boundary::Periodic => j.rem_euclid(n as isize),
                Boundary::Dirichlet => j,
            };
            if (0..n as isize).contains(&idx) {
                excluded[idx as usize] = true;
            }
        }
    }
    if grid.boundary() == Boundary::Dirichlet {
        for (k, e) in excluded.iter_mut().enumerate() {
            if k < shift || k + shift >= n {
                *e = true;
            }
        }
    }
    // a floored partner at x ± ηL is as unresolved as one off the grid
    if shift > 0 {
        let floored = |j: isize| {
            let j = match grid.boundary() {
                Boundary::Periodic => j.rem_euclid(n as isize),
                Boundary::Dirichlet => j,
            };
            (0..n as isize).contains(&j) && v[j as usize].norm_sqr() < floor
        };
        for (k, e) in excluded.iter_mut().enumerate() {
            let k = k as isize;
            if floored(k + shift as isize) || floored(k - shift as isize) {
                *e = true;
            }
        }
    }
    excluded
}

fn default_fill(grid: &Grid) -> ShiftFill {
    match grid.boundary() {
        Boundary::Periodic => ShiftFill::Periodic,
        Boundary::Dirichlet => ShiftFill::Floor,
    }
}

/// `H ψ` with `V = 0` and the nonlinear term, plus the exclusion mask.
fn stationary_operator(psi: &Wavefunction, params: &NonlinearParams, consts: &PhysConstants, radius: f64) -> Result<(Vec<Complex64>, Vec<bool>)> {
    let grid = *psi.grid();
    let shift = if params.is_linear() { 0 } else { params.shift_steps(&grid)? };
    let f = nonlinear_term(&psi.density(), params, consts, &default_fill(&grid))?;
    let lap = laplacian(&grid, psi.values());
    let h = psi
        .values()
        .iter()
        .zip(&lap)
        .zip(f.values())
        .map(|((z, l), fv)| -l * consts.kinetic() + z * fv)
        .collect();
    let excluded = exclusion_mask(psi, radius, shift);
    if excluded.iter().all(|&e| e) {
        return Err(Error::AllPointsExcluded);
    }
    Ok((h, excluded))
}

fn residual_summary(psi: &Wavefunction, energy: f64, h: &[Complex64], excluded: &[bool]) -> Residual {
    let scale = if energy == 0.0 { 1.0 } else { energy.abs() } * psi.max_abs();
    let max = psi
        .values()
        .iter()
        .zip(h)
        .zip(excluded)
        .filter(|(_, &e)| !e)
        .map(|((z, hz), _)| (hz - z * energy).norm())
        .fold(0.0, f64::max);
    let count = excluded.iter().filter(|&&e| e).count();
    Residual { max_residual: max / scale, excluded_fraction: count as f64 / excluded.len() as f64, excluded_points: count }
}

/// `max |-(ħ²/2m)ψ'' + F(p)ψ - Eψ| / (|E| max|ψ|)` over grid points away from nodes and
/// away from the strips where `x ± ηL` leaves a Dirichlet grid or lands below the
/// density floor. When `E = 0` the
/// denominator is `max|ψ|`.
pub fn nonlinear_residual(psi: &Wavefunction, energy: f64, params: &NonlinearParams, consts: &PhysConstants, node_exclusion_radius: f64) -> Result<Residual> {
    let (h, excluded) = stationary_operator(psi, params, consts, node_exclusion_radius)?;
    Ok(residual_summary(psi, energy, &h, &excluded))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyReport {
    /// Energy of both states from the closed form; it does not depend on `α`.
    pub energy: f64,
    /// Rayleigh quotients `<ψ|H|ψ>/<ψ|ψ>` over the non-excluded points of each state.
    pub implied_energies: (f64, f64),
    pub residuals: (Residual, Residual),
    pub both_pass: bool,
}

/// Residual threshold used by [`degeneracy_check`].
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Builds both states, checks each against the common closed-form energy, and reports
/// the eigenvalue each residual implies.
pub fn degeneracy_check(
    alpha_1: &PeriodicProfile,
    alpha_2: &PeriodicProfile,
    kappa: f64,
    params: &NonlinearParams,
    consts: &PhysConstants,
    grid: &Grid,
    node_exclusion_radius: f64,
) -> Result<DegeneracyReport> {
    let energy = exact_energy(kappa, params)?;
    let run = |alpha: &PeriodicProfile| -> Result<(f64, Residual)> {
        let psi = build_exact_state(&ExactSolutionSpec::new(kappa, alpha.clone(), *params)?, grid)?;
        let (h, excluded) = stationary_operator(&psi, params, consts, node_exclusion_radius)?;
        let (mut num, mut den) = (0.0, 0.0);
        for ((z, hz), &e) in psi.values().iter().zip(&h).zip(&excluded) {
            if !e {
                num += (z.conj() * hz).re;
                den += z.norm_sqr();
            }
        }
        Ok((num / den, residual_summary(&psi, energy, &h, &excluded)))
    };
    let (e1, r1) = run(alpha_1)?;
    let (e2, r2) = run(alpha_2)?;
    Ok(DegeneracyReport {
        energy,
        implied_energies: (e1, e2),
        residuals: (r1, r2),
        both_pass: r1.max_residual < DEGENERACY_TOL && r2.max_residual < DEGENERACY_TOL,
    })
}

/// `V(x) = A + B cot(βx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentPotentialParams {
    pub a: f64,
    pub b: f64,
    pub beta: f64,
}

/// `β = 2π/(ηL)`, `A = E + (ħ²/2m)(κ² - β²)`, `B = -ħ²κβ/m`: the linear potential for
/// which `e^{-κx} sin(βx)` is an eigenstate with the same energy `E` as the nonlinear
/// problem.
pub fn cotangent_params(kappa: f64, params: &NonlinearParams, consts: &PhysConstants) -> Result<CotangentPotentialParams> {
    let energy = exact_energy(kappa, params)?;
    let beta = 2.0 * std::f64::consts::PI / params.shift_distance();
    Ok(CotangentPotentialParams {
        a: energy + consts.kinetic() * (kappa * kappa - beta * beta),
        b: -consts.hbar * consts.hbar * kappa * beta / consts.mass,
        beta,
    })
}

impl CotangentPotentialParams {
    pub fn value(&self, x: f64) -> f64 {
        if self.b == 0.0 {
            self.a
        } else {
            self.a + self.b / (self.beta * x).tan()
        }
    }

    fn half_period(&self) -> f64 {
        std::f64::consts::PI / self.beta
    }

    /// Distance from `x` to the nearest zero of `sin(βx)`.
    fn distance_to_singularity(&self, x: f64) -> f64 {
        let h = self.half_period();
        (x - (x / h).round() * h).abs()
    }

    /// Samples the potential on `grid`. When half a period is a whole number of steps and
    /// `x_min` sits on the lattice `k dx`, singular points are found by index arithmetic,
    /// so they coincide exactly with the zeros of the exact state built on the same grid.
    pub fn potential(&self, grid: &Grid) -> Result<Potential> {
        let n = grid.len();
        let mask: Vec<bool> = if self.b == 0.0 {
            vec![false; n]
        } else {
            match (grid.steps_for(self.half_period()), grid.steps_for(grid.x_min().abs())) {
                (Ok(h), Ok(offset)) if h > 0 => {
                    let offset = offset as i64 * grid.x_min().signum() as i64;
                    (0..n).map(|k| (offset + k as i64).rem_euclid(h as i64) == 0).collect()
                }
                _ => (0..n).map(|k| self.distance_to_singularity(grid.x(k)) < 1e-12 * grid.dx()).collect(),
            }
        };
        let values = (0..n).map(|k| if mask[k] { 0.0 } else { self.value(grid.x(k)) }).collect();
        Ok(Potential::new(*grid, values, mask)?.with_label(format!("cotangent(A={}, B={}, beta={})", self.a, self.b, self.beta)))
    }
}

/// `max |-(ħ²/2m)ψ'' + (A + B cot βx)ψ - Eψ| / (|E| max|ψ|)` with a fourth-order
/// Laplacian, skipping points within `exclusion_radius` of a singularity and, on
/// Dirichlet grids, points whose five-point stencil reaches past the ghost layer.
pub fn linear_residual_cotangent(psi: &Wavefunction, energy: f64, cot: &CotangentPotentialParams, consts: &PhysConstants, exclusion_radius: f64) -> Result<f64> {
    let grid = psi.grid();
    let n = grid.len();
    let lap = laplacian_fourth_order(grid, psi.values());
    let scale = if energy == 0.0 { 1.0 } else { energy.abs() } * psi.max_abs();
    let tol = 1e-9 * grid.dx();
    let mut any = false;
    let mut max = 0.0f64;
    for k in 0..n {
        if grid.boundary() == Boundary::Dirichlet && (k < 2 || k + 2 >= n) {
            continue;
        }
        let x = grid.x(k);
        if cot.b != 0.0 && cot.distance_to_singularity(x) <= exclusion_radius + tol {
            continue;
        }
        any = true;
        let z = psi.values()[k];
        let r = -lap[k] * consts.kinetic() + z * (cot.value(x) - energy);
        max = max.max(r.norm());
    }
    if !any {
        return Err(Error::AllPointsExcluded);
    }
    Ok(max / scale)
}

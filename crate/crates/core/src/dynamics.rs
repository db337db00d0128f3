//! Real-time propagation of `iħ ψ_t = -(ħ²/2m) ψ'' + V ψ + F(p) ψ` with classical RK4.
//!
//! The quantum potential is applied in product form, `(ħ²/2m) (Δ|ψ|) ψ/|ψ|`, which is
//! what `F(p) ψ` reduces to wherever `p` is above the density floor. At floored points
//! (nodes) the phase factor `ψ/|ψ|` is undefined and the update uses the smallest
//! admissible unit-disk value instead (zero where `|ψ|` is not convex), so exact nodes
//! stay pinned rather than radiating. Dividing by `√p` at a node would otherwise make
//! the equations stiff beyond any explicit step.
//!
//! Each bond of the lattice `Δ|ψ|` is weighted by the cosine of the phase step across
//! it. The weights are 1 + O(dx²) for smooth states, and they make the amplitude
//! stiffness of the quantum potential match that of the kinetic term around a moving
//! state. With the plain `Δ|ψ|` the two differ by `(1 - cos k dx)`, and modes with
//! `q ηL ∈ 2πℤ`, which the KL term cannot see, grow exponentially once `ηL` spans two
//! or more steps.
//!
//! The Dirichlet ghost next to the last sample is a hard wall. A state that truncates
//! exactly on one of its nodes is therefore not stationary here even when it is in
//! the continuum; end the grid between nodes. Real states whose nodes fall between
//! samples, and states cut off by the domain while still above the floor, are not
//! stationary either once `ηL` spans more than a step or two. Put nodes on samples, as
//! [`crate::exact`] does, and let tails fall below the floor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{neighbor, Grid, NonlinearParams, PhysConstants, ShiftFill, Wavefunction, DENSITY_FLOOR_REL};
use crate::nonlinearity::{nonlinear_term, KlWorkspace};

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: Grid,
    values: Vec<f64>,
    singular_mask: Vec<bool>,
    label: String,
}

impl Potential {
    /// Masked entries are singular points; their stored value is ignored.
    pub fn new(grid: Grid, values: Vec<f64>, singular_mask: Vec<bool>) -> Result<Self> {
        grid.check_len(values.len())?;
        grid.check_len(singular_mask.len())?;
        if let Some(k) = (0..values.len()).find(|&k| !singular_mask[k] && !values[k].is_finite()) {
            return Err(Error::NonFinite(format!("potential at index {k}")));
        }
        Ok(Self { grid, values, singular_mask, label: "custom".into() })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect(), vec![false; grid.len()])
    }

    pub fn zero(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], singular_mask: vec![false; grid.len()], label: "free".into() }
    }

    /// `½ m ω² x²`.
    pub fn harmonic(grid: Grid, omega: f64, consts: &PhysConstants) -> Result<Self> {
        Ok(Self::from_fn(grid, |x| 0.5 * consts.mass * omega * omega * x * x)?.with_label(format!("harmonic(omega={omega})")))
    }

    /// `c x⁴`.
    pub fn quartic(grid: Grid, coefficient: f64) -> Result<Self> {
        Ok(Self::from_fn(grid, |x| coefficient * x.powi(4))?.with_label(format!("quartic(c={coefficient})")))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Short description, carried into eigen-solutions and manifests.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn singular_mask(&self) -> &[bool] {
        &self.singular_mask
    }

    pub fn is_regular(&self) -> bool {
        !self.singular_mask.iter().any(|&s| s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub times: Vec<f64>,
    /// `|norm(t) - norm(0)|` of the squared norm.
    pub norm_drift: Vec<f64>,
    /// `<ψ|H_lin|ψ> + ∫ p F(p)`; a diagnostic, not asserted to be conserved.
    pub energy_trace: Vec<f64>,
    pub final_state: Wavefunction,
}

/// Largest step accepted by [`Propagator::step`]: `0.5 m dx² / ħ`.
pub fn dt_max(grid: &Grid, consts: &PhysConstants) -> f64 {
    0.5 * consts.mass * grid.dx() * grid.dx() / consts.hbar
}

/// One equation of motion: potential, nonlinearity, constants and shift fill.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    potential: &'a Potential,
    params: NonlinearParams,
    consts: PhysConstants,
    fill: ShiftFill,
    steps: usize,
}

#[derive(Default)]
struct Workspace {
    modulus: Vec<f64>,
    density: Vec<f64>,
    kl: Vec<f64>,
    kl_buffers: KlWorkspace,
    stage: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
}

impl<'a> Propagator<'a> {
    pub fn new(potential: &'a Potential, params: NonlinearParams, consts: PhysConstants, fill: ShiftFill) -> Result<Self> {
        if !potential.is_regular() {
            return Err(Error::SingularPotential);
        }
        let grid = potential.grid;
        let steps = if params.is_linear() { 0 } else { params.shift_steps(&grid)? };
        if steps >= grid.len() {
            return Err(Error::StepTooLarge { steps: steps as isize, n_points: grid.len() });
        }
        Ok(Self { potential, params, consts, fill, steps })
    }

    pub fn grid(&self) -> &Grid {
        &self.potential.grid
    }

    pub fn dt_max(&self) -> f64 {
        dt_max(self.grid(), &self.consts)
    }

    /// `H ψ` including the nonlinear term, written into `out`.
    fn hamiltonian_into(&self, ws: &mut Workspace, psi: &[Complex64], out: &mut [Complex64]) {
        let grid = self.grid();
        let n = psi.len();
        let b = grid.boundary();
        let kin = self.consts.kinetic() / (grid.dx() * grid.dx());
        let v = &self.potential.values;
        let lap = |k: usize| neighbor(psi, k, -1, b) + neighbor(psi, k, 1, b) - psi[k] * 2.0;

        if self.params.is_linear() {
            for k in 0..n {
                out[k] = -lap(k) * kin + psi[k] * v[k];
            }
            return;
        }

        ws.modulus.clear();
        ws.modulus.extend(psi.iter().map(|z| z.norm()));
        ws.density.clear();
        ws.density.extend(ws.modulus.iter().map(|a| a * a));
        ws.kl.resize(n, 0.0);
        ws.kl_buffers.field_into(&ws.density, &self.params, self.steps, &self.fill, &mut ws.kl);
        let floor = DENSITY_FLOOR_REL * ws.density.iter().copied().fold(0.0, f64::max);
        let m = &ws.modulus;
        let p = &ws.density;
        // cos of the phase step across the bond to `k + offset`, or 1 when either end is
        // floored and has no reliable phase
        let bond = |k: usize, offset: isize| -> f64 {
            let (z, pz) = (neighbor(psi, k, offset, b), neighbor(p, k, offset, b));
            if p[k] >= floor && pz >= floor {
                (z * psi[k].conj()).re / (z.norm() * m[k])
            } else {
                1.0
            }
        };
        for k in 0..n {
            let smooth = -lap(k) * kin + psi[k] * (v[k] + ws.kl[k]);
            let c = kin
                * (bond(k, -1) * (neighbor(m, k, -1, b) - m[k]) + bond(k, 1) * (neighbor(m, k, 1, b) - m[k]));
            let phase = if ws.density[k] >= floor {
                psi[k] / m[k]
            } else if c > 0.0 {
                // a node: |ψ| has a convex kink here
                let t = -smooth / c;
                let r = t.norm();
                if r > 1.0 {
                    t / r
                } else {
                    t
                }
            } else {
                Complex64::new(0.0, 0.0)
            };
            out[k] = smooth + phase * c;
        }
    }

    fn rhs_into(&self, ws: &mut Workspace, psi: &[Complex64], out: &mut [Complex64]) {
        self.hamiltonian_into(ws, psi, out);
        let factor = Complex64::new(0.0, -1.0 / self.consts.hbar);
        out.iter_mut().for_each(|z| *z *= factor);
    }

    fn check(&self, psi: &Wavefunction) -> Result<()> {
        psi.grid().same_as(self.grid())
    }

    /// `(1/iħ) [-(ħ²/2m) ψ'' + V ψ + F(p) ψ]`.
    pub fn rhs(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        self.check(psi)?;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.values().len()];
        self.rhs_into(&mut Workspace::default(), psi.values(), &mut out);
        Ok(Wavefunction::from_parts_unchecked(*self.grid(), out))
    }

    fn step_in_place(&self, ws: &mut Workspace, psi: &mut [Complex64], dt: f64) {
        let n = psi.len();
        let mut k = std::mem::take(&mut ws.k);
        let mut stage = std::mem::take(&mut ws.stage);
        stage.resize(n, Complex64::default());
        k.iter_mut().for_each(|v| v.resize(n, Complex64::default()));
        let [k1, k2, k3, k4] = &mut k;

        self.rhs_into(ws, psi, k1);
        for j in 0..n {
            stage[j] = psi[j] + k1[j] * (0.5 * dt);
        }
        self.rhs_into(ws, &stage, k2);
        for j in 0..n {
            stage[j] = psi[j] + k2[j] * (0.5 * dt);
        }
        self.rhs_into(ws, &stage, k3);
        for j in 0..n {
            stage[j] = psi[j] + k3[j] * dt;
        }
        self.rhs_into(ws, &stage, k4);
        for j in 0..n {
            psi[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0);
        }
        ws.k = k;
        ws.stage = stage;
    }

    fn check_dt(&self, dt: f64) -> Result<()> {
        let limit = self.dt_max();
        if !dt.is_finite() || dt.abs() > limit {
            return Err(Error::UnstableStep { dt, dt_max: limit });
        }
        Ok(())
    }

    /// One classical RK4 step. Negative `dt` runs backwards in time.
    pub fn step(&self, psi: &Wavefunction, dt: f64) -> Result<Wavefunction> {
        self.check(psi)?;
        self.check_dt(dt)?;
        let mut values = psi.values().to_vec();
        self.step_in_place(&mut Workspace::default(), &mut values, dt);
        Wavefunction::new(*self.grid(), values)
    }

    /// `<ψ|H_lin|ψ> + ∫ p F(p) dx`.
    pub fn energy(&self, psi: &Wavefunction) -> Result<f64> {
        self.check(psi)?;
        let grid = self.grid();
        let b = grid.boundary();
        let kin = self.consts.kinetic() / (grid.dx() * grid.dx());
        let v = psi.values();
        let linear: f64 = (0..v.len())
            .map(|k| {
                let h = -(neighbor(v, k, -1, b) + neighbor(v, k, 1, b) - v[k] * 2.0) * kin + v[k] * self.potential.values[k];
                (v[k].conj() * h).re
            })
            .sum::<f64>()
            * grid.dx();
        let p = psi.density();
        let f = nonlinear_term(&p, &self.params, &self.consts, &self.fill)?;
        let nonlinear = grid.integrate(&p.values().iter().zip(f.values()).map(|(a, b)| a * b).collect::<Vec<_>>());
        Ok(linear + nonlinear)
    }

    /// Runs `n_steps` RK4 steps, recording norm drift and energy after every step.
    pub fn evolve(&self, psi0: &Wavefunction, dt: f64, n_steps: usize) -> Result<EvolutionReport> {
        self.evolve_sampled(psi0, dt, n_steps, 1)
    }

    /// As [`Propagator::evolve`] but records diagnostics only every `record_every` steps
    /// (and always after the last one).
    pub fn evolve_sampled(&self, psi0: &Wavefunction, dt: f64, n_steps: usize, record_every: usize) -> Result<EvolutionReport> {
        self.check(psi0)?;
        self.check_dt(dt)?;
        let every = record_every.max(1);
        let grid = *self.grid();
        let norm0 = psi0.squared_norm();
        let mut report = EvolutionReport {
            times: vec![0.0],
            norm_drift: vec![0.0],
            energy_trace: vec![self.energy(psi0)?],
            final_state: psi0.clone(),
        };
        let mut ws = Workspace::default();
        let mut psi = psi0.values().to_vec();
        for step in 1..=n_steps {
            self.step_in_place(&mut ws, &mut psi, dt);
            let last = step == n_steps;
            if step % every == 0 || last {
                let state = match Wavefunction::new(grid, psi.clone()) {
                    Ok(s) => s,
                    Err(_) => return Err(Error::EvolutionDiverged(Box::new(report))),
                };
                report.times.push(step as f64 * dt);
                report.norm_drift.push((state.squared_norm() - norm0).abs());
                report.energy_trace.push(self.energy(&state)?);
                report.final_state = state;
            } else if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::EvolutionDiverged(Box::new(report)));
            }
        }
        Ok(report)
    }
}

/// Free-function form of [`Propagator::rhs`].
pub fn rhs_apply(psi: &Wavefunction, potential: &Potential, params: &NonlinearParams, consts: &PhysConstants, fill: &ShiftFill) -> Result<Wavefunction> {
    Propagator::new(potential, *params, *consts, fill.clone())?.rhs(psi)
}

/// Free-function form of [`Propagator::step`].
pub fn rk4_step(psi: &Wavefunction, potential: &Potential, params: &NonlinearParams, consts: &PhysConstants, dt: f64, fill: &ShiftFill) -> Result<Wavefunction> {
    Propagator::new(potential, *params, *consts, fill.clone())?.step(psi, dt)
}

/// Free-function form of [`Propagator::evolve`].
pub fn evolve(
    psi0: &Wavefunction,
    potential: &Potential,
    params: &NonlinearParams,
    consts: &PhysConstants,
    dt: f64,
    n_steps: usize,
    fill: &ShiftFill,
) -> Result<EvolutionReport> {
    Propagator::new(potential, *params, *consts, fill.clone())?.evolve(psi0, dt, n_steps)
}

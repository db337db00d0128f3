//! Grids, physical constants, wavefunctions, densities and the stencils shared by every
//! other module.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Densities are floored at this fraction of their maximum before any logarithm or
/// division.
pub const DENSITY_FLOOR_REL: f64 = 1e-12;

/// Relative tolerance for deciding that a distance is a whole number of grid steps.
pub const COMMENSURATE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidConstants(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidConstants(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    /// `hbar^2 / (2 m)`, the coefficient of the kinetic Laplacian.
    pub fn kinetic(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Samples wrap around; the period is `n_points * dx`.
    Periodic,
    /// The wavefunction vanishes on ghost points one step outside each end.
    Dirichlet,
}

/// Uniform 1-D grid with samples at `x_min + k dx`, `k = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    dx: f64,
    n_points: usize,
    boundary: Boundary,
}

impl Grid {
    pub fn new(x_min: f64, dx: f64, n_points: usize, boundary: Boundary) -> Result<Self> {
        if !x_min.is_finite() {
            return Err(Error::InvalidGrid(format!("x_min must be finite, got {x_min}")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!("dx must be positive, got {dx}")));
        }
        if n_points < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 points, got {n_points}")));
        }
        Ok(Self { x_min, dx, n_points, boundary })
    }

    /// Periodic grid covering `[x_min, x_min + period)` with `n_points` samples.
    pub fn periodic(x_min: f64, period: f64, n_points: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Self::new(x_min, period / n_points as f64, n_points, Boundary::Periodic)
    }

    /// Dirichlet grid on `[-half_width, half_width]` with `2 h + 1` points, so that
    /// `x = 0` is a sample.
    pub fn centered(half_width: f64, half_points: usize) -> Result<Self> {
        if half_points == 0 {
            return Err(Error::InvalidGrid("half_points must be positive".into()));
        }
        let dx = half_width / half_points as f64;
        Self::new(-half_width, dx, 2 * half_points + 1, Boundary::Dirichlet)
    }

    /// Half-line grid `x_k = (k + 1) dx`. The hard wall sits on the zero ghost at `x = 0`.
    pub fn half_line(dx: f64, n_points: usize) -> Result<Self> {
        Self::new(dx, dx, n_points, Boundary::Dirichlet)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n_points - 1)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.x(k)).collect()
    }

    /// True for the half-line layout produced by [`Grid::half_line`].
    pub fn is_half_line(&self) -> bool {
        self.boundary == Boundary::Dirichlet && (self.x_min - self.dx).abs() <= 1e-12 * self.dx
    }

    /// Number of grid steps in `distance`, or an error if it is not a whole number.
    pub fn steps_for(&self, distance: f64) -> Result<usize> {
        let ratio = distance / self.dx;
        let steps = ratio.round();
        if !ratio.is_finite() || steps < 0.0 || (ratio - steps).abs() > COMMENSURATE_RTOL * ratio.abs().max(1.0) {
            return Err(Error::NonCommensurateShift { distance, dx: self.dx });
        }
        Ok(steps as usize)
    }

    /// Trapezoidal rule. On Dirichlet grids the zero ghost points are the interval ends, so
    /// every sample carries weight `dx`; on periodic grids the rule is the plain sum.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.dx
    }

    /// Same rule on every other sample; used for quadrature error estimates.
    pub(crate) fn integrate_coarse(&self, values: &[f64]) -> f64 {
        values.iter().step_by(2).sum::<f64>() * 2.0 * self.dx
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_points {
            return Err(Error::GridMismatch(format!("expected {} samples, got {len}", self.n_points)));
        }
        Ok(())
    }

    pub(crate) fn same_as(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Parameters of the regularized KL nonlinearity. `eta = 0` switches the nonlinearity off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearParams {
    length: f64,
    eta: f64,
    energy_scale: f64,
}

impl NonlinearParams {
    pub fn new(length: f64, eta: f64, consts: &PhysConstants) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Domain(format!("length must be positive, got {length}")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("eta must lie in [0, 1], got {eta}")));
        }
        let energy_scale = consts.hbar * consts.hbar / (4.0 * consts.mass * length * length);
        Ok(Self { length, eta, energy_scale })
    }

    /// Parameters whose shift `eta * length` is exactly `steps` grid steps.
    pub fn with_shift_steps(grid: &Grid, steps: usize, eta: f64, consts: &PhysConstants) -> Result<Self> {
        if eta <= 0.0 {
            return Err(Error::Domain(format!("eta must be positive to define a shift, got {eta}")));
        }
        Self::new(steps as f64 * grid.dx() / eta, eta, consts)
    }

    /// The linear equation: no nonlinearity at all.
    pub fn linear() -> Self {
        Self { length: 1.0, eta: 0.0, energy_scale: 0.0 }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `hbar^2 / (4 m L^2)`.
    pub fn energy_scale(&self) -> f64 {
        self.energy_scale
    }

    pub fn is_linear(&self) -> bool {
        self.eta == 0.0
    }

    /// `eta = 1`: the regularization is gone and the bare KL limit is being probed.
    pub fn is_unregularized(&self) -> bool {
        self.eta == 1.0
    }

    pub fn shift_distance(&self) -> f64 {
        self.eta * self.length
    }

    pub fn shift_steps(&self, grid: &Grid) -> Result<usize> {
        let steps = grid.steps_for(self.shift_distance())?;
        if !self.is_linear() && steps == 0 {
            return Err(Error::NonCommensurateShift { distance: self.shift_distance(), dx: grid.dx() });
        }
        Ok(steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("amplitude at index {k}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect())
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn squared_norm(&self) -> f64 {
        self.grid.integrate(&self.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.squared_norm();
        if !(norm > 1e-300) {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / norm.sqrt();
        Ok(Self { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() })
    }

    pub fn density(&self) -> Density {
        Density { grid: self.grid, values: self.values.iter().map(|v| v.norm_sqr()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn laplacian(&self) -> Wavefunction {
        Self { grid: self.grid, values: laplacian(&self.grid, &self.values) }
    }

    /// `<self|other>` with the grid quadrature.
    pub fn inner(&self, other: &Wavefunction) -> Result<Complex64> {
        self.grid.same_as(&other.grid)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    grid: Grid,
    values: Vec<f64>,
}

impl Density {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(index) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDensity { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect())
    }

    /// Rescales to unit integral.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.integral();
        if !(total > 1e-300) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { grid: self.grid, values: self.values.iter().map(|v| v / total).collect() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `1e-12 * max(p)`.
    pub fn floor(&self) -> f64 {
        DENSITY_FLOOR_REL * self.max()
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        Self { grid: self.grid, values }
    }
}

/// Density outside a Dirichlet grid, used when a shifted density reaches past the ends.
/// `left[j]` is the density at `x_min - (j + 1) dx`, `right[j]` at `x_max + (j + 1) dx`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExteriorDensity {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// How a shifted density is filled where the shift leaves the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftFill {
    Periodic,
    /// Out-of-range samples take the density floor.
    Floor,
    /// Out-of-range samples take prescribed exterior values, falling back to the floor
    /// beyond them.
    Exterior(ExteriorDensity),
}

/// `out[k] = p[k + steps]`, filled according to `fill` where `k + steps` leaves the grid.
pub fn shift_density(p: &Density, steps: isize, fill: &ShiftFill) -> Result<Density> {
    if steps.unsigned_abs() >= p.values.len() {
        return Err(Error::StepTooLarge { steps, n_points: p.values.len() });
    }
    let mut out = vec![0.0; p.values.len()];
    shift_into(&p.values, steps, fill, p.floor(), &mut out);
    Ok(p.with_values(out))
}

pub(crate) fn shift_into(p: &[f64], steps: isize, fill: &ShiftFill, floor: f64, out: &mut [f64]) {
    let n = p.len() as isize;
    for (k, o) in out.iter_mut().enumerate() {
        let j = k as isize + steps;
        *o = if (0..n).contains(&j) {
            p[j as usize]
        } else {
            match fill {
                ShiftFill::Periodic => p[j.rem_euclid(n) as usize],
                ShiftFill::Floor => floor,
                ShiftFill::Exterior(ext) => {
                    let (side, depth) = if j < 0 { (&ext.left, (-j - 1) as usize) } else { (&ext.right, (j - n) as usize) };
                    side.get(depth).copied().unwrap_or(floor)
                }
            }
        };
    }
}

#[inline]
pub(crate) fn neighbor<T: Copy + Default>(values: &[T], k: usize, offset: isize, boundary: Boundary) -> T {
    let n = values.len() as isize;
    let j = k as isize + offset;
    if (0..n).contains(&j) {
        values[j as usize]
    } else {
        match boundary {
            Boundary::Periodic => values[j.rem_euclid(n) as usize],
            Boundary::Dirichlet => T::default(),
        }
    }
}

/// Three-point Laplacian with the grid's boundary rule.
pub fn laplacian<T>(grid: &Grid, values: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let b = grid.boundary();
    let inv = 1.0 / (grid.dx() * grid.dx());
    (0..values.len())
        .map(|k| (neighbor(values, k, -1, b) + neighbor(values, k, 1, b) - values[k] * 2.0) * inv)
        .collect()
}

/// Five-point fourth-order Laplacian. On Dirichlet grids both ghost layers are zero, so
/// the first and last two samples are only as accurate as that assumption.
pub fn laplacian_fourth_order<T>(grid: &Grid, values: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let b = grid.boundary();
    let inv = 1.0 / (12.0 * grid.dx() * grid.dx());
    (0..values.len())
        .map(|k| {
            let near = neighbor(values, k, -1, b) + neighbor(values, k, 1, b);
            let far = neighbor(values, k, -2, b) + neighbor(values, k, 2, b);
            (near * 16.0 - far - values[k] * 30.0) * inv
        })
        .collect()
}

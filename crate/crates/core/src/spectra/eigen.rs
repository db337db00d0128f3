use num_complex::Complex64;

use crate::dynamics::Potential;
use crate::error::{Error, Result};
use crate::grid::{laplacian, Grid, PhysConstants, Wavefunction};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    /// Eigenvalues of the finite-difference Hamiltonian, ascending.
    pub energies: Vec<f64>,
    /// Real, normalized eigenvectors; the first appreciable lobe is positive.
    pub states: Vec<Wavefunction>,
    pub potential_id: String,
    consts: PhysConstants,
}

impl EigenSolution {
    /// Energies with the leading `O(dx²)` error of the three-point Laplacian removed:
    /// `E + (ħ²/2m)(dx²/12) ||Δψ||²`. The raw eigenvalues sit below the continuum ones by
    /// that amount, which is what limits the raw spectrum for highly excited states.
    pub fn corrected_energies(&self) -> Vec<f64> {
        self.energies
            .iter()
            .zip(&self.states)
            .map(|(e, psi)| {
                let dx = psi.grid().dx();
                let lap = laplacian(psi.grid(), psi.values());
                let norm: f64 = lap.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
                e + self.consts.kinetic() * dx * dx / 12.0 * norm
            })
            .collect()
    }
}

/// Number of sign changes in the real part, ignoring samples below `1e-8` of the peak.
pub fn count_nodes(psi: &Wavefunction) -> usize {
    let cutoff = 1e-8 * psi.max_abs();
    let mut last = 0.0f64;
    let mut changes = 0;
    for z in psi.values() {
        if z.norm() <= cutoff {
            continue;
        }
        if last != 0.0 && (z.re > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = z.re;
    }
    changes
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let e2 = self.off * self.off;
        let mut q = 1.0;
        let mut count = 0;
        for (k, &d) in self.diag.iter().enumerate() {
            q = if k == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + r;
        (lo, hi)
    }

    fn eigenvalue(&self, index: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T - shift) x = b` in place with a partially pivoted LU.
    fn solve_shifted(&self, shift: f64, b: &mut [f64]) {
        let n = self.diag.len();
        let scale = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * self.off.abs();
        let tiny = f64::EPSILON * scale;
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        let mut dl = vec![self.off; n - 1];
        let mut du = vec![self.off; n - 1];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n - 2).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }

    /// `xᵀ T x` for unit `x`, written as a sum of squared differences so that the large
    /// diagonal and off-diagonal entries never cancel.
    fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let kin = -self.off;
        let n = x.len();
        let mut s = kin * (x[0] * x[0] + x[n - 1] * x[n - 1]);
        for k in 0..n {
            s += (self.diag[k] - 2.0 * kin) * x[k] * x[k];
            if k + 1 < n {
                s += kin * (x[k + 1] - x[k]).powi(2);
            }
        }
        s
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = x.len();
        for k in 0..n {
            let mut s = self.diag[k] * x[k];
            if k > 0 {
                s += self.off * x[k - 1];
            }
            if k + 1 < n {
                s += self.off * x[k + 1];
            }
            out[k] = s;
        }
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// Lowest `n_states` eigenpairs of `-(ħ²/2m) Δ + V` with the three-point Laplacian and
/// zero ghost points at both ends, whatever the grid's own boundary flag.
pub fn solve_linear_spectrum(potential: &Potential, consts: &PhysConstants, n_states: usize) -> Result<EigenSolution> {
    let grid: Grid = *potential.grid();
    if !potential.is_regular() {
        return Err(Error::SingularPotential);
    }
    let limit = grid.len() / 4;
    if n_states >= limit {
        return Err(Error::TooManyStates { requested: n_states, limit });
    }
    let kin = consts.kinetic() / (grid.dx() * grid.dx());
    let t = Tridiagonal { diag: potential.values().iter().map(|v| 2.0 * kin + v).collect(), off: -kin };
    let (lo, hi) = t.bounds();
    let scale = lo.abs().max(hi.abs());
    let n = grid.len();

    let mut energies = Vec::with_capacity(n_states);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_states);
    let mut work = vec![0.0; n];
    for index in 0..n_states {
        let mut lambda = t.eigenvalue(index, lo, hi);
        // deterministic start with no parity, so no state is missed
        let mut x: Vec<f64> =
            (0..n).map(|k| 1.0 + k as f64 / n as f64 + 0.5 * ((k as f64) * 0.618_033_988_749_895).fract()).collect();
        let mut previous = vec![0.0; n];
        let mut converged = false;
        for iteration in 0..20 {
            t.solve_shifted(lambda, &mut x);
            // twice, for orthogonality to working precision
            for _ in 0..2 {
                for prev in &vectors {
                    let overlap: f64 = prev.iter().zip(&x).map(|(a, b)| a * b).sum();
                    x.iter_mut().zip(prev).for_each(|(v, p)| *v -= overlap * p);
                }
            }
            normalize(&mut x);
            let overlap: f64 = previous.iter().zip(&x).map(|(a, b)| a * b).sum();
            previous.copy_from_slice(&x);
            lambda = t.rayleigh_quotient(&x);
            if iteration >= 2 && 1.0 - overlap.abs() < 1e-13 {
                converged = true;
                break;
            }
        }
        t.apply(&x, &mut work);
        let residual = work.iter().zip(&x).map(|(h, v)| (h - lambda * v).abs()).fold(0.0, f64::max);
        if !converged || !(residual <= 1e-8 * scale) {
            return Err(Error::ConvergenceFailure(format!("state {index}: residual {residual:e}")));
        }
        let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(first) = x.iter().find(|v| v.abs() > 1e-3 * peak) {
            if *first < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        energies.push(lambda);
        vectors.push(x);
    }

    let inv_sqrt_dx = 1.0 / grid.dx().sqrt();
    let states = vectors
        .into_iter()
        .map(|v| Wavefunction::new(grid, v.into_iter().map(|a| Complex64::new(a * inv_sqrt_dx, 0.0)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenSolution { energies, states, potential_id: potential.label().to_string(), consts: *consts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn box_spectrum_and_orthonormality() {
        let width = 2.0;
        let n = 999;
        // walls on the ghost points at 0 and width
        let g = Grid::new(width / (n + 1) as f64, width / (n + 1) as f64, n, crate::grid::Boundary::Dirichlet).unwrap();
        let sol = solve_linear_spectrum(&Potential::zero(g), &PhysConstants::default(), 6).unwrap();
        let dx = g.dx();
        for (i, e) in sol.energies.iter().enumerate() {
            // the three-point operator's own eigenvalues, not the continuum ones
            let half_angle = (i + 1) as f64 * PI / (2 * (n + 1)) as f64;
            let exact = 2.0 * half_angle.sin().powi(2) / (dx * dx);
            assert!((e / exact - 1.0).abs() < 1e-12, "{e} vs {exact}");
        }
        for (i, a) in sol.states.iter().enumerate() {
            assert_eq!(count_nodes(a), i);
            for (j, b) in sol.states.iter().enumerate() {
                let o = a.inner(b).unwrap().re;
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((o - expected).abs() < 1e-8);
            }
        }
        assert_eq!(sol.potential_id, "free");
    }

    #[test]
    fn fine_grid_keeps_parity_and_precision() {
        // ‖T‖ ~ 1e10 here, so a loose residual test would accept a mixed state
        let g = Grid::centered(7.0, 300_000).unwrap();
        let c = PhysConstants::default();
        let sol = solve_linear_spectrum(&Potential::harmonic(g, 1.0, &c).unwrap(), &c, 2).unwrap();
        assert!((sol.energies[0] - 0.5).abs() < 1e-9, "{}", sol.energies[0]);
        assert!((sol.energies[1] - 1.5).abs() < 1e-9, "{}", sol.energies[1]);
        let odd = &sol.states[1];
        assert!(odd.values()[300_000].norm() < 1e-6 * odd.max_abs());
        assert_eq!(count_nodes(odd), 1);
    }

    #[test]
    fn rejects_too_many_states() {
        let g = Grid::centered(1.0, 10).unwrap();
        assert!(matches!(
            solve_linear_spectrum(&Potential::zero(g), &PhysConstants::default(), 5),
            Err(Error::TooManyStates { .. })
        ));
    }
}

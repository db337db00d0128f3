//! The regularized nonlinear term `F(p)`: a KL bracket over densities shifted by
//! `±eta L`, plus the quantum potential.

use crate::error::{Error, Result};
use crate::grid::{neighbor, shift_into, Density, Grid, NonlinearParams, PhysConstants, ShiftFill};

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearField {
    grid: Grid,
    values: Vec<f64>,
    unregularized: bool,
}

impl NonlinearField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Set when `eta = 1`, where the field is the singular unregularized limit.
    pub fn is_unregularized(&self) -> bool {
        self.unregularized
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `ln(1 + u) - u / (1 + u)`, accurate when `u` is small.
pub(crate) fn log1p_minus_ratio(u: f64) -> f64 {
    let w = u / (1.0 + u);
    if w.abs() >= 0.1 {
        return u.ln_1p() - w;
    }
    // -ln(1 - w) - w = sum_{k >= 2} w^k / k
    let mut power = w * w;
    let mut sum = 0.0;
    for k in 2..64 {
        let term = power / k as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        power *= w;
    }
    sum
}

/// The bracket
/// `ln(p/D₊) + 1 - (1-η)p/D₊ - η p₋/D₋`, `D₊ = (1-η)p + η p₊`, `D₋ = (1-η)p₋ + η p`,
/// rewritten in `u = η(p₊ - p)/p` and `v = η(p - p₋)/p₋` so that nothing cancels when
/// the shifted densities are close to `p`.
pub(crate) fn kl_bracket(p: f64, plus: f64, minus: f64, eta: f64) -> f64 {
    let u = eta * (plus - p) / p;
    let v = eta * (p - minus) / minus;
    -log1p_minus_ratio(u) + eta * (v - u) / ((1.0 + u) * (1.0 + v))
}

/// Buffers for repeated evaluation of the KL field on one grid.
#[derive(Debug, Default)]
pub(crate) struct KlWorkspace {
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl KlWorkspace {
    /// Writes `(E/η⁴) · bracket` into `out`. `p` is the raw density; floors are applied
    /// here to every argument of the bracket.
    pub(crate) fn field_into(&mut self, p: &[f64], params: &NonlinearParams, steps: usize, fill: &ShiftFill, out: &mut [f64]) {
        if params.is_linear() {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        let n = p.len();
        self.plus.resize(n, 0.0);
        self.minus.resize(n, 0.0);
        let floor = crate::grid::DENSITY_FLOOR_REL * p.iter().copied().fold(0.0, f64::max);
        shift_into(p, steps as isize, fill, floor, &mut self.plus);
        shift_into(p, -(steps as isize), fill, floor, &mut self.minus);
        let eta = params.eta();
        let scale = params.energy_scale() / eta.powi(4);
        for k in 0..n {
            out[k] = scale * kl_bracket(p[k].max(floor), self.plus[k].max(floor), self.minus[k].max(floor), eta);
        }
    }
}

/// The regularized KL part of `F(p)`.
pub fn regularized_kl_term(p: &Density, params: &NonlinearParams, fill: &ShiftFill) -> Result<NonlinearField> {
    let grid = *p.grid();
    let mut values = vec![0.0; grid.len()];
    if !params.is_linear() {
        let steps = params.shift_steps(&grid)?;
        if steps >= grid.len() {
            return Err(Error::StepTooLarge { steps: steps as isize, n_points: grid.len() });
        }
        KlWorkspace::default().field_into(p.values(), params, steps, fill, &mut values);
    }
    Ok(NonlinearField { grid, values, unregularized: params.is_unregularized() })
}

/// `(ħ²/2m) (√p)'' / √p` with a three-point second difference of the floored `√p`.
pub fn quantum_potential_term(p: &Density, consts: &PhysConstants) -> NonlinearField {
    let grid = *p.grid();
    let floor = p.floor();
    let root: Vec<f64> = p.values().iter().map(|v| v.max(floor).sqrt()).collect();
    let b = grid.boundary();
    let c = consts.kinetic() / (grid.dx() * grid.dx());
    let values = (0..root.len())
        .map(|k| c * (neighbor(&root, k, -1, b) + neighbor(&root, k, 1, b) - 2.0 * root[k]) / root[k])
        .collect();
    NonlinearField { grid, values, unregularized: false }
}

/// `F(p)`: the regularized KL term plus the quantum potential. Identically zero when
/// `eta = 0`.
pub fn nonlinear_term(p: &Density, params: &NonlinearParams, consts: &PhysConstants, fill: &ShiftFill) -> Result<NonlinearField> {
    let mut field = regularized_kl_term(p, params, fill)?;
    if !params.is_linear() {
        let qp = quantum_potential_term(p, consts);
        field.values.iter_mut().zip(qp.values).for_each(|(f, q)| *f += q);
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    fn naive_bracket(p: f64, plus: f64, minus: f64, eta: f64) -> f64 {
        let d1 = (1.0 - eta) * p + eta * plus;
        let d2 = (1.0 - eta) * minus + eta * p;
        (p / d1).ln() + 1.0 - (1.0 - eta) * p / d1 - eta * minus / d2
    }

    #[test]
    fn stable_bracket_agrees_with_textbook_form_on_large_contrasts() {
        for &(p, plus, minus, eta) in &[(1.0, 0.3, 2.0, 0.4), (0.2, 1.0, 5.0, 0.9), (3.0, 3.5, 0.01, 1.0), (1.0, 1.2, 0.9, 0.05)] {
            let a = kl_bracket(p, plus, minus, eta);
            let b = naive_bracket(p, plus, minus, eta);
            assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()), "{a} {b}");
        }
        assert_eq!(kl_bracket(2.0, 2.0, 2.0, 0.3), 0.0);
    }

    #[test]
    fn bracket_of_geometric_density_is_the_exact_energy_bracket() {
        let (eta, gamma): (f64, f64) = (0.8, (-0.16f64).exp());
        let d = 1.0 + eta * (gamma - 1.0);
        let expected = 1.0 - d.ln() - 1.0 / d;
        let got = kl_bracket(0.7, 0.7 * gamma, 0.7 / gamma, eta);
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn constant_density_gives_zero_field() {
        let g = Grid::periodic(0.0, 1.0, 100).unwrap();
        let p = Density::new(g, vec![1.0; 100]).unwrap();
        let params = NonlinearParams::with_shift_steps(&g, 5, 0.5, &PhysConstants::default()).unwrap();
        let f = nonlinear_term(&p, &params, &PhysConstants::default(), &ShiftFill::Periodic).unwrap();
        assert_eq!(f.max_abs(), 0.0);
        assert!(!f.is_unregularized());
    }

    #[test]
    fn quantum_potential_of_exponential_is_constant() {
        let g = Grid::new(0.0, 1e-3, 2000, Boundary::Dirichlet).unwrap();
        let kappa = 1.3;
        let p = Density::from_fn(g, |x| (-2.0 * kappa * x).exp()).unwrap();
        let q = quantum_potential_term(&p, &PhysConstants::default());
        for v in &q.values()[1..1999] {
            assert!((v / (0.5 * kappa * kappa) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn quantum_potential_of_gaussian_matches_symbolic_form() {
        let a = 1.7;
        for &n in &[401usize, 801] {
            let g = Grid::centered(4.0, n / 2).unwrap();
            let p = Density::from_fn(g, |x| (-x * x / (a * a)).exp()).unwrap();
            let q = quantum_potential_term(&p, &PhysConstants::default());
            let err = (1..n - 1)
                .map(|k| {
                    let x = g.x(k);
                    (q.values()[k] - 0.5 * (x * x / a.powi(4) - 1.0 / (a * a))).abs()
                })
                .fold(0.0, f64::max);
            assert!(err < 2.0 * g.dx() * g.dx(), "n {n}: {err}");
        }
    }

    #[test]
    fn linear_params_switch_everything_off() {
        let g = Grid::centered(4.0, 64).unwrap();
        let p = Density::from_fn(g, |x| (-x * x).exp()).unwrap();
        let f = nonlinear_term(&p, &NonlinearParams::linear(), &PhysConstants::default(), &ShiftFill::Floor).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }
}

//! Information functionals of a density: the KL intermediary at scale `L`, Fisher
//! information, Shannon entropy, and a finite-difference functional derivative.

use crate::error::{Error, Result};
use crate::grid::{neighbor, shift_density, Density, ShiftFill};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub value: f64,
    /// `|T_h - T_2h| / 3`, the Richardson estimate for the trapezoidal rule.
    pub quadrature_error_estimate: f64,
}

fn quadrature(p: &Density, integrand: &[f64]) -> FunctionalValue {
    let fine = p.grid().integrate(integrand);
    let coarse = p.grid().integrate_coarse(integrand);
    FunctionalValue { value: fine, quadrature_error_estimate: (fine - coarse).abs() / 3.0 }
}

/// `∫ p(x) ln[p(x) / p(x + L)] dx` with floored logarithm arguments.
pub fn kl_divergence_shifted(p: &Density, length: f64, fill: &ShiftFill) -> Result<FunctionalValue> {
    let steps = p.grid().steps_for(length)?;
    Ok(quadrature(p, &kl_integrand(p, steps, fill)?))
}

fn kl_integrand(p: &Density, steps: usize, fill: &ShiftFill) -> Result<Vec<f64>> {
    let plus = shift_density(p, steps as isize, fill)?;
    let floor = p.floor();
    Ok(p.values()
        .iter()
        .zip(plus.values())
        .map(|(&a, &b)| if a == 0.0 { 0.0 } else { a * (a.max(floor) / b.max(floor)).ln() })
        .collect())
}

/// `∫ (p')² / p dx` with a central-difference derivative and floored denominator.
pub fn fisher_information(p: &Density) -> FunctionalValue {
    quadrature(p, &fisher_integrand(p))
}

fn fisher_integrand(p: &Density) -> Vec<f64> {
    let v = p.values();
    let b = p.grid().boundary();
    let h2 = 2.0 * p.grid().dx();
    let floor = p.floor();
    (0..v.len())
        .map(|k| {
            let d = (neighbor(v, k, 1, b) - neighbor(v, k, -1, b)) / h2;
            d * d / v[k].max(floor)
        })
        .collect()
}

/// `-∫ p ln p dx` with a floored logarithm argument.
pub fn shannon_entropy(p: &Density) -> FunctionalValue {
    let floor = p.floor();
    let integrand: Vec<f64> =
        p.values().iter().map(|&a| if a == 0.0 { 0.0 } else { -a * a.max(floor).ln() }).collect();
    quadrature(p, &integrand)
}

/// A scalar functional of the density, with its parameters fixed.
pub enum Functional<'a> {
    /// `scale * ∫ p ln(p / p(x + length))`.
    KlShifted { length: f64, scale: f64, fill: ShiftFill },
    /// `scale * ∫ (p')² / p`.
    Fisher { scale: f64 },
    Shannon,
    Custom(&'a (dyn Fn(&Density) -> f64 + Sync)),
}

impl Functional<'_> {
    pub fn evaluate(&self, p: &Density) -> Result<f64> {
        Ok(match self {
            Functional::KlShifted { length, scale, fill } => scale * kl_divergence_shifted(p, *length, fill)?.value,
            Functional::Fisher { scale } => scale * fisher_information(p).value,
            Functional::Shannon => shannon_entropy(p).value,
            Functional::Custom(f) => f(p),
        })
    }
}

/// Central-difference functional derivative
/// `[F(p + eps_k δ_k) - F(p - eps_k δ_k)] / (2 eps_k dx)` with `eps_k = bump_rel * p_k`.
///
/// Costs two functional evaluations per grid point.
pub fn functional_derivative(functional: &Functional<'_>, p: &Density, bump_rel: f64) -> Result<Vec<f64>> {
    if !(bump_rel > 0.0 && bump_rel < 1.0) {
        return Err(Error::Domain(format!("relative bump must lie in (0, 1), got {bump_rel}")));
    }
    let floor = p.floor();
    let dx = p.grid().dx();
    let mut work = p.values().to_vec();
    let mut out = Vec::with_capacity(work.len());
    for k in 0..work.len() {
        let base = work[k];
        let eps = bump_rel * base;
        if eps == 0.0 || base - eps < floor {
            return Err(Error::BumpTooLarge { index: k });
        }
        work[k] = base + eps;
        let up = functional.evaluate(&p.with_values(work.clone()))?;
        work[k] = base - eps;
        let down = functional.evaluate(&p.with_values(work.clone()))?;
        work[k] = base;
        out.push((up - down) / (2.0 * eps * dx));
    }
    Ok(out)
}

//! Exact stationary states `e^{-κx} α(x)` on the half line. The energy depends on `κ`,
//! `η` and `L` only, so every `ηL`-periodic `α` gives a state at the same energy.

use infonls::exact::{build_exact_state, degeneracy_check, exact_energy, exact_energy_bounds, nonlinear_residual, ExactSolutionSpec, PeriodicProfile};
use infonls::{Grid, NonlinearParams, PhysConstants};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let params = NonlinearParams::new(0.1, 0.8, &c)?;
    let (lower, upper) = exact_energy_bounds(&params)?;
    println!("energy bounds ({lower:.4}, {upper})");
    for kappa in [0.1, 1.0, 10.0, 100.0] {
        println!("  κ = {kappa:>6}: E = {:.6}", exact_energy(kappa, &params)?);
    }

    // ηL = 0.08 is 40 steps; x_max = 11.6 keeps the e^{-2κx} tail below 1e-10
    let grid = Grid::half_line(0.002, 5800)?;
    let radius = 3.0 * grid.dx();
    let sine = PeriodicProfile::sine();
    let psi = build_exact_state(&ExactSolutionSpec::new(1.0, sine.clone(), params)?, &grid)?;
    let e = exact_energy(1.0, &params)?;
    let r = nonlinear_residual(&psi, e, &params, &c, radius)?;
    println!("sine profile: residual {:.2e}, {:.1}% of samples excluded", r.max_residual, 100.0 * r.excluded_fraction);
    let off = nonlinear_residual(&psi, 1.01 * e, &params, &c, radius)?;
    println!("same state against 1.01 E: residual {:.2e}", off.max_residual);

    let two = PeriodicProfile::from_pairs(&[(1, 1.0), (2, 0.3)])?;
    let report = degeneracy_check(&sine, &two, 1.0, &params, &c, &grid, radius)?;
    println!(
        "degeneracy: E = {:.12}, implied {:.12} and {:.12}, both pass: {}",
        report.energy, report.implied_energies.0, report.implied_energies.1, report.both_pass
    );
    Ok(())
}

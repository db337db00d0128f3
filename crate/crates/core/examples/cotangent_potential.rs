//! The linear potential `A + B cot(βx)` that has the exact nonlinear state as an
//! eigenstate at the same energy. Its poles sit on the nodes of the state.

use infonls::exact::{build_exact_state, cotangent_params, exact_energy, linear_residual_cotangent, ExactSolutionSpec, PeriodicProfile};
use infonls::{Complex64, Grid, NonlinearParams, PhysConstants};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let params = NonlinearParams::new(0.1, 0.8, &c)?;
    let grid = Grid::half_line(1e-4, 120_000)?;
    let psi = build_exact_state(&ExactSolutionSpec::new(1.0, PeriodicProfile::sine(), params)?, &grid)?;
    let e = exact_energy(1.0, &params)?;

    let cot = cotangent_params(1.0, &params, &c)?;
    println!("A = {:.6}, B = {:.6}, β = {:.6}", cot.a, cot.b, cot.beta);
    println!("linear residual: {:.2e}", linear_residual_cotangent(&psi, e, &cot, &c, 3.0 * grid.dx())?);

    let v = cot.potential(&grid)?;
    let poles_on_nodes = v.singular_mask().iter().zip(psi.values()).all(|(&s, z)| s == (*z == Complex64::new(0.0, 0.0)));
    let poles = v.singular_mask().iter().filter(|&&s| s).count();
    println!("{poles} poles on the grid, all of them at nodes of the state: {poles_on_nodes}");

    let flat = cotangent_params(0.0, &params, &c)?;
    println!("κ = 0: B = {}, so V is the constant {:.4}", flat.b, flat.a);
    Ok(())
}

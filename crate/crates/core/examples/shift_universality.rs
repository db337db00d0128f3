//! First-order shifts of the first excited state in two different wells. For a state
//! with nodes the `η` dependence is `√(η(1-η))(1-4η)` regardless of the potential.

use infonls::dynamics::Potential;
use infonls::spectra::{first_order_shift_numeric, node_shift_eta_profile, solve_linear_spectrum};
use infonls::{Grid, NonlinearParams, PhysConstants, ShiftFill};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let grid = Grid::centered(7.0, 56_000)?;
    let length = 1e-2;
    let etas = [0.1, 0.4, 0.6];
    let wells = [("harmonic", Potential::harmonic(grid, 1.0, &c)?), ("quartic", Potential::quartic(grid, 1.0)?)];

    for (name, v) in &wells {
        let state = &solve_linear_spectrum(v, &c, 2)?.states[1];
        let shifts: Vec<f64> = etas
            .iter()
            .map(|&eta| Ok(first_order_shift_numeric(state, 1, &NonlinearParams::new(length, eta, &c)?, &c, &ShiftFill::Floor)?.delta_e))
            .collect::<infonls::Result<_>>()?;
        println!("{name}: δE(η) = {:?}", shifts.iter().map(|s| format!("{s:.4e}")).collect::<Vec<_>>());
        for i in 1..etas.len() {
            let measured = shifts[i] / shifts[0];
            let predicted = node_shift_eta_profile(etas[i])? / node_shift_eta_profile(etas[0])?;
            println!("  δE({})/δE({}) = {measured:+.4}  profile ratio {predicted:+.4}", etas[i], etas[0]);
        }
    }
    Ok(())
}

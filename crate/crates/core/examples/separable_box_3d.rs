//! A rectangular box treated as three one-dimensional problems. The ground state is a
//! product, so its first-order shift is the sum of the three axis shifts.

use infonls::dynamics::Potential;
use infonls::spectra::{first_order_shift_numeric, solve_linear_spectrum};
use infonls::{Boundary, Grid, NonlinearParams, PhysConstants, ShiftFill};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let params = NonlinearParams::new(0.01, 0.5, &c)?;
    let dx: f64 = 1e-3;
    let mut total_energy = 0.0;
    let mut total_shift = 0.0;
    for width in [1.0, 1.5, 2.0] {
        // interior samples of a box with walls at 0 and `width`
        let n = (width / dx).round() as usize - 1;
        let grid = Grid::new(dx, dx, n, Boundary::Dirichlet)?;
        let sol = solve_linear_spectrum(&Potential::zero(grid), &c, 1)?;
        let shift = first_order_shift_numeric(&sol.states[0], 0, &params, &c, &ShiftFill::Floor)?.delta_e;
        let e = sol.corrected_energies()[0];
        println!("W = {width}: E = {e:.6} (π²/2W² = {:.6}), δE = {shift:.6e}", std::f64::consts::PI.powi(2) / (2.0 * width * width));
        total_energy += e;
        total_shift += shift;
    }
    println!("box: E = {total_energy:.6}, δE = {total_shift:.6e}");
    Ok(())
}

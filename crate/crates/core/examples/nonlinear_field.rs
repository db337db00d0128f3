//! The nonlinear potential `F(p)` of a smooth density: the KL bracket and the quantum
//! potential are each O(1), but their sum vanishes linearly in `L`.

use infonls::nonlinearity::{nonlinear_term, quantum_potential_term, regularized_kl_term};
use infonls::{Density, Grid, NonlinearParams, PhysConstants, ShiftFill};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let grid = Grid::centered(6.0, 3000)?;
    let p = Density::from_fn(grid, |x| (-x * x).exp())?.normalized()?;
    let q = quantum_potential_term(&p, &c);
    let eta = 0.5;
    // compare away from the tails, where the density is far above the floor
    let inner = |v: &[f64]| v.iter().zip(grid.xs()).filter(|(_, x)| x.abs() < 3.0).fold(0.0f64, |m, (v, _)| m.max(v.abs()));

    println!("max|quantum potential| = {:.6} on |x| < 3", inner(q.values()));
    println!("{:>8} {:>14} {:>14} {:>12}", "L", "max|KL part|", "max|F|", "max|F| / L");
    for steps in [64, 32, 16, 8, 4] {
        let params = NonlinearParams::with_shift_steps(&grid, steps, eta, &c)?;
        let kl = regularized_kl_term(&p, &params, &ShiftFill::Floor)?;
        let f = nonlinear_term(&p, &params, &c, &ShiftFill::Floor)?;
        let l = params.length();
        println!("{l:>8.4} {:>14.6} {:>14.6e} {:>12.6}", inner(kl.values()), inner(f.values()), inner(f.values()) / l);
    }
    Ok(())
}

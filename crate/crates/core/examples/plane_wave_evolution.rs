//! A plane wave has constant density, so `F = 0` and it rotates at `ħk²/2m` whatever
//! `η` and `L` are. Ten thousand RK4 steps keep the norm to roundoff.

use infonls::dynamics::{Potential, Propagator};
use infonls::{Complex64, Grid, NonlinearParams, PhysConstants, ShiftFill, Wavefunction};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let period = 14.0;
    let grid = Grid::periodic(-7.0, period, 280)?;
    let k = 2.0 * std::f64::consts::PI * 3.0 / period;
    let psi0 = Wavefunction::from_fn(grid, |x| Complex64::from_polar(1.0, k * x))?.normalized()?;

    let free = Potential::zero(grid);
    let params = NonlinearParams::with_shift_steps(&grid, 2, 0.5, &c)?;
    let prop = Propagator::new(&free, params, c, ShiftFill::Periodic)?;
    let dt = 0.5 * prop.dt_max();
    let steps = 10_000;
    let report = prop.evolve_sampled(&psi0, dt, steps, 1000)?;

    // the lattice dispersion is exact for e^{ikx} under the three-point Laplacian
    let dx = grid.dx();
    let energy = c.kinetic() * 2.0 * (1.0 - (k * dx).cos()) / (dx * dx);
    let t = steps as f64 * dt;
    let rot = Complex64::from_polar(1.0, -energy * t / c.hbar);
    let phase_error = report
        .final_state
        .values()
        .iter()
        .zip(psi0.values())
        .map(|(a, b)| (a - b * rot).norm())
        .fold(0.0, f64::max)
        / psi0.max_abs();

    for (t, d) in report.times.iter().zip(&report.norm_drift) {
        println!("t = {t:8.4}   norm drift = {d:.2e}");
    }
    println!("relative phase error at t = {t:.4}: {phase_error:.2e}");
    Ok(())
}

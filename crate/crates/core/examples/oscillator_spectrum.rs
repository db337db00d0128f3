//! Lowest oscillator levels from the three-point Hamiltonian, raw and with the leading
//! `O(dx²)` error removed.

use infonls::dynamics::Potential;
use infonls::spectra::{count_nodes, solve_linear_spectrum};
use infonls::{Boundary, Grid, PhysConstants};

fn main() -> infonls::Result<()> {
    let c = PhysConstants::default();
    let grid = Grid::new(-12.0, 24.0 / 4097.0, 4096, Boundary::Dirichlet)?;
    let sol = solve_linear_spectrum(&Potential::harmonic(grid, 1.0, &c)?, &c, 11)?;
    let corrected = sol.corrected_energies();
    println!("{:>3} {:>16} {:>16} {:>12} {:>6}", "n", "raw", "corrected", "error", "nodes");
    for n in 0..sol.energies.len() {
        let exact = n as f64 + 0.5;
        println!(
            "{n:>3} {:>16.10} {:>16.10} {:>12.2e} {:>6}",
            sol.energies[n],
            corrected[n],
            corrected[n] - exact,
            count_nodes(&sol.states[n])
        );
    }
    Ok(())
}

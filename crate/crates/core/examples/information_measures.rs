//! KL divergence between a density and its own translate, and the Fisher limit
//! `2 KL / L² → I_F` as the translation shrinks.

use infonls::measures::{fisher_information, kl_divergence_shifted, shannon_entropy};
use infonls::{Density, Grid, ShiftFill};

fn main() -> infonls::Result<()> {
    let sigma = 0.8;
    let grid = Grid::centered(8.0, 4000)?;
    let p = Density::from_fn(grid, |x| (-x * x / (2.0 * sigma * sigma)).exp())?.normalized()?;

    let fisher = fisher_information(&p).value;
    println!("Fisher  {fisher:.8}   (1/σ² = {:.8})", 1.0 / (sigma * sigma));
    println!("Shannon {:.8}   (½ ln 2πeσ² = {:.8})", shannon_entropy(&p).value, 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).ln());
    println!();
    println!("{:>8} {:>14} {:>14}", "L", "KL", "2 KL / L²");
    for steps in [256, 128, 64, 32, 16, 8] {
        let l = steps as f64 * grid.dx();
        let kl = kl_divergence_shifted(&p, l, &ShiftFill::Floor)?.value;
        println!("{l:>8.4} {kl:>14.6e} {:>14.8}", 2.0 * kl / (l * l));
    }
    Ok(())
}

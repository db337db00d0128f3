//! Where the energy shift is most negative as a function of `η`.

use infonls::spectra::{minimize_over_eta, node_shift_eta_profile, sho_ground_shift_closed};

fn main() -> infonls::Result<()> {
    let node = minimize_over_eta(node_shift_eta_profile)?;
    println!("states with nodes   η* = {:.10}  ((7+√33)/16 = {:.10})  profile = {:.6}", node.eta, (7.0 + 33f64.sqrt()) / 16.0, node.value);

    let gaussian = minimize_over_eta(|eta| sho_ground_shift_closed(eta, 0.1))?;
    println!("oscillator ground   η* = {:.10}  ((3+√3)/6  = {:.10})  shift = {:.6e} ħω at L/a = 0.1", gaussian.eta, (3.0 + 3f64.sqrt()) / 6.0, gaussian.value);

    for eta in [0.0, 0.25, 1.0] {
        println!("node profile at η = {eta}: {}", node_shift_eta_profile(eta)?);
    }
    Ok(())
}

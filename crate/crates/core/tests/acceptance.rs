//! Acceptance run: one PASS/FAIL line per criterion, then a single verdict.
//!
//! `cargo test --test acceptance -- --nocapture` shows the lines. Set `ACCEPTANCE_ONLY=4,9`
//! to run a subset.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use infonls::dynamics::{dt_max, Potential, Propagator};
use infonls::exact::{
    build_exact_state, cotangent_params, degeneracy_check, exact_energy, exact_energy_bounds, linear_residual_cotangent,
    nonlinear_residual, ExactSolutionSpec, PeriodicProfile,
};
use infonls::io::{parse_config, run_sweep};
use infonls::measures::{fisher_information, functional_derivative, kl_divergence_shifted, Functional};
use infonls::nonlinearity::{nonlinear_term, regularized_kl_term};
use infonls::spectra::{
    first_order_shift_numeric, minimize_over_eta, node_shift_eta_profile, nodeless_shift_integral, sho_ground_shift_closed,
    solve_linear_spectrum,
};
use infonls::{Complex64, Density, Grid, NonlinearParams, PhysConstants, ShiftFill, Wavefunction};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: infonls::Error) -> String {
    format!("error: {e}")
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

fn within_budget(detail: String, elapsed: Duration, budget: Duration) -> Outcome {
    ensure(elapsed < budget, format!("{detail}, {:.2}s of {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()))
}

fn node_profile_minimum() -> Outcome {
    let t = Instant::now();
    let m = minimize_over_eta(node_shift_eta_profile).map_err(err)?;
    let expected = (7.0 + 33f64.sqrt()) / 16.0;
    let d = format!("eta* = {:.10}, expected {:.10}", m.eta, expected);
    if (m.eta - expected).abs() >= 1e-6 {
        return Err(d);
    }
    within_budget(d, t.elapsed(), Duration::from_secs(1))
}

fn gaussian_profile_minimum() -> Outcome {
    let t = Instant::now();
    let m = minimize_over_eta(|e| sho_ground_shift_closed(e, 1.0)).map_err(err)?;
    let expected = (3.0 + 3f64.sqrt()) / 6.0;
    let d = format!("eta* = {:.10}, expected {:.10}", m.eta, expected);
    if (m.eta - expected).abs() >= 1e-6 {
        return Err(d);
    }
    within_budget(d, t.elapsed(), Duration::from_secs(1))
}

fn profile_zeros() -> Outcome {
    let node: Vec<f64> = [0.0, 0.25, 1.0].iter().map(|&e| node_shift_eta_profile(e).unwrap()).collect();
    let sho: Vec<f64> = [0.0, 1.0 / 3.0, 1.0].iter().map(|&e| sho_ground_shift_closed(e, 1.0).unwrap()).collect();
    let worst = node.iter().chain(&sho).fold(0.0f64, |a, v| a.max(v.abs()));
    ensure(worst <= f64::EPSILON, format!("largest |value| at the zeros = {worst:e}"))
}

/// First-order shifts of state `index` for each `eta` at `L = length`.
fn shifts(potential: &Potential, index: usize, etas: &[f64], length: f64) -> Result<Vec<f64>, String> {
    let c = PhysConstants::default();
    let sol = solve_linear_spectrum(potential, &c, index + 1).map_err(err)?;
    etas.iter()
        .map(|&eta| {
            let params = NonlinearParams::new(length, eta, &c).map_err(err)?;
            Ok(first_order_shift_numeric(&sol.states[index], index, &params, &c, &ShiftFill::Floor).map_err(err)?.delta_e)
        })
        .collect()
}

fn universal_eta_dependence() -> Outcome {
    let t = Instant::now();
    let c = PhysConstants::default();
    let etas = [0.1, 0.4, 0.6];
    // ηL = 8, 32, 48 steps at L = 1e-3
    let grid = Grid::centered(7.0, 560_000).map_err(err)?;
    let g: Vec<f64> = etas.iter().map(|&e| node_shift_eta_profile(e).unwrap()).collect();
    let mut worst = 0.0f64;
    for potential in [Potential::harmonic(grid, 1.0, &c).map_err(err)?, Potential::quartic(grid, 1.0).map_err(err)?] {
        let de = shifts(&potential, 1, &etas, 1e-3)?;
        for (i, j) in [(0, 2), (1, 2), (0, 1)] {
            worst = worst.max(((de[i] / de[j]) / (g[i] / g[j]) - 1.0).abs());
        }
    }
    let d = format!("worst ratio mismatch {:.3}%", 100.0 * worst);
    if worst >= 0.05 {
        return Err(d);
    }
    within_budget(d, t.elapsed(), Duration::from_secs(120))
}

fn scaling_split() -> Outcome {
    let t = Instant::now();
    let c = PhysConstants::default();
    let grid = Grid::centered(8.0, 128_000).map_err(err)?;
    let sho = Potential::harmonic(grid, 1.0, &c).map_err(err)?;
    let sol = solve_linear_spectrum(&sho, &c, 2).map_err(err)?;
    let lengths = [1e-3, 2e-3, 4e-3, 8e-3];
    let mut slopes = Vec::new();
    for index in [1, 0] {
        let de = lengths
            .iter()
            .map(|&l| {
                let params = NonlinearParams::new(l, 0.5, &c).map_err(err)?;
                Ok(first_order_shift_numeric(&sol.states[index], index, &params, &c, &ShiftFill::Floor).map_err(err)?.delta_e.abs())
            })
            .collect::<Result<Vec<f64>, String>>()?;
        slopes.push(log_log_slope(&lengths, &de));
    }
    let d = format!("slope n=1 {:.4}, n=0 {:.4}", slopes[0], slopes[1]);
    if (slopes[0] - 1.0).abs() > 0.1 || (slopes[1] - 2.0).abs() > 0.1 {
        return Err(d);
    }
    within_budget(d, t.elapsed(), Duration::from_secs(120))
}

fn nodeless_matches_closed_form() -> Outcome {
    let c = PhysConstants::default();
    // p = e^{-x²}, so a = 1; |x| ≤ 3.6 keeps p above the node threshold
    let grid = Grid::centered(3.6, 7200).map_err(err)?;
    let p = Density::from_fn(grid, |x| (-x * x).exp()).map_err(err)?.normalized().map_err(err)?;
    let etas = [0.2, 0.5, 0.8];
    let numeric: Vec<f64> = etas.iter().map(|&e| nodeless_shift_integral(&p, e, 1e-2, &c)).collect::<Result<_, _>>().map_err(err)?;
    let closed: Vec<f64> = etas.iter().map(|&e| sho_ground_shift_closed(e, 1e-2).unwrap()).collect();
    let mut worst = 0.0f64;
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        worst = worst.max(((numeric[i] / numeric[j]) / (closed[i] / closed[j]) - 1.0).abs());
    }
    let absolute = (numeric[1] / closed[1] - 1.0).abs();
    ensure(worst < 0.01, format!("worst ratio mismatch {:.2e}, absolute mismatch at 0.5 {:.2e}", worst, absolute))
}

/// `Σ_j exp(-(x - jP)²/2σ²)` over the nearest images.
fn wrapped_gaussian(x: f64, sigma: f64, period: f64) -> f64 {
    (-2..=2).map(|j| (-(x - j as f64 * period).powi(2) / (2.0 * sigma * sigma)).exp()).sum()
}

fn linear_limit() -> Outcome {
    let c = PhysConstants::default();
    // wrapped so that it is smooth across the period; σ = 1.2 keeps it above the floor
    let grid = Grid::periodic(-8.0, 16.0, 64_000).map_err(err)?;
    let p = Density::from_fn(grid, |x| wrapped_gaussian(x, 1.2, 16.0)).map_err(err)?.normalized().map_err(err)?;
    let lengths = [0.08, 0.04, 0.02, 0.01, 0.005];
    let maxima: Vec<f64> = lengths
        .iter()
        .map(|&l| {
            let params = NonlinearParams::new(l, 0.5, &c)?;
            Ok(nonlinear_term(&p, &params, &c, &ShiftFill::Periodic)?.max_abs())
        })
        .collect::<Result<_, infonls::Error>>()
        .map_err(err)?;
    let slope = log_log_slope(&lengths, &maxima);
    ensure(slope >= 0.9, format!("slope {slope:.3}, max|F| from {:.3e} to {:.3e}", maxima[0], maxima[4]))
}

fn conservation() -> Outcome {
    let t = Instant::now();
    let c = PhysConstants::default();
    let grid = Grid::periodic(-7.0, 14.0, 280).map_err(err)?;
    let free = Potential::zero(grid);
    let params = NonlinearParams::new(0.1, 0.5, &c).map_err(err)?;
    let prop = Propagator::new(&free, params, c, ShiftFill::Periodic).map_err(err)?;
    let dt = 0.5 * dt_max(&grid, &c);
    let k = 2.0 * PI * 3.0 / 14.0;
    let plane = Wavefunction::from_fn(grid, |x| Complex64::from_polar(1.0, k * x)).map_err(err)?.normalized().map_err(err)?;
    let gauss = Wavefunction::from_fn(grid, |x| Complex64::from_polar(wrapped_gaussian(x, 1.0, 14.0).sqrt(), 2.0 * PI / 14.0 * x))
        .map_err(err)?
        .normalized()
        .map_err(err)?;
    let mut drifts = Vec::new();
    for psi in [plane, gauss] {
        let report = prop.evolve_sampled(&psi, dt, 10_000, 10_000).map_err(err)?;
        drifts.push(report.norm_drift.iter().fold(0.0f64, |a, d| a.max(d.abs())));
    }
    let d = format!("norm drift plane {:.2e}, gaussian {:.2e}", drifts[0], drifts[1]);
    if drifts.iter().any(|&x| x >= 1e-8) {
        return Err(d);
    }
    within_budget(d, t.elapsed(), Duration::from_secs(60))
}

fn exact_params() -> (PhysConstants, NonlinearParams) {
    let c = PhysConstants::default();
    (c, NonlinearParams::new(0.1, 0.8, &c).unwrap())
}

/// Independent energy: `(E/η⁴)(1 - ln D - 1/D)` with `D = 1 - η(1 - γ)`, in plain arithmetic.
fn energy_oracle(kappa: f64, eta: f64, length: f64) -> f64 {
    let scale = 1.0 / (4.0 * length * length);
    let gamma = (-2.0 * kappa * eta * length).exp();
    let d = 1.0 - eta * (1.0 - gamma);
    scale / eta.powi(4) * (1.0 - d.ln() - 1.0 / d)
}

fn exact_solution() -> Outcome {
    let t = Instant::now();
    let (c, params) = exact_params();
    // ηL = 0.08 = 2000 steps; x_max = 11.6 is just past the tail limit
    let dx = 4e-5;
    let grid = Grid::half_line(dx, 290_000).map_err(err)?;
    let spec = ExactSolutionSpec::new(1.0, PeriodicProfile::sine(), params).map_err(err)?;
    let psi = build_exact_state(&spec, &grid).map_err(err)?;
    let e = exact_energy(1.0, &params).map_err(err)?;
    let oracle = energy_oracle(1.0, 0.8, 0.1);
    let r = nonlinear_residual(&psi, e, &params, &c, 3.0 * dx).map_err(err)?;
    let d = format!(
        "E = {e:.10} (oracle {oracle:.10}), residual {:.2e}, excluded {:.2}% of {} points",
        r.max_residual,
        100.0 * r.excluded_fraction,
        grid.len()
    );
    if (e - oracle).abs() >= 1e-8 || (e + 0.504).abs() > 1e-3 || r.max_residual >= 1e-6 {
        return Err(d);
    }
    within_budget(d, t.elapsed(), Duration::from_secs(30))
}

fn degeneracy() -> Outcome {
    let (c, params) = exact_params();
    let dx = 4e-5;
    let grid = Grid::half_line(dx, 290_000).map_err(err)?;
    let a1 = PeriodicProfile::sine();
    let a2 = PeriodicProfile::from_pairs(&[(1, 1.0), (2, 0.3)]).map_err(err)?;
    let rep = degeneracy_check(&a1, &a2, 1.0, &params, &c, &grid, 3.0 * dx).map_err(err)?;
    let gap = (rep.implied_energies.0 - rep.implied_energies.1).abs();
    ensure(
        rep.both_pass && gap < 1e-10,
        format!(
            "residuals {:.2e} and {:.2e}, implied energies differ by {gap:.2e}",
            rep.residuals.0.max_residual, rep.residuals.1.max_residual
        ),
    )
}

fn energy_bounds() -> Outcome {
    let c = PhysConstants::default();
    let params = NonlinearParams::new(0.1, 0.8, &c).unwrap();
    let (lower, upper) = exact_energy_bounds(&params).map_err(err)?;
    for kappa in [0.01, 0.1, 1.0, 10.0] {
        let e = exact_energy(kappa, &params).map_err(err)?;
        if !(e > lower && e < upper) {
            return Err(format!("kappa {kappa}: E = {e} outside ({lower}, {upper})"));
        }
    }
    let lows: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&eta| exact_energy_bounds(&NonlinearParams::new(0.1, eta, &c).unwrap()).map(|b| b.0))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(lows[0] > lows[1] && lows[1] > lows[2], format!("lower bounds {lows:?}"))
}

fn phase_evolution() -> Outcome {
    let (c, params) = exact_params();
    // ηL = 10 steps. The last sample must not be a zero of sin: a node next to the
    // zero ghost is not stationary under the truncated dynamics.
    let dx = 0.008;
    let grid = Grid::half_line(dx, 1501).map_err(err)?;
    let spec = ExactSolutionSpec::new(1.0, PeriodicProfile::sine(), params).map_err(err)?;
    let psi0 = build_exact_state(&spec, &grid).map_err(err)?;
    let e = exact_energy(1.0, &params).map_err(err)?;
    let free = Potential::zero(grid);
    let fill = spec.exterior_fill(&psi0).map_err(err)?;
    let prop = Propagator::new(&free, params, c, fill).map_err(err)?;
    let dt = dt_max(&grid, &c);
    let steps = (1.0 / dt).round() as usize;
    let report = prop.evolve_sampled(&psi0, dt, steps, steps).map_err(err)?;
    let t = steps as f64 * dt;
    let rot = Complex64::from_polar(1.0, -e * t);
    // ηL/2 = 5 steps between zeros of sin(2πx/ηL); 3dx would cover every sample, so
    // only the zeros and their nearest neighbours are left out
    let mut worst = 0.0f64;
    let mut compared = 0;
    for (k, (a, b)) in report.final_state.values().iter().zip(psi0.values()).enumerate() {
        let r = (k + 1) % 5;
        if r <= 1 || r == 4 {
            continue;
        }
        compared += 1;
        worst = worst.max((a - b * rot).norm());
    }
    worst /= psi0.max_abs();
    ensure(
        worst < 1e-5 && compared > 0,
        format!("max |psi(T) - e^(-iET) psi(0)| / max|psi| = {worst:.2e} at T = {t} over {compared} points"),
    )
}

fn functional_derivative_oracle() -> Outcome {
    let c = PhysConstants::default();
    let grid = Grid::periodic(0.0, 4.0, 256).map_err(err)?;
    let p = Density::from_fn(grid, |x| (0.5 * (PI * x / 2.0).cos()).exp()).map_err(err)?.normalized().map_err(err)?;
    let length = 8.0 * grid.dx();
    let params = NonlinearParams::new(length, 1.0, &c).map_err(err)?;
    let functional = Functional::KlShifted { length, scale: params.energy_scale(), fill: ShiftFill::Periodic };
    let numeric = functional_derivative(&functional, &p, 1e-6).map_err(err)?;
    let bracket = regularized_kl_term(&p, &params, &ShiftFill::Periodic).map_err(err)?;
    let scale = bracket.max_abs();
    let rel = numeric.iter().zip(bracket.values()).fold(0.0f64, |a, (n, b)| a.max((n - b).abs())) / scale;
    if rel >= 1e-4 {
        return Err(format!("derivative mismatch {rel:.2e}"));
    }

    let fine = Grid::periodic(0.0, 4.0, 4096).map_err(err)?;
    let p = Density::from_fn(fine, |x| (0.5 * (PI * x / 2.0).cos()).exp()).map_err(err)?.normalized().map_err(err)?;
    let fisher = fisher_information(&p).value;
    let lengths: Vec<f64> = [256.0, 128.0, 64.0, 32.0].iter().map(|s| s * fine.dx()).collect();
    let gaps = lengths
        .iter()
        .map(|&l| Ok((2.0 * kl_divergence_shifted(&p, l, &ShiftFill::Periodic)?.value / (l * l) - fisher).abs()))
        .collect::<Result<Vec<f64>, infonls::Error>>()
        .map_err(err)?;
    let order = log_log_slope(&lengths, &gaps);
    ensure(order >= 0.95, format!("derivative mismatch {rel:.2e}, 2KL/L² → Fisher at order {order:.3}"))
}

fn cotangent_cross_check() -> Outcome {
    let (c, params) = exact_params();
    // ηL = 800 steps
    let dx = 1e-4;
    let grid = Grid::half_line(dx, 120_000).map_err(err)?;
    let spec = ExactSolutionSpec::new(1.0, PeriodicProfile::sine(), params).map_err(err)?;
    let psi = build_exact_state(&spec, &grid).map_err(err)?;
    let e = exact_energy(1.0, &params).map_err(err)?;
    let cot = cotangent_params(1.0, &params, &c).map_err(err)?;
    let r = linear_residual_cotangent(&psi, e, &cot, &c, 3.0 * dx).map_err(err)?;
    let v = cot.potential(&grid).map_err(err)?;
    let same = v.singular_mask().iter().zip(psi.values()).all(|(&s, z)| s == (*z == Complex64::new(0.0, 0.0)));
    let singular = v.singular_mask().iter().filter(|&&s| s).count();
    ensure(r < 1e-5 && same && singular > 0, format!("residual {r:.2e}, {singular} singular points, mask equals node set: {same}"))
}

const SWEEP: &str = r#"
format_version = 1
command = "shift-sweep"

[grid]
x_min = -8.0
dx = 0.001
n_points = 16001
boundary = "dirichlet"

[nonlinearity]
eta = [0.1, 0.4, 0.6]
length = [0.01, 0.02]

[potential]
kind = "harmonic"
omega = 1.0

[run]
states = [0, 1, 2]
"#;

fn determinism() -> Outcome {
    let config = parse_config(SWEEP).map_err(err)?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let read = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        run_sweep(&config, &out).map_err(err)?;
        std::fs::read(out.join("shifts.csv")).map_err(|e| e.to_string())
    };
    let (a, b) = (read("a")?, read("b")?);
    let rows = a.iter().filter(|&&c| c == b'\n').count() - 1;
    ensure(a == b && rows == 18, format!("{rows} rows, identical bytes: {}", a == b))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 15] = [
        ("eta minimum of the node profile", node_profile_minimum),
        ("eta minimum of the oscillator ground-state shift", gaussian_profile_minimum),
        ("profile zeros", profile_zeros),
        ("universal eta dependence of shifts with nodes", universal_eta_dependence),
        ("L scaling with and without nodes", scaling_split),
        ("nodeless integral against the closed form", nodeless_matches_closed_form),
        ("linear limit of F", linear_limit),
        ("norm conservation", conservation),
        ("exact half-line eigenstate", exact_solution),
        ("degeneracy in the periodic profile", degeneracy),
        ("energy bounds", energy_bounds),
        ("eigenstate phase evolution", phase_evolution),
        ("functional derivative and Fisher limit", functional_derivative_oracle),
        ("cotangent potential cross-check", cotangent_cross_check),
        ("sweep determinism", determinism),
    ];
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        match check() {
            Ok(d) => println!("PASS {n:>2}: {name}: {d}"),
            Err(d) => {
                println!("FAIL {n:>2}: {name}: {d}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

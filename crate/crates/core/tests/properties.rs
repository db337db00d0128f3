use infonls::exact::{exact_energy, exact_energy_bounds};
use infonls::grid::{laplacian, shift_density};
use infonls::io::{
    parse_config, Command, ConstantsBlock, ExperimentConfig, FillKind, GridBlock, NonlinearityBlock, PotentialBlock,
    PotentialKind, RunBlock,
};
use infonls::measures::kl_divergence_shifted;
use infonls::nonlinearity::{nonlinear_term, regularized_kl_term};
use infonls::spectra::{count_nodes, solve_linear_spectrum};
use infonls::dynamics::Potential;
use infonls::{Boundary, Complex64, Density, Grid, NonlinearParams, PhysConstants, ShiftFill, Wavefunction};
use proptest::prelude::*;

fn positive_values(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, n)
}

fn complex_values(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

/// A smooth, strictly positive periodic density built from a few random cosines.
fn smooth_periodic(grid: Grid, coefficients: &[f64]) -> Density {
    let period = grid.dx() * grid.len() as f64;
    Density::from_fn(grid, |x| {
        let s: f64 = coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * (2.0 * std::f64::consts::PI * (j + 1) as f64 * x / period).cos())
            .sum();
        s.exp()
    })
    .unwrap()
    .normalized()
    .unwrap()
}

proptest! {
    #[test]
    fn periodic_shift_is_undone_exactly(values in positive_values(8..64), s in 0usize..64) {
        let grid = Grid::new(0.0, 0.1, values.len(), Boundary::Periodic).unwrap();
        let p = Density::new(grid, values).unwrap();
        let s = (s % p.values().len()) as isize;
        let there = shift_density(&p, s, &ShiftFill::Periodic).unwrap();
        let back = shift_density(&there, -s, &ShiftFill::Periodic).unwrap();
        prop_assert_eq!(back.values(), p.values());
    }

    #[test]
    fn normalize_is_idempotent_and_ignores_scale(values in complex_values(32), scale in 0.01f64..100.0) {
        prop_assume!(values.iter().any(|z| z.norm() > 1e-3));
        let grid = Grid::new(-1.0, 0.05, 32, Boundary::Dirichlet).unwrap();
        let psi = Wavefunction::new(grid, values.clone()).unwrap();
        let once = psi.normalized().unwrap();
        let twice = once.normalized().unwrap();
        let scaled = Wavefunction::new(grid, values.iter().map(|z| z * scale).collect()).unwrap().normalized().unwrap();
        for ((a, b), c) in once.values().iter().zip(twice.values()).zip(scaled.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            prop_assert!((a - c).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn laplacian_is_linear(
        u in complex_values(24),
        v in complex_values(24),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        periodic in any::<bool>(),
    ) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        let grid = Grid::new(0.0, 0.25, 24, boundary).unwrap();
        let mix: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| x * a + y * b).collect();
        let (lu, lv, lm) = (laplacian(&grid, &u), laplacian(&grid, &v), laplacian(&grid, &mix));
        for k in 0..24 {
            let expected = lu[k] * a + lv[k] * b;
            prop_assert!((lm[k] - expected).norm() <= 1e-12 * (1.0 + lu[k].norm() + lv[k].norm()) * 16.0);
        }
    }

    #[test]
    fn kl_is_non_negative(coefficients in prop::collection::vec(-1.0f64..1.0, 1..4), steps in 1usize..40) {
        let grid = Grid::periodic(0.0, 4.0, 128).unwrap();
        let p = smooth_periodic(grid, &coefficients);
        let kl = kl_divergence_shifted(&p, steps as f64 * grid.dx(), &ShiftFill::Periodic).unwrap();
        prop_assert!(kl.value >= -1e-10, "{}", kl.value);
    }

    #[test]
    fn field_commutes_with_translation(
        coefficients in prop::collection::vec(-1.0f64..1.0, 1..4),
        a in 0usize..128,
        eta in 0.05f64..1.0,
    ) {
        let c = PhysConstants::default();
        let grid = Grid::periodic(0.0, 4.0, 128).unwrap();
        let p = smooth_periodic(grid, &coefficients);
        let params = NonlinearParams::with_shift_steps(&grid, 3, eta, &c).unwrap();
        let moved = shift_density(&p, a as isize, &ShiftFill::Periodic).unwrap();
        let f = nonlinear_term(&p, &params, &c, &ShiftFill::Periodic).unwrap();
        let g = nonlinear_term(&moved, &params, &c, &ShiftFill::Periodic).unwrap();
        let scale = f.max_abs().max(1.0);
        for k in 0..128 {
            prop_assert!((g.values()[k] - f.values()[(k + a) % 128]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn kl_field_depends_only_on_ratios(
        coefficients in prop::collection::vec(-1.0f64..1.0, 1..4),
        factor in 1e-3f64..1e3,
        eta in 0.05f64..1.0,
    ) {
        let c = PhysConstants::default();
        let grid = Grid::periodic(0.0, 4.0, 128).unwrap();
        let p = smooth_periodic(grid, &coefficients);
        let scaled = Density::new(grid, p.values().iter().map(|v| v * factor).collect()).unwrap();
        let params = NonlinearParams::with_shift_steps(&grid, 5, eta, &c).unwrap();
        let f = regularized_kl_term(&p, &params, &ShiftFill::Periodic).unwrap();
        let g = regularized_kl_term(&scaled, &params, &ShiftFill::Periodic).unwrap();
        let scale = f.max_abs();
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn exact_energy_falls_with_kappa_inside_its_bounds(
        eta in 0.05f64..0.95,
        length in 0.01f64..1.0,
        decay in 1e-3f64..15.0,
        step in 1e-3f64..5.0,
    ) {
        // κ is drawn through the decay 2κηL so that γ stays away from underflow.
        let params = NonlinearParams::new(length, eta, &PhysConstants::default()).unwrap();
        let k1 = decay / (2.0 * params.shift_distance());
        let dk = step / (2.0 * params.shift_distance());
        let (lower, upper) = exact_energy_bounds(&params).unwrap();
        let (e1, e2) = (exact_energy(k1, &params).unwrap(), exact_energy(k1 + dk, &params).unwrap());
        prop_assert!(e2 < e1);
        prop_assert!(lower < e2 && e1 < upper);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectra_are_ordered_orthonormal_and_counted_by_nodes(a in 0.1f64..4.0, b in 0.0f64..1.0) {
        let c = PhysConstants::default();
        let grid = Grid::centered(8.0, 400).unwrap();
        let v = Potential::from_fn(grid, |x| a * x * x + b * x.powi(4)).unwrap();
        let sol = solve_linear_spectrum(&v, &c, 5).unwrap();
        for w in sol.energies.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for (i, s) in sol.states.iter().enumerate() {
            prop_assert_eq!(count_nodes(s), i);
            for (j, t) in sol.states.iter().enumerate() {
                let o = s.inner(t).unwrap().re;
                let delta = if i == j { 1.0 } else { 0.0 };
                prop_assert!((o - delta).abs() < 1e-8, "overlap {} {}: {}", i, j, o);
            }
        }
    }

    #[test]
    fn rendered_configs_parse_back(
        eta in prop::collection::vec(prop::sample::select(vec![0.25, 0.5, 0.75, 1.0]), 1..4),
        multiples in prop::collection::vec(1u32..20, 1..3),
        power in 6i32..12,
        n_points in 8usize..5000,
        x_min in -20.0f64..0.0,
        hbar in 0.5f64..2.0,
        omega in 0.1f64..5.0,
        states in prop::collection::vec(0usize..4, 1..4),
        fill in prop::option::of(prop::sample::select(vec![FillKind::Periodic, FillKind::Floor])),
    ) {
        let dx = 2f64.powi(-power);
        let config = ExperimentConfig {
            format_version: 1,
            command: Command::ShiftSweep,
            constants: ConstantsBlock { hbar, mass: 1.0 },
            grid: Some(GridBlock { x_min, dx, n_points, boundary: Boundary::Dirichlet }),
            nonlinearity: Some(NonlinearityBlock {
                eta,
                length: multiples.iter().map(|&m| 4.0 * f64::from(m) * dx).collect(),
                fill,
            }),
            potential: Some(PotentialBlock { kind: PotentialKind::Harmonic, omega: Some(omega), coefficient: None }),
            run: RunBlock { states: Some(states), ..RunBlock::default() },
        };
        let text = config.render();
        prop_assert_eq!(parse_config(&text).unwrap(), config);
    }
}

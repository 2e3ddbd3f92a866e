//! Acceptance suite: one test per shipped claim, each printing a PASS line
//! (run with `--nocapture` to see them). Tolerances are pinned in the
//! assertions themselves.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::prelude::*;
use rand::rngs::StdRng;

use hbac_cli::commands::cmd_sweep;
use hbac_cli::config::parse_config;
use hbac_cli::presets::{preset_body, preset_names};
use hbac_core::*;

fn pol(p: f64) -> Polarization {
    Polarization::new(p).unwrap()
}

fn eps(p: f64) -> Epsilon {
    pol(p).epsilon().unwrap()
}

fn mixed_three_spin() -> PopulationVector {
    PopulationVector::uniform(RegisterLayout::three_spin())
}

/// The (0.2, 0.2) fixed-circuit run of the first criterion: 25 iterations,
/// no early stop.
fn reference_spec() -> ProtocolSpec {
    ProtocolSpec::fixed_circuit(eps(0.2), eps(0.2))
        .with_max_iterations(25)
        .with_convergence_tol(0.0)
}

#[test]
fn criterion_01_cooling_limit_saturation() {
    let spec = reference_spec();
    let initial = mixed_three_spin();
    let started = Instant::now();
    let trajectory = iterate(&spec, &initial).unwrap();
    let elapsed = started.elapsed();

    let final_p = trajectory.records()[25].polarization.value();
    assert!(
        (final_p - 0.384615385).abs() <= 1e-6,
        "iteration 25 at {final_p}, expected 0.384615385 +- 1e-6"
    );
    assert!(
        elapsed.as_secs_f64() < 1e-3,
        "25 iterations took {elapsed:?}, expected < 1 ms"
    );
    println!("criterion 1 (cooling-limit saturation, 25 iterations, < 1 ms): PASS");
}

#[test]
fn criterion_02_beyond_reset_hyperpolarization() {
    let trajectory = iterate(&reference_spec(), &mixed_three_spin()).unwrap();
    let second = trajectory.records()[2].polarization.value();
    assert!(
        (second - 0.296).abs() <= 1e-12,
        "iteration 2 at {second}, expected 0.296 +- 1e-12"
    );
    assert!(second > 0.2, "iteration 2 did not exceed the reset polarization");
    println!("criterion 2 (beyond-reset hyperpolarization at iteration 2): PASS");
}

#[test]
fn criterion_03_geometric_convergence_law() {
    let trajectory = iterate(&reference_spec(), &mixed_three_spin()).unwrap();
    let star = 0.4 / 1.04;
    for record in trajectory.records() {
        let ratio = (star - record.polarization.value()).abs() / star;
        let expected = 0.48f64.powi(record.iteration as i32);
        assert!(
            (ratio - expected).abs() <= 1e-10,
            "iteration {}: ratio {ratio}, expected {expected}",
            record.iteration
        );
    }
    println!("criterion 3 (geometric convergence, contraction 0.48): PASS");
}

#[test]
fn criterion_04_comparison_presets_stay_under_their_limits() {
    for (p1, p2, expected_limit) in [(0.2, 0.3, 0.471698113), (0.3, 0.1, 0.388349515)] {
        let comparison = compare_protocols(pol(p1), pol(p2), 50).unwrap();
        let two_reset = comparison.two_reset_limit.p_max().value();
        assert!(
            (two_reset - expected_limit).abs() <= 1e-9,
            "limit for ({p1}, {p2}) at {two_reset}, expected {expected_limit}"
        );
        let single_reset = comparison.single_reset_limit.p_max().value();
        for k in 0..=50 {
            assert!(comparison.fixed_circuit[k] <= two_reset + 1e-9, "fixed at {k}");
            assert!(comparison.ppa_two_reset[k] <= two_reset + 1e-9, "two-reset at {k}");
            assert!(
                comparison.ppa_single_reset[k] <= single_reset + 1e-9,
                "single-reset at {k}"
            );
        }
    }
    println!("criterion 4 (comparison limit lines and bounded curves, 50 iterations): PASS");
}

#[test]
fn criterion_05_ppa_permutation_optimality_certificate() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    for case in 0..200 {
        let raw: Vec<f64> = (0..8).map(|_| rng.random_range(0.001..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        let state = PopulationVector::new(
            RegisterLayout::three_spin(),
            raw.iter().map(|x| x / sum).collect(),
        )
        .unwrap();

        let sorted = state.apply_permutation(&ppa_sort_permutation(&state)).unwrap();
        let sorted_p0: f64 = sorted.probabilities()[..4].iter().sum();

        // exhaustive oracle: every arrangement of the populations
        let mut best = f64::MIN;
        let mut values: Vec<f64> = state.probabilities().to_vec();
        for_each_permutation(&mut values, &mut |arrangement| {
            let p0 = arrangement[0] + arrangement[1] + arrangement[2] + arrangement[3];
            if p0 > best {
                best = p0;
            }
        });
        assert!(
            sorted_p0 >= best - 1e-12,
            "case {case}: sorted arrangement at {sorted_p0}, exhaustive best {best}"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "200 x 40320 oracle took {elapsed:?}, expected < 30 s"
    );
    println!("criterion 5 (PPA optimality over all 40320 permutations x 200 states): PASS");
}

/// Heap's algorithm, visiting every arrangement of `values` exactly once.
fn for_each_permutation<F: FnMut(&[f64])>(values: &mut [f64], visit: &mut F) {
    let n = values.len();
    let mut c = vec![0usize; n];
    visit(values);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                values.swap(0, i);
            } else {
                values.swap(c[i], i);
            }
            visit(values);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn criterion_06_diagonal_sufficiency() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let layout = RegisterLayout::three_spin();
    for case in 0..100 {
        let rho = random_density_matrix(&mut rng, layout.clone());
        let mut map: Vec<usize> = (0..8).collect();
        map.shuffle(&mut rng);
        let perm = Permutation::new(map).unwrap();

        let via_matrix = rho.diagonal_of_conjugation(&perm).unwrap();
        let via_populations = rho.diagonal().apply_permutation(&perm).unwrap();
        for (i, (a, b)) in via_matrix
            .probabilities()
            .iter()
            .zip(via_populations.probabilities())
            .enumerate()
        {
            assert!(
                (a - b).abs() <= 1e-12,
                "case {case}, entry {i}: conjugation {a} vs population path {b}"
            );
        }
    }
    println!("criterion 6 (diagonal sufficiency on 100 random density matrices): PASS");
}

/// `rho = A A^dag / tr(A A^dag)` for random complex `A`: Hermitian, unit
/// trace, positive semidefinite, dense off-diagonals.
fn random_density_matrix(rng: &mut StdRng, layout: RegisterLayout) -> DensityMatrix {
    let dim = layout.dimension();
    let a: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut rho = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::ZERO;
            for k in 0..dim {
                acc += a[i * dim + k] * a[j * dim + k].conj();
            }
            rho[i * dim + j] = acc;
        }
    }
    let trace: f64 = (0..dim).map(|i| rho[i * dim + i].re).sum();
    for entry in &mut rho {
        *entry /= trace;
    }
    DensityMatrix::new(layout, rho).unwrap()
}

#[test]
fn criterion_07_map_engine_equivalence() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    for case in 0..1000 {
        let p = rng.random_range(-0.99..0.99);
        let p1 = rng.random_range(-0.99..0.99);
        let p2 = rng.random_range(-0.99..0.99);

        let initial = PopulationVector::tensor(
            &[
                PopulationVector::polarized_qubit(pol(p)),
                PopulationVector::uniform(RegisterLayout::single_qubit()),
                PopulationVector::uniform(RegisterLayout::single_qubit()),
            ],
            RegisterLayout::three_spin(),
        )
        .unwrap();
        let spec = ProtocolSpec::fixed_circuit(eps(p1), eps(p2)).with_max_iterations(1);
        let engine = iterate(&spec, &initial).unwrap().final_polarization().value();
        let map = fixed_circuit_map(pol(p), pol(p1), pol(p2)).value();
        assert!(
            (engine - map).abs() <= 1e-14,
            "case {case} ({p}, {p1}, {p2}): engine {engine} vs map {map}"
        );
    }
    println!("criterion 7 (closed-form map vs 8-entry engine, 1000 triples): PASS");
}

#[test]
fn criterion_08_sweep_symmetry_and_shape() {
    let config = parse_config(preset_body("fig3d-grid").unwrap()).unwrap();
    let out = std::env::temp_dir().join(format!("hbac-acceptance-{}-sweep.csv", std::process::id()));

    let started = Instant::now();
    let outcome = cmd_sweep(&config, &out).unwrap();
    let elapsed = started.elapsed();
    assert_eq!(outcome.data_rows, 400);
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "20x20 sweep took {elapsed:?}, expected < 5 s"
    );

    let grid = read_sweep_grid(&out, 20);
    for i in 0..20 {
        for j in 0..20 {
            assert!(
                (grid[i][j] - grid[j][i]).abs() <= 1e-9,
                "asymmetry at ({i}, {j})"
            );
            if i > 0 {
                assert!(
                    grid[i][j] >= grid[i - 1][j] - 1e-9,
                    "not monotone along the first axis at ({i}, {j})"
                );
            }
            if j > 0 {
                assert!(
                    grid[i][j] >= grid[i][j - 1] - 1e-9,
                    "not monotone along the second axis at ({i}, {j})"
                );
            }
        }
    }
    println!("criterion 8 (20x20 sweep symmetric and monotone, < 5 s): PASS");
}

fn read_sweep_grid(path: &PathBuf, side: usize) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut grid = vec![vec![0.0; side]; side];
    for (row, line) in text.lines().skip(1).enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        grid[row / side][row % side] = fields[2].parse().unwrap();
    }
    grid
}

#[test]
fn criterion_09_noise_monotonicity_and_noiseless_recovery() {
    let base = ProtocolSpec::fixed_circuit(eps(0.2), eps(0.2)).with_max_iterations(200);

    // gamma grid 0, 0.05, ..., 0.5: strictly decreasing, each point matched
    // by the affine fixed-point oracle
    let mut previous = f64::MAX;
    for i in 0..=10 {
        let gamma = i as f64 * 0.05;
        let noise = NoiseSpec::new(gamma, 1.0, 1.0).unwrap();
        let value = noisy_asymptote(&base, &noise).unwrap().value();

        let a = 0.2;
        let b = 0.48;
        let oracle = (1.0 - gamma) * a / (1.0 - (1.0 - gamma) * b);
        assert!(
            (value - oracle).abs() <= 1e-9,
            "gamma {gamma}: engine {value} vs affine oracle {oracle}"
        );
        assert!(value < previous, "gamma {gamma} did not strictly decrease");
        previous = value;
    }

    // gamma = 0 reproduces the reference trajectory bit for bit
    let spec = reference_spec();
    let initial = mixed_three_spin();
    let ideal = iterate(&spec, &initial).unwrap();
    let recovered = iterate_noisy(&spec, &NoiseSpec::noiseless(), &initial).unwrap();
    assert_eq!(ideal, recovered, "noiseless recovery is not bit-exact");
    let final_p = recovered.records()[25].polarization.value();
    assert!((final_p - 0.384615385).abs() <= 1e-6);
    println!("criterion 9 (noise monotonicity and bit-exact noiseless recovery): PASS");
}

#[test]
fn criterion_10_hardware_fluctuations_out_of_scope() {
    // The measured data behind the saturation experiment fluctuates around
    // (sometimes above) the ideal limit; nothing here reproduces that, and
    // nothing should. The shipped presets are exactly the theory scenarios:
    // noiseless curves, the degraded-saturation demo, and the sweep grid.
    assert_eq!(
        preset_names(),
        vec!["fig2-top", "fig2-bottom-caption", "fig2-bottom-body", "fig3a-like", "fig3d-grid"],
    );

    // the degraded demo saturates strictly below its ideal limit line, never
    // above it
    let config = parse_config(preset_body("fig3a-like").unwrap()).unwrap();
    let noise = config.noise.unwrap();
    let spec = ProtocolSpec::fixed_circuit(eps(0.2), eps(0.2)).with_max_iterations(200);
    let noisy = noisy_asymptote(
        &spec,
        &NoiseSpec::new(noise.gamma, noise.gate_fidelity, noise.reset_efficiency).unwrap(),
    )
    .unwrap()
    .value();
    let limit = hbac_limit(1, &[eps(0.2), eps(0.2)]).unwrap().p_max().value();
    assert!(noisy < limit - 1e-3, "noisy saturation {noisy} not visibly below {limit}");
    println!("criterion 10 (hardware fluctuations explicitly out of scope): PASS");
}

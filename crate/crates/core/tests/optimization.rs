use hbar_lpt::renorm::{log_grid, scan};
use hbar_lpt::{
    optimize_omega0, optimize_sequence, solve_eigenvalue, DifferenceTarget, Execution, GridConfig,
    Param, PotentialSpec, QuantumState, RenormConfig, Scheme,
};

fn table_potential(coupling: Param) -> PotentialSpec {
    PotentialSpec::sextic(Param::int(1), coupling.clone(), coupling).unwrap()
}

fn fast() -> RenormConfig {
    RenormConfig {
        digits: 15,
        grid_points: 600,
        ..RenormConfig::default()
    }
}

#[test]
fn stationary_point_has_vanishing_derivative() {
    let p = table_potential(Param::int(10));
    let result = optimize_omega0(&p, QuantumState::new(1, 0), 8, &fast()).unwrap();
    let scale = result.partial_sum / result.omega0;
    assert!(result.derivative.abs() < 1e-9 * scale, "{result:?}");
    assert!(result.all_roots.len() >= 2);
}

#[test]
fn high_precision_polish_agrees_with_doubles() {
    let p = table_potential(Param::ratio(1, 100));
    let state = QuantumState::new(1, 1);
    let double = optimize_omega0(&p, state, 6, &fast()).unwrap();
    let config = RenormConfig {
        digits: 40,
        ..fast()
    };
    let precise = optimize_omega0(&p, state, 6, &config).unwrap();
    assert!((double.partial_sum - precise.partial_sum).abs() < 1e-12);
    assert!(
        precise.partial_sum_text.len() > 30,
        "{}",
        precise.partial_sum_text
    );
}

#[test]
fn sequence_matches_single_orders_when_unambiguous() {
    let p = table_potential(Param::ratio(1, 100));
    let seq = optimize_sequence(&p, QuantumState::GROUND, &[2, 3], &fast()).unwrap();
    let single = optimize_omega0(&p, QuantumState::GROUND, 2, &fast()).unwrap();
    assert_eq!(seq[0].as_ref().unwrap().omega0, single.omega0);
    assert!(seq[1].is_ok());
}

#[test]
fn optimized_sums_approach_numerical_level() {
    let p = table_potential(Param::int(1));
    let state = QuantumState::GROUND;
    let grid = GridConfig::auto(&p, state).unwrap();
    let reference = solve_eigenvalue(&p, state, &grid).unwrap().energy;
    let sums = optimize_sequence(&p, state, &[2, 12], &fast()).unwrap();
    let low = (sums[0].as_ref().unwrap().partial_sum - reference).abs();
    let high = (sums[1].as_ref().unwrap().partial_sum - reference).abs();
    assert!(high < low / 10.0, "{low} -> {high}");
}

#[test]
fn difference_scheme_zeroes_the_last_correction() {
    let p = table_potential(Param::int(1));
    let config = RenormConfig {
        scheme: Scheme::MinimalDifference,
        ..fast()
    };
    let result = optimize_omega0(&p, QuantumState::GROUND, 4, &config).unwrap();
    let series =
        hbar_lpt::renorm_corrections(&p, QuantumState::GROUND, 4, &result.omega0, &()).unwrap();
    assert!(
        series.corrections()[3].abs() < 1e-10,
        "{:?}",
        series.corrections()
    );

    let on_sum = RenormConfig {
        difference_target: DifferenceTarget::PartialSum,
        ..config
    };
    let zeroed = optimize_omega0(&p, QuantumState::GROUND, 4, &on_sum).unwrap();
    assert!(zeroed.partial_sum.abs() < 1e-9, "{zeroed:?}");
}

#[test]
fn pure_sextic_is_flagged_as_extension() {
    let p = PotentialSpec::new(
        Param::int(1),
        Param::int(0),
        vec![Param::int(0), Param::int(1)],
    )
    .unwrap();
    let result = optimize_omega0(&p, QuantumState::GROUND, 6, &fast()).unwrap();
    assert!(result.extension);
    let grid = GridConfig::auto(&p, QuantumState::GROUND).unwrap();
    let reference = solve_eigenvalue(&p, QuantumState::GROUND, &grid)
        .unwrap()
        .energy;
    assert!(
        (result.partial_sum - reference).abs() < 0.05 * reference,
        "{} vs {reference}",
        result.partial_sum
    );
}

#[test]
fn sequential_and_parallel_scans_agree() {
    let p = table_potential(Param::int(10));
    let interval = (0.5, 30.0);
    let a = scan(
        &p,
        QuantumState::new(1, 1),
        10,
        interval,
        200,
        Execution::Sequential,
    )
    .unwrap();
    let b = scan(
        &p,
        QuantumState::new(1, 1),
        10,
        interval,
        200,
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(a.grid(), b.grid());
    for i in 0..a.grid().len() {
        assert_eq!(
            a.sample(i).map(|s| s.partial_sums().to_vec()),
            b.sample(i).map(|s| s.partial_sums().to_vec())
        );
    }
}

#[test]
fn log_grid_hits_both_ends() {
    let grid = log_grid((0.1, 10.0), 5);
    assert_eq!(grid.len(), 5);
    assert_eq!(grid[0], 0.1);
    assert_eq!(grid[4], 10.0);
    assert!((grid[2] - 1.0).abs() < 1e-12);
}

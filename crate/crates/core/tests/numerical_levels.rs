use hbar_lpt::reference::quasi_exact_energy;
use hbar_lpt::{solve_eigenvalue, GridConfig, Param, PotentialSpec, QuantumState};
use proptest::prelude::*;

fn level(p: &PotentialSpec, state: QuantumState) -> f64 {
    let grid = GridConfig::auto(p, state).unwrap();
    solve_eigenvalue(p, state, &grid).unwrap().energy
}

#[test]
fn quasi_exact_levels() {
    for (a, c) in [(1.0 / 3.0, 0.5), (0.5, 0.5), (1.0, 2.0)] {
        let (b, exact) = quasi_exact_energy::<f64>(&a, &c, &()).unwrap();
        let p = PotentialSpec::quasi_exact_family(
            &Param::Approx(a),
            &Param::Approx(b),
            &Param::Approx(c),
        )
        .unwrap();
        let energy = level(&p, QuantumState::new(0, 1));
        assert!(
            (energy - exact).abs() < 1e-7,
            "a={a}, c={c}: {energy} vs {exact}"
        );
    }
}

#[test]
fn heavier_mass_lowers_the_harmonic_level() {
    // E = ω(2n + l + 3/2) for V = mω²r²/2, independent of m
    let p = PotentialSpec::new(Param::int(4), Param::int(1), vec![]).unwrap();
    assert!((level(&p, QuantumState::new(1, 2)) - 5.5).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn energies_grow_with_coupling(lambda in 0.01f64..5.0, bump in 0.1f64..2.0, n in 0u32..3, l in 0u32..3) {
        let state = QuantumState::new(n, l);
        let weak = PotentialSpec::sextic(Param::int(1), Param::Approx(lambda), Param::Approx(lambda)).unwrap();
        let strong = PotentialSpec::sextic(
            Param::int(1),
            Param::Approx(lambda + bump),
            Param::Approx(lambda + bump),
        )
        .unwrap();
        prop_assert!(level(&weak, state) < level(&strong, state));
    }

    #[test]
    fn levels_order_by_nodes_and_momentum(lambda in 0.01f64..5.0) {
        let p = PotentialSpec::new(Param::int(1), Param::int(1), vec![Param::Approx(lambda)]).unwrap();
        let ground = level(&p, QuantumState::GROUND);
        prop_assert!(ground < level(&p, QuantumState::new(0, 1)));
        prop_assert!(level(&p, QuantumState::new(0, 1)) < level(&p, QuantumState::new(1, 0)));
    }
}

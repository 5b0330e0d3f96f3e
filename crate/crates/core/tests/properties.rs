use std::sync::Arc;

use proptest::prelude::*;

use tp_stokes::halfspace::{solve, SolverOptions, StokesData};
use tp_stokes::setup::Problem;
use tp_stokes::spectral::norms::lq_norm_pieces;
use tp_stokes::spectral::transform::{forward, hermitian_defect, inverse, time_shift_jet};
use tp_stokes::spectral::{Grid, NormalJet, PhysicalField, SpectralField};
use tp_stokes::symbols::partition::{bump_sum, shell_range, shell_weight};
use tp_stokes::verification::suites::bundle_generator;

fn small() -> Problem {
    Problem {
        time_modes: 4,
        tangential: 16,
        normal_nodes: 64,
        grading: 1.12,
        first_cell: 4e-3,
        ..Problem::default()
    }
}

fn grid() -> Arc<Grid> {
    small().grid().unwrap()
}

fn random_data(seed: u64) -> StokesData {
    bundle_generator(&small(), seed).bundle().data(grid()).unwrap()
}

fn combine(a: &StokesData, s: f64, b: &StokesData) -> StokesData {
    let jet = |x: &NormalJet, y: &NormalJet| x.scaled(s).add(y).unwrap();
    StokesData::new(
        jet(&a.force, &b.force),
        jet(&a.divergence, &b.divergence),
        a.boundary.scaled(s).add(&b.boundary).unwrap(),
    )
    .unwrap()
}

fn rel_diff(x: &SpectralField, y: &SpectralField) -> f64 {
    x.sub(y).unwrap().max_abs() / x.max_abs().max(y.max_abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0) {
        let (d1, d2) = (random_data(s1), random_data(s2));
        let opts = SolverOptions::default();
        let combined = solve(&combine(&d1, a, &d2), &opts).unwrap();
        let (u1, u2) = (solve(&d1, &opts).unwrap(), solve(&d2, &opts).unwrap());
        let expect_u = u1.velocity.value().scaled(a).add(u2.velocity.value()).unwrap();
        let expect_p = u1.pressure.value().scaled(a).add(u2.pressure.value()).unwrap();
        prop_assert!(rel_diff(combined.velocity.value(), &expect_u) < 1e-10);
        prop_assert!(rel_diff(combined.pressure.value(), &expect_p) < 1e-10);
    }

    #[test]
    fn solutions_of_real_data_stay_real(seed in any::<u64>()) {
        let sol = solve(&random_data(seed), &SolverOptions::default()).unwrap();
        for level in sol.velocity.levels().iter().chain(sol.pressure.levels()) {
            prop_assert!(hermitian_defect(level).0 < 1e-12);
        }
    }

    #[test]
    fn time_shift_commutes_with_the_solver(seed in any::<u64>(), steps in -7i64..7) {
        let data = random_data(seed);
        let opts = SolverOptions::default();
        let shifted = solve(&data.time_shifted(steps), &opts).unwrap();
        let expect = time_shift_jet(&solve(&data, &opts).unwrap().velocity, steps);
        prop_assert!(rel_diff(shifted.velocity.value(), expect.value()) < 1e-12);
    }

    #[test]
    fn lq_norms_are_absolutely_homogeneous(seed in any::<u64>(), c in -50.0f64..50.0, q in 1.0f64..6.0) {
        let f = random_data(seed).force.value().clone();
        let base = lq_norm_pieces(std::slice::from_ref(&f), q).unwrap();
        let scaled = lq_norm_pieces(&[f.scaled(c)], q).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (c.abs() * base).max(1e-300));
    }

    #[test]
    fn transforms_round_trip(values in proptest::collection::vec(-1.0f64..1.0, 9 * 16)) {
        let g = Arc::new(grid().boundary());
        let f = PhysicalField::from_vec(g, 1, values).unwrap();
        let back = inverse(&forward(&f)).unwrap();
        let err = f.data().iter().zip(back.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-13);
    }
}

proptest! {
    #[test]
    fn partition_sums_to_one(log_rho in -30.0f64..30.0) {
        let rho = log_rho.exp2();
        prop_assert!(bump_sum(rho) > 0.0);
        let total: f64 = shell_range(rho, rho).map(|l| shell_weight(l, rho)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for l in shell_range(rho, rho) {
            let w = shell_weight(l, rho);
            prop_assert!((0.0..=1.0).contains(&w));
        }
    }
}

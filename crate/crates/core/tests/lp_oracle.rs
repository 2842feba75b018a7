mod common;

use common::{check_kkt, random_lp, vertex_optimum};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stn_core::lp::{solve, LpOptions, LpProblem, LpStatus, PivotRule};

fn small_lp() -> impl Strategy<Value = LpProblem<f64>> {
    any::<u64>().prop_map(|seed| random_lp(&mut ChaCha8Rng::seed_from_u64(seed), 8, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(p in small_lp()) {
        let s = solve(&p, &LpOptions::default()).unwrap();
        match vertex_optimum(&p) {
            None => prop_assert_eq!(s.status, LpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(s.status, LpStatus::Optimal);
                prop_assert!((s.objective - best).abs() <= 1e-9 * (1.0 + best.abs()),
                    "simplex {} vs oracle {}", s.objective, best);
                if let Err(e) = check_kkt(&p, &s, 1e-9) {
                    return Err(TestCaseError::fail(e));
                }
            }
        }
    }

    #[test]
    fn bland_agrees_with_dantzig(p in small_lp()) {
        let a = solve(&p, &LpOptions::default()).unwrap();
        let opts = LpOptions { pivot_rule: PivotRule::Bland, ..LpOptions::default() };
        let b = solve(&p, &opts).unwrap();
        prop_assert_eq!(a.status, b.status);
        if a.is_optimal() {
            prop_assert!((a.objective - b.objective).abs() <= 1e-9 * (1.0 + a.objective.abs()));
        }
    }

    #[test]
    fn solves_are_bit_identical(p in small_lp()) {
        let a = solve(&p, &LpOptions::default()).unwrap();
        let b = solve(&p, &LpOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn single_precision_tracks_double(p in small_lp()) {
        let d = solve(&p, &LpOptions::default()).unwrap();
        let mut q = LpProblem::<f32>::new(p.rhs().iter().map(|&b| b as f32).collect());
        for j in 0..p.num_vars() {
            q.add_column(p.objective()[j] as f32, p.column(j).iter().map(|&(r, a)| (r, a as f32)).collect());
        }
        let s = solve(&q, &LpOptions::default()).unwrap();
        prop_assert_eq!(s.status, d.status);
        if d.is_optimal() {
            prop_assert!((f64::from(s.objective) - d.objective).abs() <= 1e-3 * (1.0 + d.objective.abs()));
        }
    }
}

#[test]
fn warm_start_after_appending_columns_matches_cold() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let mut p = random_lp(&mut rng, 6, 6);
        let first = solve(&p, &LpOptions::default()).unwrap();
        let Some(basis) = first.basis.clone() else {
            continue;
        };
        let extra = random_lp(&mut rng, 3, p.num_rows());
        for j in 0..extra.num_vars() {
            let col = extra
                .column(j)
                .iter()
                .filter(|(r, _)| *r < p.num_rows())
                .copied()
                .collect();
            p.add_column(extra.objective()[j], col);
        }
        let warm = stn_core::lp::solve_from_basis(&p, &basis, &LpOptions::default()).unwrap();
        let cold = solve(&p, &LpOptions::default()).unwrap();
        assert_eq!(warm.status, cold.status);
        if cold.is_optimal() {
            assert!((warm.objective - cold.objective).abs() <= 1e-9 * (1.0 + cold.objective.abs()));
            check_kkt(&p, &warm, 1e-9).unwrap();
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{check_kkt, random_alpha, random_lp, reference, route_weight, vertex_optimum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stn_core::baselines::{solve_dfs, solve_full_enumeration, solve_local_only};
use stn_core::colgen::{audit_optimality, run_column_generation, ColGenOptions, ColGenResult};
use stn_core::constellation::WalkerStar;
use stn_core::lp::{solve, LpOptions, LpStatus};
use stn_core::pricing::truncated_bellman_ford;
use stn_core::routing::enumerate_routes;
use stn_core::scenario::HopLimits;

const SEEDS: u64 = 20;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn colgen(seed: u64, h: usize) -> (stn_core::Scenario, ColGenResult<f64>) {
    let s = reference(seed, h);
    let r = run_column_generation(&s, &ColGenOptions::default()).expect("column generation");
    (s, r)
}

fn table2_counts() -> Outcome {
    let start = Instant::now();
    let t = WalkerStar::<f64>::reference().build().unwrap();
    let totals: Vec<usize> = (1..=5)
        .map(|h| {
            enumerate_routes(&t, HopLimits::uniform(h), None)
                .unwrap()
                .total()
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: totals == [126, 510, 1662, 4878, 13938] && secs < 10.0,
        detail: format!(
            "totals {totals:?} in {secs:.2}s (expected [126, 510, 1662, 4878, 13938], < 10s)"
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let jobs: Vec<(u64, usize)> = (1..=3)
        .flat_map(|h| (0..SEEDS).map(move |s| (s, h)))
        .collect();
    let errs: Vec<f64> = jobs
        .par_iter()
        .map(|&(seed, h)| {
            let (s, r) = colgen(seed, h);
            let full = solve_full_enumeration(&s, None, &LpOptions::default()).unwrap();
            (r.objective - full.objective).abs() / (1.0 + full.objective.abs())
        })
        .collect();
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: worst <= 1e-6 && secs < 120.0,
        detail: format!(
            "{} runs (H=1..3 x {SEEDS} seeds), worst |cg - full|/(1+|full|) = {worst:.2e} in {secs:.2}s",
            errs.len()
        ),
    }
}

fn dual_audit() -> Outcome {
    let jobs: Vec<(u64, usize)> = (0..=3)
        .flat_map(|h| (0..SEEDS).map(move |s| (s, h)))
        .collect();
    let reports: Vec<(bool, usize, usize)> = jobs
        .par_iter()
        .map(|&(seed, h)| {
            let (s, r) = colgen(seed, h);
            let a = audit_optimality(&s, &r, 1e-7, None, &LpOptions::default()).unwrap();
            let gap_ok = a.duality_gap() <= 1e-7 * (1.0 + a.primal_objective.abs());
            (
                r.converged() && a.passed() && gap_ok,
                a.violations.len(),
                a.routes_checked,
            )
        })
        .collect();
    let failed = reports.iter().filter(|r| !r.0).count();
    let violations: usize = reports.iter().map(|r| r.1).sum();
    let checked: usize = reports.iter().map(|r| r.2).sum();
    Outcome {
        pass: failed == 0,
        detail: format!(
            "{} converged runs (H=0..3), {checked} route checks, {violations} violations, {failed} failed audits",
            reports.len()
        ),
    }
}

fn scale_reduction() -> Outcome {
    let counts: Vec<usize> = (0..SEEDS)
        .into_par_iter()
        .map(|seed| colgen(seed, 5).1.activated())
        .collect();
    let max = *counts.iter().max().unwrap();
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Outcome {
        pass: (max as f64) < 0.3 * 13938.0,
        detail: format!(
            "H=5 activated: seed 0 = {}, mean {mean:.1}, max {max} of 13938 ({:.2}%, reduction {:.2}%)",
            counts[0],
            100.0 * max as f64 / 13938.0,
            100.0 * (1.0 - mean / 13938.0)
        ),
    }
}

fn three_layer_gain() -> Outcome {
    let rows: Vec<(f64, f64, f64, f64)> = (0..SEEDS)
        .into_par_iter()
        .map(|seed| {
            let (s, r) = colgen(seed, 5);
            let local = solve_local_only(&s);
            let vol = r.allocation(0.0).layer_volumes().total();
            let local_vol = local.allocation.layer_volumes().total();
            (r.objective, local.objective, vol, local_vol)
        })
        .collect();
    let n = rows.len() as f64;
    let ratio = rows.iter().map(|r| r.0 / r.1).sum::<f64>() / n;
    let vol_ratio = rows.iter().map(|r| r.2 / r.3).sum::<f64>() / n;
    Outcome {
        pass: (1.4..=1.8).contains(&ratio),
        detail: format!(
            "mean colgen/local-only objective ratio at H=5 = {ratio:.4} (band [1.4, 1.8]); \
             computed-volume ratio = {vol_ratio:.4} (not part of the criterion)"
        ),
    }
}

fn baseline_dominance() -> Outcome {
    let jobs: Vec<(u64, usize)> = (1..=5)
        .flat_map(|h| (0..SEEDS).map(move |s| (s, h)))
        .collect();
    let rows: Vec<(bool, bool)> = jobs
        .par_iter()
        .map(|&(seed, h)| {
            let (s, r) = colgen(seed, h);
            let dfs = solve_dfs(&s);
            let local = solve_local_only(&s).objective;
            let tol = 1e-9 * (1.0 + r.objective);
            let feasible = dfs.allocation.check_feasibility(&s, 1e-9).is_empty();
            let ordered =
                feasible && r.objective >= dfs.objective - tol && dfs.objective >= local - tol;
            (ordered, r.objective - dfs.objective > tol)
        })
        .collect();
    let ordered = rows.iter().filter(|r| r.0).count();
    let strict = rows.iter().filter(|r| r.1).count();
    Outcome {
        pass: ordered == rows.len() && rows.len() >= 100 && 2 * strict >= rows.len(),
        detail: format!(
            "{} instances (H=1..5 x {SEEDS} seeds): ordering holds on {ordered}, colgen > DFS on {strict}",
            rows.len()
        ),
    }
}

fn monotonicity() -> Outcome {
    let per_seed: Vec<(Vec<f64>, bool)> = (0..SEEDS)
        .into_par_iter()
        .map(|seed| {
            let mut objs = Vec::new();
            let mut trace_ok = true;
            for h in 0..=5 {
                let (_, r) = colgen(seed, h);
                trace_ok &= r
                    .trace
                    .windows(2)
                    .all(|w| w[1].objective >= w[0].objective - 1e-9);
                objs.push(r.objective);
            }
            (objs, trace_ok)
        })
        .collect();
    let traces = per_seed.iter().all(|p| p.1);
    let in_h = per_seed
        .iter()
        .all(|p| p.0.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    let mean: Vec<f64> = (0..=5)
        .map(|h| per_seed.iter().map(|p| p.0[h]).sum::<f64>() / per_seed.len() as f64)
        .collect();
    let d54 = mean[5] - mean[4];
    let d43 = mean[4] - mean[3];
    let plateau = d54 <= 0.05 * (mean[4] - mean[0]) && d54 <= d43 + 1e-9;
    Outcome {
        pass: traces && in_h && plateau,
        detail: format!(
            "traces nondecreasing: {traces}; nondecreasing in H: {in_h}; mean objective H=0..5 {:?}; \
             gain 4->5 = {d54:.3e}, gain 3->4 = {d43:.3e}",
            mean.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    }
}

fn lp_and_bellman_ford() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut lp_fail = Vec::new();
    let mut optimal = 0;
    for k in 0..1000 {
        let p = random_lp(&mut rng, 8, 8);
        let s = solve(&p, &LpOptions::default()).unwrap();
        match vertex_optimum(&p) {
            None if s.status == LpStatus::Infeasible => {}
            Some(best) if s.is_optimal() => {
                optimal += 1;
                if (s.objective - best).abs() > 1e-9 * (1.0 + best.abs()) {
                    lp_fail.push(format!("lp {k}: {} vs {best}", s.objective));
                } else if let Err(e) = check_kkt(&p, &s, 1e-9) {
                    lp_fail.push(format!("lp {k}: {e}"));
                }
            }
            other => lp_fail.push(format!("lp {k}: status {:?} vs oracle {other:?}", s.status)),
        }
    }

    let s = reference(0, 3);
    let t = s.topology();
    let universes: Vec<_> = (1..=3)
        .map(|h| {
            enumerate_routes(
                t,
                HopLimits {
                    intersat: h,
                    ground: 0,
                },
                None,
            )
            .unwrap()
        })
        .collect();
    let mut bf_mismatch = 0;
    let mut comparisons = 0;
    for _ in 0..100 {
        let alpha = random_alpha(&mut rng, t.isl_row_count());
        for (h, universe) in (1..=3).zip(&universes) {
            let n = t.num_nodes();
            let mut best = vec![f64::INFINITY; n * n];
            for r in &universe.intersat {
                let k = r.source().index() * n + r.terminal().index();
                best[k] = best[k].min(route_weight(t, &alpha, r));
            }
            for src in t.satellites() {
                let table = truncated_bellman_ford(t, &alpha, src, h).unwrap();
                for j in t.satellites().filter(|&j| j != src) {
                    comparisons += 1;
                    let (a, b) = (table.distance(h, j), best[src.index() * n + j.index()]);
                    if !(a == b || (a - b).abs() <= 1e-12) {
                        bf_mismatch += 1;
                    }
                }
            }
        }
    }
    if let Some(first) = lp_fail.first() {
        eprintln!("    first LP failure: {first}");
    }
    Outcome {
        pass: lp_fail.is_empty() && bf_mismatch == 0,
        detail: format!(
            "1000 random LPs ({optimal} optimal): {} failures; Bellman-Ford vs exhaustive, 100 weight vectors x H=1..3: \
             {bf_mismatch} mismatches of {comparisons}",
            lp_fail.len()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 hop-bounded route counts", table2_counts),
        ("2 optimality oracle equivalence", oracle_equivalence),
        ("3 dual-feasibility audit", dual_audit),
        ("4 scale reduction", scale_reduction),
        ("5 three-layer gain", three_layer_gain),
        ("6 baseline dominance", baseline_dominance),
        ("7 monotonicity and plateau", monotonicity),
        ("8 LP core and Bellman-Ford", lp_and_bellman_ford),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "[{}] criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

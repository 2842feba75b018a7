//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use rand::Rng;
use stn_core::lp::{LpProblem, LpSolution};
use stn_core::routing::{enumerate_routes, Route};
use stn_core::scenario::{load_scenario, HopLimits, ScenarioDocument};
use stn_core::{NodeId, Scenario, Topology};

pub fn reference(seed: u64, h: usize) -> Scenario {
    load_scenario(&ScenarioDocument::reference(seed, h), None).unwrap()
}

/// Random LP with integer data in `-3..=9`, at most `max_vars` variables and
/// `max_rows` rows, the last row `Σx ≤ B` keeping the region bounded.
pub fn random_lp(rng: &mut impl Rng, max_vars: usize, max_rows: usize) -> LpProblem<f64> {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let mut rows: Vec<Vec<f64>> = (0..m - 1)
        .map(|_| (0..n).map(|_| f64::from(rng.gen_range(-3..=9))).collect())
        .collect();
    let mut rhs: Vec<f64> = (0..m - 1)
        .map(|_| f64::from(rng.gen_range(-4..=20)))
        .collect();
    rows.push(vec![1.0; n]);
    rhs.push(f64::from(rng.gen_range(1..=15)));
    let mut p = LpProblem::new(rhs);
    for j in 0..n {
        let entries = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r[j] != 0.0)
            .map(|(i, r)| (i, r[j]))
            .collect();
        p.add_column(f64::from(rng.gen_range(-5..=10)), entries);
    }
    p
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (v, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *v -= f * p;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Best objective over all basic feasible points of a bounded LP, `None`
/// when there is none. Tight sets are drawn from the rows and the
/// nonnegativity bounds.
pub fn vertex_optimum(p: &LpProblem<f64>) -> Option<f64> {
    let n = p.num_vars();
    let m = p.num_rows();
    if n == 0 {
        return p.rhs().iter().all(|&b| b >= 0.0).then_some(0.0);
    }
    let dense: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; n];
            for (j, a) in p.row_entries(i) {
                row[j] = a;
            }
            row
        })
        .collect();
    let mut best: Option<f64> = None;
    combinations(m + n, n, &mut |set| {
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for &k in set {
            if k < m {
                a.push(dense[k].clone());
                b.push(p.rhs()[k]);
            } else {
                let mut e = vec![0.0; n];
                e[k - m] = 1.0;
                a.push(e);
                b.push(0.0);
            }
        }
        let Some(x) = solve_square(a, b) else { return };
        if x.iter().any(|&v| v < -1e-9) {
            return;
        }
        for (row, &b) in dense.iter().zip(p.rhs()) {
            let lhs: f64 = row.iter().zip(&x).map(|(a, x)| a * x).sum();
            if lhs > b + 1e-9 {
                return;
            }
        }
        let obj: f64 = p.objective().iter().zip(&x).map(|(c, x)| c * x).sum();
        if best.is_none_or(|b| obj > b) {
            best = Some(obj);
        }
    });
    best
}

/// Primal and dual feasibility, strong duality and complementary slackness.
pub fn check_kkt(p: &LpProblem<f64>, s: &LpSolution<f64>, tol: f64) -> Result<(), String> {
    let scale = 1.0 + s.objective.abs();
    if s.primal.iter().any(|&x| x < -tol) {
        return Err("negative primal".into());
    }
    if s.duals.iter().any(|&y| y < -tol) {
        return Err("negative dual".into());
    }
    let slack = s.slacks(p);
    for (i, &sl) in slack.iter().enumerate() {
        if sl < -tol * (1.0 + p.rhs()[i].abs()) {
            return Err(format!("row {i} violated by {}", -sl));
        }
        if (s.duals[i] * sl).abs() > tol * scale {
            return Err(format!("row {i}: dual {} times slack {sl}", s.duals[i]));
        }
    }
    let d = p.reduced_costs(&s.duals);
    for (j, &dj) in d.iter().enumerate() {
        if dj > tol * scale {
            return Err(format!("column {j} has reduced cost {dj}"));
        }
        if (s.primal[j] * dj).abs() > tol * scale {
            return Err(format!(
                "column {j}: primal {} times reduced cost {dj}",
                s.primal[j]
            ));
        }
    }
    let gap = (s.objective - p.dual_objective(&s.duals)).abs();
    if gap > tol * scale {
        return Err(format!("duality gap {gap}"));
    }
    Ok(())
}

pub fn route_weight(topology: &Topology, alpha: &[f64], route: &Route) -> f64 {
    route
        .isl_arcs()
        .map(|(u, v)| alpha[topology.isl_row(topology.edge_between(u, v).unwrap(), u)])
        .sum()
}

/// Minimum α-weight from `source` to every node over all enumerated simple
/// routes of at most `h` edges (0 at the source itself).
pub fn brute_force_distances(
    topology: &Topology,
    alpha: &[f64],
    source: NodeId,
    h: usize,
) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; topology.num_nodes()];
    best[source.index()] = 0.0;
    let routes = enumerate_routes(
        topology,
        HopLimits {
            intersat: h,
            ground: 0,
        },
        None,
    )
    .unwrap();
    for r in routes.intersat.iter().filter(|r| r.source() == source) {
        let w = route_weight(topology, alpha, r);
        let t = r.terminal().index();
        best[t] = best[t].min(w);
    }
    best
}

/// Random nonnegative ISL weights, some exactly zero to provoke ties.
pub fn random_alpha(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.0..1.0)
            }
        })
        .collect()
}

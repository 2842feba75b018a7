//! Bounded revised simplex with an explicit dense basis inverse.
//!
//! Variables are numbered structural `0..n`, slack `n..n+m`, artificial
//! `n+m..`. Artificials exist only for rows with a negative right-hand side
//! and are removed from consideration once phase 1 ends.

use super::dense::invert;
use super::{Basis, BasisVar, LpOptions, LpProblem, LpSolution, LpStatus, PivotRule};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const NONBASIC: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

pub(crate) struct Simplex<'a, T> {
    p: &'a LpProblem<T>,
    o: &'a LpOptions<T>,
    m: usize,
    n: usize,
    art_rows: Vec<usize>,
    basis: Vec<usize>,
    position: Vec<usize>,
    binv: Vec<T>,
    xb: Vec<T>,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
}

impl<'a, T: Scalar> Simplex<'a, T> {
    pub(crate) fn new(p: &'a LpProblem<T>, o: &'a LpOptions<T>) -> Self {
        let m = p.num_rows();
        let n = p.num_vars();
        Simplex {
            p,
            o,
            m,
            n,
            art_rows: Vec::new(),
            basis: vec![NONBASIC; m],
            position: vec![NONBASIC; n + m],
            binv: vec![T::zero(); m * m],
            xb: vec![T::zero(); m],
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
            bland: o.pivot_rule == PivotRule::Bland,
        }
    }

    pub(crate) fn run(mut self, warm: Option<&Basis>) -> Result<LpSolution<T>> {
        let warm_started = warm.is_some_and(|b| self.install_warm(b));
        if !warm_started {
            self.install_slack_basis();
        }

        if !self.art_rows.is_empty() {
            match self.iterate(Phase::One)? {
                Outcome::IterationLimit => {
                    return Ok(self.finish(LpStatus::IterationLimit, warm_started))
                }
                Outcome::Unbounded => {
                    return Err(Error::MalformedLp(
                        "phase 1 reported an unbounded ray".into(),
                    ));
                }
                Outcome::Optimal => {}
            }
            let residual: T = (0..self.m)
                .filter(|&i| self.is_artificial(self.basis[i]))
                .map(|i| self.xb[i].max(T::zero()))
                .sum();
            let scale = T::one() + self.p.rhs().iter().fold(T::zero(), |a, b| a.max(b.abs()));
            if residual > self.o.feasibility_tol * scale {
                return Ok(self.finish(LpStatus::Infeasible, warm_started));
            }
            self.drive_out_artificials();
        }

        let status = match self.iterate(Phase::Two)? {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Unbounded => LpStatus::Unbounded,
            Outcome::IterationLimit => LpStatus::IterationLimit,
        };
        Ok(self.finish(status, warm_started))
    }

    #[inline]
    fn is_artificial(&self, var: usize) -> bool {
        var >= self.n + self.m
    }

    fn num_total(&self) -> usize {
        self.n + self.m + self.art_rows.len()
    }

    fn cost(&self, var: usize, phase: Phase) -> T {
        match phase {
            Phase::One if self.is_artificial(var) => -T::one(),
            Phase::One => T::zero(),
            Phase::Two if var < self.n => self.p.objective()[var],
            Phase::Two => T::zero(),
        }
    }

    /// Calls `f(row, coefficient)` for every nonzero of variable `var`.
    #[inline]
    fn for_each_entry(&self, var: usize, mut f: impl FnMut(usize, T)) {
        if var < self.n {
            for &(row, a) in self.p.column(var) {
                f(row, a);
            }
        } else if var < self.n + self.m {
            f(var - self.n, T::one());
        } else {
            f(self.art_rows[var - self.n - self.m], -T::one());
        }
    }

    fn column_dot(&self, v: &[T], var: usize) -> T {
        let mut acc = T::zero();
        self.for_each_entry(var, |row, a| acc += a * v[row]);
        acc
    }

    /// `B⁻¹ A_var`.
    fn ftran(&self, var: usize) -> Vec<T> {
        let m = self.m;
        let mut w = vec![T::zero(); m];
        self.for_each_entry(var, |row, a| {
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += self.binv[i * m + row] * a;
            }
        });
        w
    }

    /// `c_Bᵀ B⁻¹`.
    fn duals(&self, phase: Phase) -> Vec<T> {
        let m = self.m;
        let mut y = vec![T::zero(); m];
        for i in 0..m {
            let c = self.cost(self.basis[i], phase);
            if c == T::zero() {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yr, &b) in y.iter_mut().zip(row) {
                *yr += c * b;
            }
        }
        y
    }

    fn install_slack_basis(&mut self) {
        let m = self.m;
        self.art_rows = (0..m).filter(|&i| self.p.rhs()[i] < T::zero()).collect();
        self.position = vec![NONBASIC; self.num_total()];
        self.binv = vec![T::zero(); m * m];
        let mut art = 0;
        for i in 0..m {
            let b = self.p.rhs()[i];
            let var = if b < T::zero() {
                self.binv[i * m + i] = -T::one();
                self.xb[i] = -b;
                art += 1;
                self.n + m + art - 1
            } else {
                self.binv[i * m + i] = T::one();
                self.xb[i] = b;
                self.n + i
            };
            self.basis[i] = var;
            self.position[var] = i;
        }
        self.since_refactor = 0;
    }

    fn install_warm(&mut self, warm: &Basis) -> bool {
        if warm.0.len() != self.m {
            return false;
        }
        self.art_rows.clear();
        self.position = vec![NONBASIC; self.n + self.m];
        for (i, bv) in warm.0.iter().enumerate() {
            let var = match *bv {
                BasisVar::Structural(j) if j < self.n => j,
                BasisVar::Slack(k) if k < self.m => self.n + k,
                _ => return false,
            };
            if self.position[var] != NONBASIC {
                return false;
            }
            self.basis[i] = var;
            self.position[var] = i;
        }
        if !self.refactor() {
            return false;
        }
        let tol = self.o.feasibility_tol;
        if self.xb.iter().any(|&x| x < -tol) {
            return false;
        }
        true
    }

    /// Recomputes `B⁻¹` and `x_B` from scratch.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut b = vec![T::zero(); m * m];
        for i in 0..m {
            let var = self.basis[i];
            self.for_each_entry(var, |row, a| b[row * m + i] = a);
        }
        let Some(inv) = invert(b, m, self.o.pivot_tol) else {
            return false;
        };
        self.binv = inv;
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.xb[i] = row.iter().zip(self.p.rhs()).map(|(&a, &b)| a * b).sum();
        }
        self.since_refactor = 0;
        true
    }

    fn iterate(&mut self, phase: Phase) -> Result<Outcome> {
        loop {
            if self.iterations >= self.o.max_iterations {
                return Ok(Outcome::IterationLimit);
            }
            if self.since_refactor >= self.o.refactor_interval && !self.refactor() {
                return Err(Error::MalformedLp(
                    "basis became numerically singular".into(),
                ));
            }

            let y = self.duals(phase);
            let mut entering = None;
            let mut best = T::zero();
            for var in 0..self.num_total() {
                if self.position[var] != NONBASIC || self.is_artificial(var) {
                    continue;
                }
                let c = self.cost(var, phase);
                let d = c - self.column_dot(&y, var);
                if d > self.o.optimality_tol * (T::one() + c.abs()) {
                    if self.bland {
                        entering = Some(var);
                        break;
                    }
                    if d > best {
                        best = d;
                        entering = Some(var);
                    }
                }
            }
            let Some(q) = entering else {
                return Ok(Outcome::Optimal);
            };

            let w = self.ftran(q);
            let mut leave: Option<(usize, T)> = None;
            for (i, &wi) in w.iter().enumerate() {
                let ratio = if phase == Phase::Two
                    && self.is_artificial(self.basis[i])
                    && wi.abs() > self.o.pivot_tol
                {
                    T::zero()
                } else if wi > self.o.pivot_tol {
                    self.xb[i].max(T::zero()) / wi
                } else {
                    continue;
                };
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best_ratio)) => {
                        let better = if ratio < best_ratio {
                            true
                        } else if ratio == best_ratio {
                            if self.bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                wi.abs() > w[r].abs()
                            }
                        } else {
                            false
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((r, best_ratio))
                        }
                    }
                };
            }
            let Some((r, theta)) = leave else {
                return Ok(Outcome::Unbounded);
            };

            self.pivot(r, q, &w, theta);
            self.iterations += 1;
            if theta <= self.o.feasibility_tol {
                self.degenerate_run += 1;
                if self.degenerate_run > self.o.stall_threshold {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize, w: &[T], theta: T) {
        let m = self.m;
        for (i, (x, &wi)) in self.xb.iter_mut().zip(w).enumerate() {
            if i != r {
                *x -= theta * wi;
            }
        }
        self.xb[r] = theta;

        let inv_pivot = T::one() / w[r];
        for k in 0..m {
            self.binv[r * m + k] *= inv_pivot;
        }
        for (i, &f) in w.iter().enumerate().take(m) {
            if i == r || f == T::zero() {
                continue;
            }
            for k in 0..m {
                let v = self.binv[r * m + k];
                self.binv[i * m + k] -= f * v;
            }
        }

        self.position[self.basis[r]] = NONBASIC;
        self.basis[r] = q;
        self.position[q] = r;
        self.since_refactor += 1;
    }

    /// Replaces zero-level basic artificials by structural or slack columns
    /// where the row allows it; rows where none qualifies are redundant.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row: Vec<T> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, T)> = None;
            for var in 0..self.n + m {
                if self.position[var] != NONBASIC {
                    continue;
                }
                let v = self.column_dot(&row, var).abs();
                if v > self.o.pivot_tol && best.is_none_or(|(_, b)| v > b) {
                    best = Some((var, v));
                }
            }
            if let Some((q, _)) = best {
                let w = self.ftran(q);
                self.pivot(r, q, &w, T::zero());
            }
        }
    }

    fn finish(self, status: LpStatus, warm_started: bool) -> LpSolution<T> {
        let mut primal = vec![T::zero(); self.n];
        for (i, &var) in self.basis.iter().enumerate() {
            if var < self.n {
                primal[var] = self.xb[i].max(T::zero());
            }
        }
        let duals = match status {
            LpStatus::Infeasible => vec![T::zero(); self.m],
            LpStatus::Optimal => self
                .duals(Phase::Two)
                .into_iter()
                .map(|y| y.max(T::zero()))
                .collect(),
            _ => self.duals(Phase::Two),
        };
        let basis = if self.basis.iter().any(|&v| self.is_artificial(v)) {
            None
        } else {
            Some(Basis(
                self.basis
                    .iter()
                    .map(|&v| {
                        if v < self.n {
                            BasisVar::Structural(v)
                        } else {
                            BasisVar::Slack(v - self.n)
                        }
                    })
                    .collect(),
            ))
        };
        LpSolution {
            status,
            objective: self.p.objective_value(&primal),
            primal,
            duals,
            iterations: self.iterations,
            basis,
            warm_started,
        }
    }
}

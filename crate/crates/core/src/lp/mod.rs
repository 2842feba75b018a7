//! Linear programs of the form `max cᵀx  s.t.  Ax ≤ b, x ≥ 0`, solved by a
//! revised simplex that reports primal values, row duals and the final basis.

mod dense;
pub mod mps;
mod simplex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse LP stored by column.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    objective: Vec<T>,
    columns: Vec<Vec<(usize, T)>>,
    rhs: Vec<T>,
}

impl<T: Scalar> LpProblem<T> {
    /// Problem with the given row bounds and no variables.
    pub fn new(rhs: Vec<T>) -> Self {
        LpProblem {
            objective: Vec::new(),
            columns: Vec::new(),
            rhs,
        }
    }

    /// Appends a variable with objective coefficient `objective` and
    /// `(row, coefficient)` entries. Returns its index.
    pub fn add_column(&mut self, objective: T, entries: Vec<(usize, T)>) -> usize {
        self.objective.push(objective);
        self.columns.push(entries);
        self.columns.len() - 1
    }

    /// Appends a `≤ rhs` row with `(variable, coefficient)` entries. Returns its index.
    pub fn add_row(&mut self, rhs: T, entries: &[(usize, T)]) -> usize {
        let row = self.rhs.len();
        self.rhs.push(rhs);
        for &(var, coeff) in entries {
            self.columns[var].push((row, coeff));
        }
        row
    }

    pub fn num_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn column(&self, var: usize) -> &[(usize, T)] {
        &self.columns[var]
    }

    /// Entries of one row as `(variable, coefficient)`.
    pub fn row_entries(&self, row: usize) -> Vec<(usize, T)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().filter(|e| e.0 == row).map(move |e| (j, e.1)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.rhs.iter().position(|b| !b.is_finite()) {
            return Err(Error::MalformedLp(format!("rhs of row {r} is not finite")));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(Error::MalformedLp(format!(
                "objective of variable {j} is not finite"
            )));
        }
        let mut seen = vec![usize::MAX; self.rhs.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(row, a) in col {
                if row >= self.rhs.len() {
                    return Err(Error::MalformedLp(format!(
                        "variable {j} references row {row}"
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::MalformedLp(format!(
                        "coefficient ({row}, {j}) is not finite"
                    )));
                }
                if seen[row] == j {
                    return Err(Error::MalformedLp(format!("duplicate entry ({row}, {j})")));
                }
                seen[row] = j;
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// `Ax` per row.
    pub fn row_activity(&self, x: &[T]) -> Vec<T> {
        let mut act = vec![T::zero(); self.rhs.len()];
        for (col, &v) in self.columns.iter().zip(x) {
            if v != T::zero() {
                for &(row, a) in col {
                    act[row] += a * v;
                }
            }
        }
        act
    }

    /// `bᵀy`.
    pub fn dual_objective(&self, y: &[T]) -> T {
        self.rhs.iter().zip(y).map(|(&b, &v)| b * v).sum()
    }

    /// `c_j − yᵀA_j` for every variable.
    pub fn reduced_costs(&self, y: &[T]) -> Vec<T> {
        self.columns
            .iter()
            .zip(&self.objective)
            .map(|(col, &c)| c - col.iter().map(|&(row, a)| a * y[row]).sum::<T>())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Most positive reduced cost, switching to Bland after a run of degenerate pivots.
    #[default]
    Dantzig,
    /// Smallest eligible index throughout.
    Bland,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions<T> {
    pub pivot_rule: PivotRule,
    pub feasibility_tol: T,
    pub optimality_tol: T,
    pub pivot_tol: T,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub stall_threshold: usize,
    /// Pivots between refactorisations of the basis inverse.
    pub refactor_interval: usize,
}

impl<T: Scalar> Default for LpOptions<T> {
    fn default() -> Self {
        LpOptions {
            pivot_rule: PivotRule::Dantzig,
            feasibility_tol: T::lit(T::FEASIBILITY_TOL),
            optimality_tol: T::lit(T::OPTIMALITY_TOL),
            pivot_tol: T::lit(T::PIVOT_TOL),
            max_iterations: 100_000,
            stall_threshold: 50,
            refactor_interval: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisVar {
    Structural(usize),
    Slack(usize),
}

/// Basic variable of every row position; reusable after columns are appended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis(pub Vec<BasisVar>);

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// Final basis when it contains no artificial variable.
    pub basis: Option<Basis>,
    /// Whether a supplied starting basis was accepted.
    pub warm_started: bool,
}

impl<T: Scalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `b − Ax` per row.
    pub fn slacks(&self, problem: &LpProblem<T>) -> Vec<T> {
        problem
            .row_activity(&self.primal)
            .into_iter()
            .zip(problem.rhs())
            .map(|(a, &b)| b - a)
            .collect()
    }
}

/// Solves from the all-slack basis (with a phase 1 when some `b_i < 0`).
pub fn solve<T: Scalar>(problem: &LpProblem<T>, options: &LpOptions<T>) -> Result<LpSolution<T>> {
    problem.validate()?;
    simplex::Simplex::new(problem, options).run(None)
}

/// Solves starting from `basis` when it is nonsingular and primal feasible,
/// falling back to a cold start otherwise.
pub fn solve_from_basis<T: Scalar>(
    problem: &LpProblem<T>,
    basis: &Basis,
    options: &LpOptions<T>,
) -> Result<LpSolution<T>> {
    problem.validate()?;
    simplex::Simplex::new(problem, options).run(Some(basis))
}

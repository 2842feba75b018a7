//! Fixed-format MPS export for cross-checking with external solvers.
//!
//! MPS is a minimisation format, so the objective row holds `-c`; the optimal
//! value reported by an external solver is the negated LP optimum. Rows are
//! named `R0000001..`, columns `C0000001..`, the objective row `COST`.
//!
//! Field columns (1-based): 2-3, 5-12, 15-22, 25-36, 40-47, 50-61.

use std::fmt::Write;

use super::LpProblem;
use crate::scalar::Scalar;

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

/// Shortest decimal rendering that fits the 12-character numeric field.
fn number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let plain = format!("{x}");
    if plain.len() <= 12 {
        return plain;
    }
    let fixed = (0..=11)
        .rev()
        .map(|d| format!("{x:.d$}"))
        .find(|s| s.len() <= 12);
    let sci = (0..=10)
        .rev()
        .map(|d| format!("{x:.d$E}"))
        .find(|s| s.len() <= 12)
        .unwrap_or_else(|| format!("{x:.0E}"));
    let err = |s: &str| s.parse::<f64>().map_or(f64::INFINITY, |v| (v - x).abs());
    match fixed {
        Some(f) if err(&f) <= err(&sci) => f,
        _ => sci,
    }
}

fn line(f1: &str, f2: &str, f3: &str, f4: &str) -> String {
    let mut s = format!(" {f1:<2} {f2:<8}");
    if !f3.is_empty() {
        write!(s, "  {f3:<8}  {f4:<12}").unwrap();
    }
    s.trim_end().to_string()
}

pub fn write_mps<T: Scalar>(problem: &LpProblem<T>, name: &str) -> String {
    let mut out = String::new();
    let name: String = name
        .chars()
        .filter(|c| !c.is_whitespace())
        .take(8)
        .collect();
    writeln!(out, "NAME          {name}").unwrap();
    writeln!(
        out,
        "* maximisation problem written with the objective negated"
    )
    .unwrap();
    writeln!(out, "ROWS").unwrap();
    writeln!(out, "{}", line("N", "COST", "", "")).unwrap();
    for i in 0..problem.num_rows() {
        writeln!(out, "{}", line("L", &row_name(i), "", "")).unwrap();
    }
    writeln!(out, "COLUMNS").unwrap();
    for j in 0..problem.num_vars() {
        let c = problem.objective()[j].as_f64();
        let col = col_name(j);
        let mut entries: Vec<(usize, f64)> = problem
            .column(j)
            .iter()
            .map(|&(r, a)| (r, a.as_f64()))
            .filter(|&(_, a)| a != 0.0)
            .collect();
        entries.sort_by_key(|e| e.0);
        if c != 0.0 || entries.is_empty() {
            writeln!(out, "{}", line("", &col, "COST", &number(-c))).unwrap();
        }
        for (r, a) in entries {
            writeln!(out, "{}", line("", &col, &row_name(r), &number(a))).unwrap();
        }
    }
    writeln!(out, "RHS").unwrap();
    for (i, &b) in problem.rhs().iter().enumerate() {
        let b = b.as_f64();
        if b != 0.0 {
            writeln!(out, "{}", line("", "RHS", &row_name(i), &number(b))).unwrap();
        }
    }
    writeln!(out, "ENDATA").unwrap();
    out
}

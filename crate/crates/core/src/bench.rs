//! Width sweeps over the comb family, timing the solver with fast or
//! naive joins.

use std::fmt::Write as _;

use crate::dp::{solve_with, SolveOptions};
use crate::error::Result;
use crate::gen::gen_comb;
use crate::graph::make_nice;
use crate::residue::ProblemSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub m: u32,
    pub w: usize,
    pub n: usize,
    pub max_states: u64,
    pub join_ms: f64,
    pub total_ms: f64,
}

/// The spec the comb family is built for: `σ = {0}`, `ρ = {1}` mod `m`.
pub fn comb_spec(m: u32) -> Result<ProblemSpec> {
    ProblemSpec::residues(0, 1 % m, m)
}

/// Best of `repeats` runs on the comb of width `w`.
pub fn bench_comb(m: u32, w: usize, naive_joins: bool, repeats: usize) -> Result<BenchRow> {
    let (g, td) = gen_comb(m, w)?;
    let nice = make_nice(&td);
    let spec = comb_spec(m)?;
    let opts = SolveOptions {
        naive_joins,
        ..SolveOptions::default()
    };
    let mut best: Option<BenchRow> = None;
    for _ in 0..repeats.max(1) {
        let report = solve_with(&g, &nice, spec, None, &opts, &mut ())?;
        let row = BenchRow {
            m,
            w,
            n: g.n(),
            max_states: report.stats.max_states,
            join_ms: report.stats.join.micros as f64 / 1000.0,
            total_ms: report.stats.total_micros as f64 / 1000.0,
        };
        if best.as_ref().is_none_or(|b| row.total_ms < b.total_ms) {
            best = Some(row);
        }
    }
    Ok(best.expect("at least one run"))
}

pub fn csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("m,w,n,max_states,join_ms,total_ms\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{:.3},{:.3}", r.m, r.w, r.n, r.max_states, r.join_ms, r.total_ms).unwrap();
    }
    out
}

/// Least-squares slope of `ln y` against `x`.
pub fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        (a + (x - mx) * (y.ln() - my), b + (x - mx) * (x - mx))
    });
    num / den
}

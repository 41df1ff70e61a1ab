//! Stepsize sweep over multipliers `2^l`, `l = 0..=l_max`. Runs are
//! independent and executed in parallel; each run is itself sequential.

use std::io::{self, Write};

use rayon::prelude::*;

use super::{run_solver, RunConfig};
use crate::error::SolverError;
use crate::games::GameInstance;

use super::trace::format_float;

pub const SWEEP_HEADER: &str = "multiplier_exp,multiplier,final_gap,best";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub multiplier_exp: i32,
    pub multiplier: f64,
    pub final_gap: f64,
    pub best: bool,
}

/// Worker cap from `EFG_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("EFG_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs `base` with every exponent in `0..=l_max` and marks the exponent with
/// the smallest final gap (the lowest one on ties).
pub fn sweep(
    game: &GameInstance,
    base: &RunConfig,
    l_max: u32,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, SolverError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| SolverError::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<SweepRow, SolverError>> = pool.install(|| {
        (0..=l_max as i32)
            .into_par_iter()
            .map(|l| {
                let cfg = RunConfig {
                    multiplier_exp: l,
                    ..base.clone()
                };
                let trace = run_solver(game, &cfg)?;
                Ok(SweepRow {
                    multiplier_exp: l,
                    multiplier: cfg.multiplier(),
                    final_gap: trace.final_gap(),
                    best: false,
                })
            })
            .collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let best = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.final_gap.total_cmp(&b.1.final_gap).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i);
    if let Some(i) = best {
        rows[i].best = true;
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.multiplier_exp,
            format_float(r.multiplier),
            format_float(r.final_gap),
            u8::from(r.best)
        )?;
    }
    out.flush()
}

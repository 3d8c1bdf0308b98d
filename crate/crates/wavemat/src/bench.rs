//! Timing harness comparing the two construction methods.
//!
//! Each cell times `reps` trials of one (task, method, rank, order) on
//! identical seeded inputs and reports the median wall time. Outputs are
//! verified once per cell (the trials are deterministic, so every repetition
//! produces the same matrix); a cell whose output fails verification is an
//! error, never a reported timing.

use crate::factorize::{complete_old, generate_old};
use crate::parametrize::{complete_new, generate_new};
use crate::polyphase::{FirstRow, WaveletMatrix};
use crate::random::{random_first_row, random_param_set, random_vectors};
use crate::{default_tol, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Generate,
    Complete,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Generate => "generate",
            Task::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Old,
    New,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Old => "old",
            Method::New => "new",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub task: Task,
    pub method: Method,
    pub rank: usize,
    pub order: usize,
    pub median_seconds: f64,
    pub worst_residual: f64,
    pub seed: u64,
    pub reps: usize,
}

/// Derive a per-cell RNG so that every method of a task sees identical
/// inputs for the same (seed, rank, order).
fn cell_rng(seed: u64, rank: usize, order: usize, task: Task) -> ChaCha8Rng {
    let tag = match task {
        Task::Generate => 0x67656eu64,
        Task::Complete => 0x636f6du64,
    };
    ChaCha8Rng::seed_from_u64(
        seed ^ tag
            ^ (rank as u64).wrapping_mul(0x9e3779b97f4a7c15)
            ^ (order as u64).wrapping_mul(0xc2b2ae3d27d4eb4f),
    )
}

fn median(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        0.5 * (times[n / 2 - 1] + times[n / 2])
    }
}

fn time_trials<F: FnMut() -> Result<WaveletMatrix>>(
    reps: usize,
    mut run: F,
) -> Result<(f64, WaveletMatrix)> {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let w = run()?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(w);
    }
    Ok((median(times), last.expect("reps >= 1")))
}

/// Residual for a completion output: worst deviation of the computed first
/// row from the input data.
fn first_row_fidelity(w: &WaveletMatrix, input: &FirstRow) -> f64 {
    let got = w.first_row();
    let len = got.entries().len().max(input.entries().len());
    let mut worst = 0.0f64;
    for j in 0..len {
        let a = got.entries().get(j).copied().unwrap_or_default();
        let b = input.entries().get(j).copied().unwrap_or_default();
        worst = worst.max((a - b).norm());
    }
    worst
}

/// Run one benchmark cell.
pub fn run_cell(
    task: Task,
    method: Method,
    rank: usize,
    order: usize,
    seed: u64,
    reps: usize,
    parallel: bool,
) -> Result<BenchRecord> {
    assert!(reps >= 1);
    let tol = default_tol(order);
    let mut rng = cell_rng(seed, rank, order, task);
    let (median_seconds, output, residual) = match task {
        Task::Generate => {
            let (med, w) = match method {
                Method::Old => {
                    let vectors = random_vectors(rank, order, &mut rng);
                    time_trials(reps, || Ok(generate_old(&vectors)?.matrix))?
                }
                Method::New => {
                    let params = random_param_set(rank, order, &mut rng);
                    time_trials(reps, || generate_new(&params, parallel))?
                }
            };
            let residual = crate::polyphase::orthogonality_residual(w.poly());
            (med, w, residual)
        }
        Task::Complete => {
            let row = random_first_row(rank, order, &mut rng);
            let (med, w) = match method {
                Method::Old => time_trials(reps, || complete_old(&row))?,
                Method::New => time_trials(reps, || complete_new(&row))?,
            };
            let residual = first_row_fidelity(&w, &row);
            (med, w, residual)
        }
    };
    let report = output.verify(tol);
    if !report.in_w0 || residual > tol.max(1e-8) {
        return Err(Error::VerificationFailed(format!(
            "bench cell {}/{} m={rank} N={order}: residual {residual:.3e}, report:\n{report}",
            task.name(),
            method.name()
        )));
    }
    Ok(BenchRecord {
        task,
        method,
        rank,
        order,
        median_seconds,
        worst_residual: residual,
        seed,
        reps,
    })
}

/// Run the full grid in deterministic order.
#[allow(clippy::too_many_arguments)]
pub fn run_grid(
    tasks: &[Task],
    methods: &[Method],
    ranks: &[usize],
    orders: &[usize],
    seed: u64,
    reps: usize,
    parallel: bool,
) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &task in tasks {
        for &method in methods {
            for &rank in ranks {
                for &order in orders {
                    out.push(run_cell(task, method, rank, order, seed, reps, parallel)?);
                }
            }
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "task,method,rank,order,median_seconds,worst_residual,seed,reps";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:.6e},{:.6e},{},{}\n",
            r.task.name(),
            r.method.name(),
            r.rank,
            r.order,
            r.median_seconds,
            r.worst_residual,
            r.seed,
            r.reps
        ));
    }
    out
}

pub fn to_markdown(records: &[BenchRecord]) -> String {
    let mut out = String::from(
        "| task | method | rank | order | median (s) | worst residual | seed | reps |\n\
         |------|--------|------|-------|------------|----------------|------|------|\n",
    );
    for r in records {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {:.4} | {:.3e} | {} | {} |\n",
            r.task.name(),
            r.method.name(),
            r.rank,
            r.order,
            r.median_seconds,
            r.worst_residual,
            r.seed,
            r.reps
        ));
    }
    out
}

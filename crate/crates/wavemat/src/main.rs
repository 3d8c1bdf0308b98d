use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;
use wavemat::bench::{run_grid, to_csv, to_markdown, Method, Task};
use wavemat::factorize::{complete_old, generate_old};
use wavemat::files::{load_json, save_json, FirstRowFile, GenerateInputFile, MatrixFile};
use wavemat::parametrize::{complete_new, generate_new, ParamSet};
use wavemat::polyphase::{verify, WaveletMatrix};
use wavemat::random::{random_param_set, random_vectors};
use wavemat::{default_tol, Error};

const EXIT_VERIFY_NEGATIVE: u8 = 1;
const EXIT_BAD_ARGS: u8 = 2;
const EXIT_COMPUTE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wavemat",
    about = "Construct, complete, verify and benchmark compact wavelet matrices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Old,
    New,
}

impl std::fmt::Display for MethodArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodArg::Old => "old",
            MethodArg::New => "new",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Generate,
    Complete,
}

impl std::fmt::Display for TaskArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskArg::Generate => "generate",
            TaskArg::Complete => "complete",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random wavelet matrix and write its coefficient file.
    Generate {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Explicit inputs (vectors / gamma grid) instead of the seeded draw.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        /// Run the concurrent path of the new method (bit-identical output).
        #[arg(long)]
        parallel: bool,
    },
    /// Complete a first-row file to a full wavelet matrix.
    Complete {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Validate a matrix file and print the verification report.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Time both methods on identical seeded inputs.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [TaskArg::Generate, TaskArg::Complete])]
        tasks: Vec<TaskArg>,
        #[arg(long, value_delimiter = ',', default_values_t = [MethodArg::Old, MethodArg::New])]
        methods: Vec<MethodArg>,
        #[arg(long, value_delimiter = ',')]
        ranks: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        parallel: bool,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            method,
            rank,
            order,
            seed,
            out,
            input,
            tol,
            parallel,
        } => cmd_generate(method, rank, order, seed, out, input, tol, parallel),
        Command::Complete {
            method,
            input,
            out,
            tol,
        } => cmd_complete(method, input, out, tol),
        Command::Verify { input, tol } => cmd_verify(input, tol),
        Command::Bench {
            tasks,
            methods,
            ranks,
            orders,
            seed,
            reps,
            format,
            parallel,
        } => cmd_bench(tasks, methods, ranks, orders, seed, reps, format, parallel),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    method: MethodArg,
    rank: usize,
    order: usize,
    seed: u64,
    out: PathBuf,
    input: Option<PathBuf>,
    tol: Option<f64>,
    parallel: bool,
) -> ExitCode {
    if rank < 2 || order < 1 {
        return fail(EXIT_BAD_ARGS, "rank must be >= 2 and order >= 1");
    }
    let tol = tol.unwrap_or_else(|| default_tol(order));
    let explicit = match input {
        Some(path) => match load_json::<GenerateInputFile>(&path) {
            Ok(f) => Some(f),
            Err(e) => return fail(EXIT_IO, e),
        },
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result: Result<WaveletMatrix, Error> = match method {
        MethodArg::Old => {
            let vectors = match explicit.as_ref().and_then(|f| f.vectors_complex()) {
                Some(v) => {
                    if v.len() != order || v.iter().any(|x| x.len() != rank) {
                        return fail(EXIT_BAD_ARGS, "input vectors do not match rank/order");
                    }
                    v
                }
                None => random_vectors(rank, order, &mut rng),
            };
            generate_old(&vectors).map(|o| o.matrix)
        }
        MethodArg::New => {
            let params = match explicit.as_ref().and_then(|f| f.gamma_complex()) {
                Some(g) => {
                    if g.len() != rank - 1 || g.iter().any(|x| x.len() != order) {
                        return fail(EXIT_BAD_ARGS, "input gamma grid must be (rank-1) x order");
                    }
                    ParamSet::new(rank, order, g)
                }
                None => random_param_set(rank, order, &mut rng),
            };
            generate_new(&params, parallel)
        }
    };
    let matrix = match result {
        Ok(w) => w,
        Err(e) => return fail(EXIT_COMPUTE, e),
    };
    let report = matrix.verify(tol);
    if !report.in_w0 {
        return fail(
            EXIT_COMPUTE,
            format!("generated matrix failed verification:\n{report}"),
        );
    }
    if let Err(e) = save_json(&MatrixFile::from_poly(matrix.poly()), &out) {
        return fail(EXIT_IO, e);
    }
    println!("{report}");
    ExitCode::SUCCESS
}

fn cmd_complete(method: MethodArg, input: PathBuf, out: PathBuf, tol: Option<f64>) -> ExitCode {
    let file: FirstRowFile = match load_json(&input) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_IO, e),
    };
    let row = match file.to_row() {
        Ok(r) => r,
        Err(e) => return fail(EXIT_IO, e),
    };
    let tol = tol.unwrap_or_else(|| default_tol(row.order()));
    if let Err(v) = row.validate(tol) {
        return fail(EXIT_COMPUTE, v);
    }
    let result = match method {
        MethodArg::Old => complete_old(&row),
        MethodArg::New => complete_new(&row),
    };
    let matrix = match result {
        Ok(w) => w,
        Err(e) => return fail(EXIT_COMPUTE, e),
    };
    let report = matrix.verify(tol);
    let got = matrix.first_row();
    let fidelity = row
        .entries()
        .iter()
        .zip(got.entries())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    if !report.in_w0 || fidelity > tol {
        return fail(
            EXIT_COMPUTE,
            format!("completion failed (first-row fidelity {fidelity:.3e}):\n{report}"),
        );
    }
    if let Err(e) = save_json(&MatrixFile::from_poly(matrix.poly()), &out) {
        return fail(EXIT_IO, e);
    }
    println!("first_row_fidelity: {fidelity:.6e}");
    println!("{report}");
    ExitCode::SUCCESS
}

fn cmd_verify(input: PathBuf, tol: Option<f64>) -> ExitCode {
    let file: MatrixFile = match load_json(&input) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_IO, e),
    };
    let poly = match file.to_poly() {
        Ok(p) => p,
        Err(e) => return fail(EXIT_IO, e),
    };
    let tol = tol.unwrap_or_else(|| default_tol(file.order));
    let report = verify(&poly, tol);
    println!("{report}");
    if report.in_w0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_NEGATIVE)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    tasks: Vec<TaskArg>,
    methods: Vec<MethodArg>,
    ranks: Vec<usize>,
    orders: Vec<usize>,
    seed: u64,
    reps: usize,
    format: FormatArg,
    parallel: bool,
) -> ExitCode {
    if tasks.is_empty() || methods.is_empty() || ranks.is_empty() || orders.is_empty() {
        return fail(EXIT_BAD_ARGS, "empty benchmark grid");
    }
    if reps < 1 {
        return fail(EXIT_BAD_ARGS, "reps must be >= 1");
    }
    if ranks.iter().any(|&m| m < 2) || orders.iter().any(|&n| n < 1) {
        return fail(EXIT_BAD_ARGS, "ranks must be >= 2 and orders >= 1");
    }
    let tasks: Vec<Task> = tasks
        .into_iter()
        .map(|t| match t {
            TaskArg::Generate => Task::Generate,
            TaskArg::Complete => Task::Complete,
        })
        .collect();
    let methods: Vec<Method> = methods
        .into_iter()
        .map(|m| match m {
            MethodArg::Old => Method::Old,
            MethodArg::New => Method::New,
        })
        .collect();
    match run_grid(&tasks, &methods, &ranks, &orders, seed, reps, parallel) {
        Ok(records) => {
            let text = match format {
                FormatArg::Csv => to_csv(&records),
                FormatArg::Md => to_markdown(&records),
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_COMPUTE, e),
    }
}

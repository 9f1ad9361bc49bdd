use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use purity::bench::{fit_polynomial, mean_times, run_bench, BenchConfig, TPolicy};
use purity::io::{read_json, write_json, ChannelFile, MatrixFile, SolveOutput, TomoFile, VectorFile};
use purity::{CliError, Result};
use purity_core::channel::{
    closed_form_o_t, entanglement_fidelity_bounded_purity, multiplicativity_gap, ExampleChannelKind, GapMode,
};
use purity_core::operator::{max_expectation, max_fidelity_pure, min_energy, DensityOperator, HermitianOperator};
use purity_core::tomography::{linear_inversion, mle_purity_eq, mle_purity_leq, MeasurementBasis};
use purity_core::Solver;

#[derive(Parser)]
#[command(name = "purity", version, about = "Linear optimization under a purity bound")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Dual,
    Recursive,
    Oracle,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Dual => Solver::Dual,
            SolverArg::Recursive => Solver::Recursive,
            SolverArg::Oracle => Solver::Oracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Identity,
    Trace,
    IdXTrace,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    SameT,
    SqrtT,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize p.q over the purity-bounded simplex
    Solve {
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "dual")]
        solver: SolverArg,
        #[arg(long)]
        exact_purity: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest (or smallest) expectation value of an observable
    Expect {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        min_energy: bool,
        /// Treat H as a pure target state and report the best fidelity
        #[arg(long, conflicts_with = "min_energy")]
        fidelity_target: bool,
        #[arg(long, value_enum, default_value = "dual")]
        solver: SolverArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement fidelity of example channels over a grid of t
    Channel {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        d: usize,
        /// start:stop:steps
        #[arg(long)]
        t_grid: String,
        /// Also report the multiplicativity gap of kind ⊗ kind
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Numerical O_t for a channel read from JSON instead of an example
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dual")]
        solver: SolverArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Purity-constrained state estimate from measurement frequencies
    Tomo {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        equal_purity: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time the solvers on random instances
    Bench {
        /// Comma-separated dimensions
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values = ["dual", "recursive"])]
        solvers: Vec<SolverArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed purity bound; drawn uniformly from (1/n, 1) when absent
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value = "disagreement.json")]
        repro: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ExpectOutput {
    value: f64,
    rho_star: Option<MatrixFile>,
}

#[derive(Serialize)]
struct TomoOutput {
    #[serde(flatten)]
    rho: MatrixFile,
    distance: f64,
    purity: f64,
}

#[derive(Serialize)]
struct ChannelRow {
    t: f64,
    numeric: f64,
    closed_form: Option<f64>,
    joint: Option<f64>,
    product: Option<f64>,
    gap: Option<f64>,
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Validation(format!("t grid must look like start:stop:steps, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps).map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64).collect())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve { q, t, solver, exact_purity, out } => {
            let q = read_json::<VectorFile>(&q)?.to_objective()?;
            let solver = Solver::from(solver);
            let r = solver.solve(&q, t, exact_purity)?;
            let output = SolveOutput {
                n: q.len(),
                t,
                solver: solver.name().into(),
                optimum: r.optimum,
                purity: r.optimizer.purity(),
                optimizer: r.optimizer.into_vec(),
                regime: r.regime.name().into(),
                iterations: r.stats.iterations,
                recursion_depth: r.stats.recursion_depth,
            };
            emit(&output, out.as_deref())
        }
        Command::Expect { h, t, min_energy: minimize, fidelity_target, solver, out } => {
            let m = read_json::<MatrixFile>(&h)?.to_square()?;
            let solver = Solver::from(solver);
            let output = if fidelity_target {
                let psi = DensityOperator::new(m)?;
                ExpectOutput { value: max_fidelity_pure(&psi, t, solver)?, rho_star: None }
            } else {
                let h = HermitianOperator::new(m)?;
                let e = if minimize { min_energy(&h, t, solver)? } else { max_expectation(&h, t, solver, false)? };
                ExpectOutput { value: e.value, rho_star: Some(MatrixFile::from_matrix(e.rho_star.matrix())) }
            };
            emit(&output, out.as_deref())
        }
        Command::Channel { kind, d, t_grid, mode, input, solver, out } => {
            let kind = match kind {
                KindArg::Identity => ExampleChannelKind::Identity(d),
                KindArg::Trace => ExampleChannelKind::Trace(d),
                KindArg::IdXTrace => ExampleChannelKind::IdentityTensorTrace(d),
            };
            if d < 2 {
                return Err(CliError::Validation("d must be at least 2".into()));
            }
            let solver = Solver::from(solver);
            let channel = match &input {
                Some(path) => read_json::<ChannelFile>(path)?.to_channel()?,
                None => kind.channel(),
            };
            let mut w = csv::Writer::from_path(&out)?;
            for t in parse_grid(&t_grid)? {
                let numeric = entanglement_fidelity_bounded_purity(&channel, t, solver)?;
                let closed_form = if input.is_none() { Some(closed_form_o_t(kind, t)?) } else { None };
                let gap = match mode {
                    Some(m) => {
                        let m = match m {
                            ModeArg::SameT => GapMode::SameT,
                            ModeArg::SqrtT => GapMode::SqrtT,
                        };
                        Some(multiplicativity_gap(kind, kind, t, m, solver)?)
                    }
                    None => None,
                };
                w.serialize(ChannelRow {
                    t,
                    numeric,
                    closed_form,
                    joint: gap.map(|g| g.joint),
                    product: gap.map(|g| g.product),
                    gap: gap.map(|g| g.gap),
                })?;
            }
            w.flush().map_err(|e| CliError::io(&out, e))
        }
        Command::Tomo { input, equal_purity, out } => {
            let file: TomoFile = read_json(&input)?;
            let elements = file
                .basis
                .iter()
                .map(|m| Ok(HermitianOperator::new(m.to_square()?)?))
                .collect::<Result<Vec<_>>>()?;
            let basis = MeasurementBasis::new(elements)?;
            let h = linear_inversion(&file.frequencies, &basis)?;
            let e = if equal_purity { mle_purity_eq(&h, file.t)? } else { mle_purity_leq(&h, file.t)? };
            let output = TomoOutput { rho: MatrixFile::from_matrix(e.rho.matrix()), distance: e.distance, purity: e.purity };
            write_json(&out, &output)
        }
        Command::Bench { n, samples, solvers, seed, t, repeats, threads, repro, out } => {
            let mut n_values = n;
            n_values.sort_unstable();
            let config = BenchConfig {
                n_values,
                samples_per_n: samples,
                t_policy: t.map_or(TPolicy::Uniform, TPolicy::Fixed),
                solvers: solvers.into_iter().map(Solver::from).collect(),
                seed,
                repeats,
                threads,
                repro_path: repro,
            };
            let mut w = csv::Writer::from_path(&out)?;
            let rows = run_bench(&config, Some(&mut w))?;
            for (solver, points) in mean_times(&rows) {
                eprint!("{solver}:");
                for degree in 1..=3 {
                    if let Ok(fit) = fit_polynomial(&points, degree) {
                        eprint!(" deg{degree} rms={:.3e}", fit.rms_residual);
                    }
                }
                eprintln!();
            }
            Ok(())
        }
    }
}

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use relboost::train::Mode;
use relboost_cli::{
    cmd_check_join, cmd_compare, cmd_predict, cmd_sketch_bench, cmd_train, exit_code, BenchOptions,
    Overrides, TrainOptions, EXIT_OK,
};

#[derive(Parser)]
#[command(
    name = "relboost",
    version,
    about = "Boosted regression trees over acyclic joins"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sketch,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Sketch => Mode::Sketch,
        }
    }
}

#[derive(clap::Args)]
struct TrainArgs {
    #[arg(long)]
    join: PathBuf,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long, env = "RELBOOST_SEED")]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    count_queries: bool,
    /// Number of boosted trees; overrides the config.
    #[arg(long)]
    trees: Option<usize>,
}

impl TrainArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            mode: self.mode.map(Mode::from),
            count_queries: self.count_queries,
            trees: self.trees,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check acyclicity and print the join tree.
    CheckJoin {
        #[arg(long)]
        join: PathBuf,
    },
    /// Train a model and write it with a run manifest.
    Train {
        #[command(flatten)]
        args: TrainArgs,
        #[arg(long)]
        out: PathBuf,
        /// Train on the materialized join instead.
        #[arg(long)]
        oracle: bool,
    },
    /// Predict every row of a CSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Train relationally and on the materialized join, then compare.
    Compare {
        #[command(flatten)]
        args: TrainArgs,
    },
    /// Measure sketched square norms against exact ones.
    SketchBench {
        #[arg(long, default_value_t = 2)]
        tables: usize,
        /// Sketch width; derived from epsilon and delta when absent.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rows per table of each random instance.
        #[arg(long, default_value_t = 12)]
        rows: usize,
    },
}

fn run(cli: Cli) -> relboost::Result<i32> {
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = match cli.command {
        Command::CheckJoin { join } => cmd_check_join(&join, &mut out, &mut err)?,
        Command::Train {
            args,
            out: path,
            oracle,
        } => {
            let opts = TrainOptions {
                join: args.join.clone(),
                config: args.config.clone(),
                out: path,
                overrides: args.overrides(),
                oracle,
            };
            cmd_train(&opts, &mut out, &mut err)?;
            EXIT_OK
        }
        Command::Predict { model, input } => {
            cmd_predict(&model, &input, &mut out, &mut err)?;
            EXIT_OK
        }
        Command::Compare { args } => cmd_compare(
            &args.join,
            &args.config,
            &args.overrides(),
            &mut out,
            &mut err,
        )?,
        Command::SketchBench {
            tables,
            k,
            epsilon,
            delta,
            trials,
            seed,
            rows,
        } => {
            let o = BenchOptions {
                tables,
                k,
                epsilon,
                delta,
                trials,
                seed,
                rows,
            };
            cmd_sketch_bench(&o, &mut out, &mut err)?;
            EXIT_OK
        }
    };
    out.flush().ok();
    Ok(code)
}

fn main() -> ExitCode {
    // usage errors share the config exit code rather than clap's default 2,
    // which is reserved for cyclic joins
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(relboost_cli::EXIT_CONFIG as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

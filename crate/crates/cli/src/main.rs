//! `qanneal`: generate instances, run experiments and analyse trajectories.
//!
//! Exit codes: 0 success, 1 solver failure, 2 configuration error,
//! 3 size-limit refusal, 4 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qanneal::analysis::{compare, fit_one_over_t, Series};
use qanneal::experiment::{run_experiment, run_quench, write_model, ExperimentConfig};
use qanneal::single_spin::{SingleSpinParams, SingleSpinRow, SolvableSchedule};
use qanneal::Error;

#[derive(Parser)]
#[command(name = "qanneal", version, about = "Quantum and simulated annealing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write the instance described by a configuration.
    Gen(Common),
    /// Run an experiment and write its CSV and metadata sidecar.
    Run(Common),
    /// Anneal versus quench at matched endpoints.
    Quench(Common),
    /// Fit `1 - p ∝ t^slope` on a log-log scale.
    Fit {
        /// Trajectory or Monte Carlo record CSV.
        #[arg(long)]
        input: PathBuf,
        /// Fit window `LO,HI`.
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
        /// Value column; defaults to `p` or the ground-state fraction.
        #[arg(long)]
        column: Option<String>,
        /// Write `fit.json` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate two outputs against each other.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Align on `t' = M·t` instead of `t`.
        #[arg(long)]
        rescale: bool,
        #[arg(long)]
        column: Option<String>,
        /// Write `comparison.csv` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form versus numerical single-spin miss probabilities.
    SingleSpin {
        /// `lz`, `inv` or `inv_sqrt`.
        #[arg(long)]
        schedule: String,
        /// Field values, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<f64>,
        /// Schedule amplitudes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        /// End of the run in units of `1/h`.
        #[arg(long, default_value_t = 1e4)]
        ht_end: f64,
        /// Write `single_spin.csv` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SizeLimit { .. } => 3,
        Error::Io(_) | Error::Checkpoint(_) => 4,
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Domain(_)
        | Error::Parse { .. }
        | Error::SizeMismatch { .. }
        | Error::UnsupportedEdgeWeight(_) => 2,
        _ => 1,
    }
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), Error> {
    let text = fs::read_to_string(&common.config)?;
    let mut config = ExperimentConfig::from_toml_str(&text)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    let base = common.config.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn emit(out: Option<&Path>, name: &str, body: &str) -> Result<(), Error> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, body)?;
            println!("{}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(common) => {
            let (config, base) = load(&common)?;
            println!("{}", write_model(&config, &base, &common.out)?.display());
        }
        Command::Run(common) => {
            let (config, base) = load(&common)?;
            let out = run_experiment(&config, &base, &common.out)?;
            println!("{}\n{}", out.csv.display(), out.sidecar.display());
        }
        Command::Quench(common) => {
            let (config, base) = load(&common)?;
            let (out, report) = run_quench(&config, &base, &common.out)?;
            for row in &report.rows {
                println!("{:<12} final energy {:.4} ± {:.4}", row.process.to_string(), row.final_energy, row.final_stderr);
            }
            println!("{}", out.csv.display());
        }
        Command::Fit { input, window, column, out } => {
            let series = Series::from_csv(&fs::read_to_string(&input)?, input.display().to_string(), column.as_deref())?;
            let fit = fit_one_over_t(&series.points, window)?;
            let json = serde_json::to_string_pretty(&fit).expect("report serializes") + "\n";
            emit(out.as_deref(), "fit.json", &json)?;
        }
        Command::Compare { a, b, rescale, column, out } => {
            let read = |p: &PathBuf| -> Result<Series, Error> {
                Series::from_csv(&fs::read_to_string(p)?, p.display().to_string(), column.as_deref())
            };
            let cmp = compare(&read(&a)?, &read(&b)?, rescale)?;
            if cmp.resampled {
                log::warn!("time grids differ; b was interpolated linearly in ln t");
            }
            emit(out.as_deref(), "comparison.csv", &cmp.to_csv())?;
            if let Some(last) = cmp.final_row() {
                let order = if last.a < last.b { "a < b" } else if last.a > last.b { "a > b" } else { "a = b" };
                eprintln!("final t = {}: a = {}, b = {} ({order}); crossings at {:?}", last.t, last.a, last.b, cmp.crossings);
            }
        }
        Command::SingleSpin { schedule, h, c, ht_end, out } => {
            let kind: SolvableSchedule = schedule.parse()?;
            let mut body = format!("{}\n", SingleSpinRow::CSV_HEADER);
            for &h in &h {
                for &c in &c {
                    body += &SingleSpinRow::compute(kind, SingleSpinParams::new(h, c)?, ht_end)?.to_csv();
                    body.push('\n');
                }
            }
            emit(out.as_deref(), "single_spin.csv", &body)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyirr_core::bounds::BoundConstants;
use polyirr_core::factorlab::CensusMode;
use polyirr_core::sampling::{sample_poly, CoefficientModel};
use polyirr_harness::bounds_table::bounds_table;
use polyirr_harness::census::{census_csv, census_sweep, run_census};
use polyirr_harness::verify::{run_verify, Suite};
use polyirr_harness::{
    atomic_write, resolve_workers, run_experiment_with, with_workers, Detector, ExperimentConfig,
    HarnessError, KRule, Result, RunOptions,
};

#[derive(Parser)]
#[command(name = "polyirr", version, about = "Experiments on the irreducibility of random monic integer polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by `sample` and `estimate`, overriding the config file.
#[derive(clap::Args)]
struct Overrides {
    /// Experiment config as JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u64>>,
    /// Fixed coefficient height for the uniform_symmetric model.
    #[arg(long = "K")]
    k: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// f_at_1, full_irreducibility, cyclotomic:<m0|m1|m>, low_degree:<m0|m1|m>.
    #[arg(long)]
    detector: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print sampled polynomials, one per line.
    Sample {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Estimate detector probabilities and write results.csv and manifest.json.
    Estimate {
        #[command(flatten)]
        overrides: Overrides,
        /// Worker threads (capped by POLYIRR_THREADS).
        #[arg(long)]
        workers: Option<usize>,
        /// Ignore any checkpoint in the output directory.
        #[arg(long)]
        fresh: bool,
    },
    /// Exhaustively count reducible members of P_{d,K}.
    Census {
        #[arg(long)]
        d: Option<u64>,
        #[arg(long = "K")]
        k: Option<u64>,
        /// Count only divisors of degree at most m.
        #[arg(long)]
        low_degree: Option<usize>,
        /// Run every (d >= 2, K) with |P_{d,K}| at most this size instead.
        #[arg(long, conflicts_with_all = ["d", "k"])]
        sweep: Option<u64>,
        /// CSV file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate envelopes, degree thresholds and counting bounds.
    Bounds {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
        #[arg(long = "K", value_delimiter = ',', required = true)]
        k: Vec<u64>,
        /// Bound constants as JSON.
        #[arg(long)]
        constants: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check module invariants and print a JSON report.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        /// Directory for CSV side products.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_to_string(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn build_config(o: &Overrides) -> Result<ExperimentConfig> {
    let mut config = match &o.config {
        Some(path) => ExperimentConfig::from_json(&read_to_string(path)?)?,
        None => ExperimentConfig {
            model: CoefficientModel::UniformSymmetric { k: 1 },
            d_list: Vec::new(),
            k_rule: None,
            trials: 1000,
            seed: 0,
            detector: Detector::FAt1,
            constants: BoundConstants::default(),
            output_dir: PathBuf::from("polyirr-out"),
            checkpoint_every: 10_000,
        },
    };
    if let Some(d) = &o.d {
        config.d_list = d.clone();
    }
    if let Some(k) = o.k {
        match config.model {
            CoefficientModel::UniformSymmetric { .. } => {
                config.model = CoefficientModel::UniformSymmetric { k };
                config.k_rule = Some(KRule::Fixed { k });
            }
            _ => return Err(HarnessError::Config("--K applies only to uniform_symmetric".into())),
        }
    }
    if let Some(t) = o.trials {
        config.trials = t;
    }
    if let Some(s) = o.seed {
        config.seed = s;
    }
    if let Some(det) = &o.detector {
        config.detector = Detector::parse(det)?;
    }
    if let Some(out) = &o.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => atomic_write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sample { overrides } => {
            let config = build_config(&overrides)?;
            for &d in &config.d_list {
                let model = config.model_for(d);
                for t in 0..config.trials {
                    println!("{}", sample_poly(&model, d as usize, config.seed, t)?);
                }
            }
            Ok(true)
        }
        Command::Estimate {
            overrides,
            workers,
            fresh,
        } => {
            let config = build_config(&overrides)?;
            let options = RunOptions {
                workers,
                resume: !fresh,
            };
            let result = run_experiment_with(&config, &options)?;
            print!("{}", result.csv());
            eprintln!("wrote {} and {}", result.csv_path.display(), result.manifest_path.display());
            Ok(true)
        }
        Command::Census {
            d,
            k,
            low_degree,
            sweep,
            out,
        } => {
            let mode = match low_degree {
                Some(m) => CensusMode::LowDegreeDivisor { m },
                None => CensusMode::Reducibility,
            };
            let workers = resolve_workers(None);
            let reports = match (sweep, d, k) {
                (Some(limit), _, _) => with_workers(workers, || census_sweep(limit, mode))??,
                (None, Some(d), Some(k)) => vec![with_workers(workers, || run_census(d, k, mode))??],
                _ => return Err(HarnessError::Config("census needs --d and --K, or --sweep".into())),
            };
            emit(out.as_ref(), &census_csv(&reports))?;
            let mut ok = true;
            for r in &reports {
                if let (Some(false), Some(bound)) = (r.within_bound(), &r.bound) {
                    ok = false;
                    eprintln!(
                        "bound violated at d = {}, K = {}: {} > {bound}",
                        r.result.d, r.result.k, r.result.reducible
                    );
                }
            }
            Ok(ok)
        }
        Command::Bounds {
            d,
            k,
            constants,
            out,
        } => {
            let constants: BoundConstants = match constants {
                Some(path) => serde_json::from_str(&read_to_string(&path)?)
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
                None => BoundConstants::default(),
            };
            if d.contains(&0) || k.contains(&0) {
                return Err(HarnessError::Config("d and K must be positive".into()));
            }
            emit(out.as_ref(), &bounds_table(&d, &k, &constants)?)?;
            Ok(true)
        }
        Command::Verify { suite, out } => {
            let report = with_workers(resolve_workers(None), || run_verify(suite))??;
            if let Some(dir) = &out {
                report.write_artifacts(dir)?;
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            for f in report.failures() {
                eprintln!("FAIL {}::{}: {}", f.suite, f.name, f.detail);
            }
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

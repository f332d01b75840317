use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semidx::config::{ConfigArgs, PipelineConfig};
use semidx::error::{Error, Result};
use semidx::{parallel, pipeline, synth};

#[derive(Parser, Debug)]
#[command(name = "semidx", version, about = "Semantic importance indices from news, and their forecasting power")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every corpus record and report per-period document counts.
    IngestValidate,
    /// Build the period x keyword score matrix and per-period measures.
    BuildIndex {
        /// Also write one edge list per period into this directory.
        #[arg(long)]
        dump_networks: Option<PathBuf>,
    },
    /// Keyword neighbourhood sentiment per period.
    Sentiment,
    /// Weekly returns and range volatility from daily prices.
    MarketPrep,
    /// Recursive out-of-sample forecasts for each target.
    Backtest {
        /// Write PLS weights per vintage here instead of `<output>/pls`.
        #[arg(long)]
        dump_pls: Option<PathBuf>,
    },
    /// MSPE ratios, DM tests and AIC summaries from the forecast files.
    Report,
    /// Write a seeded synthetic fixture (corpus, prices, lexicon, config).
    Synth {
        #[arg(long, default_value = "synth")]
        dir: PathBuf,
        #[arg(long, default_value_t = synth::SynthSpec::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = synth::SynthSpec::default().weeks)]
        weeks: usize,
        #[arg(long, default_value_t = synth::SynthSpec::default().docs_per_week)]
        docs_per_week: usize,
        /// Persistence of the volatility target.
        #[arg(long, default_value_t = synth::SynthSpec::default().gamma)]
        gamma: f64,
        /// Loading of the target on the latent factor.
        #[arg(long, default_value_t = synth::SynthSpec::default().beta)]
        beta: f64,
        #[arg(long, default_value_t = synth::SynthSpec::default().alpha)]
        alpha: f64,
        #[arg(long, default_value_t = synth::SynthSpec::default().noise_sd)]
        noise_sd: f64,
        /// AR(1) coefficient of the latent factor, in (-1, 1).
        #[arg(long, default_value_t = synth::SynthSpec::default().latent_ar)]
        latent_ar: f64,
    },
}

fn run(cli: Cli) -> Result<()> {
    let cfg: PipelineConfig = cli.config.resolve()?;
    let threads = cfg.threads;
    match cli.command {
        Command::IngestValidate => {
            let report = pipeline::ingest_validate(&cfg)?;
            for e in &report.errors {
                eprintln!("invalid record: {e}");
            }
            if let Some(per) = &report.per_period {
                for (label, n) in per {
                    println!("{label}\t{n}");
                }
            }
            println!("valid records: {}, rejected: {}", report.valid, report.errors.len());
            if !report.errors.is_empty() {
                return Err(Error::validation(format!("{} invalid record(s)", report.errors.len())));
            }
        }
        Command::BuildIndex { dump_networks } => {
            let out = parallel::with_threads(threads, || pipeline::build_index(&cfg, dump_networks.as_deref()))??;
            println!(
                "wrote {} periods x {} keywords ({} masked) to {}",
                out.matrix.period_count(),
                out.matrix.column_count(),
                out.matrix.masked_count(),
                cfg.output.display()
            );
        }
        Command::Sentiment => {
            let t = parallel::with_threads(threads, || pipeline::build_sentiment(&cfg))??;
            println!("wrote sentiment for {} periods", t.periods.len());
        }
        Command::MarketPrep => {
            let t = pipeline::market_prep(&cfg)?;
            println!("wrote {} target series over {} periods", t.names.len(), t.periods.len());
        }
        Command::Backtest { dump_pls } => {
            let runs = parallel::with_threads(threads, || pipeline::run_backtest(&cfg, dump_pls.as_deref()))??;
            for r in &runs {
                let n = r.result.runs.first().map_or(0, |x| x.origins.len());
                println!("{}: {n} origins, {} warnings", r.target, r.result.warnings.len());
            }
        }
        Command::Report => {
            for r in pipeline::report(&cfg)? {
                print!("{}", r.render());
                println!();
            }
        }
        Command::Synth { dir, seed, weeks, docs_per_week, gamma, beta, alpha, noise_sd, latent_ar } => {
            if !(latent_ar.abs() < 1.0 && gamma.abs() < 1.0) {
                return Err(Error::validation("--gamma and --latent-ar must lie in (-1, 1)"));
            }
            let spec =
                synth::SynthSpec { seed, weeks, docs_per_week, gamma, beta, alpha, noise_sd, latent_ar, ..Default::default() };
            let path = synth::generate(&spec).write(&dir)?;
            println!("wrote fixture; run with --config {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

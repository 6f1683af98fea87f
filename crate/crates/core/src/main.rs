use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use risfso::cli::{
    figure_preset, report_asymptote, run_sweeps, run_validation, to_csv_string, to_json_string,
    McOverrides, OutputKind, ResultTable, SweepConfig, SystemConfig, ValidateOptions,
};
use risfso::montecarlo::{with_workers, Combiner};
use risfso::{Error, Result};

#[derive(Parser)]
#[command(name = "risfso", version, about = "Outage, error probability and high-SNR analysis of RIS-assisted RF sources with a decode-and-forward FSO relay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON configuration (SNR fields in dB, suffixed `_db`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fixed Monte Carlo trial count per point (disables event-based scaling).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads; 0 uses all cores. Defaults to $RISFSO_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    combiner: Option<CombinerArg>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Outage sweep (analytic, asymptotic, Monte Carlo).
    Outage,
    /// Average symbol error probability sweep (closed form, quadrature, Monte Carlo).
    Asep,
    /// Diversity order, coding gain and dominant hop of the base configuration.
    Asymptote,
    /// Run the cross-oracle validation suite.
    Validate {
        /// Samples per Kolmogorov-Smirnov test.
        #[arg(long, default_value_t = 200_000)]
        ks_samples: usize,
    },
    /// Reproduce a figure sweep with the built-in defaults (1 to 5).
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        n: u8,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CombinerArg {
    Min,
    Harmonic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

const WORKERS_ENV: &str = "RISFSO_WORKERS";

impl Common {
    /// The flag, else the environment variable, else all cores.
    fn workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::param(WORKERS_ENV, format!("expected a thread count, got {v:?}"))),
            Err(_) => Ok(0),
        }
    }

    fn apply_mc(&self, config: &mut SweepConfig) {
        let mut mc = config.mc.unwrap_or_default();
        if let Some(seed) = self.seed {
            mc.seed = Some(seed);
        }
        if let Some(trials) = self.trials {
            mc = McOverrides {
                trials: Some(trials),
                min_events: None,
                max_trials: None,
                ..mc
            };
        }
        if let Some(c) = self.combiner {
            mc.combiner = Some(match c {
                CombinerArg::Min => Combiner::Min,
                CombinerArg::Harmonic => Combiner::Harmonic,
            });
        }
        config.mc = Some(mc);
    }

    fn config_path(&self) -> Result<&Path> {
        self.config
            .as_deref()
            .ok_or_else(|| Error::param("--config", "this command needs a configuration file"))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                let written = out
                    .write_all(text.as_bytes())
                    .and_then(|_| if text.ends_with('\n') { Ok(()) } else { writeln!(out) });
                match written {
                    // a closed pipe (e.g. `| head`) is not a failure
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(()),
                }
            }
        }
    }

    fn emit_table(&self, table: &ResultTable) -> Result<()> {
        match self.format {
            Format::Csv => self.emit(&to_csv_string(table)),
            Format::Json => self.emit(&to_json_string(table)),
        }
    }
}

/// Keeps the outputs of one family; the family defaults when none remain.
fn restrict_outputs(config: &mut SweepConfig, outage: bool) {
    config.outputs.retain(|o| o.is_outage() == outage);
    if config.outputs.is_empty() {
        let defaults = if outage {
            [OutputKind::OutageAnalytic, OutputKind::OutageAsymptotic]
        } else {
            [OutputKind::AsepAnalytic, OutputKind::AsepQuad]
        };
        config.outputs.extend(defaults);
    }
}

fn load_base(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    match SweepConfig::from_json(&text) {
        Ok(c) => Ok(c.base),
        Err(sweep_err) => serde_json::from_str::<SystemConfig>(&text)
            .map_err(|_| sweep_err),
    }
}

fn summarize(table: &ResultTable) -> bool {
    let errors = table.error_count();
    let low = table.low_count_rows().len();
    eprintln!("{} rows, {errors} with errors, {low} flagged LOW_COUNT", table.rows.len());
    for row in table.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("  {} x = {:?}: {}", row.label, row.values[0], row.error.as_deref().unwrap_or(""));
    }
    errors == 0
}

fn run(cli: &Cli) -> Result<bool> {
    let common = &cli.common;
    match &cli.command {
        Command::Outage | Command::Asep => {
            let mut config = SweepConfig::load(common.config_path()?)?;
            restrict_outputs(&mut config, matches!(cli.command, Command::Outage));
            common.apply_mc(&mut config);
            let name = if matches!(cli.command, Command::Outage) { "outage" } else { "asep" };
            let table = run_sweeps(std::slice::from_ref(&config), name)?;
            common.emit_table(&table)?;
            Ok(summarize(&table))
        }
        Command::Fig { n } => {
            let mut preset = figure_preset(*n)?;
            for c in &mut preset.curves {
                common.apply_mc(c);
            }
            eprintln!("{}: {}", preset.name, preset.description);
            eprintln!("channel defaults alpha=4.2, beta=1.4, zeta2=1.1, r=1 are chosen defaults");
            let table = run_sweeps(&preset.curves, &preset.name)?;
            common.emit_table(&table)?;
            Ok(summarize(&table))
        }
        Command::Asymptote => {
            let params = load_base(common.config_path()?)?.to_params()?;
            let summary = report_asymptote(&params)?;
            match common.format {
                Format::Csv => common.emit(&summary.to_string())?,
                Format::Json => common.emit(&serde_json::to_string_pretty(&summary)?)?,
            }
            Ok(true)
        }
        Command::Validate { ks_samples } => {
            let defaults = ValidateOptions::default();
            let options = ValidateOptions {
                seed: common.seed.unwrap_or(defaults.seed),
                mc_trials: common.trials.unwrap_or(defaults.mc_trials),
                ks_samples: *ks_samples,
            };
            let report = run_validation(&options);
            match common.format {
                Format::Csv => common.emit(&report.to_string())?,
                Format::Json => common.emit(&serde_json::to_string_pretty(&report)?)?,
            }
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli
        .common
        .workers()
        .and_then(|w| with_workers(w, || run(&cli)));
    match outcome {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) | Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

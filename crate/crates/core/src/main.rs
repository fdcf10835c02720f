use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fitroom::config::{load_config, ScenarioConfig};
use fitroom::harness::{
    compare_experiments, emit_report, sweep, write_report, ExperimentReport, HarnessError,
    ModelKind, Pairing, ReportFormat, SweepSpec,
};
use fitroom::stats::DEFAULT_ALPHA;

#[derive(Parser)]
#[command(name = "fitroom", version, about = "Fitting-room service simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replications at the configured arrival rate.
    Run(Common),
    /// Replications at increasing arrival rates.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 1.3)]
        factor: f64,
    },
    /// Reactive (A) against proactive (B) staff behaviour.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Run B from a different seed instead of reusing A's streams.
        #[arg(long)]
        independent: bool,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Des,
    Abs,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "both")]
    model: ModelArg,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, value_enum)]
    proactive: Option<Toggle>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl Common {
    fn models(&self) -> Vec<ModelKind> {
        match self.model {
            ModelArg::Des => vec![ModelKind::Des],
            ModelArg::Abs => vec![ModelKind::Abs],
            ModelArg::Both => ModelKind::ALL.to_vec(),
        }
    }

    fn scenario(&self) -> Result<ScenarioConfig, HarnessError> {
        let mut config = match &self.config {
            Some(path) => load_config(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(n) = self.replications {
            config.replications = n;
        }
        if let Some(t) = self.proactive {
            config.proactive.enabled = matches!(t, Toggle::On);
        }
        config.validate()?;
        Ok(config)
    }

    fn format(&self) -> ReportFormat {
        match self.format {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }

    fn emit(&self, report: &ExperimentReport) -> Result<(), HarnessError> {
        match &self.out {
            Some(path) => emit_report(report, self.format(), path),
            None => {
                let mut stdout = std::io::stdout().lock();
                write_report(report, self.format(), &mut stdout)
                    .and_then(|_| stdout.flush())
                    .map_err(|source| HarnessError::Io {
                        path: "<stdout>".to_string(),
                        source,
                    })
            }
        }
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run(common) => {
            let config = common.scenario()?;
            let report = sweep(&config, &SweepSpec::new(1, 1.0)?, &common.models())?;
            common.emit(&report)
        }
        Command::Sweep {
            common,
            levels,
            factor,
        } => {
            let config = common.scenario()?;
            let report = sweep(&config, &SweepSpec::new(levels, factor)?, &common.models())?;
            common.emit(&report)
        }
        Command::Compare {
            common,
            independent,
            alpha,
        } => {
            let config = common.scenario()?;
            let pairing = if independent {
                Pairing::Independent
            } else {
                Pairing::CommonRandomNumbers
            };
            let cmp = compare_experiments(&config, &common.models(), pairing, alpha)?;
            common.emit(&cmp.report)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Io { .. } => ExitCode::from(2),
                HarnessError::Config(fitroom::config::ConfigError::Io { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

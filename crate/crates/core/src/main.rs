use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use repeater_rate::harness::{self, presets, Format, Scenario};
use repeater_rate::swapping::{chain_factor, swap_budget, Heralding, SwapParams};
use repeater_rate::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Entanglement distribution rates between adjacent repeater nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// Preset name (see `list-presets`) or path to a JSON config
    scenario: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo rounds per sweep point
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set L_km=5,10 --set scheme=MS`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, Error> {
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("seed={seed}"));
        }
        if let Some(rounds) = self.rounds {
            overrides.push(format!("rounds={rounds}"));
        }
        Scenario::load(&self.scenario, &overrides)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HeraldingArg {
    Perfect,
    Imperfect,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Closed forms and Monte Carlo estimates over a scenario sweep
    Run(ScenarioArgs),
    /// Closed forms only
    Analytic(ScenarioArgs),
    /// Entanglement swapping budget and multi-link heralding penalty
    Swap {
        /// Pairs shared per elementary link (J)
        #[arg(long, default_value_t = 1000)]
        pairs: u32,
        #[arg(long, default_value_t = 0.53)]
        p_emit: f64,
        #[arg(long, default_value_t = 0.32)]
        p_bsa: f64,
        #[arg(long, default_value_t = 0.9)]
        p_pass: f64,
        #[arg(long, default_value_t = 0.53)]
        p_afc: f64,
        /// Elementary links joined (i)
        #[arg(long, default_value_t = 1)]
        links: u32,
        #[arg(long, value_enum, default_value = "both")]
        heralding: HeraldingArg,
    },
    /// Names and parameters of the built-in scenarios
    ListPresets,
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config_error() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let scenario = args.load()?;
            let rows = harness::run(&scenario)?;
            harness::emit(&rows, args.format.into(), args.out.as_deref())
        }
        Command::Analytic(args) => {
            let scenario = args.load()?;
            let rows = harness::run_analytic(&scenario)?;
            harness::emit(&rows, args.format.into(), args.out.as_deref())
        }
        Command::Swap {
            pairs,
            p_emit,
            p_bsa,
            p_pass,
            p_afc,
            links,
            heralding,
        } => {
            let params = SwapParams {
                pairs,
                p_emit,
                p_bsa,
                p_pass,
                p_afc,
                links,
            };
            let mut out = json!({ "params": params, "chain_factor": chain_factor(&params)? });
            if matches!(heralding, HeraldingArg::Perfect | HeraldingArg::Both) {
                out["perfect"] = json!(swap_budget(&params, Heralding::Perfect)?);
            }
            if matches!(heralding, HeraldingArg::Imperfect | HeraldingArg::Both) {
                out["imperfect"] = json!(swap_budget(&params, Heralding::Imperfect)?);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("serializable")
            );
            Ok(())
        }
        Command::ListPresets => {
            for name in presets::PRESET_NAMES {
                println!("{name:8} {}", presets::describe(name).unwrap_or_default());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

use clap::{Args, Parser, Subcommand};
use rfrk_cli::config::{parse_config_file, parse_float_list, parse_k_list, ConfigOverlay};
use rfrk_cli::converge::{convergence_table, write_table, ConvergeSpec};
use rfrk_cli::reproduce::{reproduce, write_report, Target};
use rfrk_cli::runner::run;
use rfrk_cli::stability_cmd::{list_schemes, stability_report, DEFAULT_RESOLUTION};
use rfrk_cli::{CliError, EXIT_GOLDEN, EXIT_INTEGRATION};
use std::path::PathBuf;
use std::process::ExitCode;

/// Energy-controlling Runge-Kutta experiment harness.
#[derive(Parser)]
#[command(name = "rfrk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (config file merged with flag overrides)
    Run(RunArgs),
    /// Run a reproduction target and check it against its golden values
    Reproduce(ReproduceArgs),
    /// Convergence table over a list of step sizes
    Converge(ConvergeArgs),
    /// Stability summary and region grids for a scheme
    Stability(StabilityArgs),
    /// List registered schemes
    ListSchemes,
}

#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; flags below override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// advection-noise | advection-smooth | dissipative | oscillator | burgers
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// classical | idt | r | rf
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    /// Step size as a fraction of the advection stability limit
    #[arg(long)]
    mu: Option<f64>,
    /// Step size as a CFL number (Burgers)
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated k vector override, e.g. "1,2,-2,-1"
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// table1 | fig1 | fig2-5 | fig6 | fig7 | fig8 | fig9 | fig10
    #[arg(long)]
    target: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Report path (defaults to <out>/<target>_report.txt)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    /// oscillator | burgers
    #[arg(long)]
    experiment: String,
    /// Comma-separated scheme list
    #[arg(long, default_value = "RK44")]
    scheme: String,
    #[arg(long, default_value = "classical")]
    mode: String,
    /// Comma-separated dt list (oscillator)
    #[arg(long)]
    dt: Option<String>,
    /// Comma-separated CFL list (burgers)
    #[arg(long)]
    cfl: Option<String>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    scheme: String,
    /// Comma-separated k vector for the perturbed family
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run(args) => {
            let file = match &args.config {
                Some(path) => parse_config_file(path)?,
                None => ConfigOverlay::default(),
            };
            let flags = ConfigOverlay {
                experiment: args.experiment,
                scheme: args.scheme,
                mode: args.mode,
                dt: args.dt,
                mu: args.mu,
                cfl: args.cfl,
                t_end: args.t_end,
                seed: args.seed,
                k: args.k,
                out: args.out.map(|p| p.to_string_lossy().into_owned()),
            };
            let config = flags.over(file).resolve()?;
            let summary = run(&config)?;
            for (k, v) in summary.to_pairs() {
                println!("{k}={v}");
            }
            if summary.failure.is_some() {
                return Ok(ExitCode::from(EXIT_INTEGRATION as u8));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce(args) => {
            let target: Target = args.target.parse().map_err(CliError::Config)?;
            let report = reproduce(target, &args.out)?;
            let report_path = args
                .report
                .unwrap_or_else(|| args.out.join(format!("{target}_report.txt")));
            write_report(&report, &report_path)?;
            for c in &report.checks {
                println!(
                    "{} | {} | measured: {} | expected: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.expected
                );
            }
            for n in &report.notes {
                println!("note: {n}");
            }
            let ok = report.all_pass();
            println!("overall: {}", if ok { "PASS" } else { "FAIL" });
            println!("report written to {}", report_path.display());
            if ok {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_GOLDEN as u8))
            }
        }
        Command::Converge(args) => {
            let experiment = args.experiment.parse().map_err(CliError::Config)?;
            let mode = args.mode.parse().map_err(CliError::Config)?;
            let (step_values, t_end_default) = match (&args.dt, &args.cfl) {
                (Some(dts), None) => (parse_float_list(dts, "dt")?, 10.0),
                (None, Some(cfls)) => (parse_float_list(cfls, "cfl")?, 0.2),
                _ => {
                    return Err(CliError::Config(
                        "converge takes exactly one of --dt or --cfl (comma-separated list)".into(),
                    ));
                }
            };
            let spec = ConvergeSpec {
                experiment,
                schemes: args
                    .scheme
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .collect(),
                mode,
                k_override: args.k.as_deref().map(parse_k_list).transpose()?,
                step_values,
                t_end: args.t_end.unwrap_or(t_end_default),
            };
            let table = convergence_table(&spec)?;
            let prefix = format!("convergence_{}_{}", spec.experiment, spec.mode);
            write_table(&table, &args.out, &prefix)?;
            println!("scheme,mode,slope,points_used");
            for s in &table.slopes {
                println!(
                    "{},{},{},{}",
                    s.scheme,
                    s.mode,
                    s.slope.map(|v| format!("{v:.4}")).unwrap_or_default(),
                    s.points_used
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Stability(args) => {
            let k = args.k.as_deref().map(parse_k_list).transpose()?;
            let text = stability_report(&args.scheme, &k, &args.out, DEFAULT_RESOLUTION)?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Command::ListSchemes => {
            print!("{}", list_schemes());
            Ok(ExitCode::SUCCESS)
        }
    }
}

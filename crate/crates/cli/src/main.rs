use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use magtele::entanglement::{logneg_subtracted_analytic, logneg_tmsv_analytic};
use magtele::states::{heralding_report, DEFAULT_REFLECTIVITY};
use magtele::derive_params;
use magtele_cli::config::{Format, RunConfig};
use magtele_cli::error::{CliError, Result};
use magtele_cli::{emit_figure, figure_config, output, run_sweep, validate, FigureId};
use serde_json::json;

#[derive(Parser)]
#[command(name = "magtele", version, about = "Optomagnonic CV teleportation: sweeps, figure data and oracle checks")]
struct Cli {
    /// JSON run config; for `figure` it overrides the figure's defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "MAGTELE_OUT_DIR")]
    out: Option<PathBuf>,
    /// Fock cutoff for oracles and reconstructions.
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Write only this format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print resolved and derived parameters as JSON.
    Params,
    /// Run the sweep described by the config.
    Sweep,
    /// Write the dataset behind one figure.
    Figure {
        /// fig2a, fig2b, fig3a, fig3b, fig3c, fig3d, fig4, fig5a or fig5b
        id: String,
    },
    /// Check every closed form against its oracle and write a report.
    Validate,
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn apply_flags(cli: &Cli, mut cfg: RunConfig) -> Result<RunConfig> {
    if let Some(c) = cli.cutoff {
        cfg.cutoff = c;
    }
    if let Some(f) = cli.format {
        cfg.formats = vec![match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    // --out or MAGTELE_OUT_DIR wins over the config file
    cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let text = cli.config.as_deref().map(read_config).transpose()?;
    match &cli.command {
        Command::Figure { id } => {
            let id: FigureId = id.parse()?;
            let cfg = apply_flags(cli, figure_config(id, text.as_deref())?)?;
            report_files(&emit_figure(id, &cfg, &out_dir(cli, &cfg))?);
        }
        command => {
            let cfg = match &text {
                Some(t) => RunConfig::from_json(t)?,
                None => RunConfig::default(),
            };
            let cfg = apply_flags(cli, cfg)?;
            match command {
                Command::Params => print_params(&cfg)?,
                Command::Sweep => {
                    let records = run_sweep(&cfg)?;
                    report_files(&output::write_sweep(&cfg, &records, &out_dir(cli, &cfg), "sweep")?);
                }
                Command::Validate => {
                    let report = validate::validate_report(&cfg);
                    let path = validate::write_report(&report, &out_dir(cli, &cfg))?;
                    println!("{}", path.display());
                    let s = &report.summary;
                    eprintln!(
                        "{} checks, {} flagged ({} whitelisted), {} failed, {} unexpected",
                        s.checks, s.flagged, s.whitelisted, s.failed, s.unexpected
                    );
                    if s.unexpected > 0 {
                        return Err(CliError::Discrepancy(report.unexpected().join(", ")));
                    }
                }
                Command::Figure { .. } => unreachable!(),
            }
        }
    }
    Ok(())
}

fn print_params(cfg: &RunConfig) -> Result<()> {
    let p = cfg.params.to_physical();
    let d = derive_params(&p)?;
    let herald = heralding_report(&d, DEFAULT_REFLECTIVITY, cfg.cutoff)?;
    let value = json!({
        "params": cfg.params.resolved(),
        "internal_si": p,
        "derived": d,
        "script_gc_tau_s": d.script_gc * p.tau_s,
        "logneg_tmsv": logneg_tmsv_analytic(d.r),
        "logneg_nongaussian": logneg_subtracted_analytic(d.lambda_prime)?,
        "heralding": herald,
    });
    println!("{}", serde_json::to_string_pretty(&value).expect("params serialize"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

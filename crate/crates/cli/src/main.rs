use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dualpol_cli::config::RunConfig;
use dualpol_cli::output::load_config_or_manifest;
use dualpol_cli::{analyze, figures, simulate, validate, CliError};
use dualpol_core::protocol::Preset;

#[derive(Parser, Debug)]
#[command(name = "dualpol", version, about = "Dual-band polariton memory simulator")]
struct Cli {
    /// Run configuration or a manifest written by an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    print_default_config: bool,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Spatial grid points.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured scenario.
    Simulate {
        /// Also write an SVG panel.
        #[arg(long)]
        plot: bool,
    },
    /// Dark-mode and group-velocity sweep.
    Analyze,
    /// Render preset panels (all of them when none is given).
    Figures {
        panels: Vec<String>,
        /// Re-render from an existing CSV instead of simulating.
        #[arg(long, value_name = "CSV")]
        from_csv: Option<PathBuf>,
    },
    /// Run the oracle checks.
    Validate,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config_or_manifest(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.samples {
        cfg.solver.samples = n;
    }
    if let Some(n) = cli.grid {
        cfg.medium.spatial_points = n;
    }
    if let Some(r) = cli.rel_tol {
        cfg.solver.rel_tol = r;
    }
    if let Some(w) = cli.workers {
        cfg.solver.workers = w;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.print_default_config {
        print!("{}", RunConfig::default().to_toml());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Validation("no subcommand given (try --help)".into()));
    };
    let mut cfg = load(&cli)?;
    let out = cfg.output.dir.clone();
    match command {
        Command::Simulate { plot } => {
            cfg.output.plot |= *plot;
            let r = simulate::simulate(&cfg, &out, &mut ())?;
            let m = &r.metrics_value;
            println!("wrote {}", r.csv.display());
            println!("leakage              {:.6}", m.leakage);
            println!("retrieval efficiency {:.6} (a)  {:.6} (b)", m.retrieval_efficiency[0], m.retrieval_efficiency[1]);
        }
        Command::Analyze => {
            let (path, s) = analyze::analyze(&cfg, &out)?;
            println!("wrote {} ({} points)", path.display(), s.points.len());
        }
        Command::Figures { panels, from_csv } => {
            if let Some(csv) = from_csv {
                let title = panels.first().cloned().unwrap_or_else(|| {
                    csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "panel".into())
                });
                let svg = out.join(format!("{title}.svg"));
                figures::render_from_csv(csv, &title, &svg)?;
                println!("wrote {}", svg.display());
                return Ok(());
            }
            let list: Vec<Preset> = if panels.is_empty() {
                Preset::ALL.to_vec()
            } else {
                panels
                    .iter()
                    .map(|p| p.parse::<Preset>().map_err(|e| CliError::Validation(format!("figures: {e}"))))
                    .collect::<Result<_, _>>()?
            };
            for p in list {
                let f = figures::render_panel(&cfg, p, &out)?;
                println!("wrote {}", f.svg.display());
            }
        }
        Command::Validate => {
            let checks = validate::run_all(&cfg)?;
            print!("{}", validate::table(&checks));
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass()).map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(CliError::Oracle(format!("failed checks: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use semrelay_core::oracle_baselines::{df_search, oracle_search};
use semrelay_core::sweep::{
    compare, format_compare, run_sweep, write_csv_file, Spacing, SweepSpec,
};
use semrelay_core::{load_config, run, Config, GridSpec, SolveStatus};

/// Joint relay placement and bandwidth allocation for a semantic relay link.
#[derive(Parser)]
#[command(name = "semrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key=value parameter file; missing keys take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the penalty solver at one bandwidth.
    ///
    /// Exit status: 0 converged, 2 infeasible, 3 iteration cap.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Total bandwidth in Hz, overriding the config.
        #[arg(long = "W", value_name = "HZ")]
        w: Option<f64>,
    },
    /// Evaluate every scheme over a bandwidth range and write CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "HZ")]
        w_min: f64,
        #[arg(long, value_name = "HZ")]
        w_max: f64,
        #[arg(long, value_name = "N")]
        points: usize,
        /// Logarithmic spacing (default).
        #[arg(long, conflicts_with = "linear")]
        log: bool,
        #[arg(long)]
        linear: bool,
        /// Points per axis of the 2-D grid searches.
        #[arg(long, value_name = "N", default_value_t = 1001)]
        grid: usize,
        /// Points of the 1-D baseline searches.
        #[arg(long, value_name = "N", default_value_t = 10001)]
        line_grid: usize,
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
    },
    /// Exhaustive grid search for the SemRelay optimum.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long = "W", value_name = "HZ")]
        w: Option<f64>,
        /// Points per axis.
        #[arg(long, value_name = "N", default_value_t = 1001)]
        grid: usize,
    },
    /// Compare all schemes at one bandwidth.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long = "W", value_name = "HZ")]
        w: Option<f64>,
        #[arg(long, value_name = "N", default_value_t = 1001)]
        grid: usize,
        #[arg(long, value_name = "N", default_value_t = 10001)]
        line_grid: usize,
    },
}

fn config_from(common: &Common, w: Option<f64>) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        None => Config::default(),
    };
    if let Some(w) = w {
        cfg.system.bandwidth = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn solve(common: &Common, w: Option<f64>) -> Result<ExitCode> {
    let cfg = config_from(common, w)?;
    let r = run(&cfg.system, &cfg.fit, &cfg.solver, None)?;
    println!("status      {}", r.status.as_str());
    if r.status == SolveStatus::Infeasible {
        println!(
            "no placement and split meets eps_bar = {}",
            cfg.fit.min_similarity
        );
        return Ok(ExitCode::from(2));
    }
    let b = &r.best;
    println!("W           {:e} Hz", cfg.system.bandwidth);
    println!("eta         {:.6e} bit/s", b.eta);
    println!("d_br d_ru   {:.6} {:.6} m", b.d_br, b.d_ru);
    println!("alpha       {:.8} {:.8}", b.alpha_br, b.alpha_ru);
    println!("gamma_br    {:.6} dB", b.gamma_br_db);
    println!("zeta        {:e}", r.zeta);
    println!(
        "iterations  {} outer, {} inner",
        r.outer_iters, r.inner_iters
    );
    Ok(match r.status {
        SolveStatus::Converged => ExitCode::SUCCESS,
        SolveStatus::IterationCap => ExitCode::from(3),
        SolveStatus::Infeasible => ExitCode::from(2),
    })
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { common, w } => solve(&common, w),
        Command::Sweep {
            common,
            w_min,
            w_max,
            points,
            log: _,
            linear,
            grid,
            line_grid,
            out,
        } => {
            let cfg = config_from(&common, None)?;
            let spec = SweepSpec {
                w_min,
                w_max,
                points,
                spacing: if linear {
                    Spacing::Linear
                } else {
                    Spacing::Log
                },
                grid: GridSpec::square(grid),
                line: GridSpec::line(line_grid),
            };
            let rows = run_sweep(&cfg, &spec)?;
            write_csv_file(&rows, &out).with_context(|| format!("writing {}", out.display()))?;
            println!("{} rows written to {}", rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { common, w, grid } => {
            let cfg = config_from(&common, w)?;
            let g = GridSpec::square(grid);
            g.validate()?;
            let df = df_search(&cfg.system, &g);
            match oracle_search(&cfg.system, &cfg.fit, &g) {
                Some(b) => {
                    println!("eta         {:.6e} bit/s", b.eta);
                    println!("d_br d_ru   {:.6} {:.6} m", b.d_br, b.d_ru);
                    println!("alpha       {:.8} {:.8}", b.alpha_br, b.alpha_ru);
                    println!("gamma_br    {:.6} dB", b.gamma_br_db);
                    println!("df eta      {:.6e} bit/s", df.eta);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("status      infeasible");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Compare {
            common,
            w,
            grid,
            line_grid,
        } => {
            let cfg = config_from(&common, w)?;
            let rows = compare(&cfg, &GridSpec::square(grid), &GridSpec::line(line_grid))?;
            print!("{}", format_compare(cfg.system.bandwidth, &rows));
            Ok(ExitCode::SUCCESS)
        }
    }
}

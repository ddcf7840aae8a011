use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use csflow_core::curve::{diameter, polyline_length, projection_geometry, roundness, ClosedCurve, DEFAULT_C_FLOOR};
use csflow_core::predicates::{
    convexity_check, horizontal_directions, mu_count, sign_change_count, slope_profile, sturm_directions,
    vertical_tangent_gap, MILNOR_DIRECTIONS,
};
use csflow_core::zoo::{ZooSpec, CATALOGUE};
use csflow_lab::run::plot_run;
use csflow_lab::{execute_run, parse_config, report, LabError, Result};

#[derive(Parser)]
#[command(name = "csflow", version, about = "Curve shortening flow lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Overrides `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List or emit the named curve families.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Evaluate the predicates on one snapshot.
    Check {
        snapshot: PathBuf,
        /// Also the slope profile, Sturm and Milnor counts.
        #[arg(long)]
        all: bool,
    },
    /// Print the verdict table of a run directory.
    Report { out_dir: PathBuf },
    /// Redraw the plots of a run directory from its frames.
    Plot {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 4)]
        frames: usize,
    },
}

#[derive(Subcommand)]
enum ZooAction {
    List,
    Emit {
        family: String,
        /// `name=value`, repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// Snapshot path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<bool> {
    let text = fs::read_to_string(config).map_err(|e| LabError::io(config, e))?;
    let mut cfg =
        parse_config(&text).map_err(|e| LabError::Usage(format!("{}: {e}", config.display())))?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    let outcome = execute_run(&cfg)?;
    print!("{}", report(&cfg.output.dir)?);
    Ok(!outcome.verdicts.any_failure())
}

fn zoo_list() {
    for f in CATALOGUE {
        println!("{:<28} {}", f.name, f.doc);
        for p in f.params {
            println!("    {:<10} = {:<8} {}", p.name, p.default, p.doc);
        }
    }
}

fn zoo_emit(family: &str, params: Vec<(String, f64)>, n: usize, out: Option<PathBuf>) -> Result<()> {
    let spec = params.into_iter().fold(ZooSpec::new(family, n), |s, (k, v)| s.with(&k, v));
    let json = spec.build()?.to_json();
    match out {
        Some(path) => fs::write(&path, json + "\n").map_err(|e| LabError::io(path, e)),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn check(path: &Path, all: bool) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let curve = ClosedCurve::from_json(&text)?;
    let v = convexity_check(&curve)?;
    let pg = projection_geometry(&curve, DEFAULT_C_FLOOR)?;
    println!("dim {} samples {}", curve.dim(), curve.len());
    println!("length {:.12e}", polyline_length(&curve));
    println!("diameter {:.12e}", diameter(&curve));
    println!("min_c {:.12e}", v.min_c);
    println!("min_kbar {:.12e}", v.min_kbar);
    println!("winding_number {}", pg.winding_number());
    println!("vertical_tangent_gap {:.12e}", vertical_tangent_gap(&curve)?);
    println!(
        "simple {} convex {} strictly_convex {} uniformly_convex {}",
        v.simple, v.convex, v.strictly_convex, v.uniformly_convex
    );
    if !all {
        return Ok(());
    }
    match roundness(&curve.project_xy()) {
        Ok(r) => println!("roundness {r:.12e}"),
        Err(e) => println!("roundness n/a ({e})"),
    }
    let mu_max = horizontal_directions(curve.dim(), MILNOR_DIRECTIONS)
        .iter()
        .map(|d| mu_count(&curve, d))
        .collect::<csflow_core::Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    println!("max_milnor_count {mu_max}");
    let changes = sturm_directions(curve.dim())
        .iter()
        .map(|d| sign_change_count(&curve, d).map(|c| c.to_string()))
        .collect::<csflow_core::Result<Vec<_>>>()?;
    println!("sign_changes {}", changes.join(" "));
    if curve.dim() >= 3 {
        for i in 0..curve.dim() - 2 {
            let s = slope_profile(&curve.project_xyz(i)?, 200_000)?;
            println!(
                "slopes xyz{i}: tangent {:.6e} secant {:.6e} osculating {} triple {:.6e}",
                s.s_tangent_max,
                s.s_secant_max,
                s.s_osculating_max.map_or("n/a".to_string(), |x| format!("{x:.6e}")),
                s.delta_triple
            );
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Zoo { action: ZooAction::List } => {
            zoo_list();
            Ok(true)
        }
        Command::Zoo { action: ZooAction::Emit { family, params, n, out } } => zoo_emit(&family, params, n, out).map(|_| true),
        Command::Check { snapshot, all } => check(&snapshot, all).map(|_| true),
        Command::Report { out_dir } => {
            print!("{}", report(&out_dir)?);
            Ok(true)
        }
        Command::Plot { out_dir, frames } => plot_run(&out_dir, frames).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

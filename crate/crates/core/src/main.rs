use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edarof::harness::{
    csv_row, run_drof, run_single, run_sweep, write_csv, write_plot, Preset, RunConfig, CSV_HEADER,
    CSV_VERSION,
};
use edarof::Error;

#[derive(Parser)]
#[command(
    name = "edarof",
    version,
    about = "Elastic digital-analog radio-over-fiber simulator"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Frame-size preset applied after the configuration file.
    #[arg(long, global = true, value_parser = ["desk", "paper"])]
    preset: Option<String>,
    /// Switch one link impairment, e.g. `--toggle phase_noise=off`. Repeatable.
    #[arg(long = "toggle", global = true, value_name = "NAME=on|off")]
    toggles: Vec<String>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep 1/eta over a grid and write CSV.
    Sweep {
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Two-column plot data destination.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Run points one after another.
        #[arg(long)]
        serial: bool,
    },
    /// One end-to-end run at the given 1/eta.
    Single {
        #[arg(long = "inv-eta")]
        inv_eta: f64,
    },
    /// Digital-only run of order M over the converters-only link.
    Drof {
        #[arg(long)]
        order: Option<usize>,
    },
    /// Print the effective configuration as TOML.
    Config,
}

fn parse_toggle(spec: &str) -> Result<(&str, bool), Error> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("toggle {spec:?} is not NAME=on|off")))?;
    let on = match value {
        "on" | "true" | "1" => true,
        "off" | "false" | "0" => false,
        _ => {
            return Err(Error::Config(format!(
                "toggle value {value:?} is not on|off"
            )))
        }
    };
    Ok((name, on))
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.apply_preset(p.parse::<Preset>()?);
    }
    for t in &cli.toggles {
        let (name, on) = parse_toggle(t)?;
        cfg.link.impairments.set(name, on)?;
        cfg.drof.impairments.set(name, on)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Sweep {
        start,
        stop,
        step,
        out,
        plot,
        ..
    } = &cli.command
    {
        if let Some(v) = start {
            cfg.sweep.start = *v;
        }
        if let Some(v) = stop {
            cfg.sweep.stop = *v;
        }
        if let Some(v) = step {
            cfg.sweep.step = *v;
        }
        if out.is_some() {
            cfg.output.csv = out.clone();
        }
        if plot.is_some() {
            cfg.output.plot = plot.clone();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn open(path: &Option<PathBuf>) -> std::io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn print_record(r: &edarof::harness::SweepRecord) {
    println!("{CSV_VERSION}");
    println!("{CSV_HEADER}");
    println!("{}", csv_row(r));
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Sweep { serial, .. } => {
            let outcome = run_sweep(&cfg, !serial);
            let mut w = open(&cfg.output.csv)?;
            write_csv(&mut w, &outcome)?;
            w.flush()?;
            if cfg.output.plot.is_some() {
                let mut p = open(&cfg.output.plot)?;
                write_plot(&mut p, &outcome)?;
                p.flush()?;
            }
            for f in outcome.failures() {
                eprintln!("point inv_eta={} failed: {}", f.inv_eta, f.error);
            }
            let clean = outcome.failures().next().is_none();
            Ok(clean)
        }
        Command::Single { inv_eta } => {
            if !(*inv_eta >= 1.0 && inv_eta.is_finite()) {
                return Err(Error::Config(format!("--inv-eta {inv_eta} must be >= 1")));
            }
            print_record(&run_single(&cfg, *inv_eta)?);
            Ok(true)
        }
        Command::Drof { order } => {
            let m = order.unwrap_or(cfg.drof.order);
            if m == 0 {
                return Err(Error::Config("--order must be at least 1".into()));
            }
            print_record(&run_drof(&cfg, m)?);
            Ok(true)
        }
        Command::Config => {
            print!("{}", cfg.to_toml_string());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

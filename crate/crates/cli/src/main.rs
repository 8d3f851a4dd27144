//! Command-line driver for ring absorption points, sweeps, optimizations and
//! figure tables.

mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ringabs_core::closedform::OptimumMethod;
use ringabs_core::runner::{
    evaluate_point, figure, maximize_sigma, mode_table, sweep, AxisSpec, FigureOptions,
    MaximizeConfig, Model, Quantity, SweepConfig, FIGURES,
};
use ringabs_core::table::{Cell, SweepTable, ValueKind};
use ringabs_core::Detuning;

use config::{parse_detuning, rates_from, temperature_from, FileConfig, Physics};
use error::CliError;
use output::{emit_csv, emit_heatmap, number};

#[derive(Debug, Parser)]
#[command(
    name = "ringabs",
    version,
    about = "Steady-state absorption of dipole-coupled emitter rings"
)]
struct Cli {
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (capped by RINGABS_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one parameter point.
    Point {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Also write the point as a one-row CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a model over a 1-D or 2-D grid and write a CSV.
    Sweep {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// First axis, name:log|lin:min:max:points (outer loop).
        #[arg(long)]
        axis1: Option<AxisSpec>,
        /// Optional second axis.
        #[arg(long)]
        axis2: Option<AxisSpec>,
        /// Table name used for the default output file.
        #[arg(long)]
        name: Option<String>,
        /// Output CSV path (default <name>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG heatmap next to the CSV.
        #[arg(long)]
        svg: bool,
    },
    /// Write the tables behind a named figure.
    Figure {
        /// Figure name, or "all".
        name: String,
        /// Output directory (default: current directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Points per axis of the heatmap grids.
        #[arg(long)]
        points: Option<usize>,
        /// Also write SVG heatmaps for two-axis tables.
        #[arg(long)]
        svg: bool,
        /// Trap rate over the bright rate for the (N, betaJ) map.
        #[arg(long)]
        fig3_gamma_t_norm: Option<f64>,
        /// Thermal width over the bright rate for the (N, betaJ) map.
        #[arg(long)]
        fig3_gamma_bth_norm: Option<f64>,
    },
    /// Print the spin-wave spectrum of a ring.
    Modes {
        /// Number of emitters.
        #[arg(long = "n")]
        n_emitters: Option<usize>,
        /// Nearest-neighbour spacing in units of lambda0.
        #[arg(long = "d")]
        spacing: Option<f64>,
        /// Idealized small-ring spectrum instead of the full dipole sums.
        #[arg(long)]
        dicke: bool,
        /// Write the spectrum to a CSV file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize sigma_abs over the trap rate and the dephasing rate.
    Optimize {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Trap-rate search range over the bright rate, lo:hi.
        #[arg(long, value_parser = parse_bounds)]
        gamma_t_bounds: Option<(f64, f64)>,
        /// Dephasing search range over the bright rate, lo:hi.
        #[arg(long, value_parser = parse_bounds)]
        dephasing_bounds: Option<(f64, f64)>,
        /// Points per axis of the coarse search grid.
        #[arg(long)]
        coarse_points: Option<usize>,
        /// Also write the optimum as a one-row CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
struct PhysicsArgs {
    /// single-atom, dicke-local, dicke-thermal, finite-thermal,
    /// incoherent-local or incoherent-thermal.
    #[arg(long)]
    model: Option<Model>,
    /// absorption or ratio.
    #[arg(long)]
    quantity: Option<Quantity>,
    /// Number of emitters.
    #[arg(long = "n")]
    n_emitters: Option<usize>,
    /// Nearest-neighbour spacing in units of lambda0.
    #[arg(long = "d")]
    spacing: Option<f64>,
    /// Trap rate in Gamma0.
    #[arg(long)]
    gamma_t: Option<f64>,
    /// Trap rate over the bright-mode radiative rate.
    #[arg(long)]
    gamma_t_norm: Option<f64>,
    /// Local dephasing rate in Gamma0.
    #[arg(long)]
    gamma_d: Option<f64>,
    /// Local dephasing rate over the bright-mode radiative rate.
    #[arg(long)]
    gamma_d_norm: Option<f64>,
    /// Thermal width of the bright mode in Gamma0.
    #[arg(long)]
    gamma_bth: Option<f64>,
    /// Thermal width of the bright mode over its radiative rate.
    #[arg(long)]
    gamma_bth_norm: Option<f64>,
    /// Ohmic bath slope.
    #[arg(long)]
    fbar: Option<f64>,
    /// Inverse temperature times the band coefficient J (inf for zero temperature).
    #[arg(long)]
    beta_j: Option<f64>,
    /// Inverse temperature in units of 1/Gamma0.
    #[arg(long)]
    beta_gamma0: Option<f64>,
    /// Coherent drive Rabi frequency in Gamma0.
    #[arg(long)]
    rabi: Option<f64>,
    /// A number in units of Gamma0, or "resonant".
    #[arg(long, value_parser = parse_detuning)]
    detuning: Option<Detuning>,
    /// Incoherent pump intensity.
    #[arg(long)]
    intensity: Option<f64>,
    /// Mean photon number of the incoherent pump.
    #[arg(long)]
    mean_photons: Option<f64>,
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("bounds '{s}' must look like lo:hi"))?;
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| format!("'{x}' is not a number"))
    };
    Ok((num(a)?, num(b)?))
}

impl PhysicsArgs {
    fn physics(&self) -> Result<Physics, CliError> {
        let (gamma_t, dephasing) = rates_from(
            self.gamma_t,
            self.gamma_t_norm,
            self.gamma_d,
            self.gamma_d_norm,
            self.gamma_bth,
            self.gamma_bth_norm,
            self.fbar,
        )?;
        Ok(Physics {
            model: self.model,
            quantity: self.quantity,
            n_emitters: self.n_emitters,
            spacing: self.spacing,
            gamma_t,
            dephasing,
            temperature: temperature_from(self.beta_j, self.beta_gamma0)?,
            rabi: self.rabi,
            detuning: self.detuning,
            intensity: self.intensity,
            mean_photons: self.mean_photons,
        })
    }
}

fn thread_cap(requested: Option<usize>) -> Result<Option<usize>, CliError> {
    let cap = match std::env::var("RINGABS_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| {
                    CliError::Usage(format!("RINGABS_THREADS='{v}' is not a positive integer"))
                })?,
        ),
        Err(_) => None,
    };
    if requested == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(match (requested, cap) {
        (Some(r), Some(c)) => Some(r.min(c)),
        (r, c) => r.or(c),
    })
}

fn value_label(model: Model, quantity: Quantity) -> &'static str {
    match (quantity, model.is_incoherent()) {
        (Quantity::IndependentRatio, _) => "sigma_abs/(N sigma_abs_1at)",
        (Quantity::Absorption, true) => "sigma_abs_inc/sigma",
        (Quantity::Absorption, false) => "sigma_abs/sigma",
    }
}

/// Six significant digits.
fn short(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-3..6).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    }
}

fn write_outputs(table: &SweepTable, csv: &Path, svg: bool) -> Result<(), CliError> {
    emit_csv(table, csv)?;
    println!("wrote {}", csv.display());
    if svg && table.grid.is_some() {
        let path = csv.with_extension("svg");
        emit_heatmap(table, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };
    let threads = thread_cap(cli.threads.or(file.threads))?;
    let merged = |args: &PhysicsArgs| -> Result<(Model, Quantity, ringabs_core::runner::PointParams), CliError> {
        args.physics()?.over(file.physics()?).resolve()
    };
    let out_dir = file
        .output
        .dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));

    match cli.command {
        Command::Point { physics, out } => {
            let (model, quantity, params) = merged(&physics)?;
            let r = evaluate_point(model, quantity, &params)?;
            println!("{} = {}", value_label(model, quantity), short(r.value));
            if let Some(path) = out.or(file.output.path.clone()) {
                let mut t = SweepTable::new(
                    "point",
                    &["gamma_t", "dephasing", "bright_rate"],
                    quantity.name(),
                    ValueKind::Other,
                );
                t.meta("model", model)
                    .meta("quantity", quantity.name())
                    .meta("n_emitters", params.n_emitters)
                    .meta("spacing", params.spacing)
                    .meta("gamma_t", params.gamma_t)
                    .meta("dephasing", params.dephasing)
                    .meta("temperature", params.temperature)
                    .meta("version", ringabs_core::runner::VERSION);
                t.push(
                    vec![r.gamma_t, r.dephasing, r.bright_rate],
                    Cell::Value(r.value),
                );
                write_outputs(&t, &path, false)?;
            }
        }
        Command::Sweep {
            physics,
            axis1,
            axis2,
            name,
            out,
            svg,
        } => {
            let (model, quantity, params) = merged(&physics)?;
            let (f1, f2) = file.axes()?;
            let axis1 = axis1
                .or(f1)
                .ok_or_else(|| CliError::Usage("sweep needs --axis1 (or [sweep] axis1)".into()))?;
            let name = name
                .or(file.sweep.name.clone())
                .unwrap_or_else(|| "sweep".into());
            let table = sweep(&SweepConfig {
                name: name.clone(),
                model,
                quantity,
                base: params,
                axis1,
                axis2: axis2.or(f2),
                threads,
            })?;
            let path = out
                .or(file.output.path.clone())
                .unwrap_or_else(|| out_dir.join(format!("{name}.csv")));
            write_outputs(&table, &path, svg || file.output.svg.unwrap_or(false))?;
        }
        Command::Figure {
            name,
            out_dir: dir,
            points,
            svg,
            fig3_gamma_t_norm,
            fig3_gamma_bth_norm,
        } => {
            if !FIGURES.contains(&name.as_str()) {
                return Err(CliError::Usage(format!(
                    "unknown figure '{name}' (expected one of {})",
                    FIGURES.join(", ")
                )));
            }
            let defaults = FigureOptions::default();
            let opts = FigureOptions {
                points: points.or(file.figure.points).unwrap_or(defaults.points),
                threads,
                fig3_rates: (
                    fig3_gamma_t_norm
                        .or(file.figure.fig3_gamma_t_norm)
                        .unwrap_or(defaults.fig3_rates.0),
                    fig3_gamma_bth_norm
                        .or(file.figure.fig3_gamma_bth_norm)
                        .unwrap_or(defaults.fig3_rates.1),
                ),
            };
            if opts.points < 2 {
                return Err(CliError::Usage("--points must be at least 2".into()));
            }
            let dir = dir.unwrap_or(out_dir);
            let svg = svg || file.output.svg.unwrap_or(false);
            for table in figure(&name, &opts)? {
                write_outputs(&table, &dir.join(format!("{}.csv", table.name)), svg)?;
            }
        }
        Command::Modes {
            n_emitters,
            spacing,
            dicke,
            out,
        } => {
            let n = n_emitters.or(file.ring.n_emitters).unwrap_or(10);
            let d = spacing.or(file.ring.spacing).unwrap_or(0.1);
            let tables = mode_table(n, d, dicke)?;
            let csv = modes_csv(&tables);
            match out.or(file.output.path.clone()) {
                Some(path) => {
                    std::fs::write(&path, csv).map_err(|e| {
                        CliError::Io(format!("cannot write {}: {e}", path.display()))
                    })?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
        }
        Command::Optimize {
            physics,
            gamma_t_bounds,
            dephasing_bounds,
            coarse_points,
            out,
        } => {
            let (model, _, params) = merged(&physics)?;
            let mut cfg = MaximizeConfig::new(model, params);
            if let Some(b) = gamma_t_bounds.or(file.optimize.gamma_t_bounds.map(|[a, b]| (a, b))) {
                cfg.gamma_t_bounds = b;
            }
            if let Some(b) =
                dephasing_bounds.or(file.optimize.dephasing_bounds.map(|[a, b]| (a, b)))
            {
                cfg.dephasing_bounds = b;
            }
            if let Some(k) = coarse_points.or(file.optimize.coarse_points) {
                cfg.coarse_points = k;
            }
            cfg.threads = threads;
            let report = maximize_sigma(&cfg)?;
            println!(
                "{} = {}",
                value_label(model, Quantity::Absorption),
                short(report.value)
            );
            for (k, v) in &report.argmax {
                println!("{k} = {}", short(*v));
            }
            println!("boundary = {}", report.boundary);
            println!("degenerate = {}", report.degenerate);
            let method = match report.method {
                OptimumMethod::ClosedForm => "closed-form",
                OptimumMethod::GridRefine => "grid-refine",
            };
            println!("method = {method}");
            if let Some(path) = out.or(file.output.path.clone()) {
                let keys: Vec<&str> = report.argmax.iter().map(|(k, _)| k.as_str()).collect();
                let mut t =
                    SweepTable::new("optimum", &keys, "sigma_abs_over_sigma", ValueKind::Other);
                t.meta("model", model)
                    .meta("n_emitters", params.n_emitters)
                    .meta("spacing", params.spacing)
                    .meta("temperature", params.temperature)
                    .meta("gamma_t_norm_bounds", format!("{:?}", cfg.gamma_t_bounds))
                    .meta(
                        "dephasing_norm_bounds",
                        format!("{:?}", cfg.dephasing_bounds),
                    )
                    .meta("boundary", report.boundary)
                    .meta("degenerate", report.degenerate)
                    .meta("method", method)
                    .meta("version", ringabs_core::runner::VERSION);
                t.push(
                    report.argmax.iter().map(|(_, v)| *v).collect(),
                    Cell::Value(report.value),
                );
                write_outputs(&t, &path, false)?;
            }
        }
    }
    Ok(())
}

/// The mode tables side by side: m, shift, rate, drive weight.
fn modes_csv(tables: &[SweepTable]) -> String {
    let mut out = String::new();
    out.push_str(output::UNITS_LINE);
    out.push('\n');
    if let Some(first) = tables.first() {
        for (k, v) in &first.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
    }
    let columns: Vec<&str> = tables.iter().map(|t| t.value_column.as_str()).collect();
    out.push_str(&format!("m,{}\n", columns.join(",")));
    let rows = tables.first().map_or(0, |t| t.rows.len());
    for i in 0..rows {
        let m = tables[0].rows[i].keys[0];
        let values: Vec<String> = tables
            .iter()
            .map(|t| match &t.rows[i].value {
                Cell::Value(v) => number(*v),
                Cell::Divergent(_) => output::DIVERGENT.to_string(),
            })
            .collect();
        out.push_str(&format!("{},{}\n", m as i64, values.join(",")));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

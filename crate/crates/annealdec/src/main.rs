//! Command-line experiment harness. Each verb reads a flat key = value
//! config, runs its experiment family, writes the canonical CSV to --out,
//! and derives an SVG plot next to it. `fit` post-processes an existing
//! CSV into fit parameters instead of running trials.

use annealdec::bench::{
    fit_loglog_exponent, fit_power_law, read_csv, records_to_csv, run_demo,
    run_ground_state_stats, run_scaling, run_threshold, scaling_points, summarize,
    threshold_bracket, CellSummary, ExperimentSpec, FitKind, FitSpec, ResultRecord,
    SCHEMA_VERSION,
};
use annealdec::bench::plot;
use annealdec::{build_lattice, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "annealdec", version, about = "Planar surface-code decoding experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decoder effort vs problem size over a (d, p) grid
    Scaling(RunArgs),
    /// Logical error rates over an error-rate sweep, with threshold bracket
    Threshold(RunArgs),
    /// Decode one instance and render the lattice
    Demo(RunArgs),
    /// Ground-state-proxy statistics per cell
    #[command(name = "ground-stats")]
    GroundStats(RunArgs),
    /// Fit a scaling exponent or error-rate power law to an existing CSV
    Fit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (flat key = value text)
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output path: results CSV, or the fit report for `fit`.
    /// Plot verbs also write an .svg sibling.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Scaling(a) => run_experiment(a, Verb::Scaling),
        Cmd::Threshold(a) => run_experiment(a, Verb::Threshold),
        Cmd::Demo(a) => run_experiment(a, Verb::Demo),
        Cmd::GroundStats(a) => run_experiment(a, Verb::GroundStats),
        Cmd::Fit(a) => run_fit(a),
    }
}

enum Verb {
    Scaling,
    Threshold,
    Demo,
    GroundStats,
}

fn load_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut spec = ExperimentSpec::from_text(&text)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
        spec.anneal.seed = seed;
    }
    Ok(spec)
}

fn write_outputs(out: &Path, records: &[ResultRecord], svg: &str) -> Result<()> {
    std::fs::write(out, records_to_csv(records))?;
    let svg_path = out.with_extension("svg");
    std::fs::write(&svg_path, svg)?;
    println!("wrote {} rows to {} and plot to {}", records.len(), out.display(), svg_path.display());
    Ok(())
}

fn run_experiment(args: RunArgs, verb: Verb) -> Result<()> {
    let spec = load_spec(&args)?;
    match verb {
        Verb::Scaling => {
            let records = run_scaling(&spec)?;
            let cells = summarize(&records);
            report_scaling(&spec, &cells);
            write_outputs(&args.out, &records, &plot::scaling_plot(&cells))
        }
        Verb::Threshold => {
            let records = run_threshold(&spec)?;
            let cells = summarize(&records);
            report_threshold(&spec, &cells);
            write_outputs(&args.out, &records, &plot::threshold_plot(&cells))
        }
        Verb::GroundStats => {
            let records = run_ground_state_stats(&spec)?;
            let cells = summarize(&records);
            report_ground_stats(&cells);
            write_outputs(&args.out, &records, &plot::ground_stats_plot(&cells))
        }
        Verb::Demo => {
            let (records, artifacts) = run_demo(&spec)?;
            for r in &records {
                println!(
                    "demo d={} p={} method={} trial={}: syndrome_satisfied={} logical_error={} weight={} iterations={}",
                    r.d,
                    r.p,
                    r.method,
                    r.trial,
                    r.syndrome_satisfied,
                    r.logical_error,
                    artifacts
                        .estimates
                        .iter()
                        .find(|(m, _)| *m == r.method)
                        .map(|(_, e)| e.weight().to_string())
                        .unwrap_or_else(|| "-".into()),
                    r.iterations,
                );
            }
            let lat = build_lattice(artifacts.d)?;
            write_outputs(&args.out, &records, &plot::demo_plot(&lat, &artifacts))
        }
    }
}

fn report_scaling(spec: &ExperimentSpec, cells: &[CellSummary]) {
    for &method in &spec.methods {
        for &p in &spec.error_rates {
            let points = scaling_points(cells, method, p);
            match fit_loglog_exponent(&points) {
                Ok((exponent, intercept)) => println!(
                    "scaling method={method} p={p}: exponent={exponent:.4} intercept={intercept:.4} over {} sizes",
                    points.len()
                ),
                Err(e) => println!("scaling method={method} p={p}: fit skipped ({e})"),
            }
        }
    }
}

fn report_threshold(spec: &ExperimentSpec, cells: &[CellSummary]) {
    for c in cells {
        println!(
            "threshold method={} d={} p={}: P_L={:.4} se={:.4} ({} trials)",
            c.method, c.d, c.p, c.logical_rate, c.logical_se, c.trials
        );
    }
    for &method in &spec.methods {
        match threshold_bracket(cells, method) {
            Some((lo, hi)) => println!("threshold bracket method={method}: [{lo}, {hi}]"),
            None => println!("threshold bracket method={method}: no curve crossing in sweep"),
        }
    }
}

fn report_ground_stats(cells: &[CellSummary]) {
    for c in cells {
        let fmt = |v: Option<f64>| v.map(|m| format!("{m:.1}")).unwrap_or_else(|| "-".into());
        println!(
            "ground-stats method={} d={} p={}: proxy={:.4} se={:.4} iters(proxy)={} iters(excited)={}",
            c.method,
            c.d,
            c.p,
            c.proxy_rate,
            c.proxy_se,
            fmt(c.mean_iterations_proxy),
            fmt(c.mean_iterations_excited),
        );
    }
}

fn run_fit(args: RunArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let spec = FitSpec::from_text(&text)?;
    let records = read_csv(&spec.input)?;
    let rows: Vec<ResultRecord> =
        records.into_iter().filter(|r| r.method == spec.method).collect();
    let cells = summarize(&rows);

    let mut report = format!("schema_version = {SCHEMA_VERSION}\n");
    match spec.kind {
        FitKind::Loglog => {
            let p = spec.error_rate.expect("validated at parse time");
            let points = scaling_points(&cells, spec.method, p);
            let (exponent, intercept) = fit_loglog_exponent(&points)?;
            report.push_str(&format!(
                "fit = loglog\ninput = {}\nmethod = {}\nerror_rate = {}\npoints = {}\nexponent = {:.6}\nintercept = {:.6}\n",
                spec.input.display(),
                spec.method,
                p,
                points.len(),
                exponent,
                intercept
            ));
        }
        FitKind::PowerLaw => {
            let window: Vec<(usize, f64, f64)> = cells
                .iter()
                .filter(|c| c.p >= spec.p_min && c.p <= spec.p_max && c.logical_rate > 0.0)
                .map(|c| (c.d, c.p, c.logical_rate))
                .collect();
            let (c1, c2) = fit_power_law(&window, spec.p_th)?;
            report.push_str(&format!(
                "fit = power-law\ninput = {}\nmethod = {}\np_th = {}\nwindow = {}..{}\ncells = {}\nc1 = {:.6}\nc2 = {:.6}\n",
                spec.input.display(),
                spec.method,
                spec.p_th,
                spec.p_min,
                spec.p_max,
                window.len(),
                c1,
                c2
            ));
        }
    }
    std::fs::write(&args.out, &report)?;
    print!("{report}");
    println!("wrote fit report to {}", args.out.display());
    Ok(())
}

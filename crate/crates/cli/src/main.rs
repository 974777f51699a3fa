//! `toric-renorm`: decode edge lists, run the threshold experiment, and drive
//! the adversarial and reduced-weight analyses.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use toric_renorm::adversarial::{
    find_ablation_witness, fractal_error, radius_1d, radius_2d, u_k, v_k, verify_bounds, Ablation, RadiusReport,
    VerifyOptions,
};
use toric_renorm::channel::{grid, p_range, run_experiment};
use toric_renorm::decoder::{decode_with_trace, residual_class};
use toric_renorm::io::{
    bounds_report_to_json, radius_report_to_json, read_edge_list_file, trace_to_json, write_bounds_table,
    write_edge_list, write_file, write_lemma4_csv, write_results_csv, RunManifest,
};
use toric_renorm::lattice::{syndrome, TorusLevel};
use toric_renorm::reduced_weight::{lemma4_samples, PathMeasure};
use toric_renorm::Error;

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "toric-renorm", version, about = "Renormalisation decoder for the toric code")]
struct Cli {
    /// Worker threads; 0 uses one per core. Never changes output bytes.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decode one error given as an edge list.
    Decode {
        #[arg(long)]
        k: u32,
        /// Edge-list file, one `H x y` or `V x y` per line.
        #[arg(long)]
        error: PathBuf,
        /// Write the stage-by-stage trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte Carlo failure rates over a (k, p) grid.
    Simulate {
        /// Levels, e.g. `4,5,6` or `4..6`.
        #[arg(long, default_value = "4,5,6")]
        k: String,
        /// Flip rates as `start:end:step`, both ends included.
        #[arg(long, default_value = "0.035:0.055:0.005")]
        p: String,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the fractal worst-case error.
    Fractal {
        /// Levels, e.g. `6` or `1..12`.
        #[arg(long)]
        k: String,
        /// Decode it and confirm the failure.
        #[arg(long)]
        verify: bool,
        /// Write the edge list (single level only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search for the error-correcting radius.
    Radius {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Levels, e.g. `3` or `1..4`.
        #[arg(long)]
        k: String,
        /// Largest weight tried in 2-D mode.
        #[arg(long, default_value_t = 2)]
        w_max: u32,
        /// Write the reports as a JSON array.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lightest error the decoder gets wrong with one step removed.
    Ablation {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum)]
        skip: Step,
        #[arg(long, default_value_t = 2)]
        max_weight: u32,
    },
    /// Reduced-weight growth along the decoder's stages on random errors.
    Lemma4 {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 0.04)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Measure::Distance)]
        path_measure: Measure,
        /// Per-sample CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the radius bounds for a range of levels.
    VerifyBounds {
        #[arg(long, default_value = "1..12")]
        k_range: String,
        /// Random errors per level when enumeration is too large.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Step {
    Step1,
    Step2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Measure {
    Distance,
    Homologous,
}

impl From<Measure> for PathMeasure {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Distance => PathMeasure::Distance,
            Measure::Homologous => PathMeasure::Homologous,
        }
    }
}

/// Parses `a..b` (inclusive) or a comma list.
fn parse_levels(s: &str) -> Result<Vec<u32>> {
    let ks: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().with_context(|| format!("bad level range `{s}`"))?;
        let b: u32 = b.trim().trim_start_matches('=').parse().with_context(|| format!("bad level range `{s}`"))?;
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().with_context(|| format!("bad level `{t}`")))
            .collect::<Result<_>>()?
    };
    if ks.is_empty() {
        bail!("no levels in `{s}`");
    }
    for &k in &ks {
        TorusLevel::new(k)?;
    }
    Ok(ks)
}

fn parse_p_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}` in `{s}`"));
    let ps = match parts.as_slice() {
        [single] => p_range(num(single)?, num(single)?, 0.0)?,
        [a, b, step] => p_range(num(a)?, num(b)?, num(step)?)?,
        _ => bail!("expected `start:end:step`, got `{s}`"),
    };
    Ok(ps)
}

/// The command line as recorded in manifests, without `--threads`.
fn recorded_command() -> String {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--threads" {
            args.next();
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    std::iter::once("toric-renorm".to_string()).chain(out).collect::<Vec<_>>().join(" ")
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, contents).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_decode(k: u32, error: &Path, trace_path: Option<&Path>) -> Result<bool> {
    let level = TorusLevel::new(k)?;
    let e = read_edge_list_file(error, level).with_context(|| format!("reading {}", error.display()))?;
    let s = syndrome(&e);
    let trace = decode_with_trace(&s)?;
    let correction = trace.correction();
    let class = residual_class(level, &e.to_vec())?;
    println!("syndrome size: {}", s.len());
    println!("error weight: {}", e.weight());
    println!("correction weight: {}", correction.weight());
    println!("residual class: {class}");
    println!("verdict: {}", if class.is_trivial() { "SUCCESS" } else { "FAIL" });
    if let Some(path) = trace_path {
        write_file(path, &trace_to_json(&trace))?;
    }
    Ok(true)
}

fn cmd_simulate(k: &str, p: &str, trials: u64, seed: u64, out: Option<&PathBuf>) -> Result<bool> {
    let ks = parse_levels(k)?;
    let ps = parse_p_range(p)?;
    let results = run_experiment(&grid(&ks, &ps, trials), seed)?;
    let manifest = RunManifest::new(recorded_command(), seed, format!("k={k} p={p} trials={trials}"));
    emit(out.map(PathBuf::as_path), &write_results_csv(&results, &manifest))?;
    Ok(true)
}

fn cmd_fractal(k: &str, verify: bool, out: Option<&PathBuf>) -> Result<bool> {
    let ks = parse_levels(k)?;
    if out.is_some() && ks.len() != 1 {
        bail!("--out needs a single level");
    }
    let mut ok = true;
    for k in ks {
        let level = TorusLevel::new(k)?;
        let e = fractal_error(k)?;
        let mut line = format!("k={k} weight={} u_k={}", e.weight(), u_k(k));
        if verify {
            let class = residual_class(level, &e.to_vec())?;
            let confirmed = !class.is_trivial() && e.weight() as u64 == u_k(k);
            ok &= confirmed;
            line.push_str(&format!(
                " residual={class} verdict={}",
                if confirmed { "FAIL confirmed" } else { "NOT confirmed" }
            ));
        }
        println!("{line}");
        if let Some(path) = out {
            write_file(path, &write_edge_list(&e))?;
        }
    }
    Ok(ok)
}

fn print_radius(r: &RadiusReport) {
    let bound = if r.is_exact() { "=" } else { ">=" };
    let witness = r
        .witness
        .as_ref()
        .map(|w| w.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
        .unwrap_or_else(|| "none".into());
    println!(
        "k={} mode={} omega{bound}{} witness_weight={} witness=[{witness}] patterns={}",
        r.k,
        r.mode,
        r.omega,
        r.witness.as_ref().map_or(0, Vec::len),
        r.patterns_checked
    );
}

fn cmd_radius(mode: Mode, k: &str, w_max: u32, out: Option<&PathBuf>) -> Result<bool> {
    let mut reports = Vec::new();
    for k in parse_levels(k)? {
        let report = match mode {
            Mode::OneD => radius_1d(k),
            Mode::TwoD => radius_2d(k, w_max),
        };
        match report {
            Ok(r) => {
                print_radius(&r);
                reports.push(r);
            }
            Err(e @ Error::SearchBudgetExceeded { .. }) => {
                eprintln!("k={k}: {e}");
                if let Some(path) = out {
                    write_radius_reports(path, &reports)?;
                }
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(path) = out {
        write_radius_reports(path, &reports)?;
    }
    Ok(true)
}

fn write_radius_reports(path: &Path, reports: &[RadiusReport]) -> Result<()> {
    let items: Vec<String> = reports.iter().map(radius_report_to_json).collect();
    write_file(path, &format!("[{}]\n", items.join(",")))?;
    Ok(())
}

fn cmd_ablation(k: u32, skip: Step, max_weight: u32) -> Result<bool> {
    let level = TorusLevel::new(k)?;
    let ablation = match skip {
        Step::Step1 => Ablation::STEP1,
        Step::Step2 => Ablation::STEP2,
    };
    match find_ablation_witness(k, ablation, max_weight)? {
        Some(w) => {
            let full = residual_class(level, &w)?;
            let listed = w.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
            println!("skip={ablation} k={k} witness_weight={} witness=[{listed}]", w.len());
            println!(
                "full decoder: residual={full} {}",
                if full.is_trivial() { "corrected" } else { "also fails" }
            );
            Ok(true)
        }
        None => {
            println!("skip={ablation} k={k}: no failure up to weight {max_weight}");
            Ok(false)
        }
    }
}

fn cmd_lemma4(k: u32, samples: u64, p: f64, seed: u64, measure: Measure, out: Option<&PathBuf>) -> Result<bool> {
    let results = lemma4_samples(k, p, samples, seed, measure.into())?;
    let flagged_samples = results.iter().filter(|s| !s.report.flagged.is_empty()).count();
    let flagged_stages: usize = results.iter().map(|s| s.report.flagged.len()).sum();
    let min_ratio = results.iter().filter_map(|s| s.report.min_ratio).reduce(f64::min);
    println!(
        "k={k} p={p} samples={samples} measure={measure:?} flagged_stages={flagged_stages} flagged_samples={flagged_samples} min_ratio={}",
        min_ratio.map(|r| format!("{r:.6}")).unwrap_or_else(|| "-".into())
    );
    if let Some(path) = out {
        let rows: Vec<(u64, &_)> = results.iter().map(|s| (s.index, &s.report)).collect();
        let manifest = RunManifest::new(
            recorded_command(),
            seed,
            format!("k={k} p={p} samples={samples} measure={measure:?}"),
        );
        write_file(path, &write_lemma4_csv(&rows, &manifest))?;
    }
    Ok(flagged_stages == 0)
}

fn cmd_verify_bounds(k_range: &str, samples: u64, seed: u64, out: Option<&PathBuf>) -> Result<bool> {
    let ks = parse_levels(k_range)?;
    let opts = VerifyOptions {
        samples,
        seed,
        ..VerifyOptions::default()
    };
    let report = verify_bounds(&ks, &opts)?;
    print!("{}", write_bounds_table(&report));
    for r in &report.rows {
        println!(
            "k={} lower bound ceil({:.6})-1={}: {}; falsifications: {}",
            r.k,
            v_k(r.k).as_f64(),
            r.certified_lower,
            r.lower_method,
            r.falsifications.len()
        );
    }
    if let Some(path) = out {
        write_file(path, &bounds_report_to_json(&report))?;
    }
    let falsified = report.is_falsified();
    println!("verdict: {}", if falsified { "FALSIFIED" } else { "consistent" });
    Ok(!falsified)
}

fn run(cli: Cli) -> Result<bool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("starting the worker pool")?;
    match &cli.command {
        Command::Decode { k, error, trace } => cmd_decode(*k, error, trace.as_deref()),
        Command::Simulate {
            k,
            p,
            trials,
            seed,
            out,
        } => cmd_simulate(k, p, *trials, *seed, out.as_ref()),
        Command::Fractal { k, verify, out } => cmd_fractal(k, *verify, out.as_ref()),
        Command::Radius { mode, k, w_max, out } => cmd_radius(*mode, k, *w_max, out.as_ref()),
        Command::Ablation { k, skip, max_weight } => cmd_ablation(*k, *skip, *max_weight),
        Command::Lemma4 {
            k,
            samples,
            p,
            seed,
            path_measure,
            out,
        } => cmd_lemma4(*k, *samples, *p, *seed, *path_measure, out.as_ref()),
        Command::VerifyBounds {
            k_range,
            samples,
            seed,
            out,
        } => cmd_verify_bounds(k_range, *samples, *seed, out.as_ref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("4,5,6").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_levels("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_levels("2..=3").unwrap(), vec![2, 3]);
        assert!(parse_levels("0").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn flip_rate_ranges() {
        assert_eq!(parse_p_range("0:0:1").unwrap(), vec![0.0]);
        assert_eq!(parse_p_range("0.1").unwrap(), vec![0.1]);
        assert_eq!(parse_p_range("0.035:0.055:0.005").unwrap().len(), 5);
        assert!(parse_p_range("0.1:0.2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

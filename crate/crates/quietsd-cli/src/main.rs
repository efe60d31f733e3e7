//! `quietsd`: batch driver exposing the quantization and dynamics
//! experiments as subcommands that emit CSV plus a JSON summary.

mod output;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use quietsd_core::analysis::{
    default_sweep_tone, error_sweep, spectrum, tornado_sweep, CellClass, MapFamily, SweepOptions,
    SweepQuantizer, Window,
};
use quietsd_core::dynamics::{in_trapping_set, iterate_orbit, MapSpec, PlanePoint};
use quietsd_core::fir::{quantize_coefficients, CoefficientSet};
use quietsd_core::schemes::{run, verify_difference_relation, SchemeConfig, SchemeState, Variant};
use quietsd_core::signal::BandlimitedSignal;

use output::{fmt_f, read_column_csv, read_trace_column, write_csv, write_json};

#[derive(Parser)]
#[command(
    name = "quietsd",
    version,
    about = "Quiet sigma-delta quantization experiments"
)]
struct Cli {
    /// Seed for any randomized inputs; fixed seed means byte-identical outputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for sweep subcommands (default: QUIETSD_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sigma-delta recursion over samples and dump the full trace.
    Quantize(QuantizeArgs),
    /// Reconstruct a function from a quantized trace column.
    Reconstruct(ReconstructArgs),
    /// Sup-error reconstruction sweep over oversampling ratios with a slope fit.
    ErrorSweep(ErrorSweepArgs),
    /// Iterate a zero-input map and record the orbit.
    Orbit(OrbitArgs),
    /// Classify convergence/periodicity over a (rho, u0) grid.
    Tornado(TornadoArgs),
    /// DFT magnitude spectrum of a trace column.
    Spectrum(SpectrumArgs),
    /// Quantize FIR coefficients to three levels with the quiet shaper.
    Fir(FirArgs),
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long, default_value = "standard", value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long)]
    rho: Option<f64>,
    /// Derive the damping factor as 1 - 1/lambda.
    #[arg(long, conflicts_with = "rho")]
    rho_from_lambda: bool,
    /// Oversampling ratio (required with --signal-json or --rho-from-lambda).
    #[arg(long)]
    lambda: Option<f64>,
    /// JSON file with a bandlimited signal to sample.
    #[arg(long, conflicts_with_all = ["zero_input", "random_uniform"])]
    signal_json: Option<PathBuf>,
    /// Drive the recursion with all-zero input.
    #[arg(long, conflicts_with = "random_uniform")]
    zero_input: bool,
    /// Drive with seeded i.i.d. samples uniform on [-A, A].
    #[arg(long, value_name = "A")]
    random_uniform: Option<f64>,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    u0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v0: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Trace CSV produced by the quantize subcommand.
    #[arg(long)]
    trace_csv: PathBuf,
    /// Trace column holding the coefficients: q or f.
    #[arg(long, default_value = "q")]
    column: String,
    /// Oversampling ratio of the trace.
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 1e-6)]
    tail_tol: f64,
    /// Evaluation interval start (defaults to the burn-in margin).
    #[arg(long)]
    t_start: Option<f64>,
    /// Evaluation interval length past the start.
    #[arg(long, default_value_t = 10.0)]
    window: f64,
    #[arg(long, default_value_t = 161)]
    grid_points: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct ErrorSweepArgs {
    /// Comma-separated oversampling ratios, strictly increasing.
    #[arg(long, default_value = "32,64,128,256")]
    lambdas: String,
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long, default_value = "standard", value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long)]
    rho: Option<f64>,
    /// Derive the damping factor as 1 - 1/lambda at each ratio (default for
    /// leaky/quiet when --rho is absent).
    #[arg(long, conflicts_with = "rho")]
    rho_from_lambda: bool,
    /// Sweep the raw samples through unquantized (baseline).
    #[arg(long)]
    unquantized: bool,
    #[arg(long)]
    signal_json: Option<PathBuf>,
    /// Skip simulation and fit a provided `lambda,sup_error` CSV.
    #[arg(long)]
    errors_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 1e-6)]
    tail_tol: f64,
    #[arg(long, default_value_t = 10.0)]
    window: f64,
    #[arg(long, default_value_t = 161)]
    grid_points: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    /// Map kind: T, M, three_region, four_level.
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.99)]
    rho: f64,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    rho1: f64,
    #[arg(long, default_value_t = 1.0)]
    rho2: f64,
    #[arg(long, default_value_t = 1.0)]
    delta1: f64,
    #[arg(long, default_value_t = 0.99)]
    delta2: f64,
    #[arg(long, allow_negative_numbers = true)]
    u0: f64,
    #[arg(long, allow_negative_numbers = true)]
    v0: f64,
    /// Defaults to ceil(200/(1-rho)) for damped maps, 100000 otherwise.
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    conv_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    period_horizon: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct TornadoArgs {
    /// Map family: leaky (damp every step) or asymmetric.
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Damping grid as lo:hi (inclusive).
    #[arg(long, default_value = "0.96:0.999", allow_hyphen_values = true)]
    rho_range: String,
    /// Initial-u grid as lo:hi (inclusive).
    #[arg(long, default_value = "-2:0", allow_hyphen_values = true)]
    u0_range: String,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 50)]
    cells: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v0: f64,
    #[arg(long, default_value_t = 100_000)]
    settle: usize,
    #[arg(long, default_value_t = 100_000)]
    persist: usize,
    #[arg(long, default_value_t = 100)]
    max_period: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Trace CSV produced by the quantize subcommand.
    #[arg(long)]
    trace_csv: PathBuf,
    /// Oversampling ratio of the trace (sample spacing is 1/lambda).
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value = "rect", value_parser = parse_window)]
    window: Window,
    /// Trace column to transform: q, f, u, or v.
    #[arg(long, default_value = "q")]
    column: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct FirArgs {
    /// Coefficients, one per line.
    #[arg(long, conflicts_with = "coeffs_json")]
    coeffs_csv: Option<PathBuf>,
    /// Coefficients as a JSON array.
    #[arg(long)]
    coeffs_json: Option<PathBuf>,
    #[arg(long, default_value_t = 0.999)]
    rho: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Scaled-coefficient bound; the scale is max|c|/alpha.
    #[arg(long, default_value_t = 0.8)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-9)]
    tail_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    tail_cap: usize,
    #[arg(long)]
    out: PathBuf,
    /// Metadata JSON path (defaults next to --out).
    #[arg(long)]
    meta_json: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    match s {
        "standard" => Ok(Variant::Standard),
        "leaky" => Ok(Variant::Leaky),
        "quiet" => Ok(Variant::Quiet),
        other => Err(format!("unknown variant '{other}' (standard|leaky|quiet)")),
    }
}

fn parse_window(s: &str) -> Result<Window, String> {
    match s {
        "rect" | "rectangular" => Ok(Window::Rectangular),
        "hann" => Ok(Window::Hann),
        other => Err(format!("unknown window '{other}' (rect|hann)")),
    }
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("range '{text}' must look like lo:hi"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad range bound '{lo}'"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad range bound '{hi}'"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        bail!("range '{text}' must be finite with lo <= hi");
    }
    Ok((lo, hi))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn summary_path(out: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| out.with_extension("json"))
}

fn load_signal(path: &PathBuf) -> Result<BandlimitedSignal> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading signal spec {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing signal spec {}", path.display()))
}

fn main() {
    let cli = Cli::parse();
    let jobs = cli.jobs.or_else(|| {
        std::env::var("QUIETSD_JOBS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: could not configure {n} worker threads: {e}");
            std::process::exit(1);
        }
    }
    let result = match cli.command {
        Command::Quantize(args) => cmd_quantize(args, cli.seed),
        Command::Reconstruct(args) => cmd_reconstruct(args, cli.seed),
        Command::ErrorSweep(args) => cmd_error_sweep(args, cli.seed),
        Command::Orbit(args) => cmd_orbit(args, cli.seed),
        Command::Tornado(args) => cmd_tornado(args, cli.seed),
        Command::Spectrum(args) => cmd_spectrum(args, cli.seed),
        Command::Fir(args) => cmd_fir(args, cli.seed),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_quantize(args: QuantizeArgs, seed: u64) -> Result<()> {
    let cfg = if args.rho_from_lambda {
        SchemeConfig::with_rho_from_lambda(args.order, args.variant, args.gamma)?
            .resolved(args.lambda)?
    } else {
        SchemeConfig::new(
            args.order,
            args.variant,
            args.gamma,
            args.rho.unwrap_or(0.0),
        )?
    };

    let samples: Vec<f64> = if let Some(path) = &args.signal_json {
        let signal = load_signal(path)?;
        let lambda = args
            .lambda
            .ok_or_else(|| anyhow!("--signal-json requires --lambda"))?;
        quietsd_core::signal::sample(&signal, lambda, args.n)?.values
    } else if let Some(alpha) = args.random_uniform {
        if !(0.0 < alpha && alpha < 1.0) {
            bail!("--random-uniform bound must lie in (0, 1), got {alpha}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..args.n).map(|_| rng.gen_range(-alpha..=alpha)).collect()
    } else if args.zero_input {
        vec![0.0; args.n]
    } else {
        bail!("choose an input: --signal-json, --zero-input, or --random-uniform");
    };

    let trace = run(&samples, &cfg, SchemeState::new(args.u0, args.v0))?;
    let residual = verify_difference_relation(&trace, cfg.order())?;
    let (max_u, max_v) =
        quietsd_core::analysis::boundedness_stats(&trace).unwrap_or((args.u0.abs(), args.v0.abs()));

    write_csv(
        &args.out,
        "n,f,q,u,v,rho",
        (0..trace.len()).map(|i| {
            format!(
                "{},{},{},{},{},{}",
                i + 1,
                fmt_f(trace.f[i]),
                trace.q[i],
                fmt_f(trace.u[i]),
                fmt_f(trace.v[i]),
                fmt_f(trace.rho_applied[i])
            )
        }),
    )?;

    let final_state = trace.final_state();
    write_json(
        &summary_path(&args.out, &args.summary_json),
        &json!({
            "order": cfg.order(),
            "variant": cfg.variant().to_string(),
            "gamma": cfg.gamma(),
            "rho": if cfg.variant() == Variant::Standard { 1.0 } else { cfg.rho() },
            "n": trace.len(),
            "seed": seed,
            "max_abs_u": max_u,
            "max_abs_v": max_v,
            "difference_relation_residual": residual,
            "nonzero_outputs": trace.q.iter().filter(|&&q| q != 0).count(),
            "final_u": final_state.u,
            "final_v": final_state.v,
        }),
    )?;
    Ok(())
}


fn cmd_reconstruct(args: ReconstructArgs, seed: u64) -> Result<()> {
    let values = read_trace_column(&args.trace_csv, &args.column)?;
    let kernel = quietsd_core::signal::ReconstructionKernel::new(args.lambda0, args.tail_tol)?;
    let half = kernel.truncation_halfwidth();
    let t_start = args.t_start.unwrap_or(half + 1.0);
    let grid =
        quietsd_core::signal::TimeGrid::new(t_start, t_start + args.window, args.grid_points, half)?;
    let recon = quietsd_core::signal::reconstruct(&values, 1, args.lambda, &kernel, &grid)?;

    write_csv(
        &args.out,
        "t,value",
        grid.points()
            .iter()
            .zip(&recon)
            .map(|(&t, &v)| format!("{},{}", fmt_f(t), fmt_f(v))),
    )?;
    let max_abs = recon.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    write_json(
        &summary_path(&args.out, &args.summary_json),
        &json!({
            "column": args.column,
            "seed": seed,
            "lambda": args.lambda,
            "lambda0": args.lambda0,
            "burn_in_margin": half,
            "t_start": t_start,
            "t_end": t_start + args.window,
            "grid_points": args.grid_points,
            "max_abs_value": max_abs,
        }),
    )?;
    Ok(())
}

fn cmd_error_sweep(args: ErrorSweepArgs, seed: u64) -> Result<()> {
    if let Some(path) = &args.errors_csv {
        let rows = read_column_csv(path, &["lambda", "sup_error"])?;
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
        let (lambdas, errors): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        let curve = quietsd_core::analysis::ErrorCurve::new(lambdas, errors)?;
        return write_sweep_outputs(&args, seed, &curve, "fit-only");
    }

    let lambdas: Vec<f64> = args
        .lambdas
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad lambda '{s}'"))
        })
        .collect::<Result<_>>()?;
    let signal = match &args.signal_json {
        Some(path) => load_signal(path)?,
        None => default_sweep_tone(),
    };
    let quantizer = if args.unquantized {
        SweepQuantizer::Unquantized
    } else if args.rho_from_lambda
        || (args.rho.is_none() && matches!(args.variant, Variant::Leaky | Variant::Quiet))
    {
        SweepQuantizer::Scheme(SchemeConfig::with_rho_from_lambda(
            args.order,
            args.variant,
            args.gamma,
        )?)
    } else {
        SweepQuantizer::Scheme(SchemeConfig::new(
            args.order,
            args.variant,
            args.gamma,
            args.rho.unwrap_or(0.0),
        )?)
    };
    let opts = SweepOptions {
        kernel_lambda0: args.lambda0,
        kernel_tail_tolerance: args.tail_tol,
        window_length: args.window,
        grid_points: args.grid_points,
    };
    let curve = error_sweep(&signal, &quantizer, &lambdas, &opts)?;
    let label = if args.unquantized {
        "unquantized".to_string()
    } else {
        format!("order {} {}", args.order, args.variant)
    };
    write_sweep_outputs(&args, seed, &curve, &label)
}

fn write_sweep_outputs(
    args: &ErrorSweepArgs,
    seed: u64,
    curve: &quietsd_core::analysis::ErrorCurve,
    scheme: &str,
) -> Result<()> {
    write_csv(
        &args.out,
        "lambda,sup_error",
        curve
            .lambdas
            .iter()
            .zip(&curve.sup_errors)
            .map(|(&l, &e)| format!("{},{}", fmt_f(l), fmt_f(e))),
    )?;
    write_json(
        &summary_path(&args.out, &args.summary_json),
        &json!({
            "scheme": scheme,
            "seed": seed,
            "lambdas": curve.lambdas,
            "sup_errors": curve.sup_errors,
            "fitted_slope": curve.fitted_slope,
            "fit_residual": curve.fit_residual,
        }),
    )?;
    Ok(())
}

fn cmd_orbit(args: OrbitArgs, seed: u64) -> Result<()> {
    let map = match args.map.as_str() {
        "T" => MapSpec::t(args.gamma)?,
        "M" => MapSpec::m(args.gamma, args.rho)?,
        "three_region" | "three-region" => MapSpec::three_region(args.gamma, args.rho, args.tau)?,
        "four_level" | "four-level" => {
            MapSpec::four_level(args.gamma, args.rho1, args.rho2, args.delta1, args.delta2)?
        }
        other => bail!("unknown map '{other}' (T|M|three_region|four_level)"),
    };
    let max_iters = args.max_iters.unwrap_or(match map {
        MapSpec::T { .. } => 100_000,
        MapSpec::M { rho, .. } | MapSpec::ThreeRegion { rho, .. } => {
            (200.0 / (1.0 - rho)).ceil() as usize
        }
        MapSpec::FourLevel { .. } => 100_000,
    });
    let record = iterate_orbit(
        PlanePoint::new(args.u0, args.v0),
        &map,
        max_iters,
        args.conv_tol,
        args.period_horizon,
    )?;

    let gamma = map.gamma();
    write_csv(
        &args.out,
        "n,u,v,q,in_S",
        (0..record.points.len()).map(|i| {
            let p = record.points[i];
            let q = record.q.get(i).map(|&q| q.to_string()).unwrap_or_default();
            format!(
                "{},{},{},{},{}",
                i,
                fmt_f(p.u),
                fmt_f(p.v),
                q,
                u8::from(in_trapping_set(p, gamma))
            )
        }),
    )?;
    write_json(
        &summary_path(&args.out, &args.summary_json),
        &json!({
            "map": map,
            "seed": seed,
            "steps": record.q.len(),
            "entered_s_at": record.entered_s_at,
            "converged_at": record.converged_at,
            "period": record.period,
        }),
    )?;
    Ok(())
}

fn cmd_tornado(args: TornadoArgs, seed: u64) -> Result<()> {
    let family = match args.map.as_str() {
        "leaky" | "uniform" => MapFamily::UniformlyDamped,
        "asymmetric" | "asym" => MapFamily::Asymmetric,
        other => bail!("unknown map family '{other}' (leaky|asymmetric)"),
    };
    if args.cells == 0 {
        bail!("--cells must be positive");
    }
    let (rho_lo, rho_hi) = parse_range(&args.rho_range)?;
    let (u0_lo, u0_hi) = parse_range(&args.u0_range)?;
    let rhos = linspace(rho_lo, rho_hi, args.cells);
    let u0s = linspace(u0_lo, u0_hi, args.cells);
    let grid = tornado_sweep(
        family,
        args.gamma,
        &rhos,
        &u0s,
        args.v0,
        args.settle,
        args.persist,
        args.max_period,
    )?;

    let mut rows = Vec::with_capacity(grid.cells.len());
    for (i, &rho) in grid.rho_values.iter().enumerate() {
        for (j, &u0) in grid.u0_values.iter().enumerate() {
            let (class, period) = match grid.cell(i, j) {
                CellClass::Converged => ("converged", String::new()),
                CellClass::Periodic(p) => ("periodic", p.to_string()),
                CellClass::Undecided => ("undecided", String::new()),
            };
            rows.push(format!("{},{},{class},{period}", fmt_f(rho), fmt_f(u0)));
        }
    }
    write_csv(&args.out, "rho,u0,class,period", rows.into_iter())?;
    write_json(
        &summary_path(&args.out, &args.summary_json),
        &json!({
            "family": family,
            "gamma": args.gamma,
            "seed": seed,
            "cells": grid.cells.len(),
            "converged": grid.count(|c| matches!(c, CellClass::Converged)),
            "periodic": grid.count(|c| matches!(c, CellClass::Periodic(_))),
            "undecided": grid.count(|c| matches!(c, CellClass::Undecided)),
        }),
    )?;
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs, seed: u64) -> Result<()> {
    let values = read_trace_column(&args.trace_csv, &args.column)?;
    if args.lambda <= 0.0 || !args.lambda.is_finite() {
        bail!("--lambda must be positive, got {}", args.lambda);
    }
    let spec = spectrum(&values, 1.0 / args.lambda, args.window)?;
    let (peak_freq, peak_mag) = spec
        .iter()
        .copied()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap_or((0.0, 0.0));
    write_csv(
        &args.out,
        "freq,magnitude",
        spec.iter()
            .map(|&(f, m)| format!("{},{}", fmt_f(f), fmt_f(m))),
    )?;
    write_json(
        &summary_path(&args.out, &args.summary_json),
        &json!({
            "column": args.column,
            "seed": seed,
            "n": values.len(),
            "window": match args.window { Window::Rectangular => "rect", Window::Hann => "hann" },
            "peak_freq": peak_freq,
            "peak_magnitude": peak_mag,
        }),
    )?;
    Ok(())
}

fn cmd_fir(args: FirArgs, seed: u64) -> Result<()> {
    let coeffs: Vec<f64> = if let Some(path) = &args.coeffs_csv {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading coefficients {}", path.display()))?;
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.parse::<f64>()
                    .with_context(|| format!("bad coefficient '{l}'"))
            })
            .collect::<Result<_>>()?
    } else if let Some(path) = &args.coeffs_json {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading coefficients {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing coefficient array {}", path.display()))?
    } else {
        bail!("provide coefficients via --coeffs-csv or --coeffs-json");
    };
    if coeffs.is_empty() {
        bail!("coefficient set is empty");
    }

    let set = CoefficientSet::with_alpha(coeffs, args.alpha)?;
    let cfg = SchemeConfig::new(2, Variant::Quiet, args.gamma, args.rho)?;
    let out = quantize_coefficients(&set, &cfg, args.tail_tol, args.tail_cap)?;

    write_csv(
        &args.out,
        "j,q",
        out.q
            .iter()
            .enumerate()
            .map(|(j, &q)| format!("{},{q}", j + 1)),
    )?;
    write_json(
        &summary_path(&args.out, &args.meta_json),
        &json!({
            "scale": out.scale,
            "rho": out.rho,
            "gamma": out.gamma,
            "seed": seed,
            "alpha": args.alpha,
            "input_length": out.input_length,
            "output_length": out.q.len(),
            "tail_length": out.tail_length,
        }),
    )?;
    Ok(())
}

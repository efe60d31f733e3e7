//! Error measurement, order-of-accuracy fitting, spectra, and the basin
//! classification sweep over (damping, initial condition) grids.

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    apply_damped_t, apply_m, detect_period, PlanePoint, DEFAULT_CONV_TOL, OVERFLOW_LIMIT,
};
use crate::error::{Error, Result};
use crate::schemes::{run, RunTrace, SchemeConfig, SchemeState};
use crate::signal::{reconstruct, sample, BandlimitedSignal, ReconstructionKernel, TimeGrid};

/// Sup-norm reconstruction errors over a ladder of oversampling ratios,
/// together with the fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub lambdas: Vec<f64>,
    pub sup_errors: Vec<f64>,
    pub fitted_slope: f64,
    pub fit_residual: f64,
}

impl ErrorCurve {
    pub fn new(lambdas: Vec<f64>, sup_errors: Vec<f64>) -> Result<Self> {
        if lambdas.len() != sup_errors.len() {
            return Err(Error::LengthMismatch(format!(
                "{} lambdas vs {} errors",
                lambdas.len(),
                sup_errors.len()
            )));
        }
        if !lambdas.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "lambdas must be strictly increasing".into(),
            ));
        }
        let points: Vec<(f64, f64)> = lambdas
            .iter()
            .copied()
            .zip(sup_errors.iter().copied())
            .collect();
        let (fitted_slope, fit_residual) = fit_order_slope(&points)?;
        Ok(Self {
            lambdas,
            sup_errors,
            fitted_slope,
            fit_residual,
        })
    }
}

/// Least-squares slope of `log e` against `log lambda`, plus the RMS fit
/// residual in log space. Needs at least three points, all errors positive.
pub fn fit_order_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(l, e)| l <= 0.0 || e <= 0.0) {
        return Err(Error::InvalidParameter(
            "slope fit needs positive abscissas and errors".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(l, e)| (l.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &logs {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "slope fit needs at least two distinct lambdas".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = logs
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok((slope, (ss / n).sqrt()))
}

/// Max absolute deviation between the signal and a reconstruction over the
/// grid points (the grid already excludes the burn-in interval).
pub fn sup_error(f: &BandlimitedSignal, recon: &[f64], grid: &TimeGrid) -> Result<f64> {
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::EmptyInput("empty evaluation grid".into()));
    }
    if points.len() != recon.len() {
        return Err(Error::LengthMismatch(format!(
            "{} grid points vs {} reconstruction values",
            points.len(),
            recon.len()
        )));
    }
    Ok(points
        .iter()
        .zip(recon)
        .map(|(&t, &r)| (f.eval(t) - r).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hann,
}

/// Two-sided DFT magnitude of the (optionally windowed) sequence, as
/// `(frequency, magnitude)` pairs sorted by frequency, with frequencies in
/// cycles per unit time given the spacing between samples.
pub fn spectrum(samples: &[f64], sample_spacing: f64, window: Window) -> Result<Vec<(f64, f64)>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "spectrum needs at least 2 samples, got {n}"
        )));
    }
    if !sample_spacing.is_finite() || sample_spacing <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sample spacing must be positive, got {sample_spacing}"
        )));
    }
    let mut buffer: Vec<Complex<f64>> = match window {
        Window::Rectangular => samples.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        Window::Hann => samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
                Complex::new(x * w, 0.0)
            })
            .collect(),
    };
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buffer);

    let df = 1.0 / (n as f64 * sample_spacing);
    let mut out: Vec<(f64, f64)> = buffer
        .iter()
        .enumerate()
        .map(|(k, value)| {
            let signed = if k <= n / 2 {
                k as i64
            } else {
                k as i64 - n as i64
            };
            (signed as f64 * df, value.norm())
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

/// What produces the coefficients fed to the reconstruction in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SweepQuantizer {
    /// Feed the raw samples through (quantization-free baseline).
    Unquantized,
    /// Run the samples through the given recursion.
    Scheme(SchemeConfig),
}

/// Knobs for [`error_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub kernel_lambda0: f64,
    pub kernel_tail_tolerance: f64,
    /// Length of the evaluation interval past the burn-in.
    pub window_length: f64,
    pub grid_points: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            kernel_lambda0: 2.0,
            kernel_tail_tolerance: 1e-6,
            window_length: 10.0,
            grid_points: 161,
        }
    }
}

/// The single tone used by sweeps when no signal is supplied.
pub fn default_sweep_tone() -> BandlimitedSignal {
    BandlimitedSignal::tone(0.5, 0.2, 0.0).expect("in-band tone")
}

/// Measure the sup-norm interior reconstruction error at each oversampling
/// ratio and fit the decay order. A from-lambda damping policy is resolved
/// per ratio.
pub fn error_sweep(
    signal: &BandlimitedSignal,
    quantizer: &SweepQuantizer,
    lambdas: &[f64],
    opts: &SweepOptions,
) -> Result<ErrorCurve> {
    if lambdas.is_empty() {
        return Err(Error::EmptyInput("no oversampling ratios".into()));
    }
    let errors: Result<Vec<f64>> = lambdas
        .par_iter()
        .map(|&lambda| single_sweep_error(signal, quantizer, lambda, opts))
        .collect();
    ErrorCurve::new(lambdas.to_vec(), errors?)
}

fn single_sweep_error(
    signal: &BandlimitedSignal,
    quantizer: &SweepQuantizer,
    lambda: f64,
    opts: &SweepOptions,
) -> Result<f64> {
    let kernel = ReconstructionKernel::new(opts.kernel_lambda0, opts.kernel_tail_tolerance)?;
    let half = kernel.truncation_halfwidth();
    let t_start = half + 1.0;
    let t_end = t_start + opts.window_length;
    let grid = TimeGrid::new(t_start, t_end, opts.grid_points, half)?;
    let n_samples = ((t_end + half) * lambda).ceil() as usize + 1;
    let samples = sample(signal, lambda, n_samples)?;
    let coefficients: Vec<f64> = match quantizer {
        SweepQuantizer::Unquantized => samples.values.clone(),
        SweepQuantizer::Scheme(cfg) => {
            let resolved = cfg.resolved(Some(lambda))?;
            let trace = run(&samples.values, &resolved, SchemeState::default())?;
            trace.q.iter().map(|&q| q as f64).collect()
        }
    };
    let recon = reconstruct(&coefficients, samples.start_index, lambda, &kernel, &grid)?;
    sup_error(signal, &recon, &grid)
}

/// The two map families contrasted by the basin sweep: damping applied at
/// every step, or only on the half plane `u >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFamily {
    UniformlyDamped,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "class", content = "period")]
pub enum CellClass {
    Converged,
    Periodic(usize),
    Undecided,
}

/// Classification of every (rho, u0) cell of a sweep grid, row-major with
/// the damping index outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TornadoGrid {
    pub rho_values: Vec<f64>,
    pub u0_values: Vec<f64>,
    pub cells: Vec<CellClass>,
}

impl TornadoGrid {
    pub fn cell(&self, rho_idx: usize, u0_idx: usize) -> CellClass {
        self.cells[rho_idx * self.u0_values.len() + u0_idx]
    }

    pub fn count(&self, pred: impl Fn(&CellClass) -> bool) -> usize {
        self.cells.iter().filter(|c| pred(c)).count()
    }
}

/// For each grid cell, iterate the map for `settle` steps, then classify the
/// next `persist` output symbols: convergence of the state is checked first,
/// then a repeating nonzero cycle of length at most `max_period`.
///
/// Cells evaluate independently; the result is ordered by grid index no
/// matter how the work is scheduled.
#[allow(clippy::too_many_arguments)]
pub fn tornado_sweep(
    family: MapFamily,
    gamma: f64,
    rho_values: &[f64],
    u0_values: &[f64],
    v0: f64,
    settle: usize,
    persist: usize,
    max_period: usize,
) -> Result<TornadoGrid> {
    if rho_values.is_empty() || u0_values.is_empty() {
        return Err(Error::EmptyInput("empty sweep grid".into()));
    }
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be >= 1, got {gamma}"
        )));
    }
    for &rho in rho_values {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!(
                "rho grid value {rho} outside [0, 1)"
            )));
        }
    }

    let n_u = u0_values.len();
    let cells: Vec<CellClass> = (0..rho_values.len() * n_u)
        .into_par_iter()
        .map(|idx| {
            let rho = rho_values[idx / n_u];
            let u0 = u0_values[idx % n_u];
            let x0 = PlanePoint::new(u0, v0);
            match family {
                MapFamily::UniformlyDamped => classify_cell(
                    |x| apply_damped_t(x, gamma, rho),
                    x0,
                    settle,
                    persist,
                    max_period,
                ),
                MapFamily::Asymmetric => {
                    classify_cell(|x| apply_m(x, gamma, rho), x0, settle, persist, max_period)
                }
            }
        })
        .collect();

    Ok(TornadoGrid {
        rho_values: rho_values.to_vec(),
        u0_values: u0_values.to_vec(),
        cells,
    })
}

fn classify_cell(
    step: impl Fn(PlanePoint) -> (PlanePoint, i8),
    x0: PlanePoint,
    settle: usize,
    persist: usize,
    max_period: usize,
) -> CellClass {
    let mut x = x0;
    for _ in 0..settle {
        if x.norm_inf() < DEFAULT_CONV_TOL {
            return CellClass::Converged;
        }
        if !x.is_finite() || x.norm_inf() > OVERFLOW_LIMIT {
            return CellClass::Undecided;
        }
        x = step(x).0;
    }
    let mut symbols = Vec::with_capacity(persist);
    for _ in 0..persist {
        if x.norm_inf() < DEFAULT_CONV_TOL {
            return CellClass::Converged;
        }
        if !x.is_finite() || x.norm_inf() > OVERFLOW_LIMIT {
            return CellClass::Undecided;
        }
        let (next, q) = step(x);
        symbols.push(q);
        x = next;
    }
    match detect_period(&symbols, max_period, 0, symbols.len()) {
        Some((p, true)) => CellClass::Periodic(p),
        _ if x.norm_inf() < DEFAULT_CONV_TOL => CellClass::Converged,
        _ => CellClass::Undecided,
    }
}

/// Running maxima of |u| and |v| over a trace.
pub fn boundedness_stats(trace: &RunTrace) -> Result<(f64, f64)> {
    if trace.is_empty() {
        return Err(Error::EmptyInput("empty trace".into()));
    }
    let max_u = trace.u.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let max_v = trace.v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    Ok((max_u, max_v))
}

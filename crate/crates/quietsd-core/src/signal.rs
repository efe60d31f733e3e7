//! Bandlimited test signals, sampling, and reconstruction through a
//! raised-cosine averaging kernel.
//!
//! The kernel has a flat unit passband on [-1/2, 1/2], a squared-cosine
//! roll-off that vanishes at `lambda0/2`, and the closed time-domain form
//!
//! ```text
//! g(t) = (1/T) * sinc(t/T) * cos(pi*beta*t/T) / (1 - (2*beta*t/T)^2)
//! ```
//!
//! with `T = 2/(1 + lambda0)` and `beta = (lambda0 - 1)/(lambda0 + 1)`.
//! It decays like `t^-3`, so the kernel and its first two derivatives are
//! absolutely integrable, which is what second-order error estimates need.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One cosine term `a * cos(2*pi*f*t + phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneTerm {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// A finite trigonometric sum with all frequencies strictly inside the unit
/// band and total amplitude at most `amplitude_bound < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal")]
pub struct BandlimitedSignal {
    terms: Vec<ToneTerm>,
    amplitude_bound: f64,
}

#[derive(Deserialize)]
struct RawSignal {
    terms: Vec<ToneTerm>,
    amplitude_bound: f64,
}

impl TryFrom<RawSignal> for BandlimitedSignal {
    type Error = Error;

    fn try_from(raw: RawSignal) -> Result<Self> {
        BandlimitedSignal::new(raw.terms, raw.amplitude_bound)
    }
}

impl BandlimitedSignal {
    pub fn new(terms: Vec<ToneTerm>, amplitude_bound: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude_bound) {
            return Err(Error::InvalidParameter(format!(
                "amplitude bound must lie in [0, 1), got {amplitude_bound}"
            )));
        }
        let mut total = 0.0;
        for term in &terms {
            if !term.frequency.is_finite() || term.frequency.abs() >= 0.5 {
                return Err(Error::InvalidParameter(format!(
                    "frequency {} outside the open band (-1/2, 1/2)",
                    term.frequency
                )));
            }
            if !term.amplitude.is_finite() || !term.phase.is_finite() {
                return Err(Error::InvalidParameter("non-finite term".into()));
            }
            total += term.amplitude.abs();
        }
        if total > amplitude_bound {
            return Err(Error::InvalidParameter(format!(
                "total amplitude {total} exceeds the bound {amplitude_bound}"
            )));
        }
        Ok(Self {
            terms,
            amplitude_bound,
        })
    }

    /// Single tone `a * cos(2*pi*f*t + phi)` with bound equal to `|a|`.
    pub fn tone(amplitude: f64, frequency: f64, phase: f64) -> Result<Self> {
        Self::new(
            vec![ToneTerm {
                amplitude,
                frequency,
                phase,
            }],
            amplitude.abs(),
        )
    }

    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            amplitude_bound: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.amplitude * (2.0 * PI * term.frequency * t + term.phase).cos())
            .sum()
    }

    pub fn terms(&self) -> &[ToneTerm] {
        &self.terms
    }

    pub fn amplitude_bound(&self) -> f64 {
        self.amplitude_bound
    }
}

/// Raised-cosine averaging kernel, truncated where its absolute tail
/// integral falls below `tail_tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionKernel {
    lambda0: f64,
    rolloff: f64,
    time_scale: f64,
    truncation_halfwidth: f64,
    tail_tolerance: f64,
}

/// Threshold below which the removable singularities of the closed form are
/// evaluated by their limit values.
const SINGULARITY_EPS: f64 = 1e-8;

impl ReconstructionKernel {
    pub fn new(lambda0: f64, tail_tolerance: f64) -> Result<Self> {
        if !lambda0.is_finite() || lambda0 <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "stopband parameter lambda0 must exceed 1, got {lambda0}"
            )));
        }
        if !tail_tolerance.is_finite() || tail_tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must be positive, got {tail_tolerance}"
            )));
        }
        let rolloff = (lambda0 - 1.0) / (lambda0 + 1.0);
        let time_scale = 2.0 / (1.0 + lambda0);
        // |g(t)| <= (a^2/pi) / (t (t^2 - a^2)) for t > a := T/(2 beta), so the
        // two-sided tail beyond x integrates to (1/pi) ln(x^2 / (x^2 - a^2)).
        let a = time_scale / (2.0 * rolloff);
        let denom = (PI * tail_tolerance).exp_m1();
        let truncation_halfwidth = a * (1.0 + 1.0 / denom).sqrt();
        Ok(Self {
            lambda0,
            rolloff,
            time_scale,
            truncation_halfwidth,
            tail_tolerance,
        })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn truncation_halfwidth(&self) -> f64 {
        self.truncation_halfwidth
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Evaluate the kernel; zero outside the truncation window.
    pub fn eval(&self, t: f64) -> f64 {
        if t.abs() > self.truncation_halfwidth {
            return 0.0;
        }
        let x = t / self.time_scale;
        let px = PI * x;
        let sinc = if px.abs() < 1e-4 {
            1.0 - px * px / 6.0
        } else {
            px.sin() / px
        };
        let bx = 2.0 * self.rolloff * x;
        let denom = 1.0 - bx * bx;
        let shaped = if denom.abs() < SINGULARITY_EPS {
            PI / 4.0
        } else {
            (PI * self.rolloff * x).cos() / denom
        };
        sinc * shaped / self.time_scale
    }

    /// The kernel's frequency response: 1 on the passband, 0 beyond
    /// `lambda0/2`, squared-cosine roll-off in between.
    pub fn spectrum(&self, omega: f64) -> f64 {
        let w = omega.abs();
        if w <= 0.5 {
            1.0
        } else if w >= self.lambda0 / 2.0 {
            0.0
        } else {
            let arg = PI * self.time_scale / self.rolloff * (w - 0.5);
            0.5 * (1.0 + arg.cos())
        }
    }

    /// Location of the removable singularities of the closed form.
    pub fn singular_time(&self) -> f64 {
        self.time_scale / (2.0 * self.rolloff)
    }
}

/// Construct a kernel; rejects `lambda0 <= 1` and nonpositive tolerances.
pub fn make_kernel(lambda0: f64, tail_tolerance: f64) -> Result<ReconstructionKernel> {
    ReconstructionKernel::new(lambda0, tail_tolerance)
}

/// Samples `f(n/lambda)` for `n = start_index, ..., start_index + len - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSequence {
    pub values: Vec<f64>,
    pub rate: f64,
    pub start_index: i64,
}

/// Sample the signal at rate `lambda >= 1`, indices 1 through `n_samples`.
pub fn sample(f: &BandlimitedSignal, lambda: f64, n_samples: usize) -> Result<SampleSequence> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "sampling rate must be >= 1, got {lambda}"
        )));
    }
    let values = (1..=n_samples as i64)
        .map(|n| f.eval(n as f64 / lambda))
        .collect();
    Ok(SampleSequence {
        values,
        rate: lambda,
        start_index: 1,
    })
}

/// Evaluation grid for reconstructions; `burn_in_margin` is the leading
/// interval that must be excluded so the kernel window is fully covered by
/// samples, and the grid must start at or after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
    pub burn_in_margin: f64,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize, burn_in_margin: f64) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidParameter(
                "grid needs at least one point".into(),
            ));
        }
        if !(t_start.is_finite() && t_end.is_finite()) || t_end < t_start {
            return Err(Error::InvalidParameter(format!(
                "bad grid interval [{t_start}, {t_end}]"
            )));
        }
        if burn_in_margin < 0.0 || t_start < burn_in_margin {
            return Err(Error::InvalidParameter(format!(
                "grid must start at or after the burn-in margin ({t_start} < {burn_in_margin})"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
            burn_in_margin,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n_points == 1 {
            return vec![self.t_start];
        }
        let step = (self.t_end - self.t_start) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| self.t_start + step * i as f64)
            .collect()
    }
}

/// Reconstruct `(1/lambda) * sum_n q_n g(t - n/lambda)` at every grid point,
/// with the sum restricted to the kernel's truncation window.
///
/// `start_index` is the index of `q[0]`. Errors if the grid starts before
/// the kernel-sized burn-in, if `lambda < lambda0`, or if any grid point's
/// kernel window extends beyond the available sample indices (a silently
/// truncated window would bias the sum).
pub fn reconstruct(
    q: &[f64],
    start_index: i64,
    lambda: f64,
    kernel: &ReconstructionKernel,
    grid: &TimeGrid,
) -> Result<Vec<f64>> {
    if lambda < kernel.lambda0() {
        return Err(Error::InvalidParameter(format!(
            "sampling rate {lambda} below the kernel stopband parameter {}",
            kernel.lambda0()
        )));
    }
    let half = kernel.truncation_halfwidth();
    if grid.burn_in_margin < half {
        return Err(Error::InvalidParameter(format!(
            "burn-in margin {} below the kernel truncation half-width {half}",
            grid.burn_in_margin
        )));
    }
    let last_index = start_index + q.len() as i64 - 1;
    let lo = ((grid.t_start - half) * lambda).ceil() as i64;
    let hi = ((grid.t_end + half) * lambda).floor() as i64;
    if lo < start_index || hi > last_index {
        return Err(Error::GridCoverage(format!(
            "kernel windows need sample indices {lo}..={hi}, have {start_index}..={last_index}"
        )));
    }

    let out = grid
        .points()
        .iter()
        .map(|&t| {
            let n_lo = ((t - half) * lambda).ceil() as i64;
            let n_hi = ((t + half) * lambda).floor() as i64;
            let mut acc = 0.0;
            for n in n_lo..=n_hi {
                let weight = kernel.eval(t - n as f64 / lambda);
                acc += q[(n - start_index) as usize] * weight;
            }
            acc / lambda
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_kernel() -> ReconstructionKernel {
        ReconstructionKernel::new(2.0, 1e-6).unwrap()
    }

    #[test]
    fn kernel_rejects_bad_parameters() {
        assert!(ReconstructionKernel::new(1.0, 1e-6).is_err());
        assert!(ReconstructionKernel::new(0.5, 1e-6).is_err());
        assert!(ReconstructionKernel::new(2.0, 0.0).is_err());
    }

    #[test]
    fn kernel_spectrum_passband_and_stopband() {
        let k = default_kernel();
        assert_eq!(k.spectrum(0.25), 1.0);
        assert_eq!(k.spectrum(1.2), 0.0);
        assert_eq!(k.spectrum(-0.5), 1.0);
        assert_eq!(k.spectrum(1.0), 0.0);
        let mid = k.spectrum(0.75);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn kernel_is_even() {
        let k = default_kernel();
        for &t in &[0.1, 0.37, 1.0, 2.5, 17.0, 200.0] {
            assert_eq!(k.eval(t), k.eval(-t));
        }
    }

    #[test]
    fn kernel_vanishes_outside_truncation_window() {
        let k = default_kernel();
        assert_eq!(k.eval(k.truncation_halfwidth() + 1.0), 0.0);
        assert_eq!(k.eval(-k.truncation_halfwidth() - 1.0), 0.0);
    }

    #[test]
    fn kernel_peak_value_matches_spectrum_integral() {
        // g(0) equals the integral of the spectrum; compare the closed form
        // against trapezoid quadrature on a dense grid.
        let k = default_kernel();
        let n = 10_000usize;
        let (lo, hi) = (-1.5, 1.5);
        let h = (hi - lo) / n as f64;
        let mut integral = 0.5 * (k.spectrum(lo) + k.spectrum(hi));
        for i in 1..n {
            integral += k.spectrum(lo + h * i as f64);
        }
        integral *= h;
        assert!(
            (k.eval(0.0) - integral).abs() < 1e-6,
            "g(0) = {}, quadrature = {integral}",
            k.eval(0.0)
        );
    }

    #[test]
    fn kernel_maximum_sits_at_zero() {
        let k = default_kernel();
        let peak = k.eval(0.0).abs();
        let mut arg_max = 0.0;
        let mut max = 0.0;
        for i in -4000..=4000 {
            let t = i as f64 * 1e-3;
            let value = k.eval(t).abs();
            if value > max {
                max = value;
                arg_max = t;
            }
        }
        assert_eq!(arg_max, 0.0);
        assert!((max - peak).abs() < 1e-15);
    }

    #[test]
    fn kernel_is_continuous_across_singular_points() {
        let k = default_kernel();
        let t0 = k.singular_time();
        for &s in &[t0, -t0] {
            let at = k.eval(s);
            let before = k.eval(s - 1e-6);
            let after = k.eval(s + 1e-6);
            assert!((at - before).abs() < 1e-4, "{at} vs {before}");
            assert!((at - after).abs() < 1e-4, "{at} vs {after}");
            assert!(at.is_finite());
        }
    }

    #[test]
    fn sampling_matches_direct_formula() {
        let zero = BandlimitedSignal::zero();
        let s = sample(&zero, 50.0, 16).unwrap();
        assert!(s.values.iter().all(|&x| x == 0.0));

        let tone = BandlimitedSignal::tone(0.5, 0.2, 0.0).unwrap();
        let s = sample(&tone, 100.0, 1).unwrap();
        let expected = 0.5 * (2.0 * PI * 0.2 / 100.0).cos();
        assert!((s.values[0] - expected).abs() < 1e-15);
        assert_eq!(s.start_index, 1);

        // zero-frequency limit is a constant sequence
        let constant = BandlimitedSignal::tone(0.3, 0.0, 1.0).unwrap();
        let s = sample(&constant, 10.0, 8).unwrap();
        let expected = 0.3 * 1.0f64.cos();
        assert!(s.values.iter().all(|&x| (x - expected).abs() < 1e-15));
    }

    #[test]
    fn sampling_rejects_subunit_rate() {
        assert!(sample(&BandlimitedSignal::zero(), 0.5, 4).is_err());
    }

    #[test]
    fn signal_validation() {
        assert!(BandlimitedSignal::tone(0.5, 0.6, 0.0).is_err());
        assert!(BandlimitedSignal::tone(1.2, 0.2, 0.0).is_err());
        let terms = vec![
            ToneTerm {
                amplitude: 0.5,
                frequency: 0.1,
                phase: 0.0,
            },
            ToneTerm {
                amplitude: 0.6,
                frequency: 0.2,
                phase: 0.0,
            },
        ];
        assert!(BandlimitedSignal::new(terms, 0.9).is_err());
    }

    #[test]
    fn signal_json_round_trip_revalidates() {
        let signal = BandlimitedSignal::tone(0.5, 0.2, 0.0).unwrap();
        let text = serde_json::to_string(&signal).unwrap();
        let back: BandlimitedSignal = serde_json::from_str(&text).unwrap();
        assert_eq!(signal, back);

        let bad =
            r#"{"terms":[{"amplitude":0.5,"frequency":0.7,"phase":0.0}],"amplitude_bound":0.5}"#;
        assert!(serde_json::from_str::<BandlimitedSignal>(bad).is_err());
    }

    #[test]
    fn reconstruct_zero_sequence_is_zero() {
        let k = ReconstructionKernel::new(2.0, 1e-3).unwrap();
        let half = k.truncation_halfwidth();
        let grid = TimeGrid::new(half + 1.0, half + 3.0, 9, half).unwrap();
        let n = ((half + 3.0 + half) * 8.0).ceil() as usize + 1;
        let q = vec![0.0; n];
        let out = reconstruct(&q, 1, 8.0, &k, &grid).unwrap();
        assert!(out.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn reconstruct_flags_uncovered_grid() {
        let k = ReconstructionKernel::new(2.0, 1e-3).unwrap();
        let half = k.truncation_halfwidth();
        let grid = TimeGrid::new(half + 1.0, half + 3.0, 9, half).unwrap();
        let q = vec![0.0; 10];
        assert!(matches!(
            reconstruct(&q, 1, 8.0, &k, &grid),
            Err(Error::GridCoverage(_))
        ));
    }

    #[test]
    fn reconstruct_requires_burn_in_past_kernel_window() {
        let k = ReconstructionKernel::new(2.0, 1e-3).unwrap();
        let grid = TimeGrid::new(2.0, 4.0, 5, 2.0).unwrap();
        let q = vec![0.0; 1000];
        assert!(reconstruct(&q, 1, 8.0, &k, &grid).is_err());
    }

    #[test]
    fn shannon_reconstruction_of_own_samples() {
        let tone = BandlimitedSignal::tone(0.5, 0.2, 0.0).unwrap();
        let lambda = 100.0;
        let k = default_kernel();
        let half = k.truncation_halfwidth();
        let t_start = half + 1.0;
        let t_end = t_start + 4.0;
        let grid = TimeGrid::new(t_start, t_end, 41, half).unwrap();
        let n = ((t_end + half) * lambda).ceil() as usize + 1;
        let samples = sample(&tone, lambda, n).unwrap();
        let recon = reconstruct(&samples.values, 1, lambda, &k, &grid).unwrap();
        let max_err = grid
            .points()
            .iter()
            .zip(&recon)
            .map(|(&t, &r)| (tone.eval(t) - r).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err <= 1e-4, "interior error {max_err}");
    }
}

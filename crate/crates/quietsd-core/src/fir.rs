//! Tri-level quantization of finite FIR coefficient sets through the quiet
//! second-order shaper.
//!
//! The coefficients are scaled below 1, fed through the recursion, and the
//! recursion is then driven with zero input until its output settles to the
//! all-zeros state, which the asymmetric damping guarantees happens after
//! finitely many steps. The quantized set is therefore finite (slightly
//! longer than the input) and its transfer function matches the original at
//! low frequencies, with the mismatch shaped like `omega^2`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::{effective_rho, step_second_order, SchemeConfig, SchemeState, Variant};

/// A finite coefficient sequence together with the factor that normalizes
/// it strictly below 1 in magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    coefficients: Vec<f64>,
    scale: f64,
}

impl CoefficientSet {
    /// Use an explicit pre-normalization factor; every `|c/scale|` must be
    /// strictly below 1.
    pub fn new(coefficients: Vec<f64>, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        if coefficients.iter().any(|c| (c / scale).abs() >= 1.0) {
            return Err(Error::InvalidParameter(
                "scaled coefficients must be strictly below 1 in magnitude".into(),
            ));
        }
        Ok(Self {
            coefficients,
            scale,
        })
    }

    /// Choose the scale as `max |c| / alpha` so the scaled coefficients are
    /// bounded by `alpha < 1`. An all-zero set gets scale 1.
    pub fn with_alpha(coefficients: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let max = coefficients.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
        let scale = if max == 0.0 { 1.0 } else { max / alpha };
        Self::new(coefficients, scale)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled(&self) -> impl Iterator<Item = f64> + '_ {
        self.coefficients.iter().map(move |&c| c / self.scale)
    }
}

/// Result of quiet coefficient quantization: the tri-level sequence (in
/// units of `scale`), the shaper parameters, and how long the decay tail ran
/// past the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedFir {
    pub q: Vec<i8>,
    pub scale: f64,
    pub rho: f64,
    pub gamma: f64,
    pub input_length: usize,
    pub tail_length: usize,
}

impl QuantizedFir {
    /// The quantized coefficients in original units.
    pub fn denormalized(&self) -> impl Iterator<Item = f64> + '_ {
        self.q.iter().map(move |&q| q as f64 * self.scale)
    }
}

/// Run the quiet shaper over the scaled coefficients, then with zero input
/// until either the state drops below `tail_tol` or the output has been zero
/// for `ceil(1/(1-rho))` consecutive steps, whichever happens first. Fails
/// with [`Error::TailCapExhausted`] if neither happens within `tail_cap`
/// extra steps (a tolerance/damping mismatch, not divergence).
pub fn quantize_coefficients(
    set: &CoefficientSet,
    cfg: &SchemeConfig,
    tail_tol: f64,
    tail_cap: usize,
) -> Result<QuantizedFir> {
    if cfg.variant() != Variant::Quiet || cfg.order() != 2 {
        return Err(Error::InvalidParameter(
            "coefficient quantization requires the quiet order-2 scheme".into(),
        ));
    }
    let cfg = cfg.resolved(None).map_err(|_| {
        Error::InvalidParameter("coefficient quantization needs an explicit rho".into())
    })?;
    if !tail_tol.is_finite() || tail_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must be positive, got {tail_tol}"
        )));
    }
    let (gamma, rho) = (cfg.gamma(), cfg.rho());
    let quiet_run_target = (1.0 / (1.0 - rho)).ceil() as usize;

    let mut state = SchemeState::default();
    let mut q = Vec::with_capacity(set.coefficients.len() + quiet_run_target);
    let push_step = |state: &mut SchemeState, f: f64, q: &mut Vec<i8>| {
        let rho_eff = effective_rho(Variant::Quiet, rho, state);
        let (next, symbol) = step_second_order(*state, f, gamma, rho_eff);
        *state = next;
        q.push(symbol);
    };

    for f in set.scaled() {
        push_step(&mut state, f, &mut q);
    }
    let input_length = q.len();

    let mut quiet_streak = 0usize;
    let mut extra = 0usize;
    while state.norm_inf() >= tail_tol && quiet_streak < quiet_run_target {
        if extra == tail_cap {
            return Err(Error::TailCapExhausted(tail_cap));
        }
        push_step(&mut state, 0.0, &mut q);
        extra += 1;
        if q[q.len() - 1] == 0 {
            quiet_streak += 1;
        } else {
            quiet_streak = 0;
        }
    }

    Ok(QuantizedFir {
        tail_length: q.len() - input_length,
        q,
        scale: set.scale,
        rho,
        gamma,
        input_length,
    })
}

/// Magnitude of the transfer-function mismatch `|c_hat - q_hat|` at each
/// frequency of `freq_grid` (cycles per sample, within [0, 1/2]), with the
/// quantized sequence in original units.
pub fn frequency_response_error(
    set: &CoefficientSet,
    quantized: &QuantizedFir,
    freq_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    for &w in freq_grid {
        if !(0.0..=0.5).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "frequency {w} outside [0, 1/2]"
            )));
        }
    }
    let diffs: Vec<f64> = (0..quantized.q.len())
        .map(|j| {
            let c = set.coefficients.get(j).copied().unwrap_or(0.0);
            c - quantized.q[j] as f64 * quantized.scale
        })
        .collect();
    Ok(freq_grid
        .iter()
        .map(|&w| {
            let mut acc = Complex::new(0.0, 0.0);
            for (j, &d) in diffs.iter().enumerate() {
                // coefficients are indexed from 1
                let angle = -2.0 * PI * w * (j + 1) as f64;
                acc += Complex::from_polar(d, angle);
            }
            (w, acc.norm())
        })
        .collect())
}

/// DTFT magnitude of a real sequence indexed from 1 at one frequency.
pub fn dtft_magnitude(values: &[f64], omega: f64) -> f64 {
    let mut acc = Complex::new(0.0, 0.0);
    for (j, &x) in values.iter().enumerate() {
        let angle = -2.0 * PI * omega * (j + 1) as f64;
        acc += Complex::from_polar(x, angle);
    }
    acc.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_cfg(rho: f64) -> SchemeConfig {
        SchemeConfig::new(2, Variant::Quiet, 2.0, rho).unwrap()
    }

    #[test]
    fn all_zero_coefficients_stay_silent() {
        let set = CoefficientSet::with_alpha(vec![0.0; 16], 0.8).unwrap();
        let out = quantize_coefficients(&set, &quiet_cfg(0.99), 1e-9, 100_000).unwrap();
        assert_eq!(out.q.len(), 16);
        assert!(out.q.iter().all(|&q| q == 0));
        assert_eq!(out.tail_length, 0);
    }

    #[test]
    fn output_ends_in_zeros_and_reruns_identically() {
        let coeffs: Vec<f64> = (0..48)
            .map(|i| 0.4 * ((i as f64) * 0.3).sin() / (1.0 + 0.05 * i as f64))
            .collect();
        let set = CoefficientSet::with_alpha(coeffs, 0.8).unwrap();
        let a = quantize_coefficients(&set, &quiet_cfg(0.99), 1e-9, 100_000).unwrap();
        let b = quantize_coefficients(&set, &quiet_cfg(0.99), 1e-9, 100_000).unwrap();
        assert_eq!(a, b);
        assert!(a.q.len() >= 48);
        assert!(a.q.iter().all(|&q| (-1..=1).contains(&q)));
        let last_nonzero = a.q.iter().rposition(|&q| q != 0).unwrap_or(0);
        assert!(a.q[last_nonzero + 1..].iter().all(|&q| q == 0));
    }

    #[test]
    fn exact_copy_has_zero_response_error() {
        let coeffs = vec![1.0, 0.0, -1.0, 0.0, 1.0];
        let set = CoefficientSet::new(coeffs.clone(), 2.0).unwrap();
        let fake = QuantizedFir {
            q: coeffs.iter().map(|&c| (c / 2.0 * 2.0) as i8).collect(),
            scale: 1.0,
            rho: 0.99,
            gamma: 2.0,
            input_length: 5,
            tail_length: 0,
        };
        let errs = frequency_response_error(&set, &fake, &[0.0, 0.1, 0.25, 0.5]).unwrap();
        for (_, e) in errs {
            assert!(e < 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_scheme_and_bad_grid() {
        let set = CoefficientSet::with_alpha(vec![0.5, -0.25], 0.8).unwrap();
        let standard = SchemeConfig::new(2, Variant::Standard, 2.0, 0.0).unwrap();
        assert!(quantize_coefficients(&set, &standard, 1e-9, 1000).is_err());

        let quantized = quantize_coefficients(&set, &quiet_cfg(0.9), 1e-9, 1000).unwrap();
        assert!(frequency_response_error(&set, &quantized, &[0.7]).is_err());
    }

    #[test]
    fn scale_validation() {
        assert!(CoefficientSet::with_alpha(vec![0.1], 1.0).is_err());
        assert!(CoefficientSet::new(vec![2.0], 1.0).is_err());
        let set = CoefficientSet::with_alpha(vec![0.4, -0.2], 0.8).unwrap();
        assert!((set.scale() - 0.5).abs() < 1e-15);
        assert!(set.scaled().all(|c| c.abs() <= 0.8 + 1e-15));
    }
}

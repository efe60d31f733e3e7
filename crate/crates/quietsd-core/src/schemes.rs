//! The sigma-delta recursions: first order (standard and leaky) and second
//! order (standard, leaky, and the asymmetrically damped "quiet" variant),
//! with full state traces and an exact verifier for the difference relation
//! that underlies their reconstruction accuracy.
//!
//! One step of the second-order recursion reads, with effective damping
//! `r` in {rho, 1}:
//!
//! ```text
//! q = tri(gamma * r*u + r*v)
//! u' = r*u + f - q
//! v' = r*u + r*v + f - q
//! ```
//!
//! The standard scheme uses `r = 1` always, the leaky scheme `r = rho`
//! always, and the quiet scheme `r = rho` exactly when `u >= 0`. With zero
//! input these steps coincide, expression for expression, with the maps in
//! [`crate::dynamics`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantizer::quantize_tri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    Leaky,
    Quiet,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Standard => write!(f, "standard"),
            Variant::Leaky => write!(f, "leaky"),
            Variant::Quiet => write!(f, "quiet"),
        }
    }
}

/// How the damping factor is chosen: given explicitly, or derived from the
/// oversampling ratio as `rho = 1 - 1/lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoPolicy {
    Explicit,
    FromLambda,
}

/// Parameters of a recursion. Construct through [`SchemeConfig::new`] or
/// [`SchemeConfig::with_rho_from_lambda`], which enforce the invariants
/// (order 1 or 2, `gamma >= 1`, `rho` in [0, 1), quiet implies order 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    order: u8,
    variant: Variant,
    gamma: f64,
    rho: f64,
    rho_policy: RhoPolicy,
}

impl SchemeConfig {
    pub fn new(order: u32, variant: Variant, gamma: f64, rho: f64) -> Result<Self> {
        let cfg = Self {
            order: order.try_into().unwrap_or(u8::MAX),
            variant,
            gamma,
            rho,
            rho_policy: RhoPolicy::Explicit,
        };
        cfg.validate(order)?;
        Ok(cfg)
    }

    /// Like [`SchemeConfig::new`] but with `rho` deferred until the
    /// oversampling ratio is known; see [`SchemeConfig::resolved`].
    pub fn with_rho_from_lambda(order: u32, variant: Variant, gamma: f64) -> Result<Self> {
        let cfg = Self {
            order: order.try_into().unwrap_or(u8::MAX),
            variant,
            gamma,
            rho: f64::NAN,
            rho_policy: RhoPolicy::FromLambda,
        };
        cfg.validate(order)?;
        Ok(cfg)
    }

    fn validate(&self, requested_order: u32) -> Result<()> {
        if !(1..=2).contains(&requested_order) {
            return Err(Error::InvalidParameter(format!(
                "order {requested_order} unsupported; only orders 1 and 2 are implemented"
            )));
        }
        if self.variant == Variant::Quiet && self.order != 2 {
            return Err(Error::InvalidParameter(
                "the quiet variant requires order 2".into(),
            ));
        }
        if self.order == 2 && (!self.gamma.is_finite() || self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and >= 1 for order 2, got {}",
                self.gamma
            )));
        }
        if self.damps()
            && self.rho_policy == RhoPolicy::Explicit
            && (!self.rho.is_finite() || !(0.0..1.0).contains(&self.rho))
        {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        Ok(())
    }

    fn damps(&self) -> bool {
        matches!(self.variant, Variant::Leaky | Variant::Quiet)
    }

    /// Resolve a from-lambda damping policy against a concrete oversampling
    /// ratio, yielding a config with an explicit `rho`.
    pub fn resolved(&self, lambda: Option<f64>) -> Result<Self> {
        if !self.damps() || self.rho_policy == RhoPolicy::Explicit {
            return Ok(*self);
        }
        let lambda = lambda.ok_or_else(|| {
            Error::InvalidParameter("rho policy from_lambda requires an oversampling ratio".into())
        })?;
        if !lambda.is_finite() || lambda < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "oversampling ratio must be >= 1, got {lambda}"
            )));
        }
        let mut cfg = *self;
        cfg.rho = 1.0 - 1.0 / lambda;
        cfg.rho_policy = RhoPolicy::Explicit;
        Ok(cfg)
    }

    pub fn order(&self) -> u32 {
        self.order as u32
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_policy(&self) -> RhoPolicy {
        self.rho_policy
    }
}

/// Integrator state. For order 1 only `v` is used.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SchemeState {
    pub u: f64,
    pub v: f64,
}

impl SchemeState {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn norm_inf(&self) -> f64 {
        self.u.abs().max(self.v.abs())
    }
}

/// One first-order step with damping `rho` (`rho = 1` is the undamped
/// recursion). The quantizer sees the damped state plus the sample.
pub fn step_first_order(v: f64, f: f64, rho: f64) -> (f64, i8) {
    debug_assert!((0.0..=1.0).contains(&rho));
    let w = rho * v + f;
    let q = quantize_tri(w);
    (w - q as f64, q)
}

/// One second-order step with effective damping `rho_eff` applied to the
/// previous state; the quantizer argument excludes the incoming sample.
pub fn step_second_order(
    state: SchemeState,
    f: f64,
    gamma: f64,
    rho_eff: f64,
) -> (SchemeState, i8) {
    let du = rho_eff * state.u;
    let dv = rho_eff * state.v;
    let q = quantize_tri(gamma * du + dv);
    let qf = q as f64;
    let next = SchemeState {
        u: (du + f) - qf,
        v: ((du + dv) + f) - qf,
    };
    (next, q)
}

/// Damping factor the given variant applies at a step entered with `state`.
pub fn effective_rho(variant: Variant, rho: f64, state: &SchemeState) -> f64 {
    match variant {
        Variant::Standard => 1.0,
        Variant::Leaky => rho,
        Variant::Quiet => {
            if state.u >= 0.0 {
                rho
            } else {
                1.0
            }
        }
    }
}

/// Full record of a quantization run: the input samples, quantized outputs,
/// both integrator sequences, and the damping factor actually applied at
/// each step (needed to verify the difference relation for the quiet
/// scheme, whose damping alternates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub f: Vec<f64>,
    pub q: Vec<i8>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub rho_applied: Vec<f64>,
    pub initial: SchemeState,
    pub order: u32,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn final_state(&self) -> SchemeState {
        match self.f.len() {
            0 => self.initial,
            n => SchemeState::new(self.u[n - 1], self.v[n - 1]),
        }
    }
}

/// Run the configured recursion over `samples` from initial state `s0`.
///
/// The config must carry an explicit damping factor (resolve a from-lambda
/// policy first). For order 1 the `u` column of the trace is identically 0.
pub fn run(samples: &[f64], cfg: &SchemeConfig, s0: SchemeState) -> Result<RunTrace> {
    if cfg.damps() && cfg.rho_policy == RhoPolicy::FromLambda {
        return Err(Error::InvalidParameter(
            "resolve the from_lambda rho policy before running".into(),
        ));
    }
    let n = samples.len();
    let mut trace = RunTrace {
        f: samples.to_vec(),
        q: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        rho_applied: Vec::with_capacity(n),
        initial: s0,
        order: cfg.order(),
    };

    match cfg.order {
        1 => {
            let rho = match cfg.variant {
                Variant::Standard => 1.0,
                Variant::Leaky => cfg.rho,
                Variant::Quiet => unreachable!("validated: quiet requires order 2"),
            };
            let mut v = s0.v;
            for &f in samples {
                let (next, q) = step_first_order(v, f, rho);
                v = next;
                trace.q.push(q);
                trace.u.push(0.0);
                trace.v.push(v);
                trace.rho_applied.push(rho);
            }
        }
        2 => {
            let mut state = s0;
            for &f in samples {
                let rho_eff = effective_rho(cfg.variant, cfg.rho, &state);
                let (next, q) = step_second_order(state, f, cfg.gamma, rho_eff);
                state = next;
                trace.q.push(q);
                trace.u.push(state.u);
                trace.v.push(state.v);
                trace.rho_applied.push(rho_eff);
            }
        }
        _ => unreachable!("validated on construction"),
    }
    Ok(trace)
}

/// Maximum residual of the damped difference relation over the trace.
///
/// Order 1 checks `f_n - q_n = v_n - r_n v_{n-1}`. Order 2 checks both
/// `f_n - q_n = u_n - r_n u_{n-1}` and
/// `u_n - r_n u_{n-1} = v_n - 2 r_n v_{n-1} + r_n r_{n-1} v_{n-2}`,
/// using the damping factor recorded at each step; with `r == 1` both
/// collapse to backward differences. The state is extended one step before
/// the run by `v_{-1} = v_0 - u_0` (zero for the default initial state),
/// which is the unique extension consistent with the recursion.
pub fn verify_difference_relation(trace: &RunTrace, order: u32) -> Result<f64> {
    if order != trace.order {
        return Err(Error::InvalidParameter(format!(
            "trace was produced with order {}, verifier called with order {order}",
            trace.order
        )));
    }
    let n = trace.f.len();
    if trace.q.len() != n
        || trace.u.len() != n
        || trace.v.len() != n
        || trace.rho_applied.len() != n
    {
        return Err(Error::LengthMismatch(format!(
            "trace columns disagree: f={}, q={}, u={}, v={}, rho={}",
            trace.f.len(),
            trace.q.len(),
            trace.u.len(),
            trace.v.len(),
            trace.rho_applied.len()
        )));
    }

    let mut max_residual: f64 = 0.0;
    match order {
        1 => {
            for k in 0..n {
                let v_prev = if k == 0 {
                    trace.initial.v
                } else {
                    trace.v[k - 1]
                };
                let lhs = trace.f[k] - trace.q[k] as f64;
                let rhs = trace.v[k] - trace.rho_applied[k] * v_prev;
                max_residual = max_residual.max((lhs - rhs).abs());
            }
        }
        2 => {
            for k in 0..n {
                let u_prev = if k == 0 {
                    trace.initial.u
                } else {
                    trace.u[k - 1]
                };
                let rho_k = trace.rho_applied[k];
                let first = trace.u[k] - rho_k * u_prev;
                let lhs = trace.f[k] - trace.q[k] as f64;
                max_residual = max_residual.max((lhs - first).abs());

                let (v_prev, v_prev2, rho_prev) = match k {
                    0 => (trace.initial.v, trace.initial.v - trace.initial.u, 1.0),
                    1 => (trace.v[0], trace.initial.v, trace.rho_applied[0]),
                    _ => (trace.v[k - 1], trace.v[k - 2], trace.rho_applied[k - 1]),
                };
                let second = trace.v[k] - 2.0 * rho_k * v_prev + rho_k * rho_prev * v_prev2;
                max_residual = max_residual.max((first - second).abs());
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "order {other} unsupported; only orders 1 and 2 are implemented"
            )))
        }
    }
    Ok(max_residual)
}

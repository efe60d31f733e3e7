//! Zero-input piecewise affine maps on the plane, the trapping-set and
//! Lyapunov membership oracles, orbit iteration, and period detection over
//! the symbolic output sequence.
//!
//! All maps share the linear part `A(u, v) = (u, u + v)`, the branch
//! functional `s = gamma * u + v`, and the shift vector `(1, 1)` scaled by the
//! emitted symbol `q`. The asymmetrically damped map applies the contraction
//! `x -> rho * x` only on the half plane `u >= 0`, which is what forces its
//! orbits to the origin instead of into limit cycles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orbits whose sup-norm exceeds this are reported as divergent.
pub const OVERFLOW_LIMIT: f64 = 1e12;

/// Default convergence threshold on the sup-norm of the state.
pub const DEFAULT_CONV_TOL: f64 = 1e-9;

/// Default cap on detectable cycle lengths.
pub const DEFAULT_MAX_PERIOD: usize = 100;

/// A point (u, v) of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub u: f64,
    pub v: f64,
}

impl PlanePoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn norm_inf(self) -> f64 {
        self.u.abs().max(self.v.abs())
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::new(factor * self.u, factor * self.v)
    }

    pub fn is_finite(self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Which half of the trapping set a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SHalf {
    Plus,
    Minus,
}

/// Branch regions of the damped quantizer comparison: the labels partition
/// the plane for any fixed (gamma, rho).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    Lambda1,
    Lambda0Plus,
    Lambda0Minus,
    LambdaMinus1,
}

/// One application of the undamped map: branch on `s = gamma*u + v`, apply
/// `A`, and subtract the emitted symbol from both coordinates.
pub fn apply_t(x: PlanePoint, gamma: f64) -> (PlanePoint, i8) {
    debug_assert!(gamma >= 1.0);
    let s = gamma * x.u + x.v;
    if s >= 0.5 {
        (PlanePoint::new(x.u - 1.0, (x.u + x.v) - 1.0), 1)
    } else if s <= -0.5 {
        (PlanePoint::new(x.u + 1.0, (x.u + x.v) + 1.0), -1)
    } else {
        (PlanePoint::new(x.u, x.u + x.v), 0)
    }
}

/// Uniformly damped map: the undamped map applied to `rho * x`.
pub fn apply_damped_t(x: PlanePoint, gamma: f64, rho: f64) -> (PlanePoint, i8) {
    apply_t(x.scaled(rho), gamma)
}

/// Asymmetrically damped map: damp before stepping only when `u >= 0`.
pub fn apply_m(x: PlanePoint, gamma: f64, rho: f64) -> (PlanePoint, i8) {
    debug_assert!((0.0..1.0).contains(&rho));
    if x.u >= 0.0 {
        apply_t(x.scaled(rho), gamma)
    } else {
        apply_t(x, gamma)
    }
}

/// Three-branch asymmetric map with free threshold `tau`: the middle and
/// upper branches damp, the lower branch does not.
pub fn apply_three_region(x: PlanePoint, gamma: f64, rho: f64, tau: f64) -> (PlanePoint, i8) {
    debug_assert!(tau > 0.0);
    let s = gamma * x.u + x.v;
    if s >= tau {
        let y = x.scaled(rho);
        (PlanePoint::new(y.u - 1.0, (y.u + y.v) - 1.0), 1)
    } else if s <= -tau {
        (PlanePoint::new(x.u + 1.0, (x.u + x.v) + 1.0), -1)
    } else {
        let y = x.scaled(rho);
        (PlanePoint::new(y.u, y.u + y.v), 0)
    }
}

/// Four-factor asymmetric map: leak each coordinate by (rho1, delta1), then
/// leak again by (rho2, delta2) on the half plane where the branch functional
/// of the once-leaked point is nonnegative.
pub fn apply_four_level(
    x: PlanePoint,
    gamma: f64,
    rho1: f64,
    rho2: f64,
    delta1: f64,
    delta2: f64,
) -> (PlanePoint, i8) {
    let y = PlanePoint::new(rho1 * x.u, delta1 * x.v);
    if gamma * y.u + y.v < 0.0 {
        apply_t(y, gamma)
    } else {
        apply_t(PlanePoint::new(rho2 * y.u, delta2 * y.v), gamma)
    }
}

/// Label the branch region of `x` under damping `rho` (`rho = 1` gives the
/// undamped partition). Boundaries follow the map convention: `|s| = 1/2`
/// belongs to the nonzero-output regions.
pub fn classify_region(x: PlanePoint, gamma: f64, rho: f64) -> RegionLabel {
    let s = rho * (gamma * x.u + x.v);
    if s >= 0.5 {
        RegionLabel::Lambda1
    } else if s <= -0.5 {
        RegionLabel::LambdaMinus1
    } else if s >= 0.0 {
        RegionLabel::Lambda0Plus
    } else {
        RegionLabel::Lambda0Minus
    }
}

/// Trapping-set membership, reporting which half contains `x`.
///
/// The halves are parallelogram strips: `u` in [0, 1) with
/// `-1/2 <= gamma*u + v <= 1/2 + gamma`, and its mirror image with
/// `u` in [-1, 0). Inequalities are evaluated exactly as written.
pub fn trapping_half(x: PlanePoint, gamma: f64) -> Option<SHalf> {
    let s = gamma * x.u + x.v;
    if (0.0..1.0).contains(&x.u) && s >= -0.5 && s <= 0.5 + gamma {
        Some(SHalf::Plus)
    } else if (-1.0..0.0).contains(&x.u) && s >= -(0.5 + gamma) && s <= 0.5 {
        Some(SHalf::Minus)
    } else {
        None
    }
}

pub fn in_trapping_set(x: PlanePoint, gamma: f64) -> bool {
    trapping_half(x, gamma).is_some()
}

/// Membership in the region where the Lyapunov function may increase under
/// the undamped map. Outside this set the forward difference of `lyapunov`
/// is nonpositive.
pub fn in_region_r(x: PlanePoint, gamma: f64) -> bool {
    let s = gamma * x.u + x.v;
    if s >= 0.0 {
        2.0 * x.v + x.u <= 1.0 && x.u <= 0.5
    } else {
        2.0 * x.v + x.u >= -1.0 && x.u >= -0.5
    }
}

/// Lyapunov function `V(u, v) = u^2 + |2v - u|`.
pub fn lyapunov(x: PlanePoint) -> f64 {
    x.u * x.u + (2.0 * x.v - x.u).abs()
}

/// The two affine pieces whose maximum is `lyapunov`:
/// `V+ = u^2 + 2v - u` and `V- = u^2 - 2v + u`.
pub fn lyapunov_split(x: PlanePoint) -> (f64, f64) {
    let uu = x.u * x.u;
    (uu + 2.0 * x.v - x.u, uu - 2.0 * x.v + x.u)
}

/// A zero-input map together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MapSpec {
    T {
        gamma: f64,
    },
    M {
        gamma: f64,
        rho: f64,
    },
    #[serde(rename = "three_region")]
    ThreeRegion {
        gamma: f64,
        rho: f64,
        tau: f64,
    },
    #[serde(rename = "four_level")]
    FourLevel {
        gamma: f64,
        rho1: f64,
        rho2: f64,
        delta1: f64,
        delta2: f64,
    },
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and >= 1, got {gamma}"
        )));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    Ok(())
}

impl MapSpec {
    pub fn t(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::T { gamma })
    }

    pub fn m(gamma: f64, rho: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_rho(rho)?;
        Ok(Self::M { gamma, rho })
    }

    pub fn three_region(gamma: f64, rho: f64, tau: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_rho(rho)?;
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        Ok(Self::ThreeRegion { gamma, rho, tau })
    }

    pub fn four_level(gamma: f64, rho1: f64, rho2: f64, delta1: f64, delta2: f64) -> Result<Self> {
        check_gamma(gamma)?;
        for (name, value) in [
            ("rho1", rho1),
            ("rho2", rho2),
            ("delta1", delta1),
            ("delta2", delta2),
        ] {
            if !value.is_finite() || value <= 0.0 || value > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1], got {value}"
                )));
            }
        }
        if delta2 >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "delta2 must be strictly less than 1, got {delta2}"
            )));
        }
        Ok(Self::FourLevel {
            gamma,
            rho1,
            rho2,
            delta1,
            delta2,
        })
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            MapSpec::T { gamma }
            | MapSpec::M { gamma, .. }
            | MapSpec::ThreeRegion { gamma, .. }
            | MapSpec::FourLevel { gamma, .. } => gamma,
        }
    }

    /// Apply one step, returning the image point and the emitted symbol.
    pub fn apply(&self, x: PlanePoint) -> (PlanePoint, i8) {
        match *self {
            MapSpec::T { gamma } => apply_t(x, gamma),
            MapSpec::M { gamma, rho } => apply_m(x, gamma, rho),
            MapSpec::ThreeRegion { gamma, rho, tau } => apply_three_region(x, gamma, rho, tau),
            MapSpec::FourLevel {
                gamma,
                rho1,
                rho2,
                delta1,
                delta2,
            } => apply_four_level(x, gamma, rho1, rho2, delta1, delta2),
        }
    }
}

/// The trace of an orbit: one more point than symbols (one symbol per
/// transition), plus the first indices at which the orbit entered the
/// trapping set or fell below the convergence threshold, and the detected
/// nontrivial symbol cycle if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<PlanePoint>,
    pub q: Vec<i8>,
    pub entered_s_at: Option<usize>,
    pub converged_at: Option<usize>,
    /// `(start, length)` of the window over which a nontrivial cycle was
    /// confirmed; `start` is the index of the first symbol of the window.
    pub period: Option<(usize, usize)>,
}

/// Iterate `map` from `x0` for up to `max_iters` steps.
///
/// Stops early at the first point with `norm_inf < conv_tol`. If the orbit
/// never converges, the last `period_horizon` symbols are scanned for a
/// repeating cycle of length at most [`DEFAULT_MAX_PERIOD`]; only cycles
/// containing a nonzero symbol are reported.
pub fn iterate_orbit(
    x0: PlanePoint,
    map: &MapSpec,
    max_iters: usize,
    conv_tol: f64,
    period_horizon: usize,
) -> Result<OrbitRecord> {
    if max_iters == 0 {
        return Err(Error::InvalidParameter(
            "max_iters must be at least 1".into(),
        ));
    }
    let gamma = map.gamma();
    let mut points = Vec::with_capacity(max_iters.min(1 << 20) + 1);
    let mut q = Vec::with_capacity(max_iters.min(1 << 20));
    points.push(x0);
    let mut entered_s_at = None;
    let mut converged_at = None;

    loop {
        let idx = points.len() - 1;
        let x = points[idx];
        if !x.is_finite() || x.norm_inf() > OVERFLOW_LIMIT {
            return Err(Error::Divergence(OVERFLOW_LIMIT));
        }
        if entered_s_at.is_none() && in_trapping_set(x, gamma) {
            entered_s_at = Some(idx);
        }
        if x.norm_inf() < conv_tol {
            converged_at = Some(idx);
            break;
        }
        if q.len() == max_iters {
            break;
        }
        let (next, symbol) = map.apply(x);
        points.push(next);
        q.push(symbol);
    }

    let mut period = None;
    if converged_at.is_none() && period_horizon > 0 && !q.is_empty() {
        let persist = period_horizon.min(q.len());
        let settle = q.len() - persist;
        if let Some((len, true)) = detect_period(&q, DEFAULT_MAX_PERIOD, settle, persist) {
            period = Some((settle, len));
        }
    }

    Ok(OrbitRecord {
        points,
        q,
        entered_s_at,
        converged_at,
        period,
    })
}

/// Find the least cycle length `p <= max_period` such that
/// `q[n + p] == q[n]` throughout the window of `persist` symbols starting
/// after the first `settle` are discarded. Returns the length together with
/// a flag for whether the cycle contains a nonzero symbol. Requires the
/// window to contain at least one full repetition (`2p <= persist`).
pub fn detect_period(
    q: &[i8],
    max_period: usize,
    settle: usize,
    persist: usize,
) -> Option<(usize, bool)> {
    assert!(
        settle + persist <= q.len(),
        "settle + persist horizons exceed sequence length"
    );
    let window = &q[settle..settle + persist];
    let n = window.len();
    if n == 0 {
        return None;
    }

    // Minimal weak period via the prefix function: p = n - longest border.
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && window[i] != window[k] {
            k = pi[k - 1];
        }
        if window[i] == window[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    if p <= max_period && 2 * p <= n {
        let nontrivial = window[..p].iter().any(|&s| s != 0);
        Some((p, nontrivial))
    } else {
        None
    }
}

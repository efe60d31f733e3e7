//! Quiet sigma-delta quantization for bandlimited signals.
//!
//! The crate provides the damped sigma-delta recursions (first and second
//! order; the second order in standard, uniformly leaky, and asymmetrically
//! damped "quiet" variants), the piecewise affine zero-input maps those
//! recursions reduce to, membership oracles for the trapping set and the
//! Lyapunov decrease region, bandlimited sampling and raised-cosine
//! reconstruction, order-of-accuracy and spectrum analysis, basin
//! classification sweeps, and tri-level FIR coefficient quantization.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fir;
pub mod quantizer;
pub mod schemes;
pub mod signal;

pub use analysis::{
    error_sweep, fit_order_slope, spectrum, sup_error, tornado_sweep, CellClass, ErrorCurve,
    MapFamily, SweepOptions, SweepQuantizer, TornadoGrid, Window,
};
pub use dynamics::{
    detect_period, iterate_orbit, lyapunov, MapSpec, OrbitRecord, PlanePoint, RegionLabel, SHalf,
};
pub use error::{Error, Result};
pub use fir::{frequency_response_error, quantize_coefficients, CoefficientSet, QuantizedFir};
pub use quantizer::{quantize_sign, quantize_tri, quantize_uniform, Alphabet};
pub use schemes::{
    run, verify_difference_relation, RhoPolicy, RunTrace, SchemeConfig, SchemeState, Variant,
};
pub use signal::{
    make_kernel, reconstruct, sample, BandlimitedSignal, ReconstructionKernel, SampleSequence,
    TimeGrid, ToneTerm,
};

//! Shared fixtures for the benchmarks.

/// Deterministic pseudo-random samples in [-amplitude, amplitude]
/// (xorshift; no external RNG needed for benches).
pub fn noise(n: usize, amplitude: f64, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let unit = (state >> 11) as f64 / (1u64 << 53) as f64;
            amplitude * (2.0 * unit - 1.0)
        })
        .collect()
}

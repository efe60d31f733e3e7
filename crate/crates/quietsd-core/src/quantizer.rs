//! Scalar quantizers and uniform alphabets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tri-level quantizer with outputs in {-1, 0, 1}.
///
/// The closed boundary sits on the nonzero side: `u = 1/2` maps to `1` and
/// `u = -1/2` maps to `-1`, matching the branch conditions of the second-order
/// recursion and the zero-input maps built from it.
pub fn quantize_tri(u: f64) -> i8 {
    if u >= 0.5 {
        1
    } else if u <= -0.5 {
        -1
    } else {
        0
    }
}

/// Two-level sign quantizer; `quantize_sign(0) = 1` by convention.
pub fn quantize_sign(u: f64) -> i8 {
    if u >= 0.0 {
        1
    } else {
        -1
    }
}

/// Equispaced quantization alphabet with endpoints -1 and +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alphabet {
    levels: Vec<f64>,
}

impl Alphabet {
    /// Build the `size`-level alphabet. Requires `size >= 2`.
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size must be at least 2, got {size}"
            )));
        }
        let step = 2.0 / (size - 1) as f64;
        let levels = (0..size).map(|i| -1.0 + step * i as f64).collect();
        Ok(Self { levels })
    }

    /// The tri-level alphabet {-1, 0, 1}.
    pub fn tri() -> Self {
        Self::new(3).expect("3 >= 2")
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    /// Distance between adjacent levels.
    pub fn spacing(&self) -> f64 {
        2.0 / (self.levels.len() - 1) as f64
    }
}

/// Nearest level of `a`; exact ties round toward +1.
pub fn quantize_uniform(u: f64, a: &Alphabet) -> f64 {
    let mut best = a.levels[0];
    let mut best_dist = (u - best).abs();
    for &level in &a.levels[1..] {
        let dist = (u - level).abs();
        // `<=` so the later (larger) level wins ties.
        if dist <= best_dist {
            best = level;
            best_dist = dist;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_level_regions() {
        assert_eq!(quantize_tri(0.7), 1);
        assert_eq!(quantize_tri(0.0), 0);
        assert_eq!(quantize_tri(-0.5), -1);
        assert_eq!(quantize_tri(0.5), 1);
        assert_eq!(quantize_tri(0.499_999), 0);
    }

    #[test]
    fn sign_quantizer() {
        assert_eq!(quantize_sign(3.2), 1);
        assert_eq!(quantize_sign(-0.1), -1);
        assert_eq!(quantize_sign(0.0), 1);
    }

    #[test]
    fn uniform_nearest_level() {
        let two = Alphabet::new(2).unwrap();
        assert_eq!(two.levels(), &[-1.0, 1.0]);
        assert_eq!(quantize_uniform(0.4, &two), 1.0);

        let five = Alphabet::new(5).unwrap();
        assert_eq!(five.levels(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(quantize_uniform(-0.26, &five), -0.5);
        // exact tie rounds toward +1
        assert_eq!(quantize_uniform(0.25, &five), 0.5);
    }

    #[test]
    fn alphabet_rejects_degenerate_size() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(0).is_err());
    }
}

//! Degradation functions scaling an elastic energy by the damage variable.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum GammaKind {
    /// `gamma(z) = z`
    #[default]
    Affine,
    /// `gamma(z) = eps + z^2`
    Smooth { eps: f64 },
}

impl GammaKind {
    pub fn validate(self) -> Result<()> {
        match self {
            GammaKind::Smooth { eps } if !(eps > 0.0) || !eps.is_finite() => {
                Err(Error::InvalidArgument(format!("smooth degradation needs eps > 0, got {eps}")))
            }
            _ => Ok(()),
        }
    }

    pub fn value(self, z: f64) -> f64 {
        match self {
            GammaKind::Affine => z,
            GammaKind::Smooth { eps } => eps + z * z,
        }
    }

    pub fn derivative(self, z: f64) -> f64 {
        match self {
            GammaKind::Affine => 1.0,
            GammaKind::Smooth { .. } => 2.0 * z,
        }
    }

    /// Slope of the chord between `z_old` and `z_new`; the derivative when
    /// they coincide. Exact for both kinds, so
    /// `chord * (z_new - z_old) = gamma(z_new) - gamma(z_old)` up to rounding.
    pub fn chord(self, z_new: f64, z_old: f64) -> f64 {
        match self {
            GammaKind::Affine => 1.0,
            GammaKind::Smooth { .. } => z_new + z_old,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_matches_difference_quotient() {
        let g = GammaKind::Smooth { eps: 1e-3 };
        for (a, b) in [(0.3, 0.7), (1.0, 0.0), (0.25, 0.25)] {
            let c = g.chord(a, b);
            if a != b {
                assert!((c - (g.value(a) - g.value(b)) / (a - b)).abs() < 1e-14);
            } else {
                assert_eq!(c, g.derivative(a));
            }
        }
        assert!(GammaKind::Smooth { eps: 0.0 }.validate().is_err());
        assert_eq!(GammaKind::Affine.chord(0.1, 0.9), 1.0);
    }
}

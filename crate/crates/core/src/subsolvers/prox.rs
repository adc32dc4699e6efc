//! Closed-form proximal maps for 1-homogeneous dissipation.

use crate::error::{Error, Result};

/// Inner product in which a dissipation group measures its rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GroupMetric {
    /// Plain Euclidean norm (scalar slip, generic dofs).
    #[default]
    Euclidean,
    /// Frobenius norm of a plane-strain deviatoric tensor stored as
    /// `(p11, p22, p12)` with `p33 = -p11 - p22`. The Gram matrix is
    /// `[[2,1,0],[1,2,0],[0,0,2]]`.
    Deviatoric2D,
}

impl GroupMetric {
    pub fn gram(self, i: usize, j: usize) -> f64 {
        match self {
            GroupMetric::Euclidean => f64::from(i == j),
            GroupMetric::Deviatoric2D => DEV_GRAM[i][j],
        }
    }

    /// `sqrt(p^T G p)`
    pub fn norm(self, p: &[f64]) -> f64 {
        match self {
            GroupMetric::Euclidean => p.iter().map(|x| x * x).sum::<f64>().sqrt(),
            GroupMetric::Deviatoric2D => {
                let [a, b, c] = [p[0], p[1], p[2]];
                (2.0 * a * a + 2.0 * a * b + 2.0 * b * b + 2.0 * c * c).sqrt()
            }
        }
    }

    /// `G^{-1} y`
    pub fn inverse_apply(self, y: &[f64]) -> Vec<f64> {
        match self {
            GroupMetric::Euclidean => y.to_vec(),
            GroupMetric::Deviatoric2D => vec![
                (2.0 * y[0] - y[1]) / 3.0,
                (2.0 * y[1] - y[0]) / 3.0,
                0.5 * y[2],
            ],
        }
    }

    /// Dual norm `sqrt(y^T G^{-1} y)` of a generalized force.
    pub fn dual_norm(self, y: &[f64]) -> f64 {
        let gy = self.inverse_apply(y);
        y.iter().zip(&gy).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    }

    pub fn dim(self) -> Option<usize> {
        match self {
            GroupMetric::Euclidean => None,
            GroupMetric::Deviatoric2D => Some(3),
        }
    }
}

const DEV_GRAM: [[f64; 3]; 3] = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 2.0]];

/// A block of internal-variable dofs sharing one 1-homogeneous dissipation
/// term `weight * ||rate||`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneHomGroup {
    pub dofs: Vec<usize>,
    /// Threshold times measure; `f64::INFINITY` freezes the group.
    pub weight: f64,
    pub metric: GroupMetric,
}

impl OneHomGroup {
    pub fn scalar(dof: usize, weight: f64) -> Self {
        OneHomGroup {
            dofs: vec![dof],
            weight,
            metric: GroupMetric::Euclidean,
        }
    }

    /// Dissipated energy `weight * ||increment||`; zero for a frozen group at rest.
    pub fn dissipation(&self, increment: &[f64]) -> f64 {
        let n = self.metric.norm(increment);
        if n == 0.0 {
            0.0
        } else {
            self.weight * n
        }
    }
}

/// `argmin_p  a/2 |p|^2 - y.p + w |p|` in the Euclidean metric.
///
/// This is the shrinkage (soft-thresholding) map; for a deviatoric group it is
/// the radial return onto the ball of radius `w`.
pub fn prox_ball_1hom(y: &[f64], a: f64, w: f64) -> Result<Vec<f64>> {
    prox_ball_1hom_metric(y, a, w, GroupMetric::Euclidean)
}

/// `argmin_p  a/2 p^T G p - y.p + w sqrt(p^T G p)`.
pub fn prox_ball_1hom_metric(y: &[f64], a: f64, w: f64, metric: GroupMetric) -> Result<Vec<f64>> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("prox curvature {a} must be > 0")));
    }
    if !(w >= 0.0) {
        return Err(Error::InvalidArgument(format!("prox weight {w} must be >= 0")));
    }
    if let Some(d) = metric.dim() {
        if y.len() != d {
            return Err(Error::DimensionMismatch {
                what: "deviatoric group",
                expected: d,
                got: y.len(),
            });
        }
    }
    let ynorm = metric.dual_norm(y);
    if ynorm <= w {
        return Ok(vec![0.0; y.len()]);
    }
    let scale = (1.0 - w / ynorm) / a;
    Ok(metric.inverse_apply(y).into_iter().map(|g| scale * g).collect())
}

/// Unidirectional damage update for a stored energy affine in `zeta`.
///
/// Minimizes `zeta * drive + toughness * (zeta_old - zeta)` over
/// `[0, zeta_old]`: the segment survives unchanged unless the drive strictly
/// exceeds the toughness, in which case it ruptures completely.
pub fn prox_damage_unidirectional(zeta_old: f64, drive: f64, toughness: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&zeta_old) {
        return Err(Error::InvalidArgument(format!("zeta {zeta_old} outside [0, 1]")));
    }
    if !(drive >= 0.0) {
        return Err(Error::InvalidArgument(format!("damage drive {drive} must be >= 0")));
    }
    if !(toughness > 0.0) {
        return Err(Error::InvalidArgument(format!("toughness {toughness} must be > 0")));
    }
    Ok(if drive > toughness { 0.0 } else { zeta_old })
}

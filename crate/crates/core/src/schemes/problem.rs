use super::state::{Dims, State3F};
use crate::error::{check_len, Result};
use crate::subsolvers::{OneHomGroup, SparseSymmetric};

/// Named parts of the stored energy.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyParts {
    pub elastic_bulk: f64,
    pub adhesive: f64,
    /// Hardening plus any gradient regularization of the internal variables.
    pub hardening: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.elastic_bulk + self.adhesive + self.hardening
    }
}

/// External loads conjugate to `u`, `pi` and `zeta`.
#[derive(Clone, Debug, PartialEq)]
pub struct Loads {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl Loads {
    pub fn zero(dims: Dims) -> Self {
        Loads {
            f: vec![0.0; dims.n_u],
            g: vec![0.0; dims.n_pi],
            h: vec![0.0; dims.n_zeta],
        }
    }

    pub fn combine(a: &Loads, wa: f64, b: &Loads, wb: f64) -> Loads {
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| wa * p + wb * q).collect();
        Loads {
            f: mix(&a.f, &b.f),
            g: mix(&a.g, &b.g),
            h: mix(&a.h, &b.h),
        }
    }
}

/// Result of a problem's damage substep.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaStep {
    pub zeta: Vec<f64>,
    pub dissip_viscous: f64,
    pub dissip_rate_indep: f64,
}

/// Stored energy restricted to a block of variables `x` with everything else
/// frozen: `1/2 x^T A x + l.x + const`, together with the viscous quadratic
/// form and the 1-homogeneous dissipation groups acting on `x`.
///
/// `x` stacks `n_u` displacement dofs followed by `n_z` internal dofs.
#[derive(Clone, Debug)]
pub struct QuadraticModel {
    pub n_u: usize,
    pub n_z: usize,
    pub stiffness: SparseSymmetric,
    pub linear: Vec<f64>,
    pub viscosity: Option<SparseSymmetric>,
    /// Dof indices are relative to the internal block.
    pub groups: Vec<OneHomGroup>,
    pub fixed_u: Vec<bool>,
}

impl QuadraticModel {
    pub fn validate(&self) -> Result<()> {
        let n = self.n_u + self.n_z;
        check_len("model stiffness", n, self.stiffness.dim())?;
        check_len("model linear term", n, self.linear.len())?;
        if let Some(d) = &self.viscosity {
            check_len("model viscosity", n, d.dim())?;
        }
        check_len("fixed mask", self.n_u, self.fixed_u.len())
    }
}

/// A concrete dynamic system with displacement `u`, internal variables
/// `pi` (evolving with `u`) and `zeta` (evolving in its own substep).
pub trait ProblemInstance {
    fn dims(&self) -> Dims;

    /// Mass operator on `u`.
    fn mass(&self) -> &SparseSymmetric;

    /// Model in `(u, pi)` at frozen `zeta`.
    fn split_model(&self, zeta: &[f64]) -> Result<QuadraticModel>;

    /// Model in `(u, pi, zeta)` if the stored energy is jointly quadratic.
    fn joint_model(&self) -> Option<QuadraticModel> {
        None
    }

    /// Whether `zeta` can change at all.
    fn zeta_evolves(&self) -> bool;

    fn stored_energy(&self, u: &[f64], pi: &[f64], zeta: &[f64]) -> Result<EnergyParts>;

    /// Damage update at the new `(u, pi)`.
    fn zeta_substep(
        &self,
        u: &[f64],
        pi: &[f64],
        zeta_old: &[f64],
        tau: f64,
        h: &[f64],
    ) -> Result<ZetaStep>;

    fn loads(&self, t: f64) -> Loads;

    /// Called after every accepted step, e.g. to switch off a load.
    fn after_step(&mut self, _state: &State3F) {}
}

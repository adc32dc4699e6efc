use crate::error::{check_len, Result};
use crate::schemes::{Dims, EnergyParts, Loads, ProblemInstance, QuadraticModel, ZetaStep};
use crate::subsolvers::SparseSymmetric;

/// `M u'' + D u' + K u = f(t)` with no internal variables.
pub struct LinearSystem {
    mass: SparseSymmetric,
    stiffness: SparseSymmetric,
    damping: Option<SparseSymmetric>,
    fixed: Vec<bool>,
    force: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl LinearSystem {
    pub fn new(mass: SparseSymmetric, stiffness: SparseSymmetric) -> Result<Self> {
        let n = mass.dim();
        check_len("stiffness", n, stiffness.dim())?;
        Ok(LinearSystem {
            mass,
            stiffness,
            damping: None,
            fixed: vec![false; n],
            force: Box::new(move |_| vec![0.0; n]),
        })
    }

    /// Uncoupled oscillators `m_i u_i'' + k_i u_i = 0`.
    pub fn diagonal(masses: &[f64], stiffnesses: &[f64]) -> Result<Self> {
        check_len("stiffnesses", masses.len(), stiffnesses.len())?;
        let diag = |d: &[f64]| {
            let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
            SparseSymmetric::from_upper_triplets(d.len(), &t)
        };
        Self::new(diag(masses), diag(stiffnesses))
    }

    pub fn with_damping(mut self, damping: SparseSymmetric) -> Result<Self> {
        check_len("damping", self.mass.dim(), damping.dim())?;
        self.damping = Some(damping);
        Ok(self)
    }

    pub fn with_fixed(mut self, fixed: Vec<bool>) -> Result<Self> {
        check_len("fixed mask", self.mass.dim(), fixed.len())?;
        self.fixed = fixed;
        Ok(self)
    }

    pub fn with_force(mut self, force: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.force = Box::new(force);
        self
    }

    pub fn stiffness(&self) -> &SparseSymmetric {
        &self.stiffness
    }
}

impl ProblemInstance for LinearSystem {
    fn dims(&self) -> Dims {
        Dims {
            n_u: self.mass.dim(),
            n_pi: 0,
            n_zeta: 0,
        }
    }

    fn mass(&self) -> &SparseSymmetric {
        &self.mass
    }

    fn split_model(&self, _zeta: &[f64]) -> Result<QuadraticModel> {
        let n = self.mass.dim();
        Ok(QuadraticModel {
            n_u: n,
            n_z: 0,
            stiffness: self.stiffness.clone(),
            linear: vec![0.0; n],
            viscosity: self.damping.clone(),
            groups: Vec::new(),
            fixed_u: self.fixed.clone(),
        })
    }

    fn zeta_evolves(&self) -> bool {
        false
    }

    fn stored_energy(&self, u: &[f64], _pi: &[f64], _zeta: &[f64]) -> Result<EnergyParts> {
        check_len("displacement", self.mass.dim(), u.len())?;
        Ok(EnergyParts {
            elastic_bulk: 0.5 * self.stiffness.quad_form(u),
            ..Default::default()
        })
    }

    fn zeta_substep(&self, _u: &[f64], _pi: &[f64], zeta: &[f64], _tau: f64, _h: &[f64]) -> Result<ZetaStep> {
        Ok(ZetaStep {
            zeta: zeta.to_vec(),
            dissip_viscous: 0.0,
            dissip_rate_indep: 0.0,
        })
    }

    fn loads(&self, t: f64) -> Loads {
        Loads {
            f: (self.force)(t),
            g: Vec::new(),
            h: Vec::new(),
        }
    }
}

use crate::error::{check_len, Result};
use crate::schemes::{Dims, EnergyParts, Loads, ProblemInstance, QuadraticModel, ZetaStep};
use crate::subsolvers::SparseSymmetric;

/// One displacement coupled to one viscous internal variable:
///
/// ```text
/// Phi = k/2 u^2 + c u zeta + b/2 zeta^2,   Psi = eta/2 zeta'^2,
/// m u'' + k u + c zeta = f(t),   eta zeta' + c u + b zeta = h.
/// ```
///
/// The energy is jointly quadratic, so the monolithic scheme applies, and the
/// damage substep is the exact midpoint rule.
#[derive(Clone, Debug)]
pub struct CoupledToy {
    pub m: f64,
    pub k: f64,
    pub c: f64,
    pub b: f64,
    pub eta: f64,
    pub force_amplitude: f64,
    pub force_frequency: f64,
    pub zeta_force: f64,
    mass: SparseSymmetric,
}

impl CoupledToy {
    pub fn new(m: f64, k: f64, c: f64, b: f64, eta: f64) -> Self {
        CoupledToy {
            m,
            k,
            c,
            b,
            eta,
            force_amplitude: 0.0,
            force_frequency: 0.0,
            zeta_force: 0.0,
            mass: SparseSymmetric::from_upper_triplets(1, &[(0, 0, m)]),
        }
    }

    pub fn with_force(mut self, amplitude: f64, frequency: f64) -> Self {
        self.force_amplitude = amplitude;
        self.force_frequency = frequency;
        self
    }

    /// Constant `h`; the damage variable then relaxes towards `(h - c u) / b`.
    pub fn with_zeta_force(mut self, h: f64) -> Self {
        self.zeta_force = h;
        self
    }
}

impl ProblemInstance for CoupledToy {
    fn dims(&self) -> Dims {
        Dims {
            n_u: 1,
            n_pi: 0,
            n_zeta: 1,
        }
    }

    fn mass(&self) -> &SparseSymmetric {
        &self.mass
    }

    fn split_model(&self, zeta: &[f64]) -> Result<QuadraticModel> {
        check_len("damage", 1, zeta.len())?;
        Ok(QuadraticModel {
            n_u: 1,
            n_z: 0,
            stiffness: SparseSymmetric::from_upper_triplets(1, &[(0, 0, self.k)]),
            linear: vec![self.c * zeta[0]],
            viscosity: None,
            groups: Vec::new(),
            fixed_u: vec![false],
        })
    }

    fn joint_model(&self) -> Option<QuadraticModel> {
        Some(QuadraticModel {
            n_u: 1,
            n_z: 1,
            stiffness: SparseSymmetric::from_upper_triplets(
                2,
                &[(0, 0, self.k), (0, 1, self.c), (1, 1, self.b)],
            ),
            linear: vec![0.0, 0.0],
            viscosity: Some(SparseSymmetric::from_upper_triplets(2, &[(1, 1, self.eta)])),
            groups: Vec::new(),
            fixed_u: vec![false],
        })
    }

    fn zeta_evolves(&self) -> bool {
        true
    }

    fn stored_energy(&self, u: &[f64], _pi: &[f64], zeta: &[f64]) -> Result<EnergyParts> {
        check_len("displacement", 1, u.len())?;
        check_len("damage", 1, zeta.len())?;
        let (u, z) = (u[0], zeta[0]);
        Ok(EnergyParts {
            elastic_bulk: 0.5 * self.k * u * u,
            adhesive: self.c * u * z,
            hardening: 0.5 * self.b * z * z,
        })
    }

    fn zeta_substep(&self, u: &[f64], _pi: &[f64], zeta: &[f64], tau: f64, h: &[f64]) -> Result<ZetaStep> {
        let z0 = zeta[0];
        let dz = (h[0] - self.c * u[0] - self.b * z0) / (self.eta / tau + 0.5 * self.b);
        Ok(ZetaStep {
            zeta: vec![z0 + dz],
            dissip_viscous: self.eta * dz * dz / tau,
            dissip_rate_indep: 0.0,
        })
    }

    fn loads(&self, t: f64) -> Loads {
        let f = self.force_amplitude * (self.force_frequency * t).sin();
        Loads {
            f: vec![f],
            g: Vec::new(),
            h: vec![self.zeta_force],
        }
    }
}

//! One-step maps: monolithic Crank-Nicolson, fractional step, backward Euler.
//!
//! Every step is posed on the increment `d = x^k - x^{k-1}` as
//!
//! ```text
//! min  1/2 d^T Q d - b.d + sum_g w_g |d_g|
//! ```
//!
//! with, for Crank-Nicolson,
//! `Q = (2/tau^2) M + D/tau + A/2` and `b = F + (2/tau) M v - A x - l`,
//! and velocity recovered from `v^k = 2 d_u / tau - v^{k-1}`. Backward Euler
//! uses `Q = M/tau^2 + D/tau + A`, `b = F + M v / tau - A x - l`, `v^k = d_u / tau`.

use super::problem::{EnergyParts, Loads, ProblemInstance, QuadraticModel};
use super::state::{LoadSampling, Scheme, SchemeConfig, State3F};
use crate::error::{check_len, Error, Result};
use crate::subsolvers::sparse::dot;
use crate::subsolvers::{AltMinOptions, AltMinProblem, SparseSymmetric};

/// Energy bookkeeping of a single step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepEnergy {
    pub t: f64,
    pub kinetic: f64,
    pub stored: EnergyParts,
    /// Kinetic plus stored energy at the start of the step.
    pub energy_prev: f64,
    pub dissip_viscous: f64,
    pub dissip_rate_indep: f64,
    pub work: f64,
    /// `E_k - E_{k-1} + dissipation - work`.
    pub residual: f64,
    /// Part of `residual` attributed to the `(u, pi)` substep.
    pub residual_up: f64,
    /// Part of `residual` attributed to the `zeta` substep.
    pub residual_zeta: f64,
    pub sweeps: usize,
}

impl StepEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.stored.total()
    }

    /// Residual relative to the energy turnover of the step.
    pub fn relative_residual(&self) -> f64 {
        let scale = self.energy_prev.max(self.total())
            + self.work.abs()
            + self.dissip_viscous
            + self.dissip_rate_indep;
        if scale > 0.0 {
            self.residual.abs() / scale
        } else {
            self.residual.abs()
        }
    }
}

struct Prepared {
    scheme: Scheme,
    tau_bits: u64,
    zeta: Vec<f64>,
    joint: bool,
    model: QuadraticModel,
    qp: AltMinProblem,
}

/// Reusable stepper. Keeps the factorized step operator between calls while
/// the scheme, the step size and the frozen damage field stay the same.
pub struct Stepper {
    cfg: SchemeConfig,
    cache: Option<Prepared>,
}

impl Stepper {
    pub fn new(cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Stepper { cfg, cache: None })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn step<P: ProblemInstance + ?Sized>(
        &mut self,
        problem: &P,
        s: &State3F,
    ) -> Result<(State3F, StepEnergy)> {
        self.step_with_tau(problem, s, self.cfg.tau)
    }

    pub fn step_with_tau<P: ProblemInstance + ?Sized>(
        &mut self,
        problem: &P,
        s: &State3F,
        tau: f64,
    ) -> Result<(State3F, StepEnergy)> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {tau} must be > 0")));
        }
        let dims = problem.dims();
        s.validate(dims)?;
        let scheme = self.cfg.scheme;
        let joint = scheme == Scheme::CnMonolithic && problem.zeta_evolves();
        if joint && problem.joint_model().is_none() {
            return Err(Error::SchemeNotApplicable(
                "monolithic Crank-Nicolson needs a stored energy jointly quadratic in all \
                 evolving fields; use the fractional-step scheme"
                    .into(),
            ));
        }
        let sampling = if scheme == Scheme::BackwardEuler {
            LoadSampling::RightEndpoint
        } else {
            self.cfg.load_sampling
        };
        let loads = sample_loads(problem, s.t, s.t + tau, sampling);
        check_len("load f", dims.n_u, loads.f.len())?;
        check_len("load g", dims.n_pi, loads.g.len())?;
        check_len("load h", dims.n_zeta, loads.h.len())?;

        self.prepare(problem, tau, &s.zeta, joint)?;
        let prep = self.cache.as_ref().expect("prepared");
        let model = &prep.model;
        let (n_u, n_z) = (model.n_u, model.n_z);

        let mut x0: Vec<f64> = s.u.iter().chain(&s.pi).copied().collect();
        if joint {
            x0.extend_from_slice(&s.zeta);
        }
        check_len("model size", x0.len(), n_u + n_z)?;
        let mut grad = model.linear.clone();
        model.stiffness.mul_vec_add(1.0, &x0, &mut grad);

        let mv = problem.mass().mul_vec(&s.v);
        let cv = if scheme == Scheme::BackwardEuler { 1.0 / tau } else { 2.0 / tau };
        let b_u: Vec<f64> = (0..n_u)
            .map(|i| {
                if model.fixed_u[i] {
                    0.0
                } else {
                    loads.f[i] + cv * mv[i] - grad[i]
                }
            })
            .collect();
        let force_z: Vec<f64> = if joint {
            loads.g.iter().chain(&loads.h).copied().collect()
        } else {
            loads.g.clone()
        };
        let b_z: Vec<f64> = (0..n_z).map(|j| force_z[j] - grad[n_u + j]).collect();

        let opts = AltMinOptions {
            tol: self.cfg.am_tol,
            maxit: self.cfg.am_maxit,
        };
        let sol = prep.qp.solve(&b_u, &b_z, &vec![0.0; n_z], opts)?;
        let (du, dz) = (sol.u, sol.z);

        let u1: Vec<f64> = s.u.iter().zip(&du).map(|(a, d)| a + d).collect();
        let v1: Vec<f64> = match scheme {
            Scheme::BackwardEuler => du.iter().map(|d| d / tau).collect(),
            _ => du.iter().zip(&s.v).map(|(d, v)| 2.0 * d / tau - v).collect(),
        };
        let pi1: Vec<f64> = s.pi.iter().zip(&dz[..dims.n_pi]).map(|(a, d)| a + d).collect();
        let zeta_mid: Vec<f64> = if joint {
            s.zeta.iter().zip(&dz[dims.n_pi..]).map(|(a, d)| a + d).collect()
        } else {
            s.zeta.clone()
        };

        let dx: Vec<f64> = du.iter().chain(&dz).copied().collect();
        let dissip_viscous = model.viscosity.as_ref().map_or(0.0, |d| d.quad_form(&dx) / tau);
        let dissip_ri: f64 = model
            .groups
            .iter()
            .map(|g| {
                let inc: Vec<f64> = g.dofs.iter().map(|&d| dz[d]).collect();
                g.dissipation(&inc)
            })
            .sum();
        let work_up = dot(&loads.f, &du) + dot(&force_z, &dz);

        let kinetic0 = 0.5 * dot(&s.v, &mv);
        let energy_prev = kinetic0 + problem.stored_energy(&s.u, &s.pi, &s.zeta)?.total();
        let kinetic1 = 0.5 * problem.mass().quad_form(&v1);
        let stored_mid = problem.stored_energy(&u1, &pi1, &zeta_mid)?;
        let residual_up =
            kinetic1 + stored_mid.total() - energy_prev + dissip_viscous + dissip_ri - work_up;

        let mut out = StepEnergy {
            t: s.t + tau,
            kinetic: kinetic1,
            stored: stored_mid,
            energy_prev,
            dissip_viscous,
            dissip_rate_indep: dissip_ri,
            work: work_up,
            residual: residual_up,
            residual_up,
            residual_zeta: 0.0,
            sweeps: sol.iterations,
        };

        let zeta1 = if !joint && problem.zeta_evolves() {
            let zs = problem
                .zeta_substep(&u1, &pi1, &s.zeta, tau, &loads.h)
                .map_err(|e| Error::ZetaSubstepFailed(Box::new(e)))?;
            check_len("damage update", dims.n_zeta, zs.zeta.len())?;
            let stored_new = problem.stored_energy(&u1, &pi1, &zs.zeta)?;
            let dzeta: Vec<f64> = zs.zeta.iter().zip(&s.zeta).map(|(a, b)| a - b).collect();
            let work_z = dot(&loads.h, &dzeta);
            let residual_zeta = stored_new.total() - stored_mid.total() + zs.dissip_viscous
                + zs.dissip_rate_indep
                - work_z;
            out.stored = stored_new;
            out.dissip_viscous += zs.dissip_viscous;
            out.dissip_rate_indep += zs.dissip_rate_indep;
            out.work += work_z;
            out.residual_zeta = residual_zeta;
            out.residual = residual_up + residual_zeta;
            zs.zeta
        } else {
            zeta_mid
        };

        let next = State3F {
            t: s.t + tau,
            u: u1,
            v: v1,
            pi: pi1,
            zeta: zeta1,
        };
        Ok((next, out))
    }

    fn prepare<P: ProblemInstance + ?Sized>(
        &mut self,
        problem: &P,
        tau: f64,
        zeta: &[f64],
        joint: bool,
    ) -> Result<()> {
        let scheme = self.cfg.scheme;
        let key_zeta: &[f64] = if joint { &[] } else { zeta };
        if let Some(p) = &self.cache {
            if p.scheme == scheme
                && p.tau_bits == tau.to_bits()
                && p.joint == joint
                && p.zeta.len() == key_zeta.len()
                && p.zeta.iter().zip(key_zeta).all(|(a, b)| a.to_bits() == b.to_bits())
            {
                return Ok(());
            }
        }
        let model = if joint {
            problem.joint_model().expect("checked by caller")
        } else {
            problem.split_model(zeta)?
        };
        model.validate()?;
        let n = model.n_u + model.n_z;
        let mass = problem.mass();
        check_len("mass", model.n_u, mass.dim())?;
        let mass = mass.padded(n);
        let (cm, ca) = match scheme {
            Scheme::BackwardEuler => (1.0 / (tau * tau), 1.0),
            _ => (2.0 / (tau * tau), 0.5),
        };
        let mut terms: Vec<(f64, &SparseSymmetric)> = vec![(cm, &mass), (ca, &model.stiffness)];
        if let Some(d) = &model.viscosity {
            terms.push((1.0 / tau, d));
        }
        let q = SparseSymmetric::linear_combination(&terms)?;
        let mut fixed = model.fixed_u.clone();
        fixed.resize(n, false);
        let q = q.with_fixed_dofs(&fixed);
        let (uu, uz, zz) = q.split(model.n_u);
        let qp = AltMinProblem::new(uu, uz, zz, &model.groups, self.cfg.lin_tol)?;
        self.cache = Some(Prepared {
            scheme,
            tau_bits: tau.to_bits(),
            zeta: key_zeta.to_vec(),
            joint,
            model,
            qp,
        });
        Ok(())
    }
}

pub fn sample_loads<P: ProblemInstance + ?Sized>(
    problem: &P,
    t0: f64,
    t1: f64,
    sampling: LoadSampling,
) -> Loads {
    match sampling {
        LoadSampling::RightEndpoint => problem.loads(t1),
        LoadSampling::Midpoint => problem.loads(0.5 * (t0 + t1)),
        LoadSampling::Average => Loads::combine(&problem.loads(t0), 0.5, &problem.loads(t1), 0.5),
    }
}

fn with_scheme(cfg: &SchemeConfig, scheme: Scheme) -> SchemeConfig {
    SchemeConfig { scheme, ..*cfg }
}

pub fn step_cn_monolithic<P: ProblemInstance + ?Sized>(
    problem: &P,
    s: &State3F,
    cfg: &SchemeConfig,
) -> Result<(State3F, StepEnergy)> {
    Stepper::new(with_scheme(cfg, Scheme::CnMonolithic))?.step(problem, s)
}

pub fn step_fractional<P: ProblemInstance + ?Sized>(
    problem: &P,
    s: &State3F,
    cfg: &SchemeConfig,
) -> Result<(State3F, StepEnergy)> {
    Stepper::new(with_scheme(cfg, Scheme::FractionalStep))?.step(problem, s)
}

pub fn step_backward_euler<P: ProblemInstance + ?Sized>(
    problem: &P,
    s: &State3F,
    cfg: &SchemeConfig,
) -> Result<(State3F, StepEnergy)> {
    Stepper::new(with_scheme(cfg, Scheme::BackwardEuler))?.step(problem, s)
}

/// Total energy of a state: kinetic plus stored.
pub fn total_energy<P: ProblemInstance + ?Sized>(problem: &P, s: &State3F) -> Result<f64> {
    s.validate(problem.dims())?;
    Ok(0.5 * problem.mass().quad_form(&s.v) + problem.stored_energy(&s.u, &s.pi, &s.zeta)?.total())
}

/// `E(s_next) - E(s_prev) + step_dissip - step_work`.
pub fn energy_balance_residual<P: ProblemInstance + ?Sized>(
    problem: &P,
    s_prev: &State3F,
    s_next: &State3F,
    step_dissip: f64,
    step_work: f64,
) -> Result<f64> {
    Ok(total_energy(problem, s_next)? - total_energy(problem, s_prev)? + step_dissip - step_work)
}

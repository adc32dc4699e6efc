use super::ledger::EnergyLedger;
use super::problem::ProblemInstance;
use super::state::{SchemeConfig, State3F};
use super::stepper::{StepEnergy, Stepper};
use crate::error::{Error, Result};

/// Receives every accepted state. `initial` is called once before stepping.
pub trait Observer<P: ?Sized> {
    fn initial(&mut self, _problem: &P, _state: &State3F) -> Result<()> {
        Ok(())
    }

    fn observe(&mut self, problem: &P, state: &State3F, energy: &StepEnergy) -> Result<()>;
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub final_state: State3F,
    pub ledger: EnergyLedger,
    pub total_sweeps: usize,
}

/// Advances `s0` by `n_steps` uniform steps of `cfg.tau`.
pub fn run_trajectory<P: ProblemInstance + ?Sized>(
    problem: &mut P,
    s0: &State3F,
    cfg: &SchemeConfig,
    n_steps: usize,
    observers: &mut [&mut dyn Observer<P>],
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    let mut stepper = Stepper::new(*cfg)?;
    s0.validate(problem.dims())?;
    let stored0 = problem.stored_energy(&s0.u, &s0.pi, &s0.zeta)?;
    let kinetic0 = 0.5 * problem.mass().quad_form(&s0.v);
    let mut ledger = EnergyLedger::new(s0.t, kinetic0, stored0);
    for o in observers.iter_mut() {
        o.initial(problem, s0)?;
    }

    let mut s = s0.clone();
    let mut total_sweeps = 0;
    for k in 1..=n_steps {
        let wrap = |e: Error| Error::StepFailed {
            step: k,
            source: Box::new(e),
        };
        let (mut next, mut energy) = stepper.step(&*problem, &s).map_err(wrap)?;
        // pin the clock to t_0 + k tau so it does not drift
        next.t = s0.t + k as f64 * cfg.tau;
        energy.t = next.t;
        ledger.push(&energy);
        total_sweeps += energy.sweeps;
        for o in observers.iter_mut() {
            o.observe(problem, &next, &energy).map_err(wrap)?;
        }
        problem.after_step(&next);
        s = next;
    }
    Ok(Trajectory {
        final_state: s,
        ledger,
        total_sweeps,
    })
}

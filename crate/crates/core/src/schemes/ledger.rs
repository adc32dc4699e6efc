use super::problem::EnergyParts;
use super::stepper::StepEnergy;

/// One row of the energy audit.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub kinetic: f64,
    pub stored: EnergyParts,
    pub dissip_viscous_cum: f64,
    pub dissip_rate_indep_cum: f64,
    pub work_ext_cum: f64,
    /// `E_k + dissipation_cum - work_cum - E_0`.
    pub residual: f64,
    pub step_residual: f64,
    pub step_relative_residual: f64,
}

/// Running energy audit of a trajectory. Row 0 is the initial state.
#[derive(Clone, Debug, Default)]
pub struct EnergyLedger {
    rows: Vec<LedgerRow>,
    initial_total: f64,
    step_residual_sum: f64,
}

impl EnergyLedger {
    pub fn new(t0: f64, kinetic: f64, stored: EnergyParts) -> Self {
        EnergyLedger {
            rows: vec![LedgerRow {
                t: t0,
                kinetic,
                stored,
                ..Default::default()
            }],
            initial_total: kinetic + stored.total(),
            step_residual_sum: 0.0,
        }
    }

    pub fn push(&mut self, step: &StepEnergy) {
        let last = *self.rows.last().expect("ledger has an initial row");
        let dv = last.dissip_viscous_cum + step.dissip_viscous;
        let dr = last.dissip_rate_indep_cum + step.dissip_rate_indep;
        let w = last.work_ext_cum + step.work;
        self.step_residual_sum += step.residual;
        self.rows.push(LedgerRow {
            t: step.t,
            kinetic: step.kinetic,
            stored: step.stored,
            dissip_viscous_cum: dv,
            dissip_rate_indep_cum: dr,
            work_ext_cum: w,
            residual: step.total() + dv + dr - w - self.initial_total,
            step_residual: step.residual,
            step_relative_residual: step.relative_residual(),
        });
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn initial_total(&self) -> f64 {
        self.initial_total
    }

    pub fn step_residual_sum(&self) -> f64 {
        self.step_residual_sum
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.rows
            .iter()
            .skip(1)
            .map(|r| r.step_relative_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().skip(1).map(|r| r.step_residual.abs()).fold(0.0, f64::max)
    }
}

impl LedgerRow {
    pub fn total(&self) -> f64 {
        self.kinetic + self.stored.total()
    }
}

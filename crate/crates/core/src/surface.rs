//! Adhesive contact on the bottom edge of an elastic bar: Tresca-type slip
//! (friction) or Mode-II delamination.

use crate::degradation::GammaKind;
use crate::error::{check_len, Error, Result};
use crate::fem::{
    assemble_operators_with, traction_load, AssembledOperators, EdgeTag, ElasticityParams, Mesh2D,
};
use crate::exec::Execution;
use crate::schemes::{Dims, EnergyParts, Loads, ProblemInstance, QuadraticModel, State3F, ZetaStep};
use crate::subsolvers::{prox_damage_unidirectional, OneHomGroup, SparseSymmetric};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceParams {
    /// Adhesive stiffness [Pa/m].
    pub k_adh: f64,
    /// Slip threshold [Pa].
    pub sigma_y: f64,
    /// Mode-II fracture toughness [J/m^2].
    pub a2: f64,
    /// Slip hardening [Pa/m].
    pub kappa0: f64,
    pub gamma: GammaKind,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        SurfaceParams {
            k_adh: 75e9,
            sigma_y: 3e6,
            a2: 187.5,
            kappa0: 0.0,
            gamma: GammaKind::Affine,
        }
    }
}

impl SurfaceParams {
    /// Tangential gap at which an undamaged segment ruptures.
    pub fn rupture_gap(&self) -> f64 {
        (2.0 * self.a2 / self.k_adh).sqrt()
    }
}

/// Time profile `q(t)` of the edge traction [Pa].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Waveform {
    /// `0 -> +A -> 0 -> -A -> 0` over each period.
    TriangleCyclic { amplitude: f64, period: f64 },
    /// `A * min(t / ramp_end, 1)`; switched off once the interface has
    /// completely ruptured.
    RampThenDrop { amplitude: f64, ramp_end: f64 },
    Constant(f64),
}

impl Waveform {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Waveform::TriangleCyclic { amplitude, period } => {
                let s = (t / period).rem_euclid(1.0);
                let shape = if s < 0.25 {
                    4.0 * s
                } else if s < 0.75 {
                    2.0 - 4.0 * s
                } else {
                    4.0 * s - 4.0
                };
                amplitude * shape
            }
            Waveform::RampThenDrop { amplitude, ramp_end } => amplitude * (t / ramp_end).clamp(0.0, 1.0),
            Waveform::Constant(q) => q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Waveform::TriangleCyclic { amplitude, period } => amplitude >= 0.0 && period > 0.0,
            Waveform::RampThenDrop { amplitude, ramp_end } => amplitude >= 0.0 && ramp_end > 0.0,
            Waveform::Constant(q) => q.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid waveform {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Slip evolves, damage frozen.
    Friction,
    /// Damage evolves, no slip.
    Delamination,
}

pub struct SurfaceProblem {
    kind: SurfaceKind,
    mesh: Mesh2D,
    ops: AssembledOperators,
    params: SurfaceParams,
    load_pattern: Vec<f64>,
    waveform: Waveform,
    load_on: bool,
    rupture_time: Option<f64>,
}

pub fn make_friction_problem(
    mesh: Mesh2D,
    elastic: &ElasticityParams,
    surf: &SurfaceParams,
    waveform: Waveform,
) -> Result<SurfaceProblem> {
    if !(surf.sigma_y > 0.0) {
        return Err(Error::InvalidArgument(format!("friction threshold {} must be > 0", surf.sigma_y)));
    }
    SurfaceProblem::new(SurfaceKind::Friction, mesh, elastic, surf, waveform, Execution::default())
}

pub fn make_delamination_problem(
    mesh: Mesh2D,
    elastic: &ElasticityParams,
    surf: &SurfaceParams,
    waveform: Waveform,
) -> Result<SurfaceProblem> {
    if !(surf.a2 > 0.0) {
        return Err(Error::InvalidArgument(format!("toughness {} must be > 0", surf.a2)));
    }
    if surf.gamma != GammaKind::Affine {
        return Err(Error::InvalidArgument(
            "delamination uses the affine degradation gamma(z) = z".into(),
        ));
    }
    SurfaceProblem::new(SurfaceKind::Delamination, mesh, elastic, surf, waveform, Execution::default())
}

impl SurfaceProblem {
    pub fn new(
        kind: SurfaceKind,
        mesh: Mesh2D,
        elastic: &ElasticityParams,
        surf: &SurfaceParams,
        waveform: Waveform,
        exec: Execution,
    ) -> Result<Self> {
        surf.gamma.validate()?;
        waveform.validate()?;
        if !(surf.k_adh > 0.0) || !(surf.kappa0 >= 0.0) || !(surf.sigma_y >= 0.0) || !(surf.a2 >= 0.0) {
            return Err(Error::InvalidArgument(format!("surface parameters out of range: {surf:?}")));
        }
        let ops = assemble_operators_with(&mesh, elastic, surf.k_adh, exec)?;
        if ops.adhesive.is_empty() {
            return Err(Error::UnknownTag(EdgeTag::Contact.name().into()));
        }
        let load_pattern = traction_load(&mesh, EdgeTag::Load, [1.0, 0.0])?;
        Ok(SurfaceProblem {
            kind,
            mesh,
            ops,
            params: *surf,
            load_pattern,
            waveform,
            load_on: true,
            rupture_time: None,
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn operators(&self) -> &AssembledOperators {
        &self.ops
    }

    pub fn params(&self) -> &SurfaceParams {
        &self.params
    }

    pub fn waveform(&self) -> &Waveform {
        &self.waveform
    }

    pub fn n_contact(&self) -> usize {
        self.ops.adhesive.len()
    }

    /// Edge traction currently applied [Pa].
    pub fn load_value(&self, t: f64) -> f64 {
        if self.load_on {
            self.waveform.value(t)
        } else {
            0.0
        }
    }

    /// Time at which the last contact segment ruptured.
    pub fn rupture_time(&self) -> Option<f64> {
        self.rupture_time
    }

    /// Mean tangential displacement of contact segment `e`.
    pub fn trace(&self, u: &[f64], e: usize) -> f64 {
        self.ops.adhesive[e].trace(u)
    }

    fn slip(&self, pi: &[f64], e: usize) -> f64 {
        match self.kind {
            SurfaceKind::Friction => pi[e],
            SurfaceKind::Delamination => 0.0,
        }
    }

    /// Adhesive shear traction on segment `e` [Pa].
    pub fn traction(&self, s: &State3F, e: usize) -> f64 {
        self.params.gamma.value(s.zeta[e]) * self.params.k_adh * (self.trace(&s.u, e) - self.slip(&s.pi, e))
    }

    /// Centre of contact segment `e`.
    pub fn segment_midpoint(&self, e: usize) -> [f64; 2] {
        let seg = self.mesh.segments[self.ops.adhesive[e].segment];
        let (a, b) = (self.mesh.nodes[seg.nodes[0]], self.mesh.nodes[seg.nodes[1]]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn stored_energy_parts(&self, s: &State3F) -> Result<EnergyParts> {
        self.stored_energy(&s.u, &s.pi, &s.zeta)
    }
}

impl ProblemInstance for SurfaceProblem {
    fn dims(&self) -> Dims {
        let n_c = self.n_contact();
        Dims {
            n_u: self.ops.n_dofs(),
            n_pi: if self.kind == SurfaceKind::Friction { n_c } else { 0 },
            n_zeta: n_c,
        }
    }

    fn mass(&self) -> &SparseSymmetric {
        &self.ops.mass
    }

    fn split_model(&self, zeta: &[f64]) -> Result<QuadraticModel> {
        let dims = self.dims();
        check_len("damage", dims.n_zeta, zeta.len())?;
        let (n_u, n_z) = (dims.n_u, dims.n_pi);
        let n = n_u + n_z;
        let mut t: Vec<_> = self.ops.stiffness.matrix().triplets().collect();
        let mut groups = Vec::with_capacity(n_z);
        for (e, seg) in self.ops.adhesive.iter().enumerate() {
            let w = self.params.gamma.value(zeta[e]) * seg.weight;
            for &a in &seg.dofs {
                for &b in &seg.dofs {
                    t.push((a, b, 0.25 * w));
                }
            }
            if self.kind == SurfaceKind::Friction {
                let p = n_u + e;
                for &a in &seg.dofs {
                    t.push((a, p, -0.5 * w));
                    t.push((p, a, -0.5 * w));
                }
                t.push((p, p, w + self.params.kappa0 * seg.length));
                groups.push(OneHomGroup::scalar(e, self.params.sigma_y * seg.length));
            }
        }
        Ok(QuadraticModel {
            n_u,
            n_z,
            stiffness: SparseSymmetric::from_full_triplets(n, &t)?,
            linear: vec![0.0; n],
            viscosity: Some(self.ops.viscosity.padded(n)),
            groups,
            fixed_u: self.ops.fixed.clone(),
        })
    }

    fn zeta_evolves(&self) -> bool {
        self.kind == SurfaceKind::Delamination
    }

    fn stored_energy(&self, u: &[f64], pi: &[f64], zeta: &[f64]) -> Result<EnergyParts> {
        let dims = self.dims();
        check_len("displacement", dims.n_u, u.len())?;
        check_len("slip", dims.n_pi, pi.len())?;
        check_len("damage", dims.n_zeta, zeta.len())?;
        let mut parts = EnergyParts {
            elastic_bulk: 0.5 * self.ops.stiffness.quad_form(u),
            ..Default::default()
        };
        for (e, seg) in self.ops.adhesive.iter().enumerate() {
            let gap = seg.trace(u) - self.slip(pi, e);
            parts.adhesive += 0.5 * self.params.gamma.value(zeta[e]) * seg.weight * gap * gap;
            if self.kind == SurfaceKind::Friction {
                parts.hardening += 0.5 * self.params.kappa0 * seg.length * pi[e] * pi[e];
            }
        }
        Ok(parts)
    }

    fn zeta_substep(&self, u: &[f64], _pi: &[f64], zeta_old: &[f64], _tau: f64, h: &[f64]) -> Result<ZetaStep> {
        if self.kind == SurfaceKind::Friction {
            return Ok(ZetaStep {
                zeta: zeta_old.to_vec(),
                dissip_viscous: 0.0,
                dissip_rate_indep: 0.0,
            });
        }
        let mut zeta = Vec::with_capacity(zeta_old.len());
        let mut dissip = 0.0;
        for (e, seg) in self.ops.adhesive.iter().enumerate() {
            let ut = seg.trace(u);
            // drive per unit length, net of any external damage load
            let drive = (0.5 * self.params.k_adh * ut * ut - h[e] / seg.length).max(0.0);
            let z = prox_damage_unidirectional(zeta_old[e], drive, self.params.a2)?;
            dissip += self.params.a2 * seg.length * (zeta_old[e] - z);
            zeta.push(z);
        }
        Ok(ZetaStep {
            zeta,
            dissip_viscous: 0.0,
            dissip_rate_indep: dissip,
        })
    }

    fn loads(&self, t: f64) -> Loads {
        let q = self.load_value(t);
        let dims = self.dims();
        Loads {
            f: self.load_pattern.iter().map(|p| q * p).collect(),
            g: vec![0.0; dims.n_pi],
            h: vec![0.0; dims.n_zeta],
        }
    }

    fn after_step(&mut self, state: &State3F) {
        if self.kind == SurfaceKind::Delamination
            && self.rupture_time.is_none()
            && state.zeta.iter().all(|&z| z == 0.0)
        {
            self.rupture_time = Some(state.t);
            if matches!(self.waveform, Waveform::RampThenDrop { .. }) {
                self.load_on = false;
            }
        }
    }
}

//! Damageable elasto-visco-plastic bulk in plane strain.
//!
//! Plastic strain is piecewise constant and deviatoric, stored per element as
//! `(p11, p22, p12)`. Damage lives on the nodes; the degradation at a Gauss
//! point interpolates the nodal values `gamma(zeta_n)`, so the elastic energy is
//! `sum_n gamma(zeta_n) rho_n` with nodal densities `rho_n`.

use std::collections::HashMap;

use crate::degradation::GammaKind;
use crate::error::{check_len, Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::fem::{
    all_quad_points, assemble_operators_with, build_bar_mesh, traction_load, ContactAnchor, EdgeTag,
    ElasticityParams, Mesh2D, QuadPoint,
};
use crate::schemes::{Dims, EnergyParts, Loads, ProblemInstance, QuadraticModel, State3F, ZetaStep};
use crate::subsolvers::{prox_ball_1hom_metric, GroupMetric, OneHomGroup, SparseSymmetric};
use crate::surface::Waveform;

const DEV: GroupMetric = GroupMetric::Deviatoric2D;
const GS_TOL: f64 = 1e-10;
const GS_MAXIT: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BulkParams {
    pub elastic: ElasticityParams,
    /// Kinematic hardening modulus [Pa].
    pub h_hard: f64,
    /// Yield stress [Pa]; `f64::INFINITY` freezes plasticity.
    pub sigma_y: f64,
    /// Plastic strain gradient coefficient [Pa m^2].
    pub kappa1: f64,
    /// Damage gradient coefficient [J/m].
    pub kappa2: f64,
    /// Residual stiffness of `gamma(z) = eps + z^2`.
    pub eps: f64,
    /// Damage dissipation density [J/m^3]; `f64::INFINITY` freezes damage.
    pub alpha: f64,
}

impl Default for BulkParams {
    fn default() -> Self {
        BulkParams {
            elastic: ElasticityParams::default(),
            h_hard: 5e9,
            sigma_y: 50e6,
            kappa1: 0.0,
            kappa2: 0.0,
            eps: 1e-3,
            alpha: 4e4,
        }
    }
}

impl BulkParams {
    pub fn validate(&self) -> Result<()> {
        self.elastic.validate()?;
        self.gamma().validate()?;
        let ok = self.h_hard >= 0.0
            && self.h_hard.is_finite()
            && self.sigma_y >= 0.0
            && self.kappa1 >= 0.0
            && self.kappa1.is_finite()
            && self.kappa2 >= 0.0
            && self.kappa2.is_finite()
            && self.alpha >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bulk parameters out of range: {self:?}")))
        }
    }

    pub fn gamma(&self) -> GammaKind {
        GammaKind::Smooth { eps: self.eps }
    }
}

/// Displacement constraints of the bulk specimen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BulkSupport {
    /// Unconstrained; only inertia controls rigid motions.
    Free,
    /// Horizontal dofs of the left edge and the vertical dof of the
    /// bottom-left node fixed.
    #[default]
    LeftRoller,
}

pub struct BulkProblem {
    mesh: Mesh2D,
    params: BulkParams,
    exec: Execution,
    qps: Vec<[QuadPoint; 4]>,
    areas: Vec<f64>,
    mass: SparseSymmetric,
    viscosity: SparseSymmetric,
    laplacian: SparseSymmetric,
    nodal_volume: Vec<f64>,
    /// Element pairs sharing an edge with the weight `edge length / centroid distance`.
    neighbors: Vec<(usize, usize, f64)>,
    fixed: Vec<bool>,
    load_pattern: Vec<f64>,
    waveform: Waveform,
}

pub fn make_bulk_problem(
    mesh: Mesh2D,
    params: &BulkParams,
    support: BulkSupport,
    waveform: Waveform,
) -> Result<BulkProblem> {
    BulkProblem::new(mesh, params, support, waveform, Execution::default())
}

/// A single square element of side `h` loaded on its right edge.
pub fn single_element_mesh(h: f64) -> Result<Mesh2D> {
    build_bar_mesh(h, h, 1, 1, 1.0, ContactAnchor::Left)
}

fn strain_minus_plastic(eps: &[f64; 4], p: &[f64]) -> [f64; 4] {
    [eps[0] - p[0], eps[1] - p[1], eps[2] + p[0] + p[1], eps[3] - p[2]]
}

/// `P^T x` for the map `p -> (p11, p22, -p11 - p22, p12)`.
fn p_transpose(x: &[f64; 4]) -> [f64; 3] {
    [x[0] - x[2], x[1] - x[2], x[3]]
}

fn gram(i: usize, j: usize) -> f64 {
    DEV.gram(i, j)
}

impl BulkProblem {
    pub fn new(
        mesh: Mesh2D,
        params: &BulkParams,
        support: BulkSupport,
        waveform: Waveform,
        exec: Execution,
    ) -> Result<Self> {
        params.validate()?;
        let ops = assemble_operators_with(&mesh, &params.elastic, 0.0, exec)?;
        let qps = all_quad_points(&mesh, exec)?;
        let areas: Vec<f64> = qps.iter().map(|q| q.iter().map(|p| p.weight).sum()).collect();
        let n_nodes = mesh.n_nodes();
        let n_u = mesh.n_dofs();

        let mut lap = Vec::with_capacity(16 * mesh.n_elements());
        let mut nodal_volume = vec![0.0; n_nodes];
        for (e, el) in mesh.elements.iter().enumerate() {
            for p in &qps[e] {
                for a in 0..4 {
                    nodal_volume[el[a]] += p.weight * p.n[a];
                    for b in 0..4 {
                        let g = p.dn[a][0] * p.dn[b][0] + p.dn[a][1] * p.dn[b][1];
                        lap.push((el[a], el[b], p.weight * g));
                    }
                }
            }
        }
        let laplacian = SparseSymmetric::from_full_triplets(n_nodes, &lap)?;

        let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (e, el) in mesh.elements.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = (el[k], el[(k + 1) % 4]);
                edges.entry((a.min(b), a.max(b))).or_default().push(e);
            }
        }
        let centroid = |e: usize| {
            let el = mesh.elements[e];
            let mut c = [0.0; 2];
            for n in el {
                c[0] += 0.25 * mesh.nodes[n][0];
                c[1] += 0.25 * mesh.nodes[n][1];
            }
            c
        };
        let mut neighbors: Vec<(usize, usize, f64)> = edges
            .iter()
            .filter(|(_, els)| els.len() == 2)
            .map(|(&(a, b), els)| {
                let len = (mesh.nodes[a][0] - mesh.nodes[b][0]).hypot(mesh.nodes[a][1] - mesh.nodes[b][1]);
                let (ca, cb) = (centroid(els[0]), centroid(els[1]));
                let dist = (ca[0] - cb[0]).hypot(ca[1] - cb[1]);
                (els[0].min(els[1]), els[0].max(els[1]), len / dist)
            })
            .collect();
        neighbors.sort_by_key(|x| (x.0, x.1));

        let mut fixed = vec![false; n_u];
        if support == BulkSupport::LeftRoller {
            let x0 = mesh.nodes.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let mut corner: Option<usize> = None;
            for (i, p) in mesh.nodes.iter().enumerate() {
                if (p[0] - x0).abs() <= 1e-12 * (1.0 + x0.abs()) {
                    fixed[2 * i] = true;
                    if corner.is_none_or(|c| p[1] < mesh.nodes[c][1]) {
                        corner = Some(i);
                    }
                }
            }
            if let Some(c) = corner {
                fixed[2 * c + 1] = true;
            }
        }
        let load_pattern = traction_load(&mesh, EdgeTag::Load, [1.0, 0.0])?;
        waveform.validate()?;

        let mut problem = BulkProblem {
            mesh,
            params: *params,
            exec,
            qps,
            areas,
            mass: ops.mass,
            viscosity: SparseSymmetric::identity(0),
            laplacian,
            nodal_volume,
            neighbors,
            fixed,
            load_pattern,
            waveform,
        };
        let chi = params.elastic.chi;
        let unit = vec![1.0; n_nodes];
        problem.viscosity = problem.assemble(&unit, false)?.scaled(chi);
        Ok(problem)
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn params(&self) -> &BulkParams {
        &self.params
    }

    pub fn waveform(&self) -> &Waveform {
        &self.waveform
    }

    pub fn fixed_dofs(&self) -> &[bool] {
        &self.fixed
    }

    pub fn element_area(&self, e: usize) -> f64 {
        self.areas[e]
    }

    /// `int N_n` over the mesh.
    pub fn nodal_volume(&self) -> &[f64] {
        &self.nodal_volume
    }

    fn gamma_nodes(&self, zeta: &[f64]) -> Vec<f64> {
        let g = self.params.gamma();
        zeta.iter().map(|&z| g.value(z)).collect()
    }

    fn gamma_hat(&self, gnode: &[f64], e: usize, q: usize) -> f64 {
        let el = self.mesh.elements[e];
        (0..4).map(|a| self.qps[e][q].n[a] * gnode[el[a]]).sum()
    }

    fn element_u(&self, u: &[f64], e: usize) -> [f64; 8] {
        let el = self.mesh.elements[e];
        std::array::from_fn(|k| u[2 * el[k / 2] + k % 2])
    }

    /// Stiffness on `(u, pi)` with nodal degradation values `gnode`. Hardening
    /// and the plastic gradient term are included when `internal` is set.
    fn assemble(&self, gnode: &[f64], internal: bool) -> Result<SparseSymmetric> {
        let n_u = self.mesh.n_dofs();
        let n = n_u + 3 * self.mesh.n_elements();
        let c = self.params.elastic.tensor();
        let (_, mu) = self.params.elastic.lame();
        let local = map_indexed(self.mesh.n_elements(), self.exec, |e| {
            let mut t = Vec::with_capacity(64 + 48 + 9);
            let el = self.mesh.elements[e];
            let dofs: [usize; 8] = std::array::from_fn(|k| 2 * el[k / 2] + k % 2);
            let mut kuu = [[0.0; 8]; 8];
            let mut kup = [[0.0; 3]; 8];
            let mut gsum = 0.0;
            for (q, p) in self.qps[e].iter().enumerate() {
                let g = self.gamma_hat(gnode, e, q);
                gsum += g * p.weight;
                let b: [[f64; 4]; 8] = std::array::from_fn(|k| p.b_column(k));
                let cb: [[f64; 4]; 8] = std::array::from_fn(|k| {
                    let mut out = [0.0; 4];
                    for i in 0..4 {
                        out[i] = (0..4).map(|j| c[i][j] * b[k][j]).sum();
                    }
                    out
                });
                for i in 0..8 {
                    for j in 0..8 {
                        kuu[i][j] += p.weight * g * (0..4).map(|r| b[i][r] * cb[j][r]).sum::<f64>();
                    }
                    let ptc = p_transpose(&cb[i]);
                    for d in 0..3 {
                        kup[i][d] -= p.weight * g * ptc[d];
                    }
                }
            }
            let pe = n_u + 3 * e;
            for i in 0..8 {
                for j in 0..8 {
                    t.push((dofs[i], dofs[j], 0.5 * (kuu[i][j] + kuu[j][i])));
                }
                for d in 0..3 {
                    t.push((dofs[i], pe + d, kup[i][d]));
                    t.push((pe + d, dofs[i], kup[i][d]));
                }
            }
            let mut diag = 2.0 * mu * gsum;
            if internal {
                diag += self.params.h_hard * self.areas[e];
            }
            for i in 0..3 {
                for j in 0..3 {
                    t.push((pe + i, pe + j, diag * gram(i, j)));
                }
            }
            t
        });
        let mut t: Vec<_> = local.into_iter().flatten().collect();
        if internal && self.params.kappa1 > 0.0 {
            for &(a, b, w) in &self.neighbors {
                let k = self.params.kappa1 * w;
                for i in 0..3 {
                    for j in 0..3 {
                        let g = k * gram(i, j);
                        t.push((n_u + 3 * a + i, n_u + 3 * a + j, g));
                        t.push((n_u + 3 * b + i, n_u + 3 * b + j, g));
                        t.push((n_u + 3 * a + i, n_u + 3 * b + j, -g));
                        t.push((n_u + 3 * b + i, n_u + 3 * a + j, -g));
                    }
                }
            }
        }
        SparseSymmetric::from_full_triplets(n, &t)
    }

    fn check(&self, u: &[f64], pi: &[f64]) -> Result<()> {
        check_len("displacement", self.mesh.n_dofs(), u.len())?;
        check_len("plastic strain", 3 * self.mesh.n_elements(), pi.len())
    }

    /// Elastic energy density `(e - P pi) : C (e - P pi)` at every Gauss point.
    fn densities(&self, u: &[f64], pi: &[f64]) -> Vec<[f64; 4]> {
        let c = self.params.elastic.tensor();
        map_indexed(self.mesh.n_elements(), self.exec, |e| {
            let ue = self.element_u(u, e);
            std::array::from_fn(|q| {
                let el = strain_minus_plastic(&self.qps[e][q].strain(&ue), &pi[3 * e..3 * e + 3]);
                (0..4)
                    .map(|i| el[i] * (0..4).map(|j| c[i][j] * el[j]).sum::<f64>())
                    .sum()
            })
        })
    }

    /// `rho_n = 1/2 int N_n (e - P pi) : C (e - P pi)`.
    pub fn nodal_densities(&self, u: &[f64], pi: &[f64]) -> Result<Vec<f64>> {
        self.check(u, pi)?;
        let psi = self.densities(u, pi);
        let mut rho = vec![0.0; self.mesh.n_nodes()];
        for (e, el) in self.mesh.elements.iter().enumerate() {
            for (q, p) in self.qps[e].iter().enumerate() {
                for a in 0..4 {
                    rho[el[a]] += 0.5 * p.weight * p.n[a] * psi[e][q];
                }
            }
        }
        Ok(rho)
    }

    /// Differential quotient of the stored energy in `zeta`:
    /// `chord(z_new, z_old) * rho + kappa2 * L (z_new + z_old) / 2`.
    pub fn quotient_zeta(&self, u: &[f64], pi: &[f64], zeta_new: &[f64], zeta_old: &[f64]) -> Result<Vec<f64>> {
        let n = self.mesh.n_nodes();
        check_len("damage", n, zeta_new.len())?;
        check_len("damage", n, zeta_old.len())?;
        let rho = self.nodal_densities(u, pi)?;
        let mid: Vec<f64> = zeta_new.iter().zip(zeta_old).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut out = self.laplacian.mul_vec(&mid);
        let g = self.params.gamma();
        for i in 0..n {
            out[i] = self.params.kappa2 * out[i] + g.chord(zeta_new[i], zeta_old[i]) * rho[i];
        }
        Ok(out)
    }

    /// Minimizes the potential of the damage quotient plus the unidirectional
    /// dissipation over `0 <= zeta <= zeta_old`.
    pub fn zeta_substep_quotient(
        &self,
        u: &[f64],
        pi: &[f64],
        zeta_old: &[f64],
        h: &[f64],
    ) -> Result<ZetaStep> {
        let n = self.mesh.n_nodes();
        check_len("damage", n, zeta_old.len())?;
        check_len("damage load", n, h.len())?;
        let rho = self.nodal_densities(u, pi)?;
        let alpha = self.params.alpha;
        // driving force toward lower damage: dissipation weight plus load
        let resist: Vec<f64> = (0..n)
            .map(|i| if alpha.is_infinite() { f64::INFINITY } else { alpha * self.nodal_volume[i] + h[i] })
            .collect();
        let k2 = self.params.kappa2;
        let mut z = zeta_old.to_vec();
        if k2 == 0.0 {
            for i in 0..n {
                z[i] = if rho[i] > 0.0 {
                    (resist[i] / rho[i] - zeta_old[i]).clamp(0.0, zeta_old[i])
                } else if resist[i] >= 0.0 {
                    zeta_old[i]
                } else {
                    0.0
                };
            }
        } else {
            let lz_old = self.laplacian.mul_vec(zeta_old);
            let m = self.laplacian.matrix();
            let mut it = 0;
            loop {
                let mut change: f64 = 0.0;
                for i in 0..n {
                    let (cols, vals) = m.row(i);
                    let mut lz = 0.0;
                    let mut lii = 0.0;
                    for (&j, &v) in cols.iter().zip(vals) {
                        lz += v * z[j];
                        if j == i {
                            lii = v;
                        }
                    }
                    let grad = rho[i] * (z[i] + zeta_old[i]) - resist[i] + 0.5 * k2 * (lz + lz_old[i]);
                    let curv = rho[i] + 0.5 * k2 * lii;
                    let next = (z[i] - grad / curv).clamp(0.0, zeta_old[i]);
                    change = change.max((next - z[i]).abs());
                    z[i] = next;
                }
                it += 1;
                if change <= GS_TOL {
                    break;
                }
                if it >= GS_MAXIT {
                    return Err(Error::NonConverged {
                        solver: "projected Gauss-Seidel",
                        iterations: it,
                        gap: change,
                    });
                }
            }
        }
        let mut dissip = 0.0;
        let q = if k2 > 0.0 || z.contains(&0.0) {
            Some(self.quotient_zeta(u, pi, &z, zeta_old)?)
        } else {
            None
        };
        for i in 0..n {
            let dz = zeta_old[i] - z[i];
            if dz == 0.0 {
                continue;
            }
            dissip += alpha * self.nodal_volume[i] * dz;
            if z[i] == 0.0 {
                // work of the reaction keeping zeta >= 0
                let q = q.as_ref().map_or(0.0, |q| q[i]);
                dissip += (q - resist[i]).max(0.0) * dz;
            }
        }
        Ok(ZetaStep {
            zeta: z,
            dissip_viscous: 0.0,
            dissip_rate_indep: dissip,
        })
    }

    /// One-step plastic return at frozen `u` and `zeta`.
    pub fn static_return_map(&self, u: &[f64], pi_old: &[f64], zeta: &[f64]) -> Result<Vec<f64>> {
        self.check(u, pi_old)?;
        let model = self.split_model(zeta)?;
        let n_u = self.mesh.n_dofs();
        let a = model.stiffness.matrix();
        let mut pi = pi_old.to_vec();
        for e in 0..self.mesh.n_elements() {
            let mut y = [0.0; 3];
            for (d, yd) in y.iter_mut().enumerate() {
                let (cols, vals) = a.row(n_u + 3 * e + d);
                let mut r = 0.0;
                for (&j, &v) in cols.iter().zip(vals) {
                    r += v * if j < n_u { u[j] } else { pi_old[j - n_u] };
                }
                *yd = -r;
            }
            let curv = a.get(n_u + 3 * e, n_u + 3 * e) / gram(0, 0);
            let w = self.params.sigma_y * self.areas[e];
            if w.is_infinite() {
                continue;
            }
            let dp = prox_ball_1hom_metric(&y, curv, w, DEV)?;
            for d in 0..3 {
                pi[3 * e + d] += dp[d];
            }
        }
        Ok(pi)
    }

    /// Deviatoric stress minus back stress, `2 mu gamma dev(e - P pi) - H pi`,
    /// averaged over element `e`, as `(s11, s22, s12)`.
    pub fn relative_stress(&self, u: &[f64], pi: &[f64], zeta: &[f64], e: usize) -> Result<[f64; 3]> {
        self.check(u, pi)?;
        check_len("damage", self.mesh.n_nodes(), zeta.len())?;
        let force = self.plastic_force(u, pi, zeta, e);
        let s = DEV.inverse_apply(&force);
        Ok([s[0] / self.areas[e], s[1] / self.areas[e], s[2] / self.areas[e]])
    }

    fn plastic_force(&self, u: &[f64], pi: &[f64], zeta: &[f64], e: usize) -> [f64; 3] {
        let gnode = self.gamma_nodes(zeta);
        let c = self.params.elastic.tensor();
        let ue = self.element_u(u, e);
        let p = &pi[3 * e..3 * e + 3];
        let mut f = [0.0; 3];
        for (q, qp) in self.qps[e].iter().enumerate() {
            let g = self.gamma_hat(&gnode, e, q);
            let el = strain_minus_plastic(&qp.strain(&ue), p);
            let sig: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| c[i][j] * el[j]).sum());
            let pt = p_transpose(&sig);
            for d in 0..3 {
                f[d] += qp.weight * g * pt[d];
            }
        }
        for d in 0..3 {
            f[d] -= self.params.h_hard * self.areas[e] * (0..3).map(|j| gram(d, j) * p[j]).sum::<f64>();
        }
        f
    }

    /// Per-element ratio of the plastic driving stress of the step
    /// `old -> new` to the yield stress. The CN step keeps it at or below 1.
    pub fn plastic_utilization(&self, old: &State3F, new: &State3F, tau: f64) -> Result<Vec<f64>> {
        let model = self.split_model(&old.zeta)?;
        let n_u = self.mesh.n_dofs();
        let x0: Vec<f64> = old.u.iter().chain(&old.pi).copied().collect();
        let x1: Vec<f64> = new.u.iter().chain(&new.pi).copied().collect();
        let mid: Vec<f64> = x0.iter().zip(&x1).map(|(a, b)| 0.5 * (a + b)).collect();
        let rate: Vec<f64> = x0.iter().zip(&x1).map(|(a, b)| (b - a) / tau).collect();
        let mut r = model.stiffness.mul_vec(&mid);
        self.viscosity.mul_vec_add(1.0, &rate, &mut r);
        Ok((0..self.mesh.n_elements())
            .map(|e| {
                let f: Vec<f64> = (0..3).map(|d| -r[n_u + 3 * e + d]).collect();
                DEV.dual_norm(&f) / (self.params.sigma_y * self.areas[e])
            })
            .collect())
    }
}

impl ProblemInstance for BulkProblem {
    fn dims(&self) -> Dims {
        Dims {
            n_u: self.mesh.n_dofs(),
            n_pi: 3 * self.mesh.n_elements(),
            n_zeta: self.mesh.n_nodes(),
        }
    }

    fn mass(&self) -> &SparseSymmetric {
        &self.mass
    }

    fn split_model(&self, zeta: &[f64]) -> Result<QuadraticModel> {
        check_len("damage", self.mesh.n_nodes(), zeta.len())?;
        let n_u = self.mesh.n_dofs();
        let n_z = 3 * self.mesh.n_elements();
        let stiffness = self.assemble(&self.gamma_nodes(zeta), true)?;
        let groups = (0..self.mesh.n_elements())
            .map(|e| OneHomGroup {
                dofs: vec![3 * e, 3 * e + 1, 3 * e + 2],
                weight: self.params.sigma_y * self.areas[e],
                metric: DEV,
            })
            .collect();
        Ok(QuadraticModel {
            n_u,
            n_z,
            stiffness,
            linear: vec![0.0; n_u + n_z],
            viscosity: Some(self.viscosity.clone()),
            groups,
            fixed_u: self.fixed.clone(),
        })
    }

    fn zeta_evolves(&self) -> bool {
        self.params.alpha.is_finite()
    }

    fn stored_energy(&self, u: &[f64], pi: &[f64], zeta: &[f64]) -> Result<EnergyParts> {
        self.check(u, pi)?;
        check_len("damage", self.mesh.n_nodes(), zeta.len())?;
        let rho = self.nodal_densities(u, pi)?;
        let g = self.params.gamma();
        let elastic_bulk = rho.iter().zip(zeta).map(|(r, &z)| g.value(z) * r).sum();
        let mut hardening = 0.0;
        for e in 0..self.mesh.n_elements() {
            let p = &pi[3 * e..3 * e + 3];
            hardening += 0.5 * self.params.h_hard * self.areas[e] * DEV.norm(p).powi(2);
        }
        if self.params.kappa1 > 0.0 {
            for &(a, b, w) in &self.neighbors {
                let d: Vec<f64> = (0..3).map(|i| pi[3 * a + i] - pi[3 * b + i]).collect();
                hardening += 0.5 * self.params.kappa1 * w * DEV.norm(&d).powi(2);
            }
        }
        if self.params.kappa2 > 0.0 {
            hardening += 0.5 * self.params.kappa2 * self.laplacian.quad_form(zeta);
        }
        Ok(EnergyParts {
            elastic_bulk,
            adhesive: 0.0,
            hardening,
        })
    }

    fn zeta_substep(&self, u: &[f64], pi: &[f64], zeta_old: &[f64], _tau: f64, h: &[f64]) -> Result<ZetaStep> {
        self.zeta_substep_quotient(u, pi, zeta_old, h)
    }

    fn loads(&self, t: f64) -> Loads {
        let q = self.waveform.value(t);
        let dims = self.dims();
        Loads {
            f: self.load_pattern.iter().map(|p| q * p).collect(),
            g: vec![0.0; dims.n_pi],
            h: vec![0.0; dims.n_zeta],
        }
    }
}

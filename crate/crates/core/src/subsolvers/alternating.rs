//! Block alternating minimization for quadratic + grouped 1-homogeneous objectives.
//!
//! Minimizes
//!
//! ```text
//! F(u, z) = 1/2 [u;z]^T [[A_uu, A_uz], [A_zu, A_zz]] [u;z] - b_u.u - b_z.z + sum_g w_g |z_g|_g
//! ```
//!
//! by exact minimization in `u` (one factorization, reused) followed by a
//! Gauss-Seidel pass of closed-form group proxes in `z`.

use super::linear::{LinearSolverKind, SpdSolver};
use super::prox::{prox_ball_1hom_metric, OneHomGroup};
use super::sparse::{dot, CsrMatrix, SparseSymmetric};
use crate::error::{check_len, Error, Result};

/// Relative deviation allowed between a group's diagonal block and `a * G`.
const BLOCK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct AltMinResult {
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub iterations: usize,
    pub objective: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AltMinOptions {
    pub tol: f64,
    pub maxit: usize,
}

impl Default for AltMinOptions {
    fn default() -> Self {
        AltMinOptions {
            tol: 1e-12,
            maxit: 200,
        }
    }
}

/// Prepared coupled problem. The `u` factorization and the group curvatures
/// are computed once and reused for every right-hand side.
#[derive(Clone, Debug)]
pub struct AltMinProblem {
    uu: SpdSolver,
    uz: CsrMatrix,
    zu: CsrMatrix,
    zz: SparseSymmetric,
    groups: Vec<OneHomGroup>,
    curvature: Vec<f64>,
    joint: Option<SpdSolver>,
}

impl AltMinProblem {
    /// `groups` need not cover every `z` dof; uncovered dofs get a zero weight.
    pub fn new(
        uu: SparseSymmetric,
        uz: CsrMatrix,
        zz: SparseSymmetric,
        groups: &[OneHomGroup],
        lin_tol: f64,
    ) -> Result<Self> {
        let (n_u, n_z) = (uu.dim(), zz.dim());
        check_len("coupling rows", n_u, uz.nrows())?;
        check_len("coupling columns", n_z, uz.ncols())?;

        let mut owner = vec![usize::MAX; n_z];
        let mut all = Vec::with_capacity(groups.len());
        for (gi, g) in groups.iter().enumerate() {
            if !(g.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!("group {gi} has weight {}", g.weight)));
            }
            if let Some(d) = g.metric.dim() {
                check_len("group size", d, g.dofs.len())?;
            }
            for &d in &g.dofs {
                if d >= n_z || owner[d] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "group {gi}: dof {d} out of range or shared"
                    )));
                }
                owner[d] = gi;
            }
            all.push(g.clone());
        }
        for d in 0..n_z {
            if owner[d] == usize::MAX {
                all.push(OneHomGroup::scalar(d, 0.0));
            }
        }

        let mut curvature = Vec::with_capacity(all.len());
        for g in &all {
            let a = zz.get(g.dofs[0], g.dofs[0]) / g.metric.gram(0, 0);
            for (i, &di) in g.dofs.iter().enumerate() {
                for (j, &dj) in g.dofs.iter().enumerate() {
                    let expect = a * g.metric.gram(i, j);
                    if (zz.get(di, dj) - expect).abs() > BLOCK_TOL * a.abs().max(f64::MIN_POSITIVE) {
                        return Err(Error::InvalidArgument(format!(
                            "diagonal block of group at dof {} is not a multiple of its metric",
                            g.dofs[0]
                        )));
                    }
                }
            }
            if !(a > 0.0) && g.weight.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    row: n_u + g.dofs[0],
                    pivot: a,
                });
            }
            curvature.push(a);
        }

        let smooth = all.iter().all(|g| g.weight == 0.0);
        let joint = if smooth && n_z > 0 {
            let mut t: Vec<_> = uu.matrix().triplets().collect();
            for (i, j, v) in uz.triplets() {
                t.push((i, n_u + j, v));
                t.push((n_u + j, i, v));
            }
            t.extend(zz.matrix().triplets().map(|(i, j, v)| (n_u + i, n_u + j, v)));
            let m = SparseSymmetric::from_full_triplets(n_u + n_z, &t)?;
            Some(SpdSolver::new(m, LinearSolverKind::Direct, lin_tol)?)
        } else {
            None
        };

        let zu = transpose(&uz);
        Ok(AltMinProblem {
            uu: SpdSolver::new(uu, LinearSolverKind::Direct, lin_tol)?,
            uz,
            zu,
            zz,
            groups: all,
            curvature,
            joint,
        })
    }

    pub fn n_u(&self) -> usize {
        self.uu.matrix().dim()
    }

    pub fn n_z(&self) -> usize {
        self.zz.dim()
    }

    pub fn objective(&self, u: &[f64], z: &[f64], b_u: &[f64], b_z: &[f64]) -> f64 {
        let mut q = 0.5 * self.uu.matrix().quad_form(u) + 0.5 * self.zz.quad_form(z);
        let uzz = self.uz.mul_vec(z);
        q += dot(u, &uzz);
        q -= dot(b_u, u) + dot(b_z, z);
        for g in &self.groups {
            if g.weight > 0.0 {
                let zg: Vec<f64> = g.dofs.iter().map(|&d| z[d]).collect();
                let n = g.metric.norm(&zg);
                if n != 0.0 {
                    q += g.weight * n;
                }
            }
        }
        q
    }

    /// Minimizes the objective starting from `z0`.
    pub fn solve(&self, b_u: &[f64], b_z: &[f64], z0: &[f64], opts: AltMinOptions) -> Result<AltMinResult> {
        let (n_u, n_z) = (self.n_u(), self.n_z());
        check_len("u right-hand side", n_u, b_u.len())?;
        check_len("z right-hand side", n_z, b_z.len())?;
        check_len("z start", n_z, z0.len())?;
        if !(opts.tol > 0.0) || opts.maxit == 0 {
            return Err(Error::InvalidArgument("alternating tolerance/iteration cap".into()));
        }

        if let Some(joint) = &self.joint {
            let rhs: Vec<f64> = b_u.iter().chain(b_z).copied().collect();
            let x = joint.solve(&rhs)?;
            let (u, z) = (x[..n_u].to_vec(), x[n_u..].to_vec());
            let objective = self.objective(&u, &z, b_u, b_z);
            return Ok(AltMinResult {
                u,
                z,
                iterations: 1,
                objective,
            });
        }

        let mut z = z0.to_vec();
        let mut u = vec![0.0; n_u];
        let mut prev = f64::INFINITY;
        let mut gap = f64::INFINITY;
        for it in 1..=opts.maxit {
            let f;
            (u, f) = self.sweep(b_u, b_z, &mut z)?;
            let scale = f.abs().max(f64::MIN_POSITIVE);
            gap = (prev - f) / scale;
            if it > 1 && prev - f <= opts.tol * scale {
                return Ok(AltMinResult {
                    u,
                    z,
                    iterations: it,
                    objective: f,
                });
            }
            prev = f;
        }
        Err(Error::NonConverged {
            solver: "alternating minimization",
            iterations: opts.maxit,
            gap,
        })
    }

    /// One block sweep: exact `u` solve at the current `z`, then a Gauss-Seidel
    /// pass of group proxes. Returns the new `u` and the objective value.
    pub fn sweep(&self, b_u: &[f64], b_z: &[f64], z: &mut [f64]) -> Result<(Vec<f64>, f64)> {
        let mut rhs = b_u.to_vec();
        self.uz.mul_vec_add(-1.0, z, &mut rhs);
        let u = self.uu.solve(&rhs)?;

        let zu_u = self.zu.mul_vec(&u);
        for (g, &a) in self.groups.iter().zip(&self.curvature) {
            if g.weight == f64::INFINITY {
                g.dofs.iter().for_each(|&d| z[d] = 0.0);
                continue;
            }
            let y: Vec<f64> = g
                .dofs
                .iter()
                .map(|&d| {
                    let (cols, vals) = self.zz.matrix().row(d);
                    let off: f64 = cols
                        .iter()
                        .zip(vals)
                        .filter(|(c, _)| !g.dofs.contains(c))
                        .map(|(&c, &v)| v * z[c])
                        .sum();
                    b_z[d] - zu_u[d] - off
                })
                .collect();
            let p = prox_ball_1hom_metric(&y, a, g.weight, g.metric)?;
            for (&d, pv) in g.dofs.iter().zip(p) {
                z[d] = pv;
            }
        }

        let f = self.objective(&u, z, b_u, b_z);
        if !f.is_finite() {
            return Err(Error::InvalidArgument("non-finite objective".into()));
        }
        Ok((u, f))
    }
}

fn transpose(m: &CsrMatrix) -> CsrMatrix {
    let t: Vec<_> = m.triplets().map(|(i, j, v)| (j, i, v)).collect();
    CsrMatrix::from_triplets(m.ncols(), m.nrows(), &t)
}

/// One-shot convenience wrapper around [`AltMinProblem`].
#[allow(clippy::too_many_arguments)]
pub fn alternating_min(
    a_uu: &SparseSymmetric,
    a_uz: &CsrMatrix,
    a_zz: &SparseSymmetric,
    b_u: &[f64],
    b_z: &[f64],
    groups: &[OneHomGroup],
    opts: AltMinOptions,
    lin_tol: f64,
) -> Result<AltMinResult> {
    let p = AltMinProblem::new(a_uu.clone(), a_uz.clone(), a_zz.clone(), groups, lin_tol)?;
    p.solve(b_u, b_z, &vec![0.0; a_zz.dim()], opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subsolvers::linear::solve_spd;
    use proptest::prelude::*;

    fn toy(k_uu: f64, k_uz: f64, k_zz: f64) -> (SparseSymmetric, CsrMatrix, SparseSymmetric) {
        (
            SparseSymmetric::from_upper_triplets(1, &[(0, 0, k_uu)]),
            CsrMatrix::from_triplets(1, 1, &[(0, 0, k_uz)]),
            SparseSymmetric::from_upper_triplets(1, &[(0, 0, k_zz)]),
        )
    }

    fn toy_objective(u: f64, z: f64, k: (f64, f64, f64), b: (f64, f64), w: f64) -> f64 {
        0.5 * k.0 * u * u + k.1 * u * z + 0.5 * k.2 * z * z - b.0 * u - b.1 * z + w * z.abs()
    }

    #[test]
    fn zero_weights_match_coupled_solve() {
        let (uu, uz, zz) = toy(4.0, -1.0, 3.0);
        let r = alternating_min(&uu, &uz, &zz, &[1.0], &[2.0], &[], AltMinOptions::default(), 1e-14)
            .unwrap();
        let full = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 4.0), (0, 1, -1.0), (1, 1, 3.0)]);
        let x = solve_spd(&full, &[1.0, 2.0], 1e-14).unwrap();
        assert!((r.u[0] - x[0]).abs() < 1e-14 && (r.z[0] - x[1]).abs() < 1e-14);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn two_dof_toy_against_grid_scan() {
        let k = (5.0, -2.0, 2.0);
        let b = (1.0, 3.0);
        let w = 0.7;
        let (uu, uz, zz) = toy(k.0, k.1, k.2);
        let r = alternating_min(
            &uu,
            &uz,
            &zz,
            &[b.0],
            &[b.1],
            &[OneHomGroup::scalar(0, w)],
            AltMinOptions::default(),
            1e-14,
        )
        .unwrap();
        // coarse scan, then refine around the best cell
        let (mut bu, mut bz, mut best) = (0.0, 0.0, f64::INFINITY);
        let mut h = 1e-2;
        let (mut cu, mut cz, mut span) = (0.0, 0.0, 5.0);
        while h >= 1e-7 {
            let n = (2.0 * span / h) as i64;
            for i in 0..=n {
                let u = cu - span + i as f64 * h;
                for j in 0..=n {
                    let z = cz - span + j as f64 * h;
                    let f = toy_objective(u, z, k, b, w);
                    if f < best {
                        best = f;
                        bu = u;
                        bz = z;
                    }
                }
            }
            cu = bu;
            cz = bz;
            span = 5.0 * h;
            h /= 10.0;
        }
        assert!((r.u[0] - bu).abs() < 1e-6, "{} vs {}", r.u[0], bu);
        assert!((r.z[0] - bz).abs() < 1e-6, "{} vs {}", r.z[0], bz);
    }

    #[test]
    fn large_threshold_keeps_z_at_rest() {
        let (uu, uz, zz) = toy(5.0, -2.0, 2.0);
        let r = alternating_min(
            &uu,
            &uz,
            &zz,
            &[1.0],
            &[0.5],
            &[OneHomGroup::scalar(0, 1e6)],
            AltMinOptions::default(),
            1e-14,
        )
        .unwrap();
        assert_eq!(r.z[0], 0.0);
        assert!((r.u[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_groups() {
        let (uu, uz, zz) = toy(1.0, 0.0, 1.0);
        let g = [OneHomGroup::scalar(0, 1.0), OneHomGroup::scalar(0, 1.0)];
        assert!(AltMinProblem::new(uu.clone(), uz.clone(), zz.clone(), &g, 1e-12).is_err());
        let g = [OneHomGroup::scalar(3, 1.0)];
        assert!(AltMinProblem::new(uu, uz, zz, &g, 1e-12).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        // strongly coupled pair, one sweep allowed
        let uu = SparseSymmetric::from_upper_triplets(1, &[(0, 0, 1.0)]);
        let uz = CsrMatrix::from_triplets(1, 2, &[(0, 0, 0.9), (0, 1, 0.3)]);
        let zz = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let g = [OneHomGroup::scalar(0, 0.01)];
        let p = AltMinProblem::new(uu, uz, zz, &g, 1e-14).unwrap();
        let r = p.solve(&[1.0], &[1.0, 1.0], &[0.0, 0.0], AltMinOptions { tol: 1e-15, maxit: 2 });
        assert!(matches!(r, Err(Error::NonConverged { .. })));
    }

    proptest! {
        #[test]
        fn objective_never_increases(
            k_uz in -1.5f64..1.5,
            bu in -3.0f64..3.0,
            bz0 in -3.0f64..3.0,
            bz1 in -3.0f64..3.0,
            w in 0.0f64..2.0,
        ) {
            let uu = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 1, 3.0)]);
            let uz = CsrMatrix::from_triplets(2, 2, &[(0, 0, k_uz), (1, 1, 0.5)]);
            let zz = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 2.0), (1, 1, 2.5)]);
            let g = [OneHomGroup::scalar(0, w), OneHomGroup::scalar(1, w)];
            let p = AltMinProblem::new(uu, uz, zz, &g, 1e-14).unwrap();
            let b_u = [bu, 0.5];
            let b_z = [bz0, bz1];
            let mut last = p.objective(&[0.0, 0.0], &[0.0, 0.0], &b_u, &b_z);
            let mut z = vec![0.0, 0.0];
            for _ in 0..20 {
                let (_, f) = p.sweep(&b_u, &b_z, &mut z).unwrap();
                prop_assert!(f <= last + 1e-12 * (1.0 + last.abs()));
                last = f;
            }
        }
    }
}

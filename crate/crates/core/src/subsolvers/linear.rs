//! Symmetric positive-definite linear solves.
//!
//! The default path is an envelope (skyline) Cholesky factorization, which is
//! exact, deterministic and cheap for the banded systems produced by the
//! structured meshes in this crate. A Jacobi-preconditioned conjugate-gradient
//! solver is kept as an alternative for larger systems.

use super::sparse::{dot, norm, SparseSymmetric};
use crate::error::{check_len, Error, Result};

/// Relative pivot threshold below which the factorization reports breakdown.
const PIVOT_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum LinearSolverKind {
    #[default]
    Direct,
    ConjugateGradient { max_iterations: usize },
}

/// `L L^T` factor stored row-wise from the first structural nonzero of every row.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseSymmetric) -> Result<Self> {
        let n = a.dim();
        let m = a.matrix();
        let first: Vec<usize> = (0..n)
            .map(|i| {
                let (cols, _) = m.row(i);
                cols.first().copied().unwrap_or(i).min(i)
            })
            .collect();
        let mut start = Vec::with_capacity(n + 1);
        let mut len = 0;
        for i in 0..n {
            start.push(len);
            len += i - first[i] + 1;
        }
        start.push(len);

        let mut data = vec![0.0; len];
        for i in 0..n {
            let (cols, vals) = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }

        let mut fac = EnvelopeCholesky { first, start, data };
        for i in 0..n {
            let fi = fac.first[i];
            for j in fi..i {
                let fj = fac.first[j];
                let k0 = fi.max(fj);
                let mut s = fac.data[fac.start[i] + j - fi];
                for k in k0..j {
                    s -= fac.data[fac.start[i] + k - fi] * fac.data[fac.start[j] + k - fj];
                }
                fac.data[fac.start[i] + j - fi] = s / fac.data[fac.start[j] + j - fj];
            }
            let diag_pos = fac.start[i] + i - fi;
            let aii = fac.data[diag_pos];
            let mut s = aii;
            for k in fi..i {
                let l = fac.data[fac.start[i] + k - fi];
                s -= l * l;
            }
            if !(s > PIVOT_TOL * aii.abs()) || !s.is_finite() {
                return Err(Error::NotPositiveDefinite { row: i, pivot: s });
            }
            fac.data[diag_pos] = s.sqrt();
        }
        Ok(fac)
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> f64 {
        self.data[self.start[i] + j - self.first[i]]
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in self.first[i]..i {
                s -= self.l(i, k) * y[k];
            }
            y[i] = s / self.l(i, i);
        }
        for i in (0..n).rev() {
            y[i] /= self.l(i, i);
            let yi = y[i];
            for k in self.first[i]..i {
                y[k] -= self.l(i, k) * yi;
            }
        }
        y
    }
}

/// A prepared SPD solver for one matrix, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct SpdSolver {
    matrix: SparseSymmetric,
    factor: Option<EnvelopeCholesky>,
    kind: LinearSolverKind,
    tol: f64,
}

impl SpdSolver {
    pub fn new(matrix: SparseSymmetric, kind: LinearSolverKind, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("linear tolerance {tol} must be > 0")));
        }
        let factor = match kind {
            LinearSolverKind::Direct => Some(EnvelopeCholesky::factor(&matrix)?),
            LinearSolverKind::ConjugateGradient { .. } => None,
        };
        Ok(SpdSolver {
            matrix,
            factor,
            kind,
            tol,
        })
    }

    pub fn matrix(&self) -> &SparseSymmetric {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len("right-hand side", self.matrix.dim(), b.len())?;
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite right-hand side".into()));
        }
        match (&self.factor, self.kind) {
            (Some(f), _) => self.refine(f, b),
            (None, LinearSolverKind::ConjugateGradient { max_iterations }) => {
                conjugate_gradient(&self.matrix, b, self.tol, max_iterations)
            }
            (None, LinearSolverKind::Direct) => unreachable!("direct solver without factor"),
        }
    }

    /// Direct solve followed by at most three rounds of iterative refinement.
    fn refine(&self, f: &EnvelopeCholesky, b: &[f64]) -> Result<Vec<f64>> {
        let bnorm = norm(b);
        let mut x = f.solve(b);
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut gap = f64::INFINITY;
        for round in 0..=3 {
            let mut r = b.to_vec();
            self.matrix.mul_vec_add(-1.0, &x, &mut r);
            gap = norm(&r) / bnorm;
            if gap <= self.tol * 1e-2 || (round > 0 && gap <= self.tol) {
                return Ok(x);
            }
            if round == 3 {
                break;
            }
            let dx = f.solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
        }
        if gap <= self.tol {
            Ok(x)
        } else {
            Err(Error::NonConverged {
                solver: "direct solve",
                iterations: 3,
                gap,
            })
        }
    }
}

/// Solves `A x = b` with `||A x - b|| <= tol ||b||` by sparse Cholesky.
pub fn solve_spd(a: &SparseSymmetric, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    SpdSolver::new(a.clone(), LinearSolverKind::Direct, tol)?.solve(b)
}

/// Jacobi-preconditioned conjugate gradients.
pub fn conjugate_gradient(
    a: &SparseSymmetric,
    b: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    let n = a.dim();
    check_len("right-hand side", n, b.len())?;
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_iterations {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite { row: it, pivot: pap });
        }
        let alpha = rz / pap;
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
        r.iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= alpha * api);
        if norm(&r) <= tol * bnorm {
            return Ok(x);
        }
        z = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    Err(Error::NonConverged {
        solver: "conjugate gradient",
        iterations: max_iterations,
        gap: norm(&r) / bnorm,
    })
}

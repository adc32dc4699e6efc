//! Bilinear quadrilateral in plane strain.
//!
//! Strains are carried as four tensor components `(e11, e22, e33, e12)` so that
//! plastic strains with a nonzero out-of-plane part fit the same algebra.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticityParams {
    /// Young modulus [Pa].
    pub e: f64,
    pub nu: f64,
    /// Mass density [kg/m^3].
    pub rho: f64,
    /// Kelvin-Voigt relaxation time, viscosity = chi * stiffness [s].
    pub chi: f64,
}

impl Default for ElasticityParams {
    fn default() -> Self {
        ElasticityParams {
            e: 70e9,
            nu: 0.35,
            rho: 2700.0,
            chi: 2e-9,
        }
    }
}

impl ElasticityParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.e > 0.0 && self.nu > 0.0 && self.nu < 0.5 && self.rho > 0.0 && self.chi >= 0.0;
        if ok && [self.e, self.nu, self.rho, self.chi].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("elastic parameters out of range: {self:?}")))
        }
    }

    /// `(lambda, mu)`
    pub fn lame(&self) -> (f64, f64) {
        let lambda = self.e * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu));
        let mu = self.e / (2.0 * (1.0 + self.nu));
        (lambda, mu)
    }

    /// Elasticity tensor acting on `(e11, e22, e33, e12)` tensor components.
    pub fn tensor(&self) -> [[f64; 4]; 4] {
        let (l, m) = self.lame();
        [
            [l + 2.0 * m, l, l, 0.0],
            [l, l + 2.0 * m, l, 0.0],
            [l, l, l + 2.0 * m, 0.0],
            [0.0, 0.0, 0.0, 4.0 * m],
        ]
    }
}

pub(crate) fn apply4(c: &[[f64; 4]; 4], s: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (0..4).map(|j| c[i][j] * s[j]).sum();
    }
    out
}

pub(crate) fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| a[i] * b[i]).sum()
}

pub const GAUSS_2X2: [([f64; 2], f64); 4] = {
    const G: f64 = 0.577_350_269_189_625_8;
    [([-G, -G], 1.0), ([G, -G], 1.0), ([G, G], 1.0), ([-G, G], 1.0)]
};

const REF: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Shape functions, physical gradients and weight `w * det J` at one point.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    pub n: [f64; 4],
    pub dn: [[f64; 2]; 4],
    pub weight: f64,
}

impl QuadPoint {
    /// Strain of the element displacement `ue = (ux0, uy0, ux1, uy1, ...)`.
    pub fn strain(&self, ue: &[f64; 8]) -> [f64; 4] {
        let mut s = [0.0; 4];
        for a in 0..4 {
            let (ux, uy) = (ue[2 * a], ue[2 * a + 1]);
            s[0] += self.dn[a][0] * ux;
            s[1] += self.dn[a][1] * uy;
            s[3] += 0.5 * (self.dn[a][1] * ux + self.dn[a][0] * uy);
        }
        s
    }

    /// Column `k` of the strain-displacement map.
    pub fn b_column(&self, k: usize) -> [f64; 4] {
        let (a, dir) = (k / 2, k % 2);
        let [dx, dy] = self.dn[a];
        if dir == 0 {
            [dx, 0.0, 0.0, 0.5 * dy]
        } else {
            [0.0, dy, 0.0, 0.5 * dx]
        }
    }
}

/// Evaluates the four Gauss points of an element.
pub fn quad_points(xy: &[[f64; 2]; 4], element: usize) -> Result<[QuadPoint; 4]> {
    let mut out = [QuadPoint {
        n: [0.0; 4],
        dn: [[0.0; 2]; 4],
        weight: 0.0,
    }; 4];
    for (q, (xi, w)) in GAUSS_2X2.iter().enumerate() {
        let mut n = [0.0; 4];
        let mut dref = [[0.0; 2]; 4];
        for a in 0..4 {
            let (ra, sa) = (REF[a][0], REF[a][1]);
            n[a] = 0.25 * (1.0 + ra * xi[0]) * (1.0 + sa * xi[1]);
            dref[a] = [0.25 * ra * (1.0 + sa * xi[1]), 0.25 * sa * (1.0 + ra * xi[0])];
        }
        let mut j = [[0.0; 2]; 2];
        for a in 0..4 {
            for r in 0..2 {
                for c in 0..2 {
                    j[r][c] += xy[a][r] * dref[a][c];
                }
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !(det > 0.0) {
            return Err(Error::SingularElement { element, det });
        }
        let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
        let mut dn = [[0.0; 2]; 4];
        for a in 0..4 {
            for c in 0..2 {
                dn[a][c] = dref[a][0] * inv[0][c] + dref[a][1] * inv[1][c];
            }
        }
        out[q] = QuadPoint {
            n,
            dn,
            weight: w * det,
        };
    }
    Ok(out)
}

/// `sum_q w_q B^T C B`
pub fn element_stiffness(qp: &[QuadPoint; 4], c: &[[f64; 4]; 4]) -> [[f64; 8]; 8] {
    let mut k = [[0.0; 8]; 8];
    for p in qp {
        let b: Vec<[f64; 4]> = (0..8).map(|i| p.b_column(i)).collect();
        let cb: Vec<[f64; 4]> = b.iter().map(|col| apply4(c, col)).collect();
        for i in 0..8 {
            for j in i..8 {
                k[i][j] += p.weight * dot4(&b[i], &cb[j]);
            }
        }
    }
    for i in 0..8 {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }
    k
}

/// Consistent mass matrix.
pub fn element_mass(qp: &[QuadPoint; 4], rho: f64) -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for p in qp {
        for a in 0..4 {
            for b in 0..4 {
                let v = rho * p.weight * p.n[a] * p.n[b];
                m[2 * a][2 * b] += v;
                m[2 * a + 1][2 * b + 1] += v;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    #[test]
    fn lame_constants_of_the_reference_material() {
        let (l, m) = ElasticityParams::default().lame();
        assert!((l / 1e9 - 60.49).abs() < 0.01);
        assert!((m / 1e9 - 25.93).abs() < 0.01);
    }

    #[test]
    fn partition_of_unity_and_area() {
        let qp = quad_points(&[[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.0, 1.5]], 0).unwrap();
        let area: f64 = qp.iter().map(|p| p.weight).sum();
        // shoelace
        assert!((area - 0.5 * (2.0 * 1.0 + 2.5 * 1.5 - 0.0)).abs() < 1e-14);
        for p in &qp {
            assert!((p.n.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let gx: f64 = p.dn.iter().map(|d| d[0]).sum();
            assert!(gx.abs() < 1e-14);
        }
    }

    #[test]
    fn clockwise_element_is_singular() {
        let cw = [UNIT[0], UNIT[3], UNIT[2], UNIT[1]];
        assert!(matches!(quad_points(&cw, 7), Err(Error::SingularElement { element: 7, .. })));
    }

    #[test]
    fn unit_mass_and_rigid_modes() {
        let qp = quad_points(&UNIT, 0).unwrap();
        let m = element_mass(&qp, 1.0);
        let total: f64 = (0..8).step_by(2).flat_map(|i| (0..8).step_by(2).map(move |j| (i, j))).map(|(i, j)| m[i][j]).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let c = ElasticityParams::default().tensor();
        let k = element_stiffness(&qp, &c);
        // translation and infinitesimal rotation
        let rot: Vec<f64> = UNIT.iter().flat_map(|p| [-p[1], p[0]]).collect();
        for mode in [[1.0, 0.0].repeat(4), [0.0, 1.0].repeat(4), rot] {
            for row in &k {
                let f: f64 = row.iter().zip(&mode).map(|(a, b)| a * b).sum();
                assert!(f.abs() < 1e-9 * 1e11);
            }
        }
    }
}

use super::element::{element_mass, element_stiffness, quad_points, ElasticityParams, QuadPoint};
use super::mesh::{EdgeTag, Mesh2D};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::subsolvers::SparseSymmetric;

/// Adhesive spring between the mean tangential displacement of a contact
/// segment and the segment's slip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdhesiveSegment {
    /// Index into `Mesh2D::segments`.
    pub segment: usize,
    /// Horizontal dofs of the two end nodes.
    pub dofs: [usize; 2],
    pub length: f64,
    /// `K_adh * length` [N/m per unit thickness].
    pub weight: f64,
}

impl AdhesiveSegment {
    /// Mean tangential displacement of the segment.
    pub fn trace(&self, u: &[f64]) -> f64 {
        0.5 * (u[self.dofs[0]] + u[self.dofs[1]])
    }
}

#[derive(Clone, Debug)]
pub struct AssembledOperators {
    pub mass: SparseSymmetric,
    pub stiffness: SparseSymmetric,
    /// `chi * stiffness`.
    pub viscosity: SparseSymmetric,
    pub adhesive: Vec<AdhesiveSegment>,
    /// Vertical dofs of contact nodes.
    pub fixed: Vec<bool>,
}

impl AssembledOperators {
    pub fn n_dofs(&self) -> usize {
        self.mass.dim()
    }

    pub fn free_dofs(&self) -> usize {
        self.fixed.iter().filter(|f| !**f).count()
    }
}

pub(crate) fn element_xy(mesh: &Mesh2D, e: usize) -> [[f64; 2]; 4] {
    let el = mesh.elements[e];
    [mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]], mesh.nodes[el[3]]]
}

pub(crate) fn element_dofs(mesh: &Mesh2D, e: usize) -> [usize; 8] {
    let el = mesh.elements[e];
    let mut d = [0; 8];
    for a in 0..4 {
        d[2 * a] = 2 * el[a];
        d[2 * a + 1] = 2 * el[a] + 1;
    }
    d
}

/// Gauss-point data of every element, in element order.
pub fn all_quad_points(mesh: &Mesh2D, exec: Execution) -> Result<Vec<[QuadPoint; 4]>> {
    map_indexed(mesh.n_elements(), exec, |e| quad_points(&element_xy(mesh, e), e))
        .into_iter()
        .collect()
}

pub fn assemble_operators(mesh: &Mesh2D, params: &ElasticityParams, k_adh: f64) -> Result<AssembledOperators> {
    assemble_operators_with(mesh, params, k_adh, Execution::default())
}

/// Element matrices are computed in parallel under `exec`; the scatter into
/// the global matrices runs in element order, so the result does not depend
/// on the execution mode.
pub fn assemble_operators_with(
    mesh: &Mesh2D,
    params: &ElasticityParams,
    k_adh: f64,
    exec: Execution,
) -> Result<AssembledOperators> {
    params.validate()?;
    if !(k_adh >= 0.0) || !k_adh.is_finite() {
        return Err(Error::InvalidArgument(format!("adhesive stiffness {k_adh} must be >= 0")));
    }
    let c = params.tensor();
    let local = map_indexed(mesh.n_elements(), exec, |e| {
        let qp = quad_points(&element_xy(mesh, e), e)?;
        Ok::<_, Error>((element_stiffness(&qp, &c), element_mass(&qp, params.rho)))
    });
    let n = mesh.n_dofs();
    let mut kt = Vec::with_capacity(64 * mesh.n_elements());
    let mut mt = Vec::with_capacity(64 * mesh.n_elements());
    for (e, res) in local.into_iter().enumerate() {
        let (ke, me) = res?;
        let dofs = element_dofs(mesh, e);
        for i in 0..8 {
            for j in 0..8 {
                kt.push((dofs[i], dofs[j], ke[i][j]));
                mt.push((dofs[i], dofs[j], me[i][j]));
            }
        }
    }
    let stiffness = SparseSymmetric::from_full_triplets(n, &kt)?;
    let mass = SparseSymmetric::from_full_triplets(n, &mt)?;
    let viscosity = stiffness.scaled(params.chi);

    let mut fixed = vec![false; n];
    let mut adhesive = Vec::new();
    for s in mesh.segments_with(EdgeTag::Contact) {
        let seg = mesh.segments[s];
        for &node in &seg.nodes {
            fixed[2 * node + 1] = true;
        }
        adhesive.push(AdhesiveSegment {
            segment: s,
            dofs: [2 * seg.nodes[0], 2 * seg.nodes[1]],
            length: seg.length,
            weight: k_adh * seg.length,
        });
    }
    Ok(AssembledOperators {
        mass,
        stiffness,
        viscosity,
        adhesive,
        fixed,
    })
}

/// Consistent load vector of a unit traction in `direction` on every segment
/// tagged `tag`. Scale by the traction magnitude `q(t)` [Pa].
pub fn traction_load(mesh: &Mesh2D, tag: EdgeTag, direction: [f64; 2]) -> Result<Vec<f64>> {
    let segs = mesh.segments_with(tag);
    if segs.is_empty() {
        return Err(Error::UnknownTag(tag.name().into()));
    }
    let mut f = vec![0.0; mesh.n_dofs()];
    for s in segs {
        let seg = mesh.segments[s];
        for &node in &seg.nodes {
            f[2 * node] += 0.5 * seg.length * direction[0];
            f[2 * node + 1] += 0.5 * seg.length * direction[1];
        }
    }
    Ok(f)
}

/// Strain at each Gauss point of each element.
pub fn element_strains(mesh: &Mesh2D, qps: &[[QuadPoint; 4]], u: &[f64]) -> Vec<[[f64; 4]; 4]> {
    (0..mesh.n_elements())
        .map(|e| {
            let d = element_dofs(mesh, e);
            let ue: [f64; 8] = std::array::from_fn(|k| u[d[k]]);
            std::array::from_fn(|q| qps[e][q].strain(&ue))
        })
        .collect()
}

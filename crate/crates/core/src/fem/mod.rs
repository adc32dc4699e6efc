//! Plane-strain bilinear finite elements on quadrilateral meshes.

mod assembly;
mod element;
mod mesh;

pub use assembly::{
    all_quad_points, assemble_operators, assemble_operators_with, element_strains, traction_load,
    AdhesiveSegment, AssembledOperators,
};
pub use element::{element_mass, element_stiffness, quad_points, ElasticityParams, QuadPoint, GAUSS_2X2};
pub use mesh::{build_bar_mesh, ContactAnchor, EdgeTag, Mesh2D, Segment};

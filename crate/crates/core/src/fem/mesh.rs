use std::io::Write;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeTag {
    Contact,
    Load,
    Free,
}

impl EdgeTag {
    pub fn name(self) -> &'static str {
        match self {
            EdgeTag::Contact => "contact",
            EdgeTag::Load => "load",
            EdgeTag::Free => "free",
        }
    }
}

/// End of the bottom edge where the contact zone starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContactAnchor {
    #[default]
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub nodes: [usize; 2],
    pub tag: EdgeTag,
    pub length: f64,
}

/// Quadrilateral mesh with tagged boundary segments.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh2D {
    pub nodes: Vec<[f64; 2]>,
    /// Counter-clockwise node quadruples.
    pub elements: Vec<[usize; 4]>,
    pub segments: Vec<Segment>,
    grid: Option<(usize, usize)>,
}

impl Mesh2D {
    pub fn from_parts(
        nodes: Vec<[f64; 2]>,
        elements: Vec<[usize; 4]>,
        segments: Vec<(usize, usize, EdgeTag)>,
    ) -> Result<Self> {
        let n = nodes.len();
        for (e, el) in elements.iter().enumerate() {
            if el.iter().any(|&i| i >= n) {
                return Err(Error::InvalidArgument(format!("element {e} references a missing node")));
            }
        }
        let segments = segments
            .into_iter()
            .map(|(a, b, tag)| {
                if a >= n || b >= n {
                    return Err(Error::InvalidArgument("segment references a missing node".into()));
                }
                let (p, q) = (nodes[a], nodes[b]);
                let length = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
                Ok(Segment {
                    nodes: [a, b],
                    tag,
                    length,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mesh2D {
            nodes,
            elements,
            segments,
            grid: None,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// `(nx, ny)` for structured meshes.
    pub fn grid(&self) -> Option<(usize, usize)> {
        self.grid
    }

    /// Node `(i, j)` of a structured mesh.
    pub fn grid_node(&self, i: usize, j: usize) -> Option<usize> {
        let (nx, ny) = self.grid?;
        (i <= nx && j <= ny).then_some(i * (ny + 1) + j)
    }

    /// Indices into `segments` carrying `tag`, in storage order.
    pub fn segments_with(&self, tag: EdgeTag) -> Vec<usize> {
        (0..self.segments.len()).filter(|&s| self.segments[s].tag == tag).collect()
    }

    pub fn tagged_length(&self, tag: EdgeTag) -> f64 {
        self.segments.iter().filter(|s| s.tag == tag).map(|s| s.length).sum()
    }

    /// Plain-text listing: nodes (`id x y`), elements (`id n1 n2 n3 n4`),
    /// boundary segments (`id n1 n2 tag`).
    pub fn write_listing<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# nodes {}", self.nodes.len())?;
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(w, "{i} {:.12e} {:.12e}", p[0], p[1])?;
        }
        writeln!(w, "# elements {}", self.elements.len())?;
        for (i, e) in self.elements.iter().enumerate() {
            writeln!(w, "{i} {} {} {} {}", e[0], e[1], e[2], e[3])?;
        }
        writeln!(w, "# segments {}", self.segments.len())?;
        for (i, s) in self.segments.iter().enumerate() {
            writeln!(w, "{i} {} {} {}", s.nodes[0], s.nodes[1], s.tag.name())?;
        }
        Ok(())
    }
}

/// Structured `nx x ny` mesh of the rectangle `[0, L] x [0, H]`.
///
/// Node `(i, j)` has id `i (ny + 1) + j`. The bottom edge carries
/// `round(contact_fraction * nx)` contact segments starting at `anchor`, the
/// right edge is the loaded edge, everything else is free. Segments are
/// stored bottom (left to right), right, top, left.
pub fn build_bar_mesh(
    length: f64,
    height: f64,
    nx: usize,
    ny: usize,
    contact_fraction: f64,
    anchor: ContactAnchor,
) -> Result<Mesh2D> {
    if !(length > 0.0) || !(height > 0.0) || nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "bar mesh needs positive sizes (L={length}, H={height}, nx={nx}, ny={ny})"
        )));
    }
    if !(contact_fraction > 0.0 && contact_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "contact fraction {contact_fraction} outside (0, 1]"
        )));
    }
    let id = |i: usize, j: usize| i * (ny + 1) + j;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            nodes.push([length * i as f64 / nx as f64, height * j as f64 / ny as f64]);
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let n_contact = ((contact_fraction * nx as f64).round() as usize).clamp(1, nx);
    let in_contact = |i: usize| match anchor {
        ContactAnchor::Left => i < n_contact,
        ContactAnchor::Right => i >= nx - n_contact,
    };
    let mut segs = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        let tag = if in_contact(i) { EdgeTag::Contact } else { EdgeTag::Free };
        segs.push((id(i, 0), id(i + 1, 0), tag));
    }
    for j in 0..ny {
        segs.push((id(nx, j), id(nx, j + 1), EdgeTag::Load));
    }
    for i in (0..nx).rev() {
        segs.push((id(i + 1, ny), id(i, ny), EdgeTag::Free));
    }
    for j in (0..ny).rev() {
        segs.push((id(0, j + 1), id(0, j), EdgeTag::Free));
    }
    let mut mesh = Mesh2D::from_parts(nodes, elements, segs)?;
    mesh.grid = Some((nx, ny));
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_bar_sizes() {
        let m = build_bar_mesh(0.25, 0.0125, 40, 2, 0.9, ContactAnchor::Left).unwrap();
        assert_eq!(m.n_elements(), 80);
        assert_eq!(m.n_nodes(), 123);
        assert_eq!(m.segments_with(EdgeTag::Contact).len(), 36);
        assert!((m.tagged_length(EdgeTag::Contact) - 0.225).abs() < 1e-15);
        assert!((m.tagged_length(EdgeTag::Load) - 0.0125).abs() < 1e-15);
        for (lvl, n) in [(2, 320), (3, 720)] {
            let m = build_bar_mesh(0.25, 0.0125, 40 * lvl, 2 * lvl, 0.1, ContactAnchor::Left).unwrap();
            assert_eq!(m.n_elements(), n);
            assert_eq!(m.segments_with(EdgeTag::Contact).len(), 4 * lvl);
        }
    }

    #[test]
    fn single_element() {
        let m = build_bar_mesh(1.0, 1.0, 1, 1, 1.0, ContactAnchor::Left).unwrap();
        assert_eq!(m.n_nodes(), 4);
        assert_eq!(m.elements, vec![[0, 2, 3, 1]]);
        assert_eq!(m.segments.len(), 4);
    }

    #[test]
    fn segments_partition_the_boundary() {
        let m = build_bar_mesh(2.0, 1.0, 6, 3, 0.5, ContactAnchor::Right).unwrap();
        let total: f64 = m.segments.iter().map(|s| s.length).sum();
        assert!((total - 6.0).abs() < 1e-14);
        let c = m.segments_with(EdgeTag::Contact);
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|&s| m.nodes[m.segments[s].nodes[0]][0] >= 1.0 - 1e-12));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_bar_mesh(0.0, 1.0, 1, 1, 1.0, ContactAnchor::Left).is_err());
        assert!(build_bar_mesh(1.0, 1.0, 0, 1, 1.0, ContactAnchor::Left).is_err());
        assert!(build_bar_mesh(1.0, 1.0, 1, 1, 0.0, ContactAnchor::Left).is_err());
    }

    #[test]
    fn listing_has_all_sections() {
        let m = build_bar_mesh(1.0, 1.0, 2, 1, 1.0, ContactAnchor::Left).unwrap();
        let mut buf = Vec::new();
        m.write_listing(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("# nodes 6") && s.contains("# elements 2") && s.contains("contact"));
    }
}

//! Vertex patches: the elements, edges and boundary edges around each vertex.

use super::PolygonalMesh;

#[derive(Debug, Clone, PartialEq)]
pub struct VertexPatch {
    pub vertex: usize,
    /// Elements sharing the vertex, sorted by id.
    pub elements: Vec<usize>,
    /// Edges sharing the vertex.
    pub edges: Vec<usize>,
    /// The subset of `edges` lying on the domain boundary.
    pub boundary_edges: Vec<usize>,
    pub is_boundary: bool,
}

impl VertexPatch {
    /// All mesh edges contained in the closure of the patch.
    pub fn closure_edges(&self, mesh: &PolygonalMesh) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .elements
            .iter()
            .flat_map(|&k| mesh.element_edges(k).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn vertex_patches(mesh: &PolygonalMesh) -> Vec<VertexPatch> {
    let mut edges_of = vec![Vec::new(); mesh.num_vertices()];
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        edges_of[a].push(e);
        edges_of[b].push(e);
    }
    edges_of
        .into_iter()
        .enumerate()
        .map(|(v, edges)| {
            let mut elements = mesh.vertex_elements(v).to_vec();
            elements.sort_unstable();
            elements.dedup();
            let boundary_edges = edges.iter().copied().filter(|&e| mesh.is_boundary_edge(e)).collect();
            VertexPatch {
                vertex: v,
                elements,
                edges,
                boundary_edges,
                is_boundary: mesh.is_boundary_vertex(v),
            }
        })
        .collect()
}

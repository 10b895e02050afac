//! Star-center fan subtriangulation of a polygonal mesh.

use std::collections::BTreeSet;
use std::ops::Range;

use super::{geometry, Point, PolygonalMesh};
use crate::error::{Error, Result};
use crate::polyspace::TriSet;

/// Global union of the element subtriangulations.
///
/// Points are the mesh vertices (same ids) followed by one star center per
/// non-triangular element. The fan triangle of local edge `i` of an element
/// is `[center, v_i, v_{i+1}]`; triangular elements contribute themselves.
#[derive(Debug, Clone)]
pub struct SubTriangulation {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub parent: Vec<usize>,
    pub element_triangles: Vec<Range<usize>>,
    /// Star center point id, `None` for triangular elements.
    pub center: Vec<Option<usize>>,
    /// Spokes `[center, vertex]` internal to each element.
    pub internal_edges: Vec<[usize; 2]>,
    /// Mesh edges (the element interfaces and the domain boundary).
    pub interface_edges: Vec<[usize; 2]>,
}

pub fn subtriangulate(mesh: &PolygonalMesh) -> Result<SubTriangulation> {
    let mut points = mesh.vertices().to_vec();
    let mut triangles = Vec::new();
    let mut parent = Vec::new();
    let mut element_triangles = Vec::with_capacity(mesh.num_elements());
    let mut center = Vec::with_capacity(mesh.num_elements());
    let mut internal_edges = Vec::new();
    for k in 0..mesh.num_elements() {
        let el = mesh.element(k);
        let start = triangles.len();
        if el.len() == 3 {
            triangles.push([el[0], el[1], el[2]]);
            parent.push(k);
            center.push(None);
        } else {
            let c = points.len();
            let xc = mesh.star_center(k);
            points.push(xc);
            for i in 0..el.len() {
                let (a, b) = (el[i], el[(i + 1) % el.len()]);
                if geometry::triangle_area(xc, points[a], points[b]) <= 0.0 {
                    return Err(Error::NotStarShaped { element: k });
                }
                triangles.push([c, a, b]);
                parent.push(k);
                internal_edges.push([el[i], c]);
            }
            center.push(Some(c));
        }
        element_triangles.push(start..triangles.len());
    }
    Ok(SubTriangulation {
        points,
        triangles,
        parent,
        element_triangles,
        center,
        internal_edges,
        interface_edges: mesh.edges().to_vec(),
    })
}

impl SubTriangulation {
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn coords(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.points[a], self.points[b], self.points[c]]
    }

    /// Triangles of the given elements as a compact [`TriSet`], together with
    /// the global triangle ids in local order and the global id of every
    /// local point. Local point ids preserve the relative order of the global
    /// ones, so edge orientations agree.
    pub fn restrict(&self, elements: &[usize]) -> (TriSet, Vec<usize>, Vec<usize>) {
        let tris: Vec<usize> = elements
            .iter()
            .flat_map(|&k| self.element_triangles[k].clone())
            .collect();
        let used: BTreeSet<usize> = tris.iter().flat_map(|&t| self.triangles[t]).collect();
        let used: Vec<usize> = used.into_iter().collect();
        let local = |g: usize| used.binary_search(&g).unwrap();
        let triangles = tris.iter().map(|&t| self.triangles[t].map(local)).collect();
        let points = used.iter().map(|&g| self.points[g]).collect();
        (TriSet::new(points, triangles), tris, used)
    }
}

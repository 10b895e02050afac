//! Shape-regularity and facet-sharing diagnostics.

use std::collections::HashMap;

use serde::Serialize;

use super::{geometry, Point, PolygonalMesh};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    /// `min_E ρ_E / h_E`, with `ρ_E` the radius of the largest ball centered
    /// at the star center and contained in the element kernel.
    pub min_ball_ratio: f64,
    /// `min_{E, e ⊂ ∂E} h_e / h_E`.
    pub min_edge_ratio: f64,
    pub max_vertices: usize,
    /// Element pairs sharing more than one edge.
    pub interior_violations: Vec<(usize, usize)>,
    /// Boundary elements whose intersection with the domain boundary is not a
    /// single straight segment per boundary side.
    pub exterior_violations: Vec<usize>,
}

impl RegularityReport {
    pub fn satisfies_assumption(&self) -> bool {
        self.interior_violations.is_empty() && self.exterior_violations.is_empty()
    }
}

fn collinear(a: Point, b: Point, c: Point) -> bool {
    let d1 = [b[0] - a[0], b[1] - a[1]];
    let d2 = [c[0] - b[0], c[1] - b[1]];
    let cross = d1[0] * d2[1] - d1[1] * d2[0];
    cross.abs() <= 1e-10 * (d1[0].hypot(d1[1]) * d2[0].hypot(d2[1]))
}

pub fn check_regularity(mesh: &PolygonalMesh) -> RegularityReport {
    let mut min_ball_ratio = f64::INFINITY;
    let mut min_edge_ratio = f64::INFINITY;
    let mut max_vertices = 0;
    for k in 0..mesh.num_elements() {
        let poly = mesh.element_coords(k);
        let h = mesh.diameter(k);
        let kern = geometry::kernel(&poly);
        let xs = mesh.star_center(k);
        let rho = (0..kern.len())
            .map(|i| geometry::point_segment_distance(xs, kern[i], kern[(i + 1) % kern.len()]))
            .fold(f64::INFINITY, f64::min);
        min_ball_ratio = min_ball_ratio.min(rho / h);
        for &e in mesh.element_edges(k) {
            min_edge_ratio = min_edge_ratio.min(mesh.edge_length(e) / h);
        }
        max_vertices = max_vertices.max(poly.len());
    }

    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for e in 0..mesh.num_edges() {
        if let [a, b] = mesh.edge_elements(e) {
            *shared.entry((*a.min(b), *a.max(b))).or_default() += 1;
        }
    }
    let mut interior_violations: Vec<(usize, usize)> = shared
        .into_iter()
        .filter(|&(_, n)| n > 1)
        .map(|(pair, _)| pair)
        .collect();
    interior_violations.sort_unstable();

    let mut exterior_violations = Vec::new();
    for k in 0..mesh.num_elements() {
        let el = mesh.element(k);
        let n = el.len();
        let on_boundary: Vec<bool> = mesh
            .element_edges(k)
            .iter()
            .map(|&e| mesh.is_boundary_edge(e))
            .collect();
        if !on_boundary.iter().any(|&b| b) {
            continue;
        }
        // maximal runs of consecutive boundary edges
        let runs = (0..n)
            .filter(|&i| on_boundary[i] && !on_boundary[(i + n - 1) % n])
            .count();
        let all = on_boundary.iter().all(|&b| b);
        let straight_pair = (0..n).any(|i| {
            let j = (i + 1) % n;
            on_boundary[i]
                && on_boundary[j]
                && collinear(mesh.vertex(el[i]), mesh.vertex(el[j]), mesh.vertex(el[(j + 1) % n]))
        });
        if (runs > 1 && !all) || straight_pair {
            exterior_violations.push(k);
        }
    }
    RegularityReport {
        min_ball_ratio,
        min_edge_ratio,
        max_vertices,
        interior_violations,
        exterior_violations,
    }
}

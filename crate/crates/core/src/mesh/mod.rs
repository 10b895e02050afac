//! Polygonal meshes: construction, star subtriangulation, vertex patches,
//! refinement with hanging vertices, and regularity diagnostics.
//!
//! Meshes are immutable once built; refinement returns a new mesh.

pub mod build;
pub mod geometry;
pub mod io;
pub mod patch;
pub mod refine;
pub mod regularity;
pub mod subtri;

use std::collections::HashMap;

pub use build::{build_cartesian_mesh, build_lshape_mesh, build_triangular_mesh, Domain, Rect};
pub use patch::{vertex_patches, VertexPatch};
pub use refine::refine;
pub use regularity::{check_regularity, RegularityReport};
pub use subtri::{subtriangulate, SubTriangulation};

use crate::error::{Error, Result};

/// A point of the plane.
pub type Point = [f64; 2];

/// Conforming polygonal mesh (hanging vertices are ordinary polygon vertices).
#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    elements: Vec<Vec<usize>>,
    /// Vertex pairs, lower index first.
    edges: Vec<[usize; 2]>,
    /// `element_edges[k][i]` is the edge from local vertex `i` to `i + 1`.
    element_edges: Vec<Vec<usize>>,
    edge_elements: Vec<Vec<usize>>,
    vertex_elements: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
    areas: Vec<f64>,
    centroids: Vec<Point>,
    diameters: Vec<f64>,
    star_centers: Vec<Point>,
}

impl PolygonalMesh {
    /// Builds a mesh from vertex coordinates and counter-clockwise vertex loops.
    pub fn new(vertices: Vec<Point>, elements: Vec<Vec<usize>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidMesh("no elements".into()));
        }
        let nv = vertices.len();
        let mut edge_map: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_elements: Vec<Vec<usize>> = Vec::new();
        let mut edge_dirs: Vec<Vec<bool>> = Vec::new();
        let mut element_edges = Vec::with_capacity(elements.len());
        let mut vertex_elements = vec![Vec::new(); nv];
        let mut areas = Vec::with_capacity(elements.len());
        let mut centroids = Vec::with_capacity(elements.len());
        let mut diameters = Vec::with_capacity(elements.len());
        let mut star_centers = Vec::with_capacity(elements.len());

        for (k, el) in elements.iter().enumerate() {
            if el.len() < 3 {
                return Err(Error::InvalidMesh(format!("element {k} has fewer than 3 vertices")));
            }
            if el.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("element {k} references a missing vertex")));
            }
            let poly: Vec<Point> = el.iter().map(|&v| vertices[v]).collect();
            let area = geometry::signed_area(&poly);
            if area <= 0.0 {
                return Err(Error::InvalidMesh(format!("element {k} is not counter-clockwise")));
            }
            if !geometry::is_simple(&poly) {
                return Err(Error::InvalidMesh(format!("element {k} is not a simple polygon")));
            }
            let mut ee = Vec::with_capacity(el.len());
            for i in 0..el.len() {
                let (a, b) = (el[i], el[(i + 1) % el.len()]);
                let key = if a < b { [a, b] } else { [b, a] };
                let id = *edge_map.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_elements.push(Vec::new());
                    edge_dirs.push(Vec::new());
                    edges.len() - 1
                });
                edge_elements[id].push(k);
                edge_dirs[id].push(a < b);
                ee.push(id);
                vertex_elements[a].push(k);
            }
            element_edges.push(ee);

            let kern = geometry::kernel(&poly);
            if kern.len() < 3 || geometry::signed_area(&kern) <= 1e-14 * area {
                return Err(Error::NotStarShaped { element: k });
            }
            let center = if el.len() == 3 {
                geometry::centroid(&poly)
            } else {
                geometry::centroid(&kern)
            };
            for i in 0..el.len() {
                let (a, b) = (poly[i], poly[(i + 1) % el.len()]);
                if el.len() > 3 && geometry::triangle_area(center, a, b) <= 1e-14 * area {
                    return Err(Error::NotStarShaped { element: k });
                }
            }
            areas.push(area);
            centroids.push(geometry::centroid(&poly));
            diameters.push(geometry::diameter(&poly));
            star_centers.push(center);
        }
        for (e, elems) in edge_elements.iter().enumerate() {
            if elems.len() > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge {:?} is shared by {} elements",
                    edges[e],
                    elems.len()
                )));
            }
            if elems.len() == 2 && edge_dirs[e][0] == edge_dirs[e][1] {
                return Err(Error::InvalidMesh(format!(
                    "edge {:?} has inconsistent orientation",
                    edges[e]
                )));
            }
        }
        let boundary_edge: Vec<bool> = edge_elements.iter().map(|e| e.len() == 1).collect();
        let mut boundary_vertex = vec![false; nv];
        for (e, &b) in boundary_edge.iter().enumerate() {
            if b {
                boundary_vertex[edges[e][0]] = true;
                boundary_vertex[edges[e][1]] = true;
            }
        }
        if vertex_elements.iter().any(|v| v.is_empty()) {
            return Err(Error::InvalidMesh("unreferenced vertex".into()));
        }
        Ok(Self {
            vertices,
            elements,
            edges,
            element_edges,
            edge_elements,
            vertex_elements,
            boundary_vertex,
            boundary_edge,
            areas,
            centroids,
            diameters,
            star_centers,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &[usize] {
        &self.elements[k]
    }

    pub fn element_coords(&self, k: usize) -> Vec<Point> {
        self.elements[k].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        geometry::dist(self.vertices[a], self.vertices[b])
    }

    pub fn element_edges(&self, k: usize) -> &[usize] {
        &self.element_edges[k]
    }

    pub fn edge_elements(&self, e: usize) -> &[usize] {
        &self.edge_elements[e]
    }

    pub fn vertex_elements(&self, v: usize) -> &[usize] {
        &self.vertex_elements[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn area(&self, k: usize) -> f64 {
        self.areas[k]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn centroid(&self, k: usize) -> Point {
        self.centroids[k]
    }

    pub fn diameter(&self, k: usize) -> f64 {
        self.diameters[k]
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    pub fn star_center(&self, k: usize) -> Point {
        self.star_centers[k]
    }
}

//! Polynomial machinery: scaled monomial bases, Gauss–Lobatto edge nodes,
//! triangle quadrature and local Lagrange / Raviart–Thomas spaces.

pub mod lagrange;
pub mod monomial;
pub mod quadrature;
pub mod rt;

pub use lagrange::{p_assemble, Continuity, LagrangeAssembly, LagrangeTriangle};
pub use monomial::{dim_p, exponents, PolyBasis, ScaledMonomials};
pub use quadrature::{gauss_legendre, gauss_lobatto, triangle_rule, TriangleQuadrature};
pub use rt::{rt_assemble, rt_assemble_elements, rt_dim, RtAssembly, RtTriangle};

use crate::mesh::Point;

/// A triangulated region: shared points and counter-clockwise triangles.
#[derive(Debug, Clone)]
pub struct TriSet {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriSet {
    pub fn new(points: Vec<Point>, triangles: Vec<[usize; 3]>) -> Self {
        Self { points, triangles }
    }

    pub fn coords(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.points[a], self.points[b], self.points[c]]
    }
}

/// Gauss–Lobatto nodes of degree `p` mapped to an edge `a → b`.
#[derive(Debug, Clone)]
pub struct EdgeNodeSet {
    pub degree: usize,
    /// Reference nodes in `[-1, 1]`, endpoints included.
    pub reference: Vec<f64>,
    pub points: Vec<Point>,
    /// Weights scaled to the edge length.
    pub weights: Vec<f64>,
}

impl EdgeNodeSet {
    pub fn new(a: Point, b: Point, degree: usize) -> Self {
        let (x, w) = gauss_lobatto(degree + 1);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let points = x
            .iter()
            .map(|&t| {
                let s = 0.5 * (t + 1.0);
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            })
            .collect();
        let weights = w.iter().map(|w| 0.5 * w * len).collect();
        Self {
            degree,
            reference: x,
            points,
            weights,
        }
    }
}

/// Values at `t ∈ [-1, 1]` of the 1D Lagrange basis through `nodes`.
pub fn lagrange_1d(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| (t - xj) / (nodes[i] - xj))
                .product()
        })
        .collect()
}

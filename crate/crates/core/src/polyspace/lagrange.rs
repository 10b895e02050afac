//! Continuous and broken Lagrange `P_k` spaces on triangulated regions.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::quadrature::triangle_rule;
use super::TriSet;
use crate::error::Result;
use crate::mesh::Point;

/// Equispaced Lagrange element of degree `k` on one triangle (Silvester's
/// product formula in barycentric coordinates).
#[derive(Debug, Clone)]
pub struct LagrangeTriangle {
    pub degree: usize,
    pub vertices: [Point; 3],
    /// Barycentric multi-indices `(i, j, l)` with `i + j + l = k`.
    pub nodes: Vec<[usize; 3]>,
    area2: f64,
    grad_lambda: [[f64; 2]; 3],
}

impl LagrangeTriangle {
    pub fn new(vertices: [Point; 3], degree: usize) -> Self {
        assert!(degree >= 1);
        let [a, b, c] = vertices;
        let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        let grad_lambda = [
            [(b[1] - c[1]) / area2, (c[0] - b[0]) / area2],
            [(c[1] - a[1]) / area2, (a[0] - c[0]) / area2],
            [(a[1] - b[1]) / area2, (b[0] - a[0]) / area2],
        ];
        let mut nodes = Vec::new();
        // vertices, then edges (0-1, 1-2, 2-0), then interior
        nodes.push([degree, 0, 0]);
        nodes.push([0, degree, 0]);
        nodes.push([0, 0, degree]);
        for (p, q) in [(0, 1), (1, 2), (2, 0)] {
            for s in 1..degree {
                let mut n = [0; 3];
                n[p] = degree - s;
                n[q] = s;
                nodes.push(n);
            }
        }
        for i in 1..degree {
            for j in 1..degree - i {
                let l = degree - i - j;
                if l >= 1 {
                    nodes.push([i, j, l]);
                }
            }
        }
        Self {
            degree,
            vertices,
            nodes,
            area2,
            grad_lambda,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (x[1] - a[1]) * (c[0] - a[0])) / self.area2;
        let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])) / self.area2;
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn node_point(&self, n: usize) -> Point {
        let k = self.degree as f64;
        let m = self.nodes[n];
        let mut p = [0.0; 2];
        for v in 0..3 {
            p[0] += m[v] as f64 / k * self.vertices[v][0];
            p[1] += m[v] as f64 / k * self.vertices[v][1];
        }
        p
    }

    /// `R_i(λ) = Π_{m<i} (kλ - m)/(m+1)` and its derivative in `λ`.
    fn silvester(&self, i: usize, lambda: f64) -> (f64, f64) {
        let k = self.degree as f64;
        let mut val = 1.0;
        let mut der = 0.0;
        for m in 0..i {
            let f = (k * lambda - m as f64) / (m as f64 + 1.0);
            let df = k / (m as f64 + 1.0);
            der = der * f + val * df;
            val *= f;
        }
        (val, der)
    }

    pub fn eval(&self, x: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        let lam = self.barycentric(x);
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for n in &self.nodes {
            let r: Vec<(f64, f64)> = (0..3).map(|v| self.silvester(n[v], lam[v])).collect();
            let val = r[0].0 * r[1].0 * r[2].0;
            let d = [
                r[0].1 * r[1].0 * r[2].0,
                r[0].0 * r[1].1 * r[2].0,
                r[0].0 * r[1].0 * r[2].1,
            ];
            let mut g = [0.0; 2];
            for v in 0..3 {
                g[0] += d[v] * self.grad_lambda[v][0];
                g[1] += d[v] * self.grad_lambda[v][1];
            }
            vals.push(val);
            grads.push(g);
        }
        (vals, grads)
    }
}

/// Continuity of an assembled Lagrange space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    Broken,
}

/// Assembled Lagrange space on a [`TriSet`].
#[derive(Debug, Clone)]
pub struct LagrangeAssembly {
    pub degree: usize,
    pub ndofs: usize,
    pub elements: Vec<LagrangeTriangle>,
    /// Local-to-global dof map per triangle.
    pub dofs: Vec<Vec<usize>>,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    /// For continuous spaces: global dofs lying on each segment keyed by the
    /// sorted pair of its endpoint point indices.
    pub edge_dofs: HashMap<[usize; 2], Vec<usize>>,
}

/// Global identity of a node: the nonzero barycentric weights attached to
/// global point ids, sorted by point id.
fn node_key(points: [usize; 3], m: [usize; 3], tri: usize, interior: bool) -> (Vec<(usize, usize)>, usize) {
    let mut key: Vec<(usize, usize)> = (0..3).filter(|&v| m[v] > 0).map(|v| (points[v], m[v])).collect();
    key.sort_unstable();
    (key, if interior { tri } else { usize::MAX })
}

pub fn p_assemble(set: &TriSet, degree: usize, continuity: Continuity) -> Result<LagrangeAssembly> {
    let rule = triangle_rule((2 * degree).max(1))?;
    let mut map: HashMap<(Vec<(usize, usize)>, usize), usize> = HashMap::new();
    let mut elements = Vec::with_capacity(set.triangles.len());
    let mut dofs = Vec::with_capacity(set.triangles.len());
    let mut edge_dofs: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    let mut ndofs = 0;
    for (t, tri) in set.triangles.iter().enumerate() {
        let verts = set.coords(t);
        let el = LagrangeTriangle::new(verts, degree);
        let mut local = Vec::with_capacity(el.len());
        for &m in &el.nodes {
            let interior = m.iter().all(|&x| x > 0);
            let id = match continuity {
                Continuity::Broken => {
                    ndofs += 1;
                    ndofs - 1
                }
                Continuity::Continuous => {
                    let key = node_key(*tri, m, t, interior);
                    *map.entry(key).or_insert_with(|| {
                        ndofs += 1;
                        ndofs - 1
                    })
                }
            };
            local.push(id);
        }
        if continuity == Continuity::Continuous {
            for (p, q) in [(0, 1), (1, 2), (2, 0)] {
                let key = if tri[p] < tri[q] {
                    [tri[p], tri[q]]
                } else {
                    [tri[q], tri[p]]
                };
                let on_edge: Vec<usize> = el
                    .nodes
                    .iter()
                    .zip(&local)
                    .filter(|(m, _)| m[3 - p - q] == 0)
                    .map(|(_, &d)| d)
                    .collect();
                edge_dofs.entry(key).or_insert(on_edge);
            }
        }
        elements.push(el);
        dofs.push(local);
    }
    let mut stiffness = DMatrix::zeros(ndofs, ndofs);
    let mut mass = DMatrix::zeros(ndofs, ndofs);
    for (el, local) in elements.iter().zip(&dofs) {
        let (pts, wts) = rule.map(&el.vertices);
        for (x, w) in pts.iter().zip(&wts) {
            let (v, g) = el.eval(*x);
            for a in 0..local.len() {
                for b in 0..local.len() {
                    stiffness[(local[a], local[b])] += w * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    mass[(local[a], local[b])] += w * v[a] * v[b];
                }
            }
        }
    }
    Ok(LagrangeAssembly {
        degree,
        ndofs,
        elements,
        dofs,
        stiffness,
        mass,
        edge_dofs,
    })
}

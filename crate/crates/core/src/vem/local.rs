//! Element-level projectors, stabilisations and stiffness matrices.
//!
//! Local dof order: vertex values (`N` of them, loop order), then the `p - 1`
//! internal Gauss–Lobatto values of each edge `v_i → v_{i+1}` in that
//! direction, then the scaled moments `|K|⁻¹ ∫ v b_β` for the first
//! `dim P_{p-2}` polynomial basis functions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg;
use crate::mesh::{Point, PolygonalMesh};
use crate::polyspace::quadrature::gauss_legendre;
use crate::polyspace::{dim_p, lagrange_1d, triangle_rule, EdgeNodeSet, PolyBasis, ScaledMonomials};

/// Degree from which the element polynomial basis is orthonormalized.
pub const ORTHONORMAL_FROM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabKind {
    /// Euclidean product of the dof vectors.
    DofiDofi,
    /// `h⁻² (Π⁰_{p-2} u, Π⁰_{p-2} v)_K + h⁻¹ (u, v)_{∂K}`.
    Projected,
}

/// Triangles covering an element: the star fan, or the element itself.
pub fn element_triangles(mesh: &PolygonalMesh, k: usize) -> Vec<[Point; 3]> {
    let poly = mesh.element_coords(k);
    if poly.len() == 3 {
        return vec![[poly[0], poly[1], poly[2]]];
    }
    let c = mesh.star_center(k);
    (0..poly.len())
        .map(|i| [c, poly[i], poly[(i + 1) % poly.len()]])
        .collect()
}

#[derive(Debug, Clone)]
pub struct LocalProjectors {
    pub element: usize,
    pub degree: usize,
    pub stab: StabKind,
    pub vertices: Vec<Point>,
    pub area: f64,
    pub diameter: f64,
    pub basis: PolyBasis,
    pub triangles: Vec<[Point; 3]>,
    /// Gauss–Lobatto nodes of each edge `v_i → v_{i+1}`.
    pub edges: Vec<EdgeNodeSet>,
    /// Outward unit normals.
    pub normals: Vec<Point>,
    /// `(b_α, b_β)_K`.
    pub gram: DMatrix<f64>,
    /// Dofs of the basis polynomials (column `α` holds `dof(b_α)`).
    pub d: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub g: DMatrix<f64>,
    /// Coefficients of `Π∇_p φ_i` (column `i`).
    pub pi_nabla: DMatrix<f64>,
    /// Dofs of `Π∇_p φ_i`.
    pub projector: DMatrix<f64>,
    /// Coefficients of `Π⁰_{p-2} φ_i` in the first `dim P_{p-2}` basis functions.
    pub pi0: DMatrix<f64>,
    /// `(φ_i, φ_j)_{∂K}`.
    pub boundary_mass: DMatrix<f64>,
    /// Stabilisation on raw dof vectors.
    pub sdof: DMatrix<f64>,
    pub consistency: DMatrix<f64>,
    pub stabilisation: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
}

impl LocalProjectors {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn ndofs(&self) -> usize {
        self.num_vertices() * self.degree + self.num_moments()
    }

    pub fn num_moments(&self) -> usize {
        dim_p(self.degree as isize - 2)
    }

    pub fn num_boundary_dofs(&self) -> usize {
        self.num_vertices() * self.degree
    }

    pub fn npoly(&self) -> usize {
        self.basis.len()
    }

    /// Local dof of node `j ∈ 0..=p` on edge `i`.
    pub fn edge_dof(&self, i: usize, j: usize) -> usize {
        let n = self.num_vertices();
        let p = self.degree;
        if j == 0 {
            i
        } else if j == p {
            (i + 1) % n
        } else {
            n + i * (p - 1) + j - 1
        }
    }

    /// Quadrature points and weights over the element.
    pub fn quadrature(&self, order: usize) -> (Vec<Point>, Vec<f64>) {
        let rule = triangle_rule(order.max(1)).expect("quadrature order within range");
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        for t in &self.triangles {
            let (p, w) = rule.map(t);
            pts.extend(p);
            wts.extend(w);
        }
        (pts, wts)
    }

    /// Dofs of a function known in closed form.
    pub fn dofs_of(&self, f: &dyn Fn(Point) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.ndofs()];
        for (i, e) in self.edges.iter().enumerate() {
            for (j, x) in e.points.iter().enumerate() {
                out[self.edge_dof(i, j)] = f(*x);
            }
        }
        let nb = self.num_moments();
        if nb > 0 {
            let (pts, wts) = self.quadrature(2 * self.degree + 6);
            let off = self.num_boundary_dofs();
            for (x, w) in pts.iter().zip(&wts) {
                let fx = f(*x);
                let b = self.basis.values(*x);
                for k in 0..nb {
                    out[off + k] += w * fx * b[k] / self.area;
                }
            }
        }
        out
    }

    pub fn poly_value(&self, coeffs: &[f64], x: Point) -> f64 {
        self.basis.values(x).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }

    pub fn poly_gradient(&self, coeffs: &[f64], x: Point) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (gb, c) in self.basis.gradients(x).iter().zip(coeffs) {
            g[0] += c * gb[0];
            g[1] += c * gb[1];
        }
        g
    }

    /// `Π⁰_{max(p-2, 0)} f` coefficients in the leading basis functions.
    pub fn project_load(&self, f: &dyn Fn(Point) -> f64) -> Result<Vec<f64>> {
        let nf = dim_p(self.degree.saturating_sub(2) as isize);
        let (pts, wts) = self.quadrature(2 * self.degree + 6);
        let mut rhs = DMatrix::zeros(nf, 1);
        for (x, w) in pts.iter().zip(&wts) {
            let fx = f(*x);
            let b = self.basis.values(*x);
            for k in 0..nf {
                rhs[k] += w * fx * b[k];
            }
        }
        let gram = self.gram.view((0, 0), (nf, nf)).clone_owned();
        Ok(linalg::solve_spd(&gram, &rhs, "load projection")?.as_slice().to_vec())
    }

    /// Local load vector `(f_h, Π⁰_{p-2} φ_i)_K` (vertex average for `p = 1`).
    pub fn load_vector(&self, f_coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ndofs()];
        if self.degree == 1 {
            let n = self.num_vertices();
            for v in out.iter_mut() {
                *v = self.area * f_coeffs[0] / n as f64;
            }
        } else {
            let off = self.num_boundary_dofs();
            for (k, c) in f_coeffs.iter().enumerate() {
                out[off + k] = self.area * c;
            }
        }
        out
    }
}

/// Builds the projectors, the stabilisation and the local stiffness of element `k`.
pub fn compute_projectors(mesh: &PolygonalMesh, k: usize, degree: usize, stab: StabKind) -> Result<LocalProjectors> {
    assert!(degree >= 1, "degree must be at least 1");
    let p = degree;
    let vertices = mesh.element_coords(k);
    let n = vertices.len();
    let area = mesh.area(k);
    let diameter = mesh.diameter(k);
    let triangles = element_triangles(mesh, k);
    let mono = ScaledMonomials::new(p, mesh.centroid(k), diameter);
    let np = mono.len();
    let nb = dim_p(p as isize - 2);
    let ndofs = n * p + nb;

    let rule = triangle_rule(2 * p + 2)?;
    let mono_gram = |mono: &ScaledMonomials| {
        let mut gram = DMatrix::zeros(np, np);
        for t in &triangles {
            let (pts, wts) = rule.map(t);
            for (x, w) in pts.iter().zip(&wts) {
                let m = mono.values(*x);
                for a in 0..np {
                    for b in 0..np {
                        gram[(a, b)] += w * m[a] * m[b];
                    }
                }
            }
        }
        gram
    };
    let basis = if p >= ORTHONORMAL_FROM {
        let g = mono_gram(&mono);
        PolyBasis::orthonormal(mono, &g, area)
    } else {
        PolyBasis::monomial(mono)
    };
    let gram = {
        let t = &basis.transform;
        t * mono_gram(&basis.mono) * t.transpose()
    };

    let edges: Vec<EdgeNodeSet> = (0..n)
        .map(|i| EdgeNodeSet::new(vertices[i], vertices[(i + 1) % n], p))
        .collect();
    let normals: Vec<Point> = (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            let t = [b[0] - a[0], b[1] - a[1]];
            let l = t[0].hypot(t[1]);
            [t[1] / l, -t[0] / l]
        })
        .collect();

    let mut lp = LocalProjectors {
        element: k,
        degree: p,
        stab,
        vertices,
        area,
        diameter,
        basis,
        triangles,
        edges,
        normals,
        gram,
        d: DMatrix::zeros(ndofs, np),
        b: DMatrix::zeros(np, ndofs),
        g: DMatrix::zeros(np, np),
        pi_nabla: DMatrix::zeros(np, ndofs),
        projector: DMatrix::zeros(ndofs, ndofs),
        pi0: DMatrix::zeros(nb, ndofs),
        boundary_mass: DMatrix::zeros(ndofs, ndofs),
        sdof: DMatrix::zeros(ndofs, ndofs),
        consistency: DMatrix::zeros(ndofs, ndofs),
        stabilisation: DMatrix::zeros(ndofs, ndofs),
        stiffness: DMatrix::zeros(ndofs, ndofs),
    };

    // D: nodal values and scaled moments of the basis
    for i in 0..n {
        for j in 0..p {
            let vals = lp.basis.values(lp.edges[i].points[j]);
            let r = lp.edge_dof(i, j);
            for a in 0..np {
                lp.d[(r, a)] = vals[a];
            }
        }
    }
    for bta in 0..nb {
        for a in 0..np {
            lp.d[(n * p + bta, a)] = lp.gram[(bta, a)] / area;
        }
    }

    // boundary mass of the Gauss–Lobatto Lagrange basis, exact (degree 2p)
    let (gx, gw) = gauss_legendre(p + 1);
    for i in 0..n {
        let e = &lp.edges[i];
        let len: f64 = e.weights.iter().sum();
        let mut m = DMatrix::<f64>::zeros(p + 1, p + 1);
        for (&x, &w) in gx.iter().zip(&gw) {
            let l = lagrange_1d(&e.reference, x);
            for a in 0..=p {
                for b in 0..=p {
                    m[(a, b)] += 0.5 * w * len * l[a] * l[b];
                }
            }
        }
        for a in 0..=p {
            for b in 0..=p {
                let (ra, rb) = (lp.edge_dof(i, a), lp.edge_dof(i, b));
                lp.boundary_mass[(ra, rb)] += m[(a, b)];
            }
        }
    }

    // Π⁰_{p-2}: c = |K| H⁻¹ mom
    if nb > 0 {
        let h = lp.gram.view((0, 0), (nb, nb)).clone_owned();
        let hinv = linalg::solve_spd(&h, &DMatrix::identity(nb, nb), "moment Gram")?;
        for a in 0..nb {
            for bta in 0..nb {
                lp.pi0[(a, n * p + bta)] = area * hinv[(a, bta)];
            }
        }
    }

    lp.sdof = stab_dof_matrix(&lp);

    // B: integration by parts, row 0 fixes constants through the stabilisation
    let lap = lp.basis.laplacian_matrix();
    for a in 1..np {
        for bta in 0..nb {
            lp.b[(a, n * p + bta)] -= area * lap[(bta, a)];
        }
    }
    for i in 0..n {
        let e = &lp.edges[i];
        for j in 0..=p {
            let grads = lp.basis.gradients(e.points[j]);
            let r = lp.edge_dof(i, j);
            for a in 1..np {
                let dn = grads[a][0] * lp.normals[i][0] + grads[a][1] * lp.normals[i][1];
                lp.b[(a, r)] += e.weights[j] * dn;
            }
        }
    }
    let s_one = &lp.sdof * lp.d.column(0);
    for r in 0..ndofs {
        lp.b[(0, r)] = s_one[r];
    }
    lp.g = &lp.b * &lp.d;
    lp.pi_nabla = linalg::solve(&lp.g, &lp.b, "projector Gram")?;
    lp.projector = &lp.d * &lp.pi_nabla;

    let mut g_tilde = lp.g.clone();
    g_tilde.row_mut(0).fill(0.0);
    lp.consistency = lp.pi_nabla.transpose() * &g_tilde * &lp.pi_nabla;
    lp.stabilisation = stab_matrix(&lp);
    lp.stiffness = &lp.consistency + &lp.stabilisation;
    // exact symmetry
    lp.stiffness = 0.5 * (&lp.stiffness + lp.stiffness.transpose());
    Ok(lp)
}

/// The stabilisation `S(u, v)` on raw dof vectors.
fn stab_dof_matrix(lp: &LocalProjectors) -> DMatrix<f64> {
    let n = lp.ndofs();
    match lp.stab {
        StabKind::DofiDofi => DMatrix::identity(n, n),
        StabKind::Projected => {
            let h = lp.diameter;
            let mut s = &lp.boundary_mass / h;
            let nb = lp.num_moments();
            if nb > 0 {
                let off = lp.num_boundary_dofs();
                let hb = lp.gram.view((0, 0), (nb, nb)).clone_owned();
                let hinv = hb.try_inverse().expect("moment Gram is positive definite");
                let scale = lp.area * lp.area / (h * h);
                for a in 0..nb {
                    for b in 0..nb {
                        s[(off + a, off + b)] += scale * hinv[(a, b)];
                    }
                }
            }
            s
        }
    }
}

/// `S((I - Π∇) u, (I - Π∇) v)` as a matrix on local dofs.
pub fn stab_matrix(lp: &LocalProjectors) -> DMatrix<f64> {
    let n = lp.ndofs();
    let ip = DMatrix::identity(n, n) - &lp.projector;
    let s = ip.transpose() * &lp.sdof * &ip;
    0.5 * (&s + s.transpose())
}

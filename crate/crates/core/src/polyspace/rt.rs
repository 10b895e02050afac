//! Raviart–Thomas spaces `RT_q = [P_q]² + x P_q` on triangles.
//!
//! Degrees of freedom are defined directly on the physical triangle with a
//! global edge orientation (from the lower to the higher point index), so
//! triangles sharing an edge agree on the edge functionals without any sign
//! bookkeeping:
//!
//! * edge `e`, `k = 0..=q`: `|e|⁻¹ ∫_e τ·n_e L_k(s) ds`, with `n_e` the unit
//!   normal obtained by rotating the oriented tangent clockwise and `L_k` the
//!   Legendre polynomial in the oriented arc parameter `s ∈ [-1, 1]`;
//! * interior, `d = 0, 1`, `|γ| ≤ q - 1`: `|T|⁻¹ ∫_T (Ĵ⁻¹τ)_d m̂_γ`, where
//!   `Ĵ = J / √det J` is the normalised Jacobian of the affine map from the
//!   reference triangle and `m̂_γ` are monomials in reference coordinates
//!   centred at the reference centroid.
//!
//! The raw basis is the (rescaled) Piola image of a reference basis, so the
//! dof-to-coefficient matrix is as well conditioned on thin triangles as on
//! the reference one.
//!
//! Local ordering: the three local edges `(v0,v1), (v1,v2), (v2,v0)` with
//! `q + 1` dofs each, then interior x-moments, then interior y-moments.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::monomial::{dim_p, exponents, index_of, ScaledMonomials};
use super::quadrature::{gauss_legendre, legendre, triangle_rule};
use super::TriSet;
use crate::error::{Error, Result};
use crate::mesh::Point;

/// Dimension of `RT_q` on a triangle.
pub fn rt_dim(q: usize) -> usize {
    (q + 1) * (q + 3)
}

#[derive(Debug, Clone)]
pub struct RtTriangle {
    pub degree: usize,
    pub vertices: [Point; 3],
    pub point_ids: [usize; 3],
    pub area: f64,
    /// Monomials of degree `q` in reference coordinates.
    mono: ScaledMonomials,
    origin: Point,
    /// Normalised Jacobian `Ĵ` and its inverse.
    jac: [[f64; 2]; 2],
    jinv: [[f64; 2]; 2],
    sdet: f64,
    /// Raw-to-nodal coefficients: basis `j` is `Σ_r coeffs[(r, j)] raw_r`.
    pub coeffs: DMatrix<f64>,
    homog: Vec<(u32, u32)>,
}

impl RtTriangle {
    pub fn new(vertices: [Point; 3], point_ids: [usize; 3], degree: usize) -> Result<Self> {
        let [a, b, c] = vertices;
        let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if area2 <= 0.0 {
            return Err(Error::InvalidMesh(format!(
                "triangle {point_ids:?} is not counter-clockwise"
            )));
        }
        let mono = ScaledMonomials::new(degree, [1.0 / 3.0, 1.0 / 3.0], 1.0);
        let sdet = area2.sqrt();
        let jac = [
            [(b[0] - a[0]) / sdet, (c[0] - a[0]) / sdet],
            [(b[1] - a[1]) / sdet, (c[1] - a[1]) / sdet],
        ];
        let jinv = [[jac[1][1], -jac[0][1]], [-jac[1][0], jac[0][0]]];
        let homog = exponents(degree)
            .into_iter()
            .filter(|&(x, y)| (x + y) as usize == degree)
            .collect();
        let mut t = Self {
            degree,
            vertices,
            point_ids,
            area: 0.5 * area2,
            mono,
            origin: a,
            jac,
            jinv,
            sdet,
            coeffs: DMatrix::zeros(0, 0),
            homog,
        };
        let n = rt_dim(degree);
        let mut vander = DMatrix::zeros(n, n);
        for r in 0..n {
            let dofs = t.dofs_of(|x| t.raw_values(x)[r]);
            vander.column_mut(r).copy_from_slice(&dofs);
        }
        let inv = vander.try_inverse().ok_or(Error::Singular("Raviart-Thomas basis"))?;
        t.coeffs = inv;
        Ok(t)
    }

    pub fn len(&self) -> usize {
        rt_dim(self.degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Endpoints of local edge `e` in global orientation, and whether the
    /// global orientation agrees with the counter-clockwise local one.
    pub fn oriented_edge(&self, e: usize) -> (Point, Point, bool) {
        let (i, j) = (e, (e + 1) % 3);
        if self.point_ids[i] < self.point_ids[j] {
            (self.vertices[i], self.vertices[j], true)
        } else {
            (self.vertices[j], self.vertices[i], false)
        }
    }

    /// Sorted point-id pair of local edge `e`.
    pub fn edge_key(&self, e: usize) -> [usize; 2] {
        let (i, j) = (self.point_ids[e], self.point_ids[(e + 1) % 3]);
        if i < j {
            [i, j]
        } else {
            [j, i]
        }
    }

    /// Reference coordinates of `x`.
    fn local(&self, x: Point) -> Point {
        let d = [(x[0] - self.origin[0]) / self.sdet, (x[1] - self.origin[1]) / self.sdet];
        [
            self.jinv[0][0] * d[0] + self.jinv[0][1] * d[1],
            self.jinv[1][0] * d[0] + self.jinv[1][1] * d[1],
        ]
    }

    fn push_forward(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.jac[0][0] * v[0] + self.jac[0][1] * v[1],
            self.jac[1][0] * v[0] + self.jac[1][1] * v[1],
        ]
    }

    fn pull_back(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.jinv[0][0] * v[0] + self.jinv[0][1] * v[1],
            self.jinv[1][0] * v[0] + self.jinv[1][1] * v[1],
        ]
    }

    /// Values at `x` of the polynomial basis of degree `q` in which
    /// [`div_matrix`](Self::div_matrix) is expressed.
    pub fn poly_values(&self, x: Point) -> Vec<f64> {
        self.mono.values(self.local(x))
    }

    /// Raw basis: `Ĵ (m̂_α, 0)`, `Ĵ (0, m̂_α)` for `|α| ≤ q`, then `Ĵ ξ̂ m̂_β`
    /// for `|β| = q`.
    pub fn raw_values(&self, x: Point) -> Vec<[f64; 2]> {
        let xi = self.local(x);
        let m = self.mono.values(xi);
        let xi = [xi[0] - self.mono.center[0], xi[1] - self.mono.center[1]];
        let mut out = Vec::with_capacity(self.len());
        out.extend(m.iter().map(|&v| self.push_forward([v, 0.0])));
        out.extend(m.iter().map(|&v| self.push_forward([0.0, v])));
        for &(a, b) in &self.homog {
            let v = m[index_of(a, b)];
            out.push(self.push_forward([xi[0] * v, xi[1] * v]));
        }
        out
    }

    /// Coefficients in [`poly_values`](Self::poly_values) of the divergence
    /// of each raw basis field.
    fn raw_div_matrix(&self) -> DMatrix<f64> {
        let q = self.degree;
        let np = dim_p(q as isize);
        let h = self.sdet;
        let mut d = DMatrix::zeros(np, self.len());
        for (col, &(a, b)) in self.mono.exps.iter().enumerate() {
            if a > 0 {
                d[(index_of(a - 1, b), col)] = a as f64 / h;
            }
            if b > 0 {
                d[(index_of(a, b - 1), np + col)] = b as f64 / h;
            }
        }
        for (k, &(a, b)) in self.homog.iter().enumerate() {
            d[(index_of(a, b), 2 * np + k)] = (q + 2) as f64 / h;
        }
        d
    }

    /// Coefficients of `div φ_j` in [`poly_values`](Self::poly_values) for
    /// every nodal basis field.
    pub fn div_matrix(&self) -> DMatrix<f64> {
        self.raw_div_matrix() * &self.coeffs
    }

    pub fn values(&self, x: Point) -> Vec<[f64; 2]> {
        let raw = self.raw_values(x);
        (0..self.len())
            .map(|j| {
                let mut v = [0.0; 2];
                for (r, rv) in raw.iter().enumerate() {
                    let c = self.coeffs[(r, j)];
                    v[0] += c * rv[0];
                    v[1] += c * rv[1];
                }
                v
            })
            .collect()
    }

    pub fn divergences(&self, x: Point) -> Vec<f64> {
        let m = self.poly_values(x);
        let dm = self.div_matrix();
        (0..self.len())
            .map(|j| (0..m.len()).map(|i| dm[(i, j)] * m[i]).sum())
            .collect()
    }

    /// Evaluates the field with dof vector `dofs` at `x`.
    pub fn eval(&self, dofs: &[f64], x: Point) -> [f64; 2] {
        let vals = self.values(x);
        let mut out = [0.0; 2];
        for (d, v) in dofs.iter().zip(&vals) {
            out[0] += d * v[0];
            out[1] += d * v[1];
        }
        out
    }

    /// Applies the dof functionals to a vector field, by quadrature exact for
    /// fields of degree ≤ `q + 1`.
    pub fn dofs_of(&self, field: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let q = self.degree;
        let mut out = Vec::with_capacity(self.len());
        let (gx, gw) = gauss_legendre(q + 2);
        for e in 0..3 {
            let (a, b, _) = self.oriented_edge(e);
            let t = [b[0] - a[0], b[1] - a[1]];
            let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
            let n = [t[1] / len, -t[0] / len];
            for k in 0..=q {
                let mut s = 0.0;
                for (&xg, &wg) in gx.iter().zip(&gw) {
                    let u = 0.5 * (xg + 1.0);
                    let p = [a[0] + u * t[0], a[1] + u * t[1]];
                    let f = field(p);
                    s += 0.5 * wg * (f[0] * n[0] + f[1] * n[1]) * legendre(k, xg).0;
                }
                out.push(s);
            }
        }
        if q >= 1 {
            let rule = triangle_rule(2 * q + 1).expect("order within range");
            let (pts, wts) = rule.map(&self.vertices);
            let ni = dim_p(q as isize - 1);
            let mut mx = vec![0.0; ni];
            let mut my = vec![0.0; ni];
            for (x, w) in pts.iter().zip(&wts) {
                let f = self.pull_back(field(*x));
                let m = self.poly_values(*x);
                for g in 0..ni {
                    mx[g] += w * f[0] * m[g] / self.area;
                    my[g] += w * f[1] * m[g] / self.area;
                }
            }
            out.extend(mx);
            out.extend(my);
        }
        out
    }
}

/// Assembled `RT_q(T) ∩ H(div)` space on a [`TriSet`].
#[derive(Debug, Clone)]
pub struct RtAssembly {
    pub degree: usize,
    pub ndofs: usize,
    pub elements: Vec<RtTriangle>,
    pub dofs: Vec<Vec<usize>>,
    pub mass: DMatrix<f64>,
    /// Rows: per-triangle coefficients of the divergence in
    /// [`RtTriangle::poly_values`] (blocks of `dim P_q`, triangle order).
    pub div: DMatrix<f64>,
    /// `(div τ_j, m_β)_T` for the same row layout.
    pub div_weak: DMatrix<f64>,
    /// Global dofs of each edge, keyed by sorted point ids.
    pub edge_dofs: HashMap<[usize; 2], Vec<usize>>,
}

/// Builds the global dof map of an H(div)-conforming RT space: edge dofs shared
/// by the triangles incident to the edge, interior dofs private.
pub fn rt_dofmap(elements: &[RtTriangle]) -> (usize, Vec<Vec<usize>>, HashMap<[usize; 2], Vec<usize>>) {
    let mut edge_dofs: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    let mut ndofs = 0;
    let mut dofs = Vec::with_capacity(elements.len());
    for el in elements {
        let q = el.degree;
        let mut local = Vec::with_capacity(el.len());
        for e in 0..3 {
            let ids = edge_dofs.entry(el.edge_key(e)).or_insert_with(|| {
                let v: Vec<usize> = (ndofs..ndofs + q + 1).collect();
                ndofs += q + 1;
                v
            });
            local.extend_from_slice(ids);
        }
        let nint = el.len() - 3 * (q + 1);
        local.extend(ndofs..ndofs + nint);
        ndofs += nint;
        dofs.push(local);
    }
    (ndofs, dofs, edge_dofs)
}

pub fn rt_assemble(set: &TriSet, degree: usize) -> Result<RtAssembly> {
    let elements = set
        .triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| RtTriangle::new(set.coords(t), *tri, degree))
        .collect::<Result<Vec<_>>>()?;
    rt_assemble_elements(elements)
}

/// Assembles prebuilt triangles of a common degree; edges are glued by the
/// point ids stored in each triangle.
pub fn rt_assemble_elements(elements: Vec<RtTriangle>) -> Result<RtAssembly> {
    let degree = elements.first().map_or(0, |e| e.degree);
    let (ndofs, dofs, edge_dofs) = rt_dofmap(&elements);
    let np = dim_p(degree as isize);
    let rule = triangle_rule(2 * degree + 2)?;
    let mut mass = DMatrix::zeros(ndofs, ndofs);
    let mut div = DMatrix::zeros(np * elements.len(), ndofs);
    let mut div_weak = DMatrix::zeros(np * elements.len(), ndofs);
    for (t, (el, local)) in elements.iter().zip(&dofs).enumerate() {
        let (pts, wts) = rule.map(&el.vertices);
        let mut gram = DMatrix::zeros(np, np);
        for (x, w) in pts.iter().zip(&wts) {
            let v = el.values(*x);
            for a in 0..local.len() {
                for b in 0..local.len() {
                    mass[(local[a], local[b])] += w * (v[a][0] * v[b][0] + v[a][1] * v[b][1]);
                }
            }
            let m = el.poly_values(*x);
            for i in 0..np {
                for j in 0..np {
                    gram[(i, j)] += w * m[i] * m[j];
                }
            }
        }
        let dm = el.div_matrix();
        let dw = &gram * &dm;
        for a in 0..local.len() {
            for i in 0..np {
                div[(t * np + i, local[a])] += dm[(i, a)];
                div_weak[(t * np + i, local[a])] += dw[(i, a)];
            }
        }
    }
    Ok(RtAssembly {
        degree,
        ndofs,
        elements,
        dofs,
        mass,
        div,
        div_weak,
        edge_dofs,
    })
}

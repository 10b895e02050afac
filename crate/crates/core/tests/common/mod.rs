//! Dense brute-force oracles: raw monomial spaces on each triangle, every
//! coupling imposed as an explicit linear constraint, and the constrained
//! minimisation solved through an SVD null-space basis.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use polyvem::mesh::Point;
use polyvem::polyspace::quadrature::{gauss_lobatto, legendre, segment_rule};
use polyvem::polyspace::triangle_rule;

fn monomials(d: usize, c: Point, h: f64, x: Point) -> Vec<(f64, [f64; 2], (i32, i32))> {
    let s = [(x[0] - c[0]) / h, (x[1] - c[1]) / h];
    let mut out = Vec::new();
    for k in 0..=d as i32 {
        for a in (0..=k).rev() {
            let b = k - a;
            let v = s[0].powi(a) * s[1].powi(b);
            let dx = if a > 0 {
                a as f64 * s[0].powi(a - 1) * s[1].powi(b) / h
            } else {
                0.0
            };
            let dy = if b > 0 {
                b as f64 * s[0].powi(a) * s[1].powi(b - 1) / h
            } else {
                0.0
            };
            out.push((v, [dx, dy], (a, b)));
        }
    }
    out
}

fn frame(tri: &[Point; 3]) -> (Point, f64) {
    let c = [
        (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
        (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0,
    ];
    let d = |a: Point, b: Point| (a[0] - b[0]).hypot(a[1] - b[1]);
    (c, d(tri[0], tri[1]).max(d(tri[1], tri[2])).max(d(tri[2], tri[0])))
}

/// Full polynomials of degree `d` on a triangle.
pub struct RawP {
    pub tri: [Point; 3],
    pub d: usize,
}

impl RawP {
    pub fn len(&self) -> usize {
        (self.d + 1) * (self.d + 2) / 2
    }

    pub fn eval(&self, x: Point) -> (Vec<f64>, Vec<[f64; 2]>) {
        let (c, h) = frame(&self.tri);
        monomials(self.d, c, h, x).into_iter().map(|(v, g, _)| (v, g)).unzip()
    }
}

/// `[P_q]² + x P_q` on a triangle, raw (non-nodal) basis.
pub struct RawRt {
    pub tri: [Point; 3],
    pub q: usize,
}

impl RawRt {
    pub fn len(&self) -> usize {
        (self.q + 1) * (self.q + 3)
    }

    /// Values and divergences of the raw fields.
    pub fn eval(&self, x: Point) -> (Vec<[f64; 2]>, Vec<f64>) {
        let (c, h) = frame(&self.tri);
        let m = monomials(self.q, c, h, x);
        let s = [(x[0] - c[0]) / h, (x[1] - c[1]) / h];
        let mut vals = Vec::new();
        let mut divs = Vec::new();
        for (v, g, _) in &m {
            vals.push([*v, 0.0]);
            divs.push(g[0]);
        }
        for (v, g, _) in &m {
            vals.push([0.0, *v]);
            divs.push(g[1]);
        }
        for (v, _, (a, b)) in &m {
            if (a + b) as usize == self.q {
                vals.push([s[0] * v, s[1] * v]);
                divs.push((self.q + 2) as f64 * v / h);
            }
        }
        (vals, divs)
    }
}

/// Minimum of `xᵀ H x - 2 gᵀ x + c0` subject to `C x = d` (consistent).
pub fn constrained_min(h: &DMatrix<f64>, g: &DVector<f64>, c0: f64, c: &DMatrix<f64>, d: &DVector<f64>) -> f64 {
    let n = h.nrows();
    let m = c.nrows();
    // square padding gives the full right singular basis
    let mut cp = DMatrix::zeros(n.max(m), n);
    cp.view_mut((0, 0), (m, n)).copy_from(c);
    let mut dp = DVector::zeros(n.max(m));
    dp.rows_mut(0, m).copy_from(d);
    let svd = cp.svd(true, true);
    let vt = svd.v_t.as_ref().unwrap();
    let u = svd.u.as_ref().unwrap();
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax.max(1.0);
    let mut x0 = DVector::zeros(n);
    let mut null = Vec::new();
    for i in 0..n {
        let s = svd.singular_values[i];
        let v = vt.row(i).transpose();
        if s > tol {
            x0 += &v * (u.column(i).dot(&dp) / s);
        } else {
            null.push(v);
        }
    }
    assert!(
        (c * &x0 - d).norm() <= 1e-9 * (1.0 + d.norm()),
        "inconsistent constraints"
    );
    let value = |x: &DVector<f64>| (x.transpose() * h * x)[(0, 0)] - 2.0 * g.dot(x) + c0;
    if null.is_empty() {
        return value(&x0);
    }
    let z = DMatrix::from_columns(&null);
    let hz = z.transpose() * h * &z;
    let rhs = z.transpose() * (g - h * &x0);
    let y = hz.lu().solve(&rhs).expect("reduced Hessian is regular");
    value(&(x0 + z * y))
}

/// Rows `∫_e w L_k`, `k = 0..=deg`, for a scalar trace `w` given per quadrature
/// point as a row of coefficients.
fn edge_moments(a: Point, b: Point, deg: usize, trace: impl Fn(Point) -> Vec<f64>) -> Vec<Vec<f64>> {
    let (pts, wts, ts) = segment_rule(a, b, deg + 6);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for k in 0..=deg {
        let mut row: Vec<f64> = Vec::new();
        for ((x, w), t) in pts.iter().zip(&wts).zip(&ts) {
            let tr = trace(*x);
            if row.is_empty() {
                row = vec![0.0; tr.len()];
            }
            let l = legendre(k, *t).0;
            for (r, v) in row.iter_mut().zip(&tr) {
                *r += w * l * v;
            }
        }
        rows.push(row);
    }
    rows
}

fn outward_normal(a: Point, b: Point) -> [f64; 2] {
    let t = [b[0] - a[0], b[1] - a[1]];
    let l = t[0].hypot(t[1]);
    [t[1] / l, -t[0] / l]
}

/// Triangles (counter-clockwise) with the shared edges found by point ids.
pub struct TriPatch {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriPatch {
    pub fn coords(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.points[a], self.points[b], self.points[c]]
    }

    /// `(t, local edge)` pairs of every edge, keyed by sorted point ids.
    pub fn edges(&self) -> Vec<([usize; 2], Vec<(usize, usize)>)> {
        let mut out: Vec<([usize; 2], Vec<(usize, usize)>)> = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let (i, j) = (tri[e], tri[(e + 1) % 3]);
                let key = [i.min(j), i.max(j)];
                match out.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, v)) => v.push((t, e)),
                    None => out.push((key, vec![(t, e)])),
                }
            }
        }
        out
    }
}

struct Layout {
    offsets: Vec<usize>,
    n: usize,
}

fn layout(sizes: impl Iterator<Item = usize>) -> Layout {
    let mut offsets = Vec::new();
    let mut n = 0;
    for s in sizes {
        offsets.push(n);
        n += s;
    }
    Layout { offsets, n }
}

/// `min ‖τ‖²` over H(div)-conforming `RT_q` on `patch` with `τ·n = flux` on
/// the edges accepted by `is_boundary` (outward normal) and `div τ = div_data`
/// tested against `P_q` on every triangle.
pub fn min_norm_field(
    patch: &TriPatch,
    q: usize,
    boundary_flux: &dyn Fn([usize; 2], Point) -> Option<f64>,
    div_data: &dyn Fn(usize, Point) -> f64,
) -> f64 {
    let spaces: Vec<RawRt> = (0..patch.triangles.len())
        .map(|t| RawRt {
            tri: patch.coords(t),
            q,
        })
        .collect();
    let lay = layout(spaces.iter().map(|s| s.len()));
    let mut h = DMatrix::zeros(lay.n, lay.n);
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let rule = triangle_rule(2 * q + 8).unwrap();
    for (t, sp) in spaces.iter().enumerate() {
        let o = lay.offsets[t];
        let (pts, wts) = rule.map(&sp.tri);
        let np = (q + 1) * (q + 2) / 2;
        let mut div_rows = vec![vec![0.0; lay.n]; np];
        let mut div_rhs = vec![0.0; np];
        let (c, hh) = frame(&sp.tri);
        for (x, w) in pts.iter().zip(&wts) {
            let (vals, divs) = sp.eval(*x);
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    h[(o + i, o + j)] += w * (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]);
                }
            }
            let m = monomials(q, c, hh, *x);
            let r = div_data(t, *x);
            for (b, (mv, _, _)) in m.iter().enumerate() {
                for i in 0..divs.len() {
                    div_rows[b][o + i] += w * mv * divs[i];
                }
                div_rhs[b] += w * mv * r;
            }
        }
        rows.extend(div_rows.into_iter().zip(div_rhs));
    }
    for (key, sides) in patch.edges() {
        let (t0, e0) = sides[0];
        let tri = patch.coords(t0);
        let (a, b) = (tri[e0], tri[(e0 + 1) % 3]);
        let n = outward_normal(a, b);
        let normal_trace = |t: usize, x: Point, sign: f64| {
            let mut row = vec![0.0; lay.n];
            let (vals, _) = spaces[t].eval(x);
            for (i, v) in vals.iter().enumerate() {
                row[lay.offsets[t] + i] = sign * (v[0] * n[0] + v[1] * n[1]);
            }
            row
        };
        if sides.len() == 2 {
            let t1 = sides[1].0;
            for row in edge_moments(a, b, q, |x| {
                let mut r = normal_trace(t0, x, 1.0);
                for (ri, si) in r.iter_mut().zip(normal_trace(t1, x, 1.0)) {
                    *ri -= si;
                }
                r
            }) {
                rows.push((row, 0.0));
            }
        } else if boundary_flux(key, a).is_some() {
            let lhs = edge_moments(a, b, q, |x| normal_trace(t0, x, 1.0));
            let rhs = edge_moments(a, b, q, |x| vec![boundary_flux(key, x).unwrap()]);
            for (row, r) in lhs.into_iter().zip(rhs) {
                rows.push((row, r[0]));
            }
        }
    }
    let c = DMatrix::from_fn(rows.len(), lay.n, |i, j| rows[i].0[j]);
    let d = DVector::from_fn(rows.len(), |i, _| rows[i].1);
    constrained_min(&h, &DVector::zeros(lay.n), 0.0, &c, &d)
}

/// `min ‖G - ∇s‖²` over continuous `P_d` on `patch` with `s = 0` on the
/// edges accepted by `is_boundary` and zero mean when there are none.
pub fn min_potential_distance(
    patch: &TriPatch,
    d: usize,
    field: &dyn Fn(usize, Point) -> [f64; 2],
    is_boundary: &dyn Fn([usize; 2]) -> bool,
) -> f64 {
    let spaces: Vec<RawP> = (0..patch.triangles.len())
        .map(|t| RawP {
            tri: patch.coords(t),
            d,
        })
        .collect();
    let lay = layout(spaces.iter().map(|s| s.len()));
    let mut h = DMatrix::zeros(lay.n, lay.n);
    let mut g = DVector::zeros(lay.n);
    let mut c0 = 0.0;
    let mut mean = vec![0.0; lay.n];
    let rule = triangle_rule(2 * d + 8).unwrap();
    for (t, sp) in spaces.iter().enumerate() {
        let o = lay.offsets[t];
        let (pts, wts) = rule.map(&sp.tri);
        for (x, w) in pts.iter().zip(&wts) {
            let (vals, grads) = sp.eval(*x);
            let f = field(t, *x);
            c0 += w * (f[0] * f[0] + f[1] * f[1]);
            for i in 0..grads.len() {
                g[o + i] += w * (f[0] * grads[i][0] + f[1] * grads[i][1]);
                mean[o + i] += w * vals[i];
                for j in 0..grads.len() {
                    h[(o + i, o + j)] += w * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                }
            }
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut any_boundary = false;
    for (key, sides) in patch.edges() {
        let (t0, e0) = sides[0];
        let tri = patch.coords(t0);
        let (a, b) = (tri[e0], tri[(e0 + 1) % 3]);
        let trace = |t: usize, x: Point| {
            let mut row = vec![0.0; lay.n];
            for (i, v) in spaces[t].eval(x).0.iter().enumerate() {
                row[lay.offsets[t] + i] = *v;
            }
            row
        };
        if sides.len() == 2 {
            let t1 = sides[1].0;
            rows.extend(edge_moments(a, b, d, |x| {
                let mut r = trace(t0, x);
                for (ri, si) in r.iter_mut().zip(trace(t1, x)) {
                    *ri -= si;
                }
                r
            }));
        } else if is_boundary(key) {
            any_boundary = true;
            rows.extend(edge_moments(a, b, d, |x| trace(t0, x)));
        }
    }
    if !any_boundary {
        rows.push(mean);
    }
    let c = DMatrix::from_fn(rows.len(), lay.n, |i, j| rows[i][j]);
    constrained_min(&h, &g, c0, &c, &DVector::zeros(rows.len()))
}

/// `min ‖G + σ‖²` over H(div)-conforming `RT_q` on `patch` (no boundary
/// condition) with `div σ = f` tested against `P_q` on every triangle.
pub fn min_flux_distance(
    patch: &TriPatch,
    q: usize,
    field: &dyn Fn(usize, Point) -> [f64; 2],
    f: &dyn Fn(Point) -> f64,
) -> f64 {
    let spaces: Vec<RawRt> = (0..patch.triangles.len())
        .map(|t| RawRt {
            tri: patch.coords(t),
            q,
        })
        .collect();
    let lay = layout(spaces.iter().map(|s| s.len()));
    let mut h = DMatrix::zeros(lay.n, lay.n);
    let mut g = DVector::zeros(lay.n);
    let mut c0 = 0.0;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let rule = triangle_rule(2 * q + 10).unwrap();
    for (t, sp) in spaces.iter().enumerate() {
        let o = lay.offsets[t];
        let (pts, wts) = rule.map(&sp.tri);
        let np = (q + 1) * (q + 2) / 2;
        let mut div_rows = vec![vec![0.0; lay.n]; np];
        let mut div_rhs = vec![0.0; np];
        let (c, hh) = frame(&sp.tri);
        for (x, w) in pts.iter().zip(&wts) {
            let (vals, divs) = sp.eval(*x);
            let fld = field(t, *x);
            c0 += w * (fld[0] * fld[0] + fld[1] * fld[1]);
            for i in 0..vals.len() {
                // ‖G + σ‖² = σᵀHσ + 2(G, σ) + ‖G‖²
                g[o + i] -= w * (fld[0] * vals[i][0] + fld[1] * vals[i][1]);
                for j in 0..vals.len() {
                    h[(o + i, o + j)] += w * (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]);
                }
            }
            let fx = f(*x);
            for (b, (mv, _, _)) in monomials(q, c, hh, *x).iter().enumerate() {
                for i in 0..divs.len() {
                    div_rows[b][o + i] += w * mv * divs[i];
                }
                div_rhs[b] += w * mv * fx;
            }
        }
        rows.extend(div_rows.into_iter().zip(div_rhs));
    }
    for (_, sides) in patch.edges() {
        if sides.len() != 2 {
            continue;
        }
        let ((t0, e0), (t1, _)) = (sides[0], sides[1]);
        let tri = patch.coords(t0);
        let (a, b) = (tri[e0], tri[(e0 + 1) % 3]);
        let n = outward_normal(a, b);
        for row in edge_moments(a, b, q, |x| {
            let mut row = vec![0.0; lay.n];
            for (t, sign) in [(t0, 1.0), (t1, -1.0)] {
                for (i, v) in spaces[t].eval(x).0.iter().enumerate() {
                    row[lay.offsets[t] + i] = sign * (v[0] * n[0] + v[1] * n[1]);
                }
            }
            row
        }) {
            rows.push((row, 0.0));
        }
    }
    let c = DMatrix::from_fn(rows.len(), lay.n, |i, j| rows[i].0[j]);
    let d = DVector::from_fn(rows.len(), |i, _| rows[i].1);
    constrained_min(&h, &g, c0, &c, &d)
}

/// Gauss–Lobatto interpolant on `[-1, 1]` of nodal values.
pub fn lobatto_interpolant(values: &[f64], t: f64) -> f64 {
    let (nodes, _) = gauss_lobatto(values.len());
    let mut s = 0.0;
    for (i, (&xi, &vi)) in nodes.iter().zip(values).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i {
                l *= (t - xj) / (xi - xj);
            }
        }
        s += l * vi;
    }
    s
}

pub mod cases {
    //! Crate values paired with the oracle values on tiny configurations.

    use super::*;
    use polyvem::estimator::{eta_fl, eta_pt};
    use polyvem::ggrad::{generalised_gradient, stab_lifting, theta_min, GradientOperator};
    use polyvem::mesh::{
        build_cartesian_mesh, build_triangular_mesh, refine, vertex_patches, Domain, PolygonalMesh, Rect,
    };
    use polyvem::vem::{assemble_and_solve, StabKind, VemSystem};
    use std::f64::consts::PI;

    pub struct Comparison {
        pub label: String,
        pub value: f64,
        pub oracle: f64,
    }

    impl Comparison {
        pub fn error(&self) -> f64 {
            (self.value - self.oracle).abs() / self.oracle.abs().max(1.0)
        }
    }

    fn load(x: Point) -> f64 {
        2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin()
    }

    fn solve(mesh: &PolygonalMesh, p: usize, stab: StabKind) -> VemSystem {
        assemble_and_solve(mesh, p, stab, &load, &|_| 0.0).unwrap()
    }

    /// Minimum norms of the θ fields of every basis function on a square, a
    /// triangle and a pentagon with a hanging vertex.
    pub fn theta(p: usize) -> Vec<Comparison> {
        let meshes = [
            ("square", build_cartesian_mesh(1, 1, Rect::UNIT).unwrap(), 0),
            (
                "triangle",
                build_triangular_mesh(1, Domain::Rect(Rect::UNIT)).unwrap(),
                1,
            ),
            (
                "hanging",
                refine(&build_cartesian_mesh(2, 1, Rect::UNIT).unwrap(), &[0]).unwrap(),
                4,
            ),
        ];
        let mut out = Vec::new();
        for (name, mesh, k) in meshes {
            assert!(mesh.element(k).len() >= 3);
            for stab in [StabKind::DofiDofi, StabKind::Projected] {
                let s = solve(&mesh, p, stab);
                let lp = &s.locals[k];
                let op = GradientOperator::new(&s, p).unwrap();
                let rts = &op.rt.triangles[op.rt.subtri.element_triangles[k].clone()];
                let lp_loop = mesh.element(k);
                let n = lp_loop.len();
                let keys: Vec<[usize; 2]> = (0..n)
                    .map(|i| {
                        let (a, b) = (lp_loop[i], lp_loop[(i + 1) % n]);
                        [a.min(b), a.max(b)]
                    })
                    .collect();
                let forward: Vec<bool> = (0..n).map(|i| lp_loop[i] < lp_loop[(i + 1) % n]).collect();
                let lift = stab_lifting(lp).unwrap();
                let th = theta_min(lp, rts, &keys, &forward, &lift.mu, &lift.r).unwrap();

                let (set, _, ids) = op.rt.subtri.restrict(&[k]);
                let patch = TriPatch {
                    points: set.points.clone(),
                    triangles: set.triangles.clone(),
                };
                for j in 0..lp.ndofs() {
                    let flux = |key: [usize; 2], x: Point| -> Option<f64> {
                        let g = [ids[key[0]], ids[key[1]]];
                        let i = keys.iter().position(|kk| *kk == [g[0].min(g[1]), g[0].max(g[1])])?;
                        let (a, b) = (mesh.vertex(lp_loop[i]), mesh.vertex(lp_loop[(i + 1) % n]));
                        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                        let t = 2.0 * (x[0] - a[0]).hypot(x[1] - a[1]) / len - 1.0;
                        let nodal: Vec<f64> = (0..=p).map(|jj| lift.mu[(lp.edge_dof(i, jj), j)]).collect();
                        Some(lobatto_interpolant(&nodal, t))
                    };
                    let div = |_: usize, x: Point| {
                        let b = lp.basis.values(x);
                        (0..lift.r.nrows()).map(|beta| lift.r[(beta, j)] * b[beta]).sum::<f64>()
                    };
                    out.push(Comparison {
                        label: format!("theta {name} p={p} {stab:?} basis {j}"),
                        value: th.norms2[j],
                        oracle: min_norm_field(&patch, p, &flux, &div),
                    });
                }
            }
        }
        out
    }

    /// Squared patch estimators on an interior and a boundary vertex patch of
    /// a 2×2 square mesh with one refined element.
    pub fn patches(p: usize) -> Vec<Comparison> {
        let mesh = refine(&build_cartesian_mesh(2, 2, Rect::UNIT).unwrap(), &[3]).unwrap();
        let s = solve(&mesh, p, StabKind::DofiDofi);
        let (_, field) = generalised_gradient(&s).unwrap();
        let all = vertex_patches(&mesh);
        let centre = all.iter().find(|pt| mesh.vertex(pt.vertex) == [0.5, 0.5]).unwrap();
        let side = all.iter().find(|pt| mesh.vertex(pt.vertex) == [0.5, 0.0]).unwrap();
        let mut out = Vec::new();
        for patch in [centre, side] {
            let (set, tris, ids) = field.rt.subtri.restrict(&patch.elements);
            let tp = TriPatch {
                points: set.points.clone(),
                triangles: set.triangles.clone(),
            };
            let g = |t: usize, x: Point| field.eval(tris[t], x);
            let on_boundary = |key: [usize; 2]| {
                let e = [ids[key[0]], ids[key[1]]];
                patch.boundary_edges.iter().any(|&be| {
                    let m = mesh.edge(be);
                    (m[0] == e[0] && m[1] == e[1]) || (m[0] == e[1] && m[1] == e[0])
                })
            };
            let pt = eta_pt(&mesh, patch, &field, p + 2, &|_| 0.0).unwrap();
            out.push(Comparison {
                label: format!("potential p={p} vertex {:?}", mesh.vertex(patch.vertex)),
                value: pt.eta * pt.eta,
                oracle: min_potential_distance(&tp, p + 2, &g, &on_boundary),
            });
            let fl = eta_fl(&s, patch, &field, p, Some(&load)).unwrap();
            out.push(Comparison {
                label: format!("flux p={p} vertex {:?}", mesh.vertex(patch.vertex)),
                value: fl.eta * fl.eta,
                oracle: min_flux_distance(&tp, p, &g, &load),
            });
        }
        out
    }
}

pub mod meshes {
    //! Randomised meshes: jittered Cartesian and triangular grids, optionally
    //! refined once on a random subset (hanging vertices).

    use polyvem::mesh::{build_cartesian_mesh, build_triangular_mesh, refine, Domain, PolygonalMesh, Rect};
    use rand::Rng;

    #[derive(Debug, Clone, Copy)]
    pub enum Kind {
        Cartesian,
        Triangular,
        Refined,
    }

    fn jitter(mesh: &PolygonalMesh, amount: f64, rng: &mut impl Rng) -> PolygonalMesh {
        let h = (0..mesh.num_edges())
            .map(|e| mesh.edge_length(e))
            .fold(f64::INFINITY, f64::min);
        let vertices = (0..mesh.num_vertices())
            .map(|v| {
                let x = mesh.vertex(v);
                if mesh.is_boundary_vertex(v) {
                    x
                } else {
                    [
                        x[0] + amount * h * rng.gen_range(-1.0..1.0),
                        x[1] + amount * h * rng.gen_range(-1.0..1.0),
                    ]
                }
            })
            .collect();
        PolygonalMesh::new(vertices, mesh.elements().to_vec()).unwrap()
    }

    pub fn random_mesh(kind: Kind, rng: &mut impl Rng) -> PolygonalMesh {
        match kind {
            Kind::Cartesian => {
                let m = build_cartesian_mesh(rng.gen_range(1..=3), rng.gen_range(1..=3), Rect::UNIT).unwrap();
                jitter(&m, 0.2, rng)
            }
            Kind::Triangular => {
                let m = build_triangular_mesh(rng.gen_range(1..=3), Domain::Rect(Rect::UNIT)).unwrap();
                jitter(&m, 0.1, rng)
            }
            Kind::Refined => {
                let base = if rng.gen_bool(0.5) {
                    build_cartesian_mesh(rng.gen_range(2..=3), rng.gen_range(1..=3), Rect::UNIT).unwrap()
                } else {
                    build_triangular_mesh(rng.gen_range(1..=2), Domain::Rect(Rect::UNIT)).unwrap()
                };
                let n = base.num_elements();
                let mut marked: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                if marked.is_empty() || marked.len() == n {
                    marked = vec![rng.gen_range(0..n)];
                }
                refine(&base, &marked).unwrap()
            }
        }
    }
}

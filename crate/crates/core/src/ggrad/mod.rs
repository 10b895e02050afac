//! Generalised gradient: a piecewise Raviart–Thomas field `𝔊(φ)` on the
//! element subtriangulations with `a_h(φ, v) = (𝔊(φ), ∇v)` for all virtual
//! functions `v`.

pub mod lifting;
pub mod theta;

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use lifting::{stab_lifting, stab_potential, StabLifting};
pub use theta::{theta_min, ThetaSolution};

use crate::error::Result;
use crate::mesh::{subtriangulate, Point, SubTriangulation};
use crate::polyspace::quadrature::gauss_legendre;
use crate::polyspace::{lagrange_1d, triangle_rule, RtTriangle};
use crate::vem::{LocalProjectors, VemSystem};

/// RT spaces of one degree on every triangle of the global subtriangulation.
#[derive(Debug, Clone)]
pub struct RtMesh {
    pub degree: usize,
    pub subtri: SubTriangulation,
    pub triangles: Vec<RtTriangle>,
}

impl RtMesh {
    pub fn new(subtri: SubTriangulation, degree: usize) -> Result<Self> {
        let triangles = (0..subtri.num_triangles())
            .map(|t| RtTriangle::new(subtri.coords(t), subtri.triangles[t], degree))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            degree,
            subtri,
            triangles,
        })
    }
}

/// Per-element map from local dofs to the RT dofs of `𝔊(φ)`.
#[derive(Debug, Clone)]
pub struct ElementGradient {
    pub element: usize,
    pub triangles: Range<usize>,
    /// One `rt_dim × ndofs` block per subtriangle.
    pub ops: Vec<DMatrix<f64>>,
    /// The minimum-norm part alone, same layout.
    pub theta: Vec<DMatrix<f64>>,
    pub lifting: StabLifting,
    pub potential: DMatrix<f64>,
    pub theta_feasibility: f64,
    pub theta_stationarity: f64,
}

/// The linear map `φ ↦ 𝔊(φ)` for every element of a solved system.
#[derive(Debug, Clone)]
pub struct GradientOperator {
    pub rt: Arc<RtMesh>,
    pub elements: Vec<ElementGradient>,
}

/// Piecewise RT field on the global subtriangulation.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub rt: Arc<RtMesh>,
    /// Local RT dofs per triangle.
    pub dofs: Vec<Vec<f64>>,
}

impl GradientField {
    pub fn degree(&self) -> usize {
        self.rt.degree
    }

    pub fn eval(&self, t: usize, x: Point) -> [f64; 2] {
        self.rt.triangles[t].eval(&self.dofs[t], x)
    }

    /// `‖𝔊 - w‖²` over the given triangles by quadrature of `order`.
    pub fn dist2(
        &self,
        tris: impl IntoIterator<Item = usize>,
        order: usize,
        w: &dyn Fn(usize, Point) -> [f64; 2],
    ) -> f64 {
        let rule = triangle_rule(order).expect("quadrature order within range");
        let mut s = 0.0;
        for t in tris {
            let (pts, wts) = rule.map(&self.rt.triangles[t].vertices);
            for (x, wx) in pts.iter().zip(&wts) {
                let g = self.eval(t, *x);
                let v = w(t, *x);
                s += wx * ((g[0] - v[0]).powi(2) + (g[1] - v[1]).powi(2));
            }
        }
        s
    }

    pub fn export(&self) -> GradientExport {
        GradientExport {
            degree: self.degree(),
            triangles: (0..self.dofs.len())
                .map(|t| TriangleExport {
                    vertices: self.rt.triangles[t].vertices,
                    point_ids: self.rt.triangles[t].point_ids,
                    parent: self.rt.subtri.parent[t],
                    dofs: self.dofs[t].clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleExport {
    pub vertices: [Point; 3],
    pub point_ids: [usize; 3],
    pub parent: usize,
    pub dofs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradientExport {
    pub degree: usize,
    pub triangles: Vec<TriangleExport>,
}

/// Builds `φ ↦ 𝔊(φ)` on one element.
pub fn element_gradient(lp: &LocalProjectors, rt: &RtMesh, element_loop: &[usize]) -> Result<ElementGradient> {
    let k = lp.element;
    let range = rt.subtri.element_triangles[k].clone();
    let rts = &rt.triangles[range.clone()];
    let n = element_loop.len();
    let edge_keys: Vec<[usize; 2]> = (0..n)
        .map(|i| {
            let (a, b) = (element_loop[i], element_loop[(i + 1) % n]);
            [a.min(b), a.max(b)]
        })
        .collect();
    let forward: Vec<bool> = (0..n).map(|i| element_loop[i] < element_loop[(i + 1) % n]).collect();

    let lifting = stab_lifting(lp)?;
    let potential = stab_potential(lp)?;
    let th = theta_min(lp, rts, &edge_keys, &forward, &lifting.mu, &lifting.r)?;
    let poly = &lp.pi_nabla - &potential;
    let np = lp.npoly();
    let mut ops = Vec::with_capacity(rts.len());
    for (t, tri) in rts.iter().enumerate() {
        let mut interp = DMatrix::zeros(tri.len(), np);
        for a in 0..np {
            let col = tri.dofs_of(|x| lp.basis.gradients(x)[a]);
            interp.column_mut(a).copy_from_slice(&col);
        }
        ops.push(interp * &poly + &th.triangles[t]);
    }
    Ok(ElementGradient {
        element: k,
        triangles: range,
        ops,
        theta: th.triangles,
        lifting,
        potential,
        theta_feasibility: th.feasibility,
        theta_stationarity: th.stationarity,
    })
}

impl GradientOperator {
    /// `degree` is the RT degree of the field (`p` by default, `p + 1` for
    /// the enriched variant).
    pub fn new(system: &VemSystem, degree: usize) -> Result<Self> {
        let subtri = subtriangulate(&system.mesh)?;
        let rt = Arc::new(RtMesh::new(subtri, degree)?);
        let elements = (0..system.mesh.num_elements())
            .map(|k| element_gradient(&system.locals[k], &rt, system.mesh.element(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rt, elements })
    }

    /// `𝔊` of the global dof vector `u`.
    pub fn apply(&self, system: &VemSystem, u: &[f64]) -> GradientField {
        let mut dofs = vec![Vec::new(); self.rt.triangles.len()];
        for eg in &self.elements {
            let ul = DVector::from_vec(system.local_dofs(eg.element, u));
            for (op, t) in eg.ops.iter().zip(eg.triangles.clone()) {
                dofs[t] = (op * &ul).as_slice().to_vec();
            }
        }
        GradientField {
            rt: self.rt.clone(),
            dofs,
        }
    }
}

/// `𝔊(u_h)` with RT degree `p`.
pub fn generalised_gradient(system: &VemSystem) -> Result<(GradientOperator, GradientField)> {
    let op = GradientOperator::new(system, system.degree)?;
    let field = op.apply(system, &system.solution);
    Ok((op, field))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// `max_K max_{i,j} |a_K(φ_j, φ_i) - (𝔊φ_j, ∇φ_i)_K| / max |a_K|`.
    pub identity: f64,
    /// Distance of `div 𝔊` from `P_{p-2}(K)`, relative to the field size.
    pub divergence: f64,
    /// Normal jumps of `𝔊` across internal subtriangle edges, relative.
    pub normal_jump: f64,
    /// Largest of the three.
    pub max: f64,
    pub worst_element: usize,
}

/// Evaluates the rewriting identity for all pairs of local basis functions.
///
/// `(𝔊φ, ∇v)_K` is evaluated as `-(div 𝔊φ, v)_K + (𝔊φ·n, v)_{∂K}`, which is
/// computable from the dofs of `v` once `div 𝔊φ ∈ P_{p-2}(K)` and `𝔊φ` has
/// no normal jumps inside `K`; both facts are measured as well.
pub fn verify_identity(system: &VemSystem, op: &GradientOperator) -> IdentityReport {
    let mut rep = IdentityReport {
        identity: 0.0,
        divergence: 0.0,
        normal_jump: 0.0,
        max: 0.0,
        worst_element: 0,
    };
    for eg in &op.elements {
        let (a, d, j) = element_identity(&system.locals[eg.element], &op.rt, eg);
        let m = a.max(d).max(j);
        rep.identity = rep.identity.max(a);
        rep.divergence = rep.divergence.max(d);
        rep.normal_jump = rep.normal_jump.max(j);
        if m > rep.max {
            rep.max = m;
            rep.worst_element = eg.element;
        }
    }
    rep
}

/// Same as [`verify_identity`] after adding `delta` to every dof of the
/// minimum-norm part (sensitivity probe).
pub fn verify_identity_perturbed(system: &VemSystem, op: &GradientOperator, delta: f64) -> IdentityReport {
    let mut pert = op.clone();
    for eg in &mut pert.elements {
        for (o, th) in eg.ops.iter_mut().zip(eg.theta.iter_mut()) {
            o.add_scalar_mut(delta);
            th.add_scalar_mut(delta);
        }
    }
    verify_identity(system, &pert)
}

fn element_identity(lp: &LocalProjectors, rt: &RtMesh, eg: &ElementGradient) -> (f64, f64, f64) {
    let n = lp.ndofs();
    let nv = lp.num_vertices();
    let p = lp.degree;
    let q = rt.degree;
    let rts = &rt.triangles[eg.triangles.clone()];
    let nb = lp.num_moments();

    // field size: max pointwise magnitude over the element
    let rule = triangle_rule(2 * q + 2).expect("quadrature order within range");
    let mut fmax = 0.0f64;

    // L² projection of div 𝔊φ onto the moment basis, and its defect
    let mut proj_rhs = DMatrix::<f64>::zeros(nb, n);
    let mut div_vals: Vec<(Point, f64, Vec<f64>)> = Vec::new();
    for (t, tri) in rts.iter().enumerate() {
        let dm = tri.div_matrix() * &eg.ops[t];
        let (pts, wts) = rule.map(&tri.vertices);
        for (x, w) in pts.iter().zip(&wts) {
            let m = tri.poly_values(*x);
            let dv: Vec<f64> = (0..n).map(|j| (0..m.len()).map(|i| dm[(i, j)] * m[i]).sum()).collect();
            let b = lp.basis.values(*x);
            for g in 0..nb {
                for jj in 0..n {
                    proj_rhs[(g, jj)] += w * b[g] * dv[jj];
                }
            }
            let vals = tri.values(*x);
            for jj in 0..n {
                let mut v = [0.0; 2];
                for (r, vr) in vals.iter().enumerate() {
                    v[0] += eg.ops[t][(r, jj)] * vr[0];
                    v[1] += eg.ops[t][(r, jj)] * vr[1];
                }
                fmax = fmax.max(v[0].hypot(v[1]));
            }
            div_vals.push((*x, *w, dv));
        }
    }
    let coeffs = if nb > 0 {
        let h = lp.gram.view((0, 0), (nb, nb)).clone_owned();
        h.cholesky().expect("moment Gram is positive definite").solve(&proj_rhs)
    } else {
        DMatrix::zeros(0, n)
    };
    let mut div_def = 0.0f64;
    for (x, _w, dv) in &div_vals {
        let b = lp.basis.values(*x);
        for jj in 0..n {
            let pr: f64 = (0..nb).map(|g| coeffs[(g, jj)] * b[g]).sum();
            div_def = div_def.max((dv[jj] - pr).abs());
        }
    }
    let fscale = fmax.max(f64::MIN_POSITIVE);
    let divergence = div_def * lp.diameter / fscale;

    // (𝔊φ_j, ∇φ_i) = -(div 𝔊φ_j, φ_i) + (𝔊φ_j·n, φ_i)_{∂K}
    let mut a = DMatrix::<f64>::zeros(n, n);
    let off = lp.num_boundary_dofs();
    for g in 0..nb {
        for jj in 0..n {
            a[(off + g, jj)] -= lp.area * coeffs[(g, jj)];
        }
    }
    let (gx, gw) = gauss_legendre(p + q + 2);
    for i in 0..nv {
        let t = if rts.len() == 1 { 0 } else { i };
        let e = &lp.edges[i];
        let (xa, xb) = (e.points[0], e.points[p]);
        let len: f64 = e.weights.iter().sum();
        let nrm = lp.normals[i];
        for (&s, &w) in gx.iter().zip(&gw) {
            let u = 0.5 * (s + 1.0);
            let x = [xa[0] + u * (xb[0] - xa[0]), xa[1] + u * (xb[1] - xa[1])];
            let l = lagrange_1d(&e.reference, s);
            let vals = rts[t].values(x);
            for jj in 0..n {
                let mut fnrm = 0.0;
                for (r, vr) in vals.iter().enumerate() {
                    fnrm += eg.ops[t][(r, jj)] * (vr[0] * nrm[0] + vr[1] * nrm[1]);
                }
                for node in 0..=p {
                    a[(lp.edge_dof(i, node), jj)] += 0.5 * w * len * fnrm * l[node];
                }
            }
        }
    }
    let kscale = lp.stiffness.abs().max().max(f64::MIN_POSITIVE);
    let identity = (&a - &lp.stiffness).abs().max() / kscale;

    // normal jumps across spokes
    let mut jump = 0.0f64;
    if rts.len() > 1 {
        let m = rts.len();
        for i in 0..m {
            // spoke [center, v_i] separates triangles i - 1 and i
            let (tl, tr) = ((i + m - 1) % m, i);
            let c = rts[tr].vertices[0];
            let v = rts[tr].vertices[1];
            let tn = [v[0] - c[0], v[1] - c[1]];
            let ln = tn[0].hypot(tn[1]);
            let nrm = [tn[1] / ln, -tn[0] / ln];
            for &s in &gx {
                let u = 0.5 * (s + 1.0);
                let x = [c[0] + u * tn[0], c[1] + u * tn[1]];
                let vl = rts[tl].values(x);
                let vr = rts[tr].values(x);
                for jj in 0..n {
                    let mut dj = 0.0;
                    for (r, v) in vl.iter().enumerate() {
                        dj += eg.ops[tl][(r, jj)] * (v[0] * nrm[0] + v[1] * nrm[1]);
                    }
                    for (r, v) in vr.iter().enumerate() {
                        dj -= eg.ops[tr][(r, jj)] * (v[0] * nrm[0] + v[1] * nrm[1]);
                    }
                    jump = jump.max(dj.abs());
                }
            }
        }
    }
    (identity, divergence, jump / fscale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian_mesh, build_triangular_mesh, refine, Domain, PolygonalMesh, Rect};
    use crate::vem::{assemble_and_solve, StabKind};

    fn solve(m: &PolygonalMesh, p: usize, stab: StabKind) -> VemSystem {
        let pi = std::f64::consts::PI;
        assemble_and_solve(
            m,
            p,
            stab,
            &|x| 2.0 * pi * pi * (pi * x[0]).sin() * (pi * x[1]).sin(),
            &|_| 0.0,
        )
        .unwrap()
    }

    #[test]
    fn identity_holds_on_mixed_meshes() {
        let cart = refine(&build_cartesian_mesh(2, 2, Rect::UNIT).unwrap(), &[0]).unwrap();
        let tri = refine(&build_triangular_mesh(2, Domain::Rect(Rect::UNIT)).unwrap(), &[1]).unwrap();
        for m in [cart, tri] {
            for p in 1..=4 {
                for stab in [StabKind::DofiDofi, StabKind::Projected] {
                    let s = solve(&m, p, stab);
                    let op = GradientOperator::new(&s, p).unwrap();
                    let r = verify_identity(&s, &op);
                    assert!(r.max < 1e-9, "p={p} {stab:?} {r:?}");
                }
            }
        }
    }

    #[test]
    fn enriched_degree_also_satisfies_identity() {
        let m = build_cartesian_mesh(2, 1, Rect::UNIT).unwrap();
        let s = solve(&m, 2, StabKind::DofiDofi);
        let op = GradientOperator::new(&s, 3).unwrap();
        assert!(verify_identity(&s, &op).max < 1e-9);
    }

    #[test]
    fn perturbation_is_detected() {
        let m = build_cartesian_mesh(1, 1, Rect::UNIT).unwrap();
        let s = solve(&m, 1, StabKind::DofiDofi);
        let op = GradientOperator::new(&s, 1).unwrap();
        assert!(verify_identity(&s, &op).max < 1e-11);
        assert!(verify_identity_perturbed(&s, &op, 1e-3).max >= 1e-4);
    }

    #[test]
    fn linear_solution_gives_constant_gradient() {
        let m = refine(&build_cartesian_mesh(2, 2, Rect::UNIT).unwrap(), &[3]).unwrap();
        let s = assemble_and_solve(&m, 1, StabKind::Projected, &|_| 0.0, &|x| 2.0 * x[0] - x[1]).unwrap();
        let (_, field) = generalised_gradient(&s).unwrap();
        let d = field.dist2(0..field.dofs.len(), 4, &|_, _| [2.0, -1.0]);
        assert!(d.sqrt() < 1e-9);
    }
}

//! Local finite element problems on vertex patches.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::ggrad::GradientField;
use crate::linalg;
use crate::mesh::{PolygonalMesh, VertexPatch};
use crate::polyspace::{p_assemble, rt_assemble, rt_assemble_elements, triangle_rule, Continuity, TriSet};
use crate::vem::{ScalarFn, VemSystem};

#[derive(Debug, Clone)]
pub struct PatchPotential {
    /// `‖𝔊 - ∇s‖_{ω^ν}`.
    pub eta: f64,
    pub degree: usize,
    /// Coefficients of `s` in the continuous Lagrange basis of the patch.
    pub coeffs: Vec<f64>,
    /// Relative residual of the Galerkin equations on the free dofs.
    pub orthogonality: f64,
    /// Largest `|s - g|` on the constrained boundary dofs.
    pub boundary_trace: f64,
}

#[derive(Debug, Clone)]
pub struct PatchFlux {
    /// `‖𝔊 + σ‖_{ω^ν}`.
    pub eta: f64,
    pub degree: usize,
    pub coeffs: Vec<f64>,
    /// Relative residual of the divergence constraint.
    pub divergence: f64,
}

/// The patch subtriangulation with the global triangle and point ids.
pub fn patch_set(field: &GradientField, patch: &VertexPatch) -> (TriSet, Vec<usize>, Vec<usize>) {
    field.rt.subtri.restrict(&patch.elements)
}

/// Minimises `‖𝔊 - ∇s‖_{ω^ν}` over continuous piecewise polynomials of
/// `degree` on the patch subtriangulation. On boundary patches `s` interpolates
/// the Dirichlet data on the domain-boundary edges through the vertex (zero in
/// the homogeneous case); interior patches use the zero-mean representative.
pub fn eta_pt(
    mesh: &PolygonalMesh,
    patch: &VertexPatch,
    field: &GradientField,
    degree: usize,
    dirichlet: ScalarFn,
) -> Result<PatchPotential> {
    let (set, tris, ids) = patch_set(field, patch);
    let lag = p_assemble(&set, degree, Continuity::Continuous)?;
    let n = lag.ndofs;
    let q = field.degree();
    let rule = triangle_rule((q + degree).max(2 * q + 2).max(2 * degree))?;

    let mut load = vec![0.0; n];
    for (lt, &gt) in tris.iter().enumerate() {
        let el = &lag.elements[lt];
        let (pts, wts) = rule.map(&el.vertices);
        for (x, w) in pts.iter().zip(&wts) {
            let g = field.eval(gt, *x);
            let (_, grads) = el.eval(*x);
            for (a, &d) in lag.dofs[lt].iter().enumerate() {
                load[d] += w * (g[0] * grads[a][0] + g[1] * grads[a][1]);
            }
        }
    }

    let mut fixed = vec![false; n];
    if patch.is_boundary {
        let local = |g: usize| ids.binary_search(&g).expect("patch contains its boundary edges");
        for &e in &patch.boundary_edges {
            let [a, b] = mesh.edge(e);
            let (la, lb) = (local(a), local(b));
            let key = [la.min(lb), la.max(lb)];
            for &d in &lag.edge_dofs[&key] {
                fixed[d] = true;
            }
        }
    } else {
        fixed[0] = true;
    }
    let mut s = vec![0.0; n];
    if patch.is_boundary {
        for (el, dofs) in lag.elements.iter().zip(&lag.dofs) {
            for (a, &d) in dofs.iter().enumerate() {
                if fixed[d] {
                    s[d] = dirichlet(el.node_point(a));
                }
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&d| !fixed[d]).collect();
    let k = DMatrix::from_fn(free.len(), free.len(), |i, j| lag.stiffness[(free[i], free[j])]);
    let l = DMatrix::from_fn(free.len(), 1, |i, _| {
        load[free[i]]
            - (0..n)
                .filter(|&d| fixed[d])
                .map(|d| lag.stiffness[(free[i], d)] * s[d])
                .sum::<f64>()
    });
    let x = linalg::solve_spd(&k, &l, "patch potential")?;
    for (i, &d) in free.iter().enumerate() {
        s[d] = x[i];
    }
    let res = (&k * &x - &l).abs().max() / l.abs().max().max(f64::MIN_POSITIVE);
    if !patch.is_boundary {
        let ones = DMatrix::from_element(n, 1, 1.0);
        let sv = DMatrix::from_column_slice(n, 1, &s);
        let area = (ones.transpose() * &lag.mass * &ones)[(0, 0)];
        let mean = (ones.transpose() * &lag.mass * sv)[(0, 0)] / area;
        s.iter_mut().for_each(|v| *v -= mean);
    }
    let mut boundary_trace = 0.0f64;
    if patch.is_boundary {
        for (el, dofs) in lag.elements.iter().zip(&lag.dofs) {
            for (a, &d) in dofs.iter().enumerate() {
                if fixed[d] {
                    boundary_trace = boundary_trace.max((s[d] - dirichlet(el.node_point(a))).abs());
                }
            }
        }
    }

    let mut eta2 = 0.0;
    for (lt, &gt) in tris.iter().enumerate() {
        let el = &lag.elements[lt];
        let (pts, wts) = rule.map(&el.vertices);
        for (x, w) in pts.iter().zip(&wts) {
            let g = field.eval(gt, *x);
            let (_, grads) = el.eval(*x);
            let mut gs = [0.0; 2];
            for (a, &d) in lag.dofs[lt].iter().enumerate() {
                gs[0] += s[d] * grads[a][0];
                gs[1] += s[d] * grads[a][1];
            }
            eta2 += w * ((g[0] - gs[0]).powi(2) + (g[1] - gs[1]).powi(2));
        }
    }
    Ok(PatchPotential {
        eta: eta2.sqrt(),
        degree,
        coeffs: s,
        orthogonality: res,
        boundary_trace,
    })
}

/// Minimises `‖𝔊 + σ‖_{ω^ν}` over `RT_degree` on the patch (no boundary
/// condition) subject to `div σ = f_h` on every subtriangle, where `f_h` is the
/// solver's load, or the L² projection of `load` onto `P_degree` when given.
pub fn eta_fl(
    system: &VemSystem,
    patch: &VertexPatch,
    field: &GradientField,
    degree: usize,
    load: Option<ScalarFn>,
) -> Result<PatchFlux> {
    let (set, tris, _) = patch_set(field, patch);
    let asm = if field.degree() == degree {
        rt_assemble_elements(tris.iter().map(|&t| field.rt.triangles[t].clone()).collect())?
    } else {
        rt_assemble(&set, degree)?
    };
    let n = asm.ndofs;
    // a non-polynomial load needs a richer rule for its moments
    let rule = triangle_rule(2 * field.degree().max(degree) + if load.is_some() { 10 } else { 2 })?;
    let npq = crate::polyspace::dim_p(degree as isize);
    let mut f = DMatrix::zeros(n, 1);
    let mut g = DMatrix::zeros(npq * tris.len(), 1);
    for (lt, &gt) in tris.iter().enumerate() {
        let el = &asm.elements[lt];
        let k = field.rt.subtri.parent[gt];
        let lp = &system.locals[k];
        let fc = &system.load_coeffs[k];
        let (pts, wts) = rule.map(&el.vertices);
        for (x, w) in pts.iter().zip(&wts) {
            let gv = field.eval(gt, *x);
            let vals = el.values(*x);
            for (a, &d) in asm.dofs[lt].iter().enumerate() {
                f[d] -= w * (gv[0] * vals[a][0] + gv[1] * vals[a][1]);
            }
            let fx = match load {
                Some(f) => f(*x),
                None => lp.basis.values(*x).iter().zip(fc).map(|(b, c)| b * c).sum(),
            };
            let m = el.poly_values(*x);
            for b in 0..npq {
                g[lt * npq + b] += w * fx * m[b];
            }
        }
    }
    let (sigma, _) = linalg::saddle_solve(&asm.mass, &asm.div_weak, &f, &g, "patch flux")?;
    let divergence = (&asm.div_weak * &sigma - &g).abs().max()
        / g.abs()
            .max()
            .max(asm.div_weak.abs().max() * sigma.abs().max())
            .max(f64::MIN_POSITIVE);

    let mut eta2 = 0.0;
    for (lt, &gt) in tris.iter().enumerate() {
        let el = &asm.elements[lt];
        let (pts, wts) = rule.map(&el.vertices);
        let local: Vec<f64> = asm.dofs[lt].iter().map(|&d| sigma[d]).collect();
        for (x, w) in pts.iter().zip(&wts) {
            let gv = field.eval(gt, *x);
            let sv = el.eval(&local, *x);
            eta2 += w * ((gv[0] + sv[0]).powi(2) + (gv[1] + sv[1]).powi(2));
        }
    }
    Ok(PatchFlux {
        eta: eta2.sqrt(),
        degree,
        coeffs: sigma.as_slice().to_vec(),
        divergence,
    })
}

//! Minimum-norm H(div) field with prescribed normal trace and divergence on
//! an element subtriangulation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polyspace::quadrature::{gauss_legendre, legendre};
use crate::polyspace::{dim_p, lagrange_1d, rt_assemble_elements, triangle_rule, RtTriangle};
use crate::vem::LocalProjectors;

#[derive(Debug, Clone)]
pub struct ThetaSolution {
    /// Local RT dofs per subtriangle, one column per right-hand side.
    pub triangles: Vec<DMatrix<f64>>,
    /// Relative residual of the divergence and normal-trace constraints.
    pub feasibility: f64,
    /// Relative residual of the stationarity equations.
    pub stationarity: f64,
    /// `‖θ‖²_K` per column.
    pub norms2: Vec<f64>,
}

/// Normal-trace dofs `|e|⁻¹ ∫_e μ L_k(s)` on the edge `v_i → v_{i+1}` of the
/// element, for the global orientation of that edge, from the Gauss–Lobatto
/// nodal values of `μ` (rows: `k`, columns: right-hand sides).
pub fn edge_flux_dofs(lp: &LocalProjectors, i: usize, forward: bool, q: usize, mu: &DMatrix<f64>) -> DMatrix<f64> {
    let p = lp.degree;
    let (gx, gw) = gauss_legendre(q + 2);
    let sign = if forward { 1.0 } else { -1.0 };
    let mut out = DMatrix::zeros(q + 1, mu.ncols());
    for (&t, &w) in gx.iter().zip(&gw) {
        let l = lagrange_1d(&lp.edges[i].reference, t);
        let s = if forward { t } else { -t };
        for k in 0..=q {
            let lk = legendre(k, s).0;
            for c in 0..mu.ncols() {
                let val: f64 = (0..=p).map(|j| l[j] * mu[(lp.edge_dof(i, j), c)]).sum();
                out[(k, c)] += 0.5 * sign * w * val * lk;
            }
        }
    }
    out
}

/// Minimises `‖τ‖_K` over `RT_q` on the element subtriangles `rts` (in the
/// element's fan order) subject to `τ·n = μ` on `∂K` and `div τ = r`.
///
/// `edge_keys[i]` is the sorted point-id pair of element edge `i` and
/// `forward[i]` whether its global orientation follows the element loop.
pub fn theta_min(
    lp: &LocalProjectors,
    rts: &[RtTriangle],
    edge_keys: &[[usize; 2]],
    forward: &[bool],
    mu: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<ThetaSolution> {
    let q = rts[0].degree;
    let ncols = mu.ncols();
    let asm = rt_assemble_elements(rts.to_vec())?;
    let n = asm.ndofs;

    let mut fixed = vec![None; n];
    let mut xb = DMatrix::zeros(n, ncols);
    for (i, key) in edge_keys.iter().enumerate() {
        let dofs = asm
            .edge_dofs
            .get(key)
            .ok_or_else(|| Error::InvalidMesh(format!("element edge {key:?} missing from its subtriangulation")))?;
        let vals = edge_flux_dofs(lp, i, forward[i], q, mu);
        for (k, &d) in dofs.iter().enumerate() {
            fixed[d] = Some(());
            xb.row_mut(d).copy_from(&vals.row(k));
        }
    }
    let free: Vec<usize> = (0..n).filter(|&d| fixed[d].is_none()).collect();
    let bnd: Vec<usize> = (0..n).filter(|&d| fixed[d].is_some()).collect();

    // (r, m_β)_T for every triangle monomial; r lives in the element basis
    let npq = dim_p(q as isize);
    let nb = r.nrows();
    let rule = triangle_rule(2 * q + 2)?;
    let mut w = DMatrix::zeros(npq * rts.len(), nb);
    for (t, rt) in rts.iter().enumerate() {
        let (pts, wts) = rule.map(&rt.vertices);
        for (x, wx) in pts.iter().zip(&wts) {
            let m = rt.poly_values(*x);
            let b = lp.basis.values(*x);
            for be in 0..npq {
                for g in 0..nb {
                    w[(t * npq + be, g)] += wx * m[be] * b[g];
                }
            }
        }
    }
    let g_all = &w * r;

    // drop the constant test function of the first triangle (gauge)
    let rows: Vec<usize> = (1..npq * rts.len()).collect();
    let sel = |m: &DMatrix<f64>, r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |i, j| m[(r[i], c[j])]);
    let m_ff = sel(&asm.mass, &free, &free);
    let m_fb = sel(&asm.mass, &free, &bnd);
    let b_f = sel(&asm.div_weak, &rows, &free);
    let b_b = sel(&asm.div_weak, &rows, &bnd);
    let x_b = DMatrix::from_fn(bnd.len(), ncols, |i, j| xb[(bnd[i], j)]);
    let g = DMatrix::from_fn(rows.len(), ncols, |i, j| g_all[(rows[i], j)]);
    let f = -(&m_fb * &x_b);
    let rhs_g = &g - &b_b * &x_b;
    let (x_f, lambda) = linalg::saddle_solve(&m_ff, &b_f, &f, &rhs_g, "minimum-norm field")?;

    let mut x = xb;
    for (i, &d) in free.iter().enumerate() {
        x.row_mut(d).copy_from(&x_f.row(i));
    }

    // residuals
    let scale = |m: &DMatrix<f64>| m.abs().max().max(f64::MIN_POSITIVE);
    // fields below unit size (e.g. θ = 0 when the data is round-off) are
    // measured against unit dofs
    let xs = scale(&x).max(1.0);
    let div_res = &asm.div_weak * &x - &g_all;
    let feasibility = div_res.abs().max() / scale(&g_all).max(scale(&asm.div_weak) * xs);
    let stat = &m_ff * &x_f + &m_fb * &x_b + b_f.transpose() * &lambda;
    let stationarity = stat.abs().max() / (scale(&asm.mass) * xs);
    let mx = &asm.mass * &x;
    let norms2 = (0..ncols).map(|c| x.column(c).dot(&mx.column(c))).collect();

    let triangles = asm
        .dofs
        .iter()
        .map(|local| DMatrix::from_fn(local.len(), ncols, |i, j| x[(local[i], j)]))
        .collect();
    Ok(ThetaSolution {
        triangles,
        feasibility,
        stationarity,
        norms2,
    })
}

//! Boundary/volume representation of the stabilisation and the
//! stabilisation potential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::vem::LocalProjectors;

/// `(μ, r)` with `(μ, v)_{∂K} - (r, v)_K = S((I - Π∇) φ, v)` for all `v`,
/// one column per local basis function `φ`.
#[derive(Debug, Clone)]
pub struct StabLifting {
    /// Values of `μ` at the boundary dofs' nodes (rows follow the local
    /// boundary dof order).
    pub mu: DMatrix<f64>,
    /// Coefficients of `r` in the first `dim P_{p-2}` basis functions.
    pub r: DMatrix<f64>,
    /// 2-norm condition number of the scaled lifting system.
    pub condition: f64,
    /// `max_φ |∫_{∂K} μ - ∫_K r|`, relative to the stabilisation scale.
    pub compatibility: f64,
}

/// Right-hand sides `S((I - Π∇) φ_j, φ_i)`, column `j`.
pub fn stab_rhs(lp: &LocalProjectors) -> DMatrix<f64> {
    let n = lp.ndofs();
    &lp.sdof * (DMatrix::identity(n, n) - &lp.projector)
}

/// Solves the square system with unknowns `h⁻¹ μ` nodal on `∂K` and
/// `h⁻² r` in the moment basis, tested against every local basis function.
pub fn stab_lifting(lp: &LocalProjectors) -> Result<StabLifting> {
    let nbd = lp.num_boundary_dofs();
    let nb = lp.num_moments();
    let n = lp.ndofs();
    let h = lp.diameter;
    // a[(i, j)]: test function φ_i against unknown basis q_j
    let mut a = DMatrix::zeros(n, n);
    for i in 0..nbd {
        for j in 0..nbd {
            a[(i, j)] = lp.boundary_mass[(i, j)] / h;
        }
    }
    // (b_β, φ_i)_K = |K| δ at the moment dofs, with a minus sign for r
    for b in 0..nb {
        a[(nbd + b, nbd + b)] = -lp.area / (h * h);
    }
    let rhs = stab_rhs(lp);
    let x = linalg::solve(&a, &rhs, "stabilisation lifting")?;
    let mu = x.rows(0, nbd) / h;
    let r = x.rows(nbd, nb) / (h * h);
    let condition = linalg::condition_number(&a);

    // ∫_{∂K} μ = Σ_i μ_i ∫ φ_i, ∫_K r = Σ r_β (b_β, 1)
    let ones = DMatrix::from_element(nbd, 1, 1.0);
    let wb = lp.boundary_mass.view((0, 0), (nbd, nbd)) * ones;
    let mut compatibility = 0.0f64;
    let scale = lp.sdof.abs().max().max(f64::MIN_POSITIVE);
    for j in 0..n {
        let bnd: f64 = (0..nbd).map(|i| wb[i] * mu[(i, j)]).sum();
        let vol: f64 = (0..nb).map(|b| lp.gram[(0, b)] * r[(b, j)]).sum();
        compatibility = compatibility.max((bnd - vol).abs() / scale);
    }
    Ok(StabLifting {
        mu,
        r,
        condition,
        compatibility,
    })
}

/// Zero-mean `𝒮 ∈ P_p(K)` with `(∇𝒮, ∇q)_K = S((I - Π∇) φ, q)` for all
/// `q ∈ P_p(K)`, coefficients per column.
pub fn stab_potential(lp: &LocalProjectors) -> Result<DMatrix<f64>> {
    let np = lp.npoly();
    let n = lp.ndofs();
    let rhs = lp.d.transpose() * stab_rhs(lp);
    let scale = rhs.abs().max().max(1.0);
    let compat = rhs.row(0).abs().max();
    if compat > 1e-9 * scale {
        return Err(Error::Incompatible {
            what: "stabilisation potential",
            residual: compat,
        });
    }
    let mut s = DMatrix::zeros(np, n);
    if np > 1 {
        let k = lp.g.view((1, 1), (np - 1, np - 1)).clone_owned();
        let x = linalg::solve(&k, &rhs.rows(1, np - 1).clone_owned(), "stabilisation potential")?;
        s.rows_mut(1, np - 1).copy_from(&x);
        for j in 0..n {
            let mean: f64 = (1..np).map(|b| lp.gram[(0, b)] * s[(b, j)]).sum();
            s[(0, j)] = -mean / lp.gram[(0, 0)];
        }
    }
    Ok(s)
}

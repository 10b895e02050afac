//! Dense and sparse linear solvers used by the local and global problems.
//!
//! Dense matrices are `nalgebra` types throughout the crate; factorizations of
//! anything larger than a handful of rows are delegated to `faer`.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Solves `a x = b` with partial pivoting. Fails when the result is not finite.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    assert_eq!(a.nrows(), a.ncols());
    if a.nrows() == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    let x = from_faer(&to_faer(a).partial_piv_lu().solve(&to_faer(b)));
    if x.iter().all(|v| v.is_finite()) && residual_ok(a, &x, b) {
        Ok(x)
    } else {
        Err(Error::Singular(what))
    }
}

fn residual_ok(a: &DMatrix<f64>, x: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    let r = a * x - b;
    let scale = a.norm() * x.norm() + b.norm();
    r.norm() <= 1e-6 * scale.max(f64::MIN_POSITIVE)
}

/// Cholesky solve for a symmetric positive definite matrix.
pub fn solve_spd(a: &DMatrix<f64>, b: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    if a.nrows() == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    let llt = to_faer(a).llt(Side::Lower).map_err(|_| Error::Singular(what))?;
    let x = from_faer(&llt.solve(&to_faer(b)));
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Singular(what))
    }
}

pub fn solve_vec(a: &DMatrix<f64>, b: &DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    let x = solve(a, &DMatrix::from_column_slice(b.len(), 1, b.as_slice()), what)?;
    Ok(DVector::from_column_slice(x.as_slice()))
}

/// Solves the saddle point system
///
/// ```text
/// [ M  Bᵀ ] [x]   [f]
/// [ B  0  ] [y] = [g]
/// ```
///
/// with `M` symmetric positive definite and `B` of full row rank, through the
/// Schur complement `B M⁻¹ Bᵀ`.
pub fn saddle_solve(
    m: &DMatrix<f64>,
    b: &DMatrix<f64>,
    f: &DMatrix<f64>,
    g: &DMatrix<f64>,
    what: &'static str,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let k = b.nrows();
    assert_eq!(b.ncols(), n);
    if n == 0 {
        return Ok((DMatrix::zeros(0, f.ncols()), DMatrix::zeros(k, f.ncols())));
    }
    let llt = to_faer(m).llt(Side::Lower).map_err(|_| Error::Singular(what))?;
    let minv_bt = from_faer(&llt.solve(&to_faer(&b.transpose())));
    let minv_f = from_faer(&llt.solve(&to_faer(f)));
    if k == 0 {
        return Ok((minv_f, DMatrix::zeros(0, f.ncols())));
    }
    let schur = b * &minv_bt;
    let rhs = b * &minv_f - g;
    let y = solve_spd(&schur, &rhs, what)?;
    let x = minv_f - minv_bt * &y;
    Ok((x, y))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Sparse symmetric matrix accumulated from triplets.
#[derive(Debug, Clone, Default)]
pub struct TripletMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    /// Sparse Cholesky solve of the square sub-system selected by `keep`
    /// (`keep[i]` is the reduced index of row `i`, if retained).
    pub fn solve_spd_reduced(&self, keep: &[Option<usize>], rhs: &[f64], what: &'static str) -> Result<Vec<f64>> {
        let m = rhs.len();
        if m == 0 {
            return Ok(Vec::new());
        }
        let trips: Vec<Triplet<usize, usize, f64>> = self
            .entries
            .iter()
            .filter_map(|&(i, j, v)| match (keep[i], keep[j]) {
                (Some(a), Some(b)) => Some(Triplet::new(a, b, v)),
                _ => None,
            })
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(m, m, &trips).map_err(|_| Error::Singular(what))?;
        let llt = a.sp_cholesky(Side::Lower).map_err(|_| Error::Singular(what))?;
        let b = Mat::<f64>::from_fn(m, 1, |i, _| rhs[i]);
        let x = llt.solve(&b);
        let out: Vec<f64> = (0..m).map(|i| x[(i, 0)]).collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Singular(what))
        }
    }
}

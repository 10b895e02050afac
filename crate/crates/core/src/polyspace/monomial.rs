//! Scaled monomials `((x - c) / h)^α` and polynomial bases built on them.

use nalgebra::DMatrix;

use crate::mesh::Point;

/// Number of monomials of total degree at most `q` in two variables.
pub fn dim_p(q: isize) -> usize {
    if q < 0 {
        0
    } else {
        let q = q as usize;
        (q + 1) * (q + 2) / 2
    }
}

/// Exponents of all monomials of degree ≤ `q`, graded lexicographic:
/// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`.
pub fn exponents(q: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(dim_p(q as isize));
    for d in 0..=q as u32 {
        for j in 0..=d {
            out.push((d - j, j));
        }
    }
    out
}

/// Index of `x^a y^b` in [`exponents`] order.
pub fn index_of(a: u32, b: u32) -> usize {
    let d = (a + b) as usize;
    d * (d + 1) / 2 + b as usize
}

/// Monomials scaled to a reference frame: center `c` and length `h`.
#[derive(Debug, Clone)]
pub struct ScaledMonomials {
    pub degree: usize,
    pub center: Point,
    pub scale: f64,
    pub exps: Vec<(u32, u32)>,
}

impl ScaledMonomials {
    pub fn new(degree: usize, center: Point, scale: f64) -> Self {
        Self {
            degree,
            center,
            scale,
            exps: exponents(degree),
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    fn powers(&self, x: Point) -> (Vec<f64>, Vec<f64>) {
        let s = [
            (x[0] - self.center[0]) / self.scale,
            (x[1] - self.center[1]) / self.scale,
        ];
        let n = self.degree + 1;
        let mut px = vec![1.0; n];
        let mut py = vec![1.0; n];
        for k in 1..n {
            px[k] = px[k - 1] * s[0];
            py[k] = py[k - 1] * s[1];
        }
        (px, py)
    }

    pub fn values(&self, x: Point) -> Vec<f64> {
        let (px, py) = self.powers(x);
        self.exps
            .iter()
            .map(|&(a, b)| px[a as usize] * py[b as usize])
            .collect()
    }

    /// Gradients with respect to physical coordinates.
    pub fn gradients(&self, x: Point) -> Vec<[f64; 2]> {
        let (px, py) = self.powers(x);
        let h = self.scale;
        self.exps
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a as usize, b as usize);
                let gx = if a > 0 { a as f64 * px[a - 1] * py[b] / h } else { 0.0 };
                let gy = if b > 0 { b as f64 * px[a] * py[b - 1] / h } else { 0.0 };
                [gx, gy]
            })
            .collect()
    }

    /// Matrix `L` (dim P_{q-2} × dim P_q) with `Δ m_α = Σ_β L[β, α] m_β`.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let q = self.degree as isize;
        let mut l = DMatrix::zeros(dim_p(q - 2), self.len());
        let h2 = self.scale * self.scale;
        for (col, &(a, b)) in self.exps.iter().enumerate() {
            if a >= 2 {
                l[(index_of(a - 2, b), col)] += (a * (a - 1)) as f64 / h2;
            }
            if b >= 2 {
                l[(index_of(a, b - 2), col)] += (b * (b - 1)) as f64 / h2;
            }
        }
        l
    }
}

/// A polynomial basis `b_i = Σ_j T[i, j] m_j` over scaled monomials, with `T`
/// lower triangular in graded order so that the first `dim P_k` functions span
/// `P_k` for every `k`.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub mono: ScaledMonomials,
    pub transform: DMatrix<f64>,
}

impl PolyBasis {
    pub fn monomial(mono: ScaledMonomials) -> Self {
        let n = mono.len();
        Self {
            mono,
            transform: DMatrix::identity(n, n),
        }
    }

    /// Gram–Schmidt orthonormalization (run twice) with respect to the scaled
    /// inner product `|D|⁻¹ (u, v)_D`, given the monomial Gram matrix
    /// `gram[α, β] = (m_α, m_β)_D` and the measure `|D|`.
    pub fn orthonormal(mono: ScaledMonomials, gram: &DMatrix<f64>, measure: f64) -> Self {
        let n = mono.len();
        let g = gram / measure;
        let mut t = DMatrix::<f64>::identity(n, n);
        for _pass in 0..2 {
            for i in 0..n {
                for j in 0..i {
                    let ri = t.row(i).clone_owned();
                    let rj = t.row(j).clone_owned();
                    let proj = (&ri * &g * rj.transpose())[(0, 0)];
                    let new = ri - rj * proj;
                    t.row_mut(i).copy_from(&new);
                }
                let ri = t.row(i).clone_owned();
                let nrm = (&ri * &g * ri.transpose())[(0, 0)].sqrt();
                t.row_mut(i).copy_from(&(ri / nrm));
            }
        }
        // the constant stays exactly 1 under the scaled inner product
        Self { mono, transform: t }
    }

    pub fn len(&self) -> usize {
        self.mono.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mono.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.mono.degree
    }

    pub fn values(&self, x: Point) -> Vec<f64> {
        let m = self.mono.values(x);
        (0..self.len())
            .map(|i| (0..=i).map(|j| self.transform[(i, j)] * m[j]).sum())
            .collect()
    }

    pub fn gradients(&self, x: Point) -> Vec<[f64; 2]> {
        let m = self.mono.gradients(x);
        (0..self.len())
            .map(|i| {
                let mut g = [0.0; 2];
                for j in 0..=i {
                    let t = self.transform[(i, j)];
                    g[0] += t * m[j][0];
                    g[1] += t * m[j][1];
                }
                g
            })
            .collect()
    }

    /// Coefficients (in this basis) of `Δ b_i`, expressed in the first
    /// `dim P_{q-2}` basis functions: column `i` holds `Δ b_i`.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let q = self.degree() as isize;
        let k = dim_p(q - 2);
        if k == 0 {
            return DMatrix::zeros(0, self.len());
        }
        // Δ b_i in monomials, then change of basis with the leading block of T
        let lap_mono = self.mono.laplacian_matrix() * self.transform.transpose();
        let lead = self.transform.view((0, 0), (k, k)).transpose();
        lead.lu()
            .solve(&lap_mono)
            .expect("basis transform is triangular and invertible")
    }
}

//! Gauss-type rules on intervals and triangles.

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Highest polynomial exactness supported by [`triangle_rule`].
pub const MAX_TRIANGLE_ORDER: usize = 40;

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        // endpoint derivative
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss–Legendre rule with `n` points on `[-1, 1]`, exact up to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Gauss–Lobatto rule with `n ≥ 2` points on `[-1, 1]` (endpoints included),
/// exact up to degree `2n - 3`.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let deg = n - 1;
    let mut x = vec![0.0; n];
    x[0] = -1.0;
    x[n - 1] = 1.0;
    // interior nodes are the roots of P'_{n-1}
    for (i, xi) in x.iter_mut().enumerate().take(n - 1).skip(1) {
        let mut z = -(std::f64::consts::PI * i as f64 / deg as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(deg, z);
            // second derivative from the Legendre ODE
            let d2p = (2.0 * z * dp - (deg * (deg + 1)) as f64 * p) / (1.0 - z * z);
            let dz = dp / d2p;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        *xi = z;
    }
    let w = x
        .iter()
        .map(|&z| {
            let (p, _) = legendre(deg, z);
            2.0 / ((deg * (deg + 1)) as f64 * p * p)
        })
        .collect();
    (x, w)
}

/// Quadrature rule on the reference triangle `{(0,0), (1,0), (0,1)}`.
#[derive(Debug, Clone)]
pub struct TriangleQuadrature {
    pub order: usize,
    /// Reference coordinates.
    pub points: Vec<[f64; 2]>,
    /// Weights summing to the reference area `1/2`.
    pub weights: Vec<f64>,
}

impl TriangleQuadrature {
    /// Physical points and weights on the triangle `tri`.
    pub fn map(&self, tri: &[Point; 3]) -> (Vec<Point>, Vec<f64>) {
        let [a, b, c] = *tri;
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - a[0], c[1] - a[1]];
        let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        let pts = self
            .points
            .iter()
            .map(|&[s, t]| [a[0] + s * e1[0] + t * e2[0], a[1] + s * e1[1] + t * e2[1]])
            .collect();
        let wts = self.weights.iter().map(|w| w * det).collect();
        (pts, wts)
    }
}

/// Collapsed-coordinate (Duffy) product rule exact for polynomials of total
/// degree `order` on triangles.
pub fn triangle_rule(order: usize) -> Result<TriangleQuadrature> {
    if order == 0 || order > MAX_TRIANGLE_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    // the collapse adds one degree in the first direction
    let n = (order + 2).div_ceil(2);
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            points.push([u, v * (1.0 - u)]);
            weights.push(0.25 * w[i] * w[j] * (1.0 - u));
        }
    }
    Ok(TriangleQuadrature { order, points, weights })
}

/// Gauss–Legendre points and weights on the segment `a → b`.
pub fn segment_rule(a: Point, b: Point, n: usize) -> (Vec<Point>, Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let pts = x
        .iter()
        .map(|&t| {
            let s = 0.5 * (t + 1.0);
            [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
        })
        .collect();
    let wts = w.iter().map(|wi| 0.5 * wi * len).collect();
    (pts, wts, x)
}

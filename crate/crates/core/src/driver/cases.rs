//! Benchmark problems with known solutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{build_cartesian_mesh, build_lshape_mesh, Point, PolygonalMesh, Rect};

type Scalar = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type Vector = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseName {
    /// `sin(πx) sin(πy)` on the unit square.
    U1,
    /// `r^{2/3} sin(2θ/3)` on the L-shaped domain.
    U2,
    /// A global polynomial of the solver degree.
    PatchTest,
    /// `x² y` on the unit square.
    Manufactured,
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u1" => Ok(Self::U1),
            "u2" => Ok(Self::U2),
            "patch_test" | "patch-test" => Ok(Self::PatchTest),
            "manufactured" => Ok(Self::Manufactured),
            _ => Err(Error::Config(format!("unknown test case {s:?}"))),
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::U1 => "u1",
            Self::U2 => "u2",
            Self::PatchTest => "patch_test",
            Self::Manufactured => "manufactured",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    UnitSquare,
    LShape,
}

#[derive(Clone)]
pub struct TestCase {
    pub name: CaseName,
    pub u: Scalar,
    pub gradient: Vector,
    pub f: Scalar,
    domain: Domain,
}

impl fmt::Debug for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestCase")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Polar angle at the re-entrant corner, in `[0, 2π)`.
fn angle(x: Point) -> f64 {
    let t = x[1].atan2(x[0]);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

impl TestCase {
    /// `degree` only matters for the patch test, whose solution is a
    /// polynomial of that degree.
    pub fn new(name: CaseName, degree: usize) -> Self {
        match name {
            CaseName::U1 => Self {
                name,
                u: Arc::new(|x| (PI * x[0]).sin() * (PI * x[1]).sin()),
                gradient: Arc::new(|x| {
                    [
                        PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                        PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                    ]
                }),
                f: Arc::new(|x| 2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin()),
                domain: Domain::UnitSquare,
            },
            CaseName::U2 => Self {
                name,
                u: Arc::new(|x| {
                    let r = x[0].hypot(x[1]);
                    r.powf(2.0 / 3.0) * (2.0 * angle(x) / 3.0).sin()
                }),
                gradient: Arc::new(|x| {
                    let r = x[0].hypot(x[1]);
                    if r == 0.0 {
                        return [0.0, 0.0];
                    }
                    let (s, c) = (angle(x) / 3.0).sin_cos();
                    let a = 2.0 / 3.0 * r.powf(-1.0 / 3.0);
                    [-a * s, a * c]
                }),
                f: Arc::new(|_| 0.0),
                domain: Domain::LShape,
            },
            CaseName::PatchTest => {
                // (a + b x + c y)^p with -Δ = -p(p-1)(b²+c²)(…)^{p-2}
                let (a, b, c) = (0.5, 1.0, -0.5);
                let p = degree as i32;
                Self {
                    name,
                    u: Arc::new(move |x| (a + b * x[0] + c * x[1]).powi(p)),
                    gradient: Arc::new(move |x| {
                        let d = p as f64 * (a + b * x[0] + c * x[1]).powi(p - 1);
                        [b * d, c * d]
                    }),
                    f: Arc::new(move |x| {
                        if p < 2 {
                            0.0
                        } else {
                            -(p * (p - 1)) as f64 * (b * b + c * c) * (a + b * x[0] + c * x[1]).powi(p - 2)
                        }
                    }),
                    domain: Domain::UnitSquare,
                }
            }
            CaseName::Manufactured => Self {
                name,
                u: Arc::new(|x| x[0] * x[0] * x[1]),
                gradient: Arc::new(|x| [2.0 * x[0] * x[1], x[0] * x[0]]),
                f: Arc::new(|x| -2.0 * x[1]),
                domain: Domain::UnitSquare,
            },
        }
    }

    /// Coarsest mesh of the benchmark: 2×2 squares on the unit square, 12
    /// squares on the L-shape.
    pub fn initial_mesh(&self) -> Result<PolygonalMesh> {
        match self.domain {
            Domain::UnitSquare => build_cartesian_mesh(2, 2, Rect::UNIT),
            Domain::LShape => build_lshape_mesh(2),
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        let inside = |v: f64| v > -1.0 && v < 1.0;
        match self.domain {
            Domain::UnitSquare => x.iter().all(|&v| v > 0.0 && v < 1.0),
            Domain::LShape => inside(x[0]) && inside(x[1]) && !(x[0] >= 0.0 && x[1] <= 0.0),
        }
    }

    /// Largest relative defect of `-Δu = f` by fourth-order central
    /// differences at `samples` random interior points kept `margin` away
    /// from the boundary and the re-entrant corner.
    pub fn check_pde(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let (h, margin) = (1e-2, 0.1);
        let u = &self.u;
        let second = |x: Point, d: usize| {
            let at = |s: f64| {
                let mut y = x;
                y[d] += s * h;
                u(y)
            };
            (-at(2.0) + 16.0 * at(1.0) - 30.0 * at(0.0) + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h)
        };
        let mut worst = 0.0f64;
        let mut taken = 0;
        while taken < samples {
            let x = match self.domain {
                Domain::UnitSquare => [rng.gen_range(margin..1.0 - margin), rng.gen_range(margin..1.0 - margin)],
                Domain::LShape => [
                    rng.gen_range(-1.0 + margin..1.0 - margin),
                    rng.gen_range(-1.0 + margin..1.0 - margin),
                ],
            };
            let away = [[margin, margin], [-margin, -margin]]
                .iter()
                .all(|o| self.contains([x[0] + o[0], x[1] + o[1]]) && self.contains([x[0] + o[0], x[1] - o[1]]));
            if !away || x[0].hypot(x[1]) < margin {
                continue;
            }
            let (uxx, uyy) = (second(x, 0), second(x, 1));
            let scale = (uxx.abs() + uyy.abs()).max(1.0);
            worst = worst.max((-(uxx + uyy) - (self.f)(x)).abs() / scale);
            taken += 1;
        }
        worst
    }
}

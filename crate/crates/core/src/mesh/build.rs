//! Structured initial meshes.

use std::collections::HashMap;

use super::{Point, PolygonalMesh};
use crate::error::{Error, Result};

/// Axis-aligned rectangle `(x0, x1) × (y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        y0: 0.0,
        x1: 1.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }
}

/// Domains supported by the structured generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Rect(Rect),
    /// `(-1, 1)² \ [0, 1) × (-1, 0]`.
    LShape,
}

/// Square cells (counter-clockwise corner loops) with deduplicated vertices.
fn grid_cells(domain: Domain, nx: usize, ny: usize) -> Result<(Vec<Point>, Vec<[usize; 4]>)> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidMesh("cell counts must be positive".into()));
    }
    let (rect, skip): (Rect, Box<dyn Fn(f64, f64) -> bool>) = match domain {
        Domain::Rect(r) => {
            if !(r.x1 > r.x0 && r.y1 > r.y0) {
                return Err(Error::InvalidMesh(format!("degenerate domain {r:?}")));
            }
            (r, Box::new(|_, _| false))
        }
        // the removed quadrant: cells with center x > 0 and y < 0
        Domain::LShape => (
            Rect::new(-1.0, -1.0, 1.0, 1.0),
            Box::new(|cx: f64, cy: f64| cx > 0.0 && cy < 0.0),
        ),
    };
    let hx = (rect.x1 - rect.x0) / nx as f64;
    let hy = (rect.y1 - rect.y0) / ny as f64;
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut cells = Vec::new();
    let mut vid = |i: usize, j: usize, vertices: &mut Vec<Point>| {
        *ids.entry((i, j)).or_insert_with(|| {
            vertices.push([rect.x0 + i as f64 * hx, rect.y0 + j as f64 * hy]);
            vertices.len() - 1
        })
    };
    for j in 0..ny {
        for i in 0..nx {
            let cx = rect.x0 + (i as f64 + 0.5) * hx;
            let cy = rect.y0 + (j as f64 + 0.5) * hy;
            if skip(cx, cy) {
                continue;
            }
            let a = vid(i, j, &mut vertices);
            let b = vid(i + 1, j, &mut vertices);
            let c = vid(i + 1, j + 1, &mut vertices);
            let d = vid(i, j + 1, &mut vertices);
            cells.push([a, b, c, d]);
        }
    }
    Ok((vertices, cells))
}

/// `nx × ny` axis-aligned quadrilaterals on `domain`.
pub fn build_cartesian_mesh(nx: usize, ny: usize, domain: Rect) -> Result<PolygonalMesh> {
    let (vertices, cells) = grid_cells(Domain::Rect(domain), nx, ny)?;
    PolygonalMesh::new(vertices, cells.iter().map(|c| c.to_vec()).collect())
}

/// Uniform mesh of the L-shaped domain with `3 n²` squares of side `1/n`.
pub fn build_lshape_mesh(n: usize) -> Result<PolygonalMesh> {
    let (vertices, cells) = grid_cells(Domain::LShape, 2 * n, 2 * n)?;
    PolygonalMesh::new(vertices, cells.iter().map(|c| c.to_vec()).collect())
}

/// Each square cell of the `n`-cell structured grid split along its
/// lower-left to upper-right diagonal. For the L-shape, `n` is the same
/// refinement parameter as in [`build_lshape_mesh`].
pub fn build_triangular_mesh(n: usize, domain: Domain) -> Result<PolygonalMesh> {
    let (vertices, cells) = match domain {
        Domain::Rect(_) => grid_cells(domain, n, n)?,
        Domain::LShape => grid_cells(domain, 2 * n, 2 * n)?,
    };
    let elements = cells
        .iter()
        .flat_map(|&[a, b, c, d]| [vec![a, b, c], vec![a, c, d]])
        .collect();
    PolygonalMesh::new(vertices, elements)
}

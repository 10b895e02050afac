//! Refinement of marked quadrilaterals and triangles into four siblings.
//!
//! Corners are the vertices where the boundary turns; vertices on straight
//! sides are hanging vertices left by earlier refinements of neighbors. New
//! side midpoints are inserted into every element containing the split edge,
//! so unrefined neighbors become polygons with extra (hanging) vertices.

use std::collections::{HashMap, HashSet};

use super::{geometry, Point, PolygonalMesh};
use crate::error::{Error, Result};

const COLLINEAR_TOL: f64 = 1e-10;

/// Local indices of the vertices where the polygon boundary turns.
pub fn corners(poly: &[Point]) -> Vec<usize> {
    let n = poly.len();
    (0..n)
        .filter(|&i| {
            let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
            let d1 = [b[0] - a[0], b[1] - a[1]];
            let d2 = [c[0] - b[0], c[1] - b[1]];
            let cross = d1[0] * d2[1] - d1[1] * d2[0];
            cross.abs() > COLLINEAR_TOL * d1[0].hypot(d1[1]) * d2[0].hypot(d2[1])
        })
        .collect()
}

/// Refines the marked elements; see [`refine_with_parents`].
pub fn refine(mesh: &PolygonalMesh, marked: &[usize]) -> Result<PolygonalMesh> {
    refine_with_parents(mesh, marked).map(|(m, _)| m)
}

/// Refines the marked elements and returns the new mesh with the parent
/// element of every new element. Children replace their parent in place.
pub fn refine_with_parents(mesh: &PolygonalMesh, marked: &[usize]) -> Result<(PolygonalMesh, Vec<usize>)> {
    let marked: HashSet<usize> = marked.iter().copied().collect();
    if let Some(&k) = marked.iter().find(|&&k| k >= mesh.num_elements()) {
        return Err(Error::Refinement {
            element: k,
            reason: "no such element".into(),
        });
    }
    let mut vertices = mesh.vertices().to_vec();
    // new points on old edges: (parameter from the low vertex, vertex id)
    let mut splits: HashMap<usize, Vec<(f64, usize)>> = HashMap::new();
    // per marked element: corner and side-midpoint vertex ids
    let mut plans: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();

    let mut order: Vec<usize> = marked.iter().copied().collect();
    order.sort_unstable();
    for &k in &order {
        let el = mesh.element(k);
        let poly = mesh.element_coords(k);
        let cs = corners(&poly);
        if cs.len() != 3 && cs.len() != 4 {
            return Err(Error::Refinement {
                element: k,
                reason: format!("{} corners, expected a triangle or quadrilateral", cs.len()),
            });
        }
        let n = el.len();
        let mut mids = Vec::with_capacity(cs.len());
        for s in 0..cs.len() {
            let (i0, i1) = (cs[s], cs[(s + 1) % cs.len()]);
            let (a, b) = (poly[i0], poly[i1]);
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let tol = 1e-10 * geometry::dist(a, b);
            let mut found = None;
            let mut i = i0;
            while i != i1 {
                let j = (i + 1) % n;
                if j != i1 && geometry::dist(poly[j], m) <= tol {
                    found = Some(el[j]);
                    break;
                }
                let e = mesh.element_edges(k)[i];
                let [lo, hi] = mesh.edge(e);
                let (pl, ph) = (vertices[lo], vertices[hi]);
                let len2 = (ph[0] - pl[0]).powi(2) + (ph[1] - pl[1]).powi(2);
                let t = ((m[0] - pl[0]) * (ph[0] - pl[0]) + (m[1] - pl[1]) * (ph[1] - pl[1])) / len2;
                if t > 1e-10 && t < 1.0 - 1e-10 && geometry::point_segment_distance(m, pl, ph) <= tol {
                    let list = splits.entry(e).or_default();
                    let id = match list.iter().find(|&&(_, v)| geometry::dist(vertices[v], m) <= tol) {
                        Some(&(_, v)) => v,
                        None => {
                            vertices.push(m);
                            list.push((t, vertices.len() - 1));
                            vertices.len() - 1
                        }
                    };
                    found = Some(id);
                    break;
                }
                i = j;
            }
            let id = found.ok_or_else(|| Error::Refinement {
                element: k,
                reason: "side midpoint not located".into(),
            })?;
            mids.push(id);
        }
        plans.insert(k, (cs.iter().map(|&i| el[i]).collect(), mids));
    }
    for list in splits.values_mut() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let augmented = |k: usize| -> Vec<usize> {
        let el = mesh.element(k);
        let mut out = Vec::with_capacity(el.len() + 4);
        for (i, &v) in el.iter().enumerate() {
            out.push(v);
            let e = mesh.element_edges(k)[i];
            if let Some(list) = splits.get(&e) {
                if mesh.edge(e)[0] == v {
                    out.extend(list.iter().map(|&(_, id)| id));
                } else {
                    out.extend(list.iter().rev().map(|&(_, id)| id));
                }
            }
        }
        out
    };

    let mut elements = Vec::new();
    let mut parents = Vec::new();
    for k in 0..mesh.num_elements() {
        let loop_ = augmented(k);
        let Some((cs, mids)) = plans.get(&k) else {
            elements.push(loop_);
            parents.push(k);
            continue;
        };
        let pos = |v: usize| loop_.iter().position(|&w| w == v).unwrap();
        let walk = |from: usize, to: usize| -> Vec<usize> {
            let (mut i, j) = (pos(from), pos(to));
            let mut out = vec![loop_[i]];
            while i != j {
                i = (i + 1) % loop_.len();
                out.push(loop_[i]);
            }
            out
        };
        let m = cs.len();
        if m == 4 {
            let c: Point = cs.iter().fold([0.0, 0.0], |acc, &v| {
                [acc[0] + 0.25 * vertices[v][0], acc[1] + 0.25 * vertices[v][1]]
            });
            vertices.push(c);
            let center = vertices.len() - 1;
            for s in 0..4 {
                let mut child = walk(mids[(s + 3) % 4], mids[s]);
                child.push(center);
                elements.push(child);
                parents.push(k);
            }
        } else {
            for s in 0..3 {
                elements.push(walk(mids[(s + 2) % 3], mids[s]));
                parents.push(k);
            }
            elements.push(mids.clone());
            parents.push(k);
        }
    }
    let mesh = PolygonalMesh::new(vertices, elements)?;
    Ok((mesh, parents))
}

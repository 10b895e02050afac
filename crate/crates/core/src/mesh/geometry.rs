//! Planar polygon geometry helpers.

use super::Point;

pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

/// Area centroid of a polygon with nonzero area.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let area = signed_area(poly);
    let mut c = [0.0; 2];
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let cross = a[0] * b[1] - b[0] * a[1];
        c[0] += (a[0] + b[0]) * cross;
        c[1] += (a[1] + b[1]) * cross;
    }
    [c[0] / (6.0 * area), c[1] / (6.0 * area)]
}

pub fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max(dist(poly[i], poly[j]));
        }
    }
    d
}

pub fn point_segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let t = [b[0] - a[0], b[1] - a[1]];
    let len2 = t[0] * t[0] + t[1] * t[1];
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((x[0] - a[0]) * t[0] + (x[1] - a[1]) * t[1]) / len2).clamp(0.0, 1.0)
    };
    dist(x, [a[0] + s * t[0], a[1] + s * t[1]])
}

/// Kernel of a counter-clockwise polygon: intersection of the left half-planes
/// of all its edges (Sutherland–Hodgman clipping).
pub fn kernel(poly: &[Point]) -> Vec<Point> {
    let n = poly.len();
    let mut region: Vec<Point> = poly.to_vec();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let side = |p: Point| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let scale = dist(a, b).powi(2);
        let inside = |p: Point| side(p) >= -1e-14 * scale;
        let mut out = Vec::with_capacity(region.len() + 1);
        let m = region.len();
        for k in 0..m {
            let (p, q) = (region[k], region[(k + 1) % m]);
            let (ip, iq) = (inside(p), inside(q));
            if ip {
                out.push(p);
            }
            if ip != iq {
                let (sp, sq) = (side(p), side(q));
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        region = out;
        if region.len() < 3 {
            return Vec::new();
        }
    }
    region
}

/// Whether two closed segments intersect (including touching).
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let orient = |a: Point, b: Point, c: Point| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let on_seg = |a: Point, b: Point, c: Point| {
        c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_seg(q1, q2, p1))
        || (d2 == 0.0 && on_seg(q1, q2, p2))
        || (d3 == 0.0 && on_seg(p1, p2, q1))
        || (d4 == 0.0 && on_seg(p1, p2, q2))
}

/// Simple-polygon test: non-adjacent edges do not meet.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

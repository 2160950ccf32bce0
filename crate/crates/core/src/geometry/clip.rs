//! Exact intersections of simplices for `d ∈ {1, 2}`, used to build shifted
//! domains `D_{r,h}` without meshing them.

use super::Simplex;

const AREA_EPS: f64 = 1e-15;

/// Covers `a ∩ (b + shift)` by simplices given as vertex lists.
///
/// Returns `None` when `d > 2`; callers fall back to node filtering there.
pub fn intersect_shifted(a: &Simplex, b: &Simplex, shift: &[f64]) -> Option<Vec<Vec<Vec<f64>>>> {
    match a.dim() {
        1 => Some(intersect_intervals(a, b, shift[0])),
        2 => Some(intersect_triangles(a, b, shift)),
        _ => None,
    }
}

fn intersect_intervals(a: &Simplex, b: &Simplex, shift: f64) -> Vec<Vec<Vec<f64>>> {
    let (a0, a1) = ordered(a.vertices()[0][0], a.vertices()[1][0]);
    let (b0, b1) = ordered(b.vertices()[0][0] + shift, b.vertices()[1][0] + shift);
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if hi - lo > AREA_EPS * (a1 - a0) {
        vec![vec![vec![lo], vec![hi]]]
    } else {
        Vec::new()
    }
}

fn ordered(x: f64, y: f64) -> (f64, f64) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

fn intersect_triangles(a: &Simplex, b: &Simplex, shift: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let mut poly: Vec<[f64; 2]> = a.vertices().iter().map(|v| [v[0], v[1]]).collect();
    let mut clip: Vec<[f64; 2]> = b
        .vertices()
        .iter()
        .map(|v| [v[0] + shift[0], v[1] + shift[1]])
        .collect();
    if signed_area(&clip) < 0.0 {
        clip.reverse();
    }
    let scale = a.volume();
    for i in 0..3 {
        let p = clip[i];
        let q = clip[(i + 1) % 3];
        poly = clip_half_plane(&poly, p, q);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    // fan triangulation of the convex result
    let mut out = Vec::new();
    for i in 1..poly.len() - 1 {
        let tri = [poly[0], poly[i], poly[i + 1]];
        if signed_area(&tri).abs() > AREA_EPS * scale {
            out.push(tri.iter().map(|v| v.to_vec()).collect());
        }
    }
    out
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

/// Keeps the part of `poly` left of the directed line `p → q`.
fn clip_half_plane(poly: &[[f64; 2]], p: [f64; 2], q: [f64; 2]) -> Vec<[f64; 2]> {
    let side = |v: [f64; 2]| (q[0] - p[0]) * (v[1] - p[1]) - (q[1] - p[1]) * (v[0] - p[0]);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let sc = side(cur);
        let sn = side(next);
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc >= 0.0) != (sn >= 0.0) {
            let t = sc / (sc - sn);
            out.push([cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area(pieces: &[Vec<Vec<f64>>]) -> f64 {
        pieces
            .iter()
            .map(|t| {
                let a: Vec<[f64; 2]> = t.iter().map(|v| [v[0], v[1]]).collect();
                signed_area(&a).abs()
            })
            .sum()
    }

    #[test]
    fn shifted_unit_triangle() {
        // T ∩ (T - (0.3, 0)) = {x, y ≥ 0, x + y ≤ 0.7}
        let t = Simplex::reference(2);
        let pieces = intersect_shifted(&t, &t, &[-0.3, 0.0]).unwrap();
        assert!((area(&pieces) - 0.5 * 0.49).abs() < 1e-14);
    }

    #[test]
    fn disjoint_is_empty() {
        let t = Simplex::reference(2);
        assert!(intersect_shifted(&t, &t, &[2.0, 0.0]).unwrap().is_empty());
    }

    #[test]
    fn intervals() {
        let s = Simplex::new(vec![vec![0.0], vec![1.0]], 1).unwrap();
        let p = intersect_shifted(&s, &s, &[-0.25]).unwrap();
        assert_eq!(p, vec![vec![vec![0.0], vec![0.75]]]);
    }
}

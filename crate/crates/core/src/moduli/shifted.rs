//! Quadrature on the shifted domains `I_{r,h} × D` and `I × D_{r,h}`.

use crate::geometry::{intersect_shifted, Cylinder, Simplex};
use crate::quadrature::{gauss_legendre_unit, QuadratureRule, TensorRule};
use crate::Result;

/// Relative volume below which a clipped piece is dropped.
const SLIVER: f64 = 1e-14;

/// Nodes of a shifted domain plus its corner points (for node maxima).
pub struct ShiftedRule {
    pub rule: QuadratureRule,
    pub corners: Vec<(f64, Vec<f64>)>,
}

/// `I_{r,h} = [a + r·max(0, −h), b − r·max(0, h)]`, or `None` if empty.
pub fn shifted_interval(a: f64, b: f64, r: usize, h: f64) -> Option<(f64, f64)> {
    let lo = a + r as f64 * (-h).max(0.0);
    let hi = b - r as f64 * h.max(0.0);
    (hi - lo > SLIVER * (b - a)).then_some((lo, hi))
}

fn push_piece(
    out: &mut ShiftedRule,
    tensor: &TensorRule,
    t0: f64,
    t1: f64,
    vertices: &[Vec<f64>],
    levels: u32,
    corners: bool,
) -> Result<()> {
    let d = vertices.len() - 1;
    if levels == 0 {
        tensor.append(&mut out.rule, t0, t1, vertices);
        if corners {
            for t in [t0, t1] {
                out.corners.extend(vertices.iter().map(|v| (t, v.clone())));
            }
        }
        return Ok(());
    }
    let s = match Simplex::new(vertices.to_vec(), d) {
        Ok(s) => s,
        Err(_) => return Ok(()),
    };
    let n = 1usize << levels;
    let dt = (t1 - t0) / n as f64;
    let pieces = s.bisect_times(levels * d as u32)?;
    for k in 0..n {
        let (a, b) = (t0 + k as f64 * dt, t0 + (k + 1) as f64 * dt);
        for p in &pieces {
            push_piece(out, tensor, a, b, p.vertices(), 0, corners)?;
        }
    }
    Ok(())
}

/// Rule on `I_{r,h} × D`; empty when the shifted interval is.
pub fn temporal(
    domain: &Cylinder,
    r: usize,
    h: f64,
    tensor: &TensorRule,
    levels: u32,
    corners: bool,
) -> Result<ShiftedRule> {
    let mut out = ShiftedRule {
        rule: tensor.empty(),
        corners: Vec::new(),
    };
    let (a, b) = (domain.time.start(), domain.time.end());
    if let Some((lo, hi)) = shifted_interval(a, b, r, h) {
        for s in domain.space.simplices() {
            push_piece(&mut out, tensor, lo, hi, s.vertices(), levels, corners)?;
        }
    } else if corners && (r as f64 * h.abs() - (b - a)).abs() <= SLIVER * (b - a) {
        // r|h| = |I|: the chain still links the two ends of I, which is the
        // limit of the node maxima as |h| ↑ |I|/r
        let t = if h >= 0.0 { a } else { b };
        for s in domain.space.simplices() {
            out.corners.extend(s.vertices().iter().map(|v| (t, v.clone())));
        }
    }
    Ok(out)
}

/// Rule on `I × D_{r,h}`.
///
/// Convex domains with `d ≤ 2` are clipped exactly: `D_{r,h} = D ∩ (D − r h)`
/// as a union of simplex intersections. Otherwise the nodes of `I × D` are
/// filtered by the membership of the whole chain `x + i h`, and the kept
/// weights serve as the measure of the shifted domain.
pub fn spatial(
    domain: &Cylinder,
    r: usize,
    h: &[f64],
    tensor: &TensorRule,
    levels: u32,
    corners: bool,
) -> Result<ShiftedRule> {
    let mut out = ShiftedRule {
        rule: tensor.empty(),
        corners: Vec::new(),
    };
    let (t0, t1) = (domain.time.start(), domain.time.end());
    let space = &domain.space;
    let shift: Vec<f64> = h.iter().map(|c| -(r as f64) * c).collect();
    let d = space.dim();
    if space.is_convex() && d <= 2 {
        let min_vol = SLIVER * space.volume();
        for a in space.simplices() {
            for b in space.simplices() {
                if let Some(pieces) = intersect_shifted(a, b, &shift) {
                    for v in pieces {
                        if crate::quadrature::simplex_volume(&v) > min_vol {
                            push_piece(&mut out, tensor, t0, t1, &v, levels, corners)?;
                        }
                    }
                }
            }
        }
        return Ok(out);
    }

    let mut full = ShiftedRule {
        rule: tensor.empty(),
        corners: Vec::new(),
    };
    for s in space.simplices() {
        push_piece(&mut full, tensor, t0, t1, s.vertices(), levels, corners)?;
    }
    let keep = |x: &[f64]| {
        let mut y = x.to_vec();
        (1..=r).all(|i| {
            for j in 0..d {
                y[j] = x[j] + i as f64 * h[j];
            }
            space.contains(&y)
        })
    };
    let rule = &full.rule;
    for i in 0..rule.len() {
        let (t, x) = rule.point(i);
        if keep(x) {
            out.rule.t.push(t);
            out.rule.x.extend_from_slice(x);
            out.rule.w.push(rule.w[i]);
        }
    }
    out.corners = full.corners.into_iter().filter(|(_, x)| keep(x)).collect();
    Ok(out)
}

/// Lattice rule on `I_{r,h} × D`: midpoints of the cells `[a + i g, a + (i+1) g]`
/// inside `I_{r,h}`, times the spatial nodes of `space_rule` (a one-point
/// temporal rule on `[0, 1]`).
pub fn temporal_lattice(domain: &Cylinder, r: usize, h: f64, g: f64, space_rule: &TensorRule) -> QuadratureRule {
    let d = domain.dim();
    let mut out = QuadratureRule::empty(d, (0, space_rule.spatial_degree));
    let (a, b) = (domain.time.start(), domain.time.end());
    let lo = a + r as f64 * (-h).max(0.0);
    let hi = b - r as f64 * h.max(0.0);
    let mut base = space_rule.empty();
    for s in domain.space.simplices() {
        space_rule.append(&mut base, 0.0, 1.0, s.vertices());
    }
    let tol = 1e-9 * g;
    let cells = ((b - a) / g + tol).floor() as usize;
    for i in 0..cells {
        let (c0, c1) = (a + i as f64 * g, a + (i + 1) as f64 * g);
        if c0 < lo - tol || c1 > hi + tol {
            continue;
        }
        let t = a + (i as f64 + 0.5) * g;
        for k in 0..base.len() {
            out.t.push(t);
            out.x.extend_from_slice(base.point(k).1);
            out.w.push(g * base.w[k]);
        }
    }
    out
}

/// Orthonormal frame whose first vector is `theta`.
fn frame(theta: &[f64]) -> Vec<Vec<f64>> {
    let d = theta.len();
    let mut out = vec![theta.to_vec()];
    while out.len() < d {
        let axis = (0..d)
            .min_by(|&i, &j| {
                let key = |k: usize| out.iter().map(|e| e[k].abs()).fold(0.0, f64::max);
                key(i).total_cmp(&key(j))
            })
            .unwrap_or(0);
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        for e in &out {
            let dot: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= dot * ei;
            }
        }
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|c| c / n).collect());
    }
    out
}

/// Lattice rule on `I × D_{r,h}`: cell midpoints of a lattice of spacing `g`
/// whose first axis is `h/|h|`, anchored at the first vertex of `D`, kept when
/// the whole chain `y + i h` lies in `D`; times Gauss points in time.
pub fn spatial_lattice(domain: &Cylinder, r: usize, h: &[f64], g: f64, temporal_points: usize) -> QuadratureRule {
    let d = domain.dim();
    let mut out = QuadratureRule::empty(d, (temporal_points, 0));
    let space = &domain.space;
    let norm = h.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return out;
    }
    let theta: Vec<f64> = h.iter().map(|c| c / norm).collect();
    let axes = frame(&theta);
    let origin = space.simplices()[0].vertices()[0].clone();
    let reach = space
        .simplices()
        .iter()
        .flat_map(|s| s.vertices())
        .map(|v| v.iter().zip(&origin).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let n = (reach / g).ceil() as i64 + 1;
    let (tn, tw) = gauss_legendre_unit(temporal_points);
    let (t0, len) = (domain.time.start(), domain.time.length());
    let cell = g.powi(d as i32);
    let mut idx = vec![-n; d];
    let mut y = vec![0.0; d];
    let mut z = vec![0.0; d];
    loop {
        y.copy_from_slice(&origin);
        for (k, e) in axes.iter().enumerate() {
            let c = (idx[k] as f64 + 0.5) * g;
            for j in 0..d {
                y[j] += c * e[j];
            }
        }
        let inside = (0..=r).all(|i| {
            for j in 0..d {
                z[j] = y[j] + i as f64 * h[j];
            }
            space.contains(&z)
        });
        if inside {
            for (t, w) in tn.iter().zip(&tw) {
                out.t.push(t0 + len * t);
                out.x.extend_from_slice(&y);
                out.w.push(len * w * cell);
            }
        }
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = -n;
            k += 1;
        }
    }
}

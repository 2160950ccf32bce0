use nalgebra::DMatrix;

use crate::{Error, Result};

/// Relative volume below which a simplex counts as degenerate.
const DEGENERATE_REL: f64 = 1e-13;

/// A `d`-simplex with a Maubach refinement tag and bisection level.
///
/// Vertex order matters: bisection always splits the edge `x_0 x_k` where
/// `k` is the tag. Tags run over `1..=d`; tag `0` is read as `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
    tag: usize,
    level: u32,
    volume: f64,
    /// Row-major inverse of the edge matrix `[x_1 - x_0, ..., x_d - x_0]`.
    inv_edges: Vec<f64>,
}

impl Simplex {
    /// Builds a simplex from `d + 1` points in `ℝ^d`.
    pub fn new(vertices: Vec<Vec<f64>>, tag: usize) -> Result<Self> {
        Self::with_level(vertices, tag, 0)
    }

    pub fn with_level(vertices: Vec<Vec<f64>>, tag: usize, level: u32) -> Result<Self> {
        let n = vertices.len();
        if n < 2 {
            return Err(Error::param("vertices", "a simplex needs at least 2 vertices"));
        }
        let d = n - 1;
        for v in &vertices {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        let edges = edge_matrix(&vertices);
        let det = edges.determinant();
        let volume = det.abs() / factorial(d);
        let diam = diameter_of(&vertices);
        if !volume.is_finite() || volume <= DEGENERATE_REL * diam.powi(d as i32) {
            return Err(Error::Degenerate { volume });
        }
        let inv = edges.try_inverse().ok_or(Error::Degenerate { volume })?;
        let mut inv_edges = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                inv_edges.push(inv[(i, j)]);
            }
        }
        Ok(Self {
            vertices,
            tag,
            level,
            volume,
            inv_edges,
        })
    }

    /// The reference simplex `{x ≥ 0, Σx ≤ 1}`.
    ///
    /// Vertices are ordered `e_1, 0, e_2, ..., e_d` with tag `d`, so the first
    /// bisection cuts a longest edge.
    pub fn reference(d: usize) -> Self {
        let unit = |i: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        };
        let mut vertices = vec![unit(0), vec![0.0; d]];
        for i in 1..d {
            vertices.push(unit(i));
        }
        Self::new(vertices, d).expect("reference simplex is non-degenerate")
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn tag(&self) -> usize {
        self.tag
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn diameter(&self) -> f64 {
        diameter_of(&self.vertices)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let d = self.dim();
        let mut c = vec![0.0; d];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        c.iter_mut().for_each(|ci| *ci /= (d + 1) as f64);
        c
    }

    /// `(d-1)`-dimensional measure of each facet; facet `i` omits vertex `i`.
    pub fn facet_areas(&self) -> Vec<f64> {
        let d = self.dim();
        (0..=d)
            .map(|skip| {
                let face: Vec<&Vec<f64>> = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| v)
                    .collect();
                // Gram determinant of the d-1 edge vectors of the facet.
                let m = d - 1;
                let e = DMatrix::from_fn(d, m, |r, c| face[c + 1][r] - face[0][r]);
                let gram = e.transpose() * &e;
                gram.determinant().max(0.0).sqrt() / factorial(m)
            })
            .collect()
    }

    /// Radius of the largest inscribed ball, `d·|S| / Σ facet areas`.
    pub fn inradius(&self) -> f64 {
        let total: f64 = self.facet_areas().iter().sum();
        self.dim() as f64 * self.volume / total
    }

    /// Shape constant `κ_S = diam(S) / ρ_S`.
    pub fn kappa(&self) -> Result<f64> {
        if self.volume <= 0.0 {
            return Err(Error::Degenerate {
                volume: self.volume,
            });
        }
        Ok(self.diameter() / self.inradius())
    }

    /// Barycentric coordinates of `z` (length `d + 1`).
    pub fn barycentric(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut lam = vec![0.0; d + 1];
        let x0 = &self.vertices[0];
        let mut sum = 0.0;
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.inv_edges[i * d + j] * (z[j] - x0[j]);
            }
            lam[i + 1] = acc;
            sum += acc;
        }
        lam[0] = 1.0 - sum;
        lam
    }

    /// Point-in-simplex test with barycentric tolerance `tol`.
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        let d = self.dim();
        let x0 = &self.vertices[0];
        let mut sum = 0.0;
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.inv_edges[i * d + j] * (z[j] - x0[j]);
            }
            if acc < -tol {
                return false;
            }
            sum += acc;
        }
        sum <= 1.0 + tol
    }

    /// Maps reference coordinates `λ ∈ {λ ≥ 0, Σλ ≤ 1}` to the simplex:
    /// `x = x_0 + Σ λ_i (x_i − x_0)`.
    pub fn map_reference(&self, lambda: &[f64], out: &mut [f64]) {
        let x0 = &self.vertices[0];
        out.copy_from_slice(x0);
        for (i, l) in lambda.iter().enumerate() {
            let xi = &self.vertices[i + 1];
            for j in 0..out.len() {
                out[j] += l * (xi[j] - x0[j]);
            }
        }
    }

    /// Maubach bisection of the edge `x_0 x_k`, `k` the tag.
    ///
    /// Children are `[x_0, .., x_{k-1}, z, x_{k+1}, .., x_d]` and
    /// `[x_1, .., x_k, z, x_{k+1}, .., x_d]`, both tagged `k - 1` (wrapping
    /// to `d`) and one level deeper.
    pub fn bisect(&self) -> Result<(Simplex, Simplex)> {
        let d = self.dim();
        if self.tag > d {
            return Err(Error::InvalidTag { tag: self.tag, dim: d });
        }
        let k = if self.tag == 0 { d } else { self.tag };
        let z: Vec<f64> = self.vertices[0]
            .iter()
            .zip(&self.vertices[k])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mut first = Vec::with_capacity(d + 1);
        first.extend_from_slice(&self.vertices[..k]);
        first.push(z.clone());
        first.extend_from_slice(&self.vertices[k + 1..]);
        let mut second = Vec::with_capacity(d + 1);
        second.extend_from_slice(&self.vertices[1..=k]);
        second.push(z);
        second.extend_from_slice(&self.vertices[k + 1..]);

        let tag = if k > 1 { k - 1 } else { d };
        let level = self.level + 1;
        let half = 0.5 * self.volume;
        Ok((
            self.child(first, tag, level, half),
            self.child(second, tag, level, half),
        ))
    }

    fn child(&self, vertices: Vec<Vec<f64>>, tag: usize, level: u32, volume: f64) -> Simplex {
        let edges = edge_matrix(&vertices);
        let d = self.dim();
        let inv = edges
            .try_inverse()
            .expect("bisection of a non-degenerate simplex is non-degenerate");
        let mut inv_edges = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                inv_edges.push(inv[(i, j)]);
            }
        }
        Simplex {
            vertices,
            tag,
            level,
            volume,
            inv_edges,
        }
    }

    /// `generations` rounds of uniform bisection: `2^generations` simplices.
    pub fn bisect_times(&self, generations: u32) -> Result<Vec<Simplex>> {
        let mut out = vec![self.clone()];
        for _ in 0..generations {
            let mut next = Vec::with_capacity(out.len() * 2);
            for s in &out {
                let (a, b) = s.bisect()?;
                next.push(a);
                next.push(b);
            }
            out = next;
        }
        Ok(out)
    }

    /// Image under `x ↦ scale·x + shift` with tag and level kept.
    pub fn affine_image(&self, scale: f64, shift: &[f64]) -> Result<Simplex> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(shift).map(|(x, s)| scale * x + s).collect())
            .collect();
        Simplex::with_level(vertices, self.tag, self.level)
    }

    /// Sorted edge lengths normalised by the longest edge, quantised; equal
    /// for similar simplices.
    pub fn similarity_signature(&self) -> Vec<i64> {
        let mut lengths = Vec::new();
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                lengths.push(dist(&self.vertices[i], &self.vertices[j]));
            }
        }
        let max = lengths.iter().cloned().fold(0.0, f64::max);
        lengths.sort_by(|a, b| a.total_cmp(b));
        lengths
            .iter()
            .map(|l| (l / max * 1e8).round() as i64)
            .collect()
    }
}

fn edge_matrix(vertices: &[Vec<f64>]) -> DMatrix<f64> {
    let d = vertices.len() - 1;
    DMatrix::from_fn(d, d, |r, c| vertices[c + 1][r] - vertices[0][r])
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn diameter_of(vertices: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            best = best.max(dist(&vertices[i], &vertices[j]));
        }
    }
    best
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn right_triangle() -> Simplex {
        Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap()
    }

    #[test]
    fn reference_triangle_halves() {
        let (a, b) = right_triangle().bisect().unwrap();
        assert_relative_eq!(a.volume(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(b.volume(), 0.25, epsilon = 1e-15);
        assert_eq!(a.level(), 1);
        // stored half-volume agrees with the determinant formula
        let recomputed = Simplex::new(a.vertices().to_vec(), a.tag()).unwrap();
        assert_relative_eq!(recomputed.volume(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn equilateral_kappa() {
        let h = 3f64.sqrt() / 2.0;
        let s = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], 2).unwrap();
        assert_relative_eq!(s.inradius(), 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(s.kappa().unwrap(), 2.0 * 3f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn right_triangle_kappa() {
        // ρ = 2|S| / perimeter = 1 / (2 + √2)
        let s = right_triangle();
        let rho = 1.0 / (2.0 + 2f64.sqrt());
        assert_relative_eq!(s.inradius(), rho, epsilon = 1e-14);
        assert_relative_eq!(
            s.kappa().unwrap(),
            2f64.sqrt() / (1.0 - 1.0 / 2f64.sqrt()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn kappa_invariant_under_similarity() {
        let s = right_triangle();
        let moved = Simplex::new(
            s.vertices()
                .iter()
                .map(|v| {
                    let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
                    vec![3.0 * (c * v[0] - sn * v[1]) + 1.0, 3.0 * (sn * v[0] + c * v[1]) - 2.0]
                })
                .collect(),
            2,
        )
        .unwrap();
        assert_relative_eq!(s.kappa().unwrap(), moved.kappa().unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn interval_kappa_is_two() {
        let s = Simplex::new(vec![vec![0.2], vec![0.7]], 1).unwrap();
        assert_relative_eq!(s.kappa().unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn invalid_tag() {
        let s = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 3).unwrap();
        assert_eq!(s.bisect().unwrap_err(), Error::InvalidTag { tag: 3, dim: 2 });
    }

    #[test]
    fn tag_zero_reads_as_d() {
        let mut s = right_triangle();
        let (a, _) = s.bisect().unwrap();
        s.tag = 0;
        let (b, _) = s.bisect().unwrap();
        assert_eq!(a.vertices(), b.vertices());
    }

    #[test]
    fn degenerate_rejected() {
        let err = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]], 2);
        assert!(matches!(err, Err(Error::Degenerate { .. })));
    }

    #[test]
    fn barycentric_membership() {
        let s = right_triangle();
        assert!(s.contains(&[0.2, 0.2], 1e-12));
        assert!(s.contains(&[0.5, 0.5], 1e-12));
        assert!(!s.contains(&[0.6, 0.5], 1e-12));
        let lam = s.barycentric(&[0.25, 0.5]);
        assert_relative_eq!(lam.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_bisection_volumes() {
        let s = right_triangle();
        for n in 0..6 {
            let kids = s.bisect_times(n).unwrap();
            assert_eq!(kids.len(), 1 << n);
            let total: f64 = kids.iter().map(Simplex::volume).sum();
            assert_relative_eq!(total, 0.5, max_relative = 1e-14);
        }
    }
}

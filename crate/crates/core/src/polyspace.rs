//! The anisotropic polynomial space `Π^{r1,r2}` spanned by `t^i x^α` with
//! `i < r1` and `|α| < r2`.
//!
//! Coefficients are laid out with `i` outermost; within one temporal power
//! the spatial multi-indices run in graded-lexicographic order (by total
//! degree, then lexicographically descending), e.g. for `d = 2`:
//! `1, x1, x2, x1², x1x2, x2², …`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `r1 · #{α ∈ ℕ₀^d : |α| < r2}`.
pub fn basis_dimension(r1: usize, r2: usize, d: usize) -> usize {
    r1 * spatial_dimension(r2, d)
}

/// `#{α ∈ ℕ₀^d : |α| < r2} = C(r2 − 1 + d, d)`.
pub fn spatial_dimension(r2: usize, d: usize) -> usize {
    if r2 == 0 {
        return 0;
    }
    binomial(r2 - 1 + d, d) as usize
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Multi-indices `|α| < r2` in graded-lexicographic order.
pub fn multi_indices(r2: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for deg in 0..r2 {
        let mut cur = vec![0; d];
        compositions(deg, 0, &mut cur, &mut out);
    }
    out
}

fn compositions(rest: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(cur.clone());
        return;
    }
    for k in (0..=rest).rev() {
        cur[pos] = k;
        compositions(rest - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// An element of `Π^{r1,r2}` in `d` space dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnisoPolynomial {
    pub r1: usize,
    pub r2: usize,
    pub d: usize,
    pub coeffs: Vec<f64>,
}

impl AnisoPolynomial {
    pub fn new(r1: usize, r2: usize, d: usize, coeffs: Vec<f64>) -> Result<Self> {
        if r1 == 0 || r2 == 0 || d == 0 {
            return Err(Error::param("r1/r2/d", "orders and dimension must be positive"));
        }
        let n = basis_dimension(r1, r2, d);
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.len(),
            });
        }
        Ok(Self { r1, r2, d, coeffs })
    }

    pub fn zero(r1: usize, r2: usize, d: usize) -> Self {
        Self {
            r1,
            r2,
            d,
            coeffs: vec![0.0; basis_dimension(r1, r2, d)],
        }
    }

    /// Coefficients drawn uniformly from `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(r1: usize, r2: usize, d: usize, rng: &mut R) -> Self {
        let coeffs = (0..basis_dimension(r1, r2, d))
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect();
        Self { r1, r2, d, coeffs }
    }

    /// The single basis monomial `t^i x^α`.
    pub fn monomial(r1: usize, r2: usize, i: usize, alpha: &[usize]) -> Result<Self> {
        let d = alpha.len();
        let mut p = Self::zero(r1, r2, d);
        let k = multi_indices(r2, d)
            .iter()
            .position(|a| a == alpha)
            .filter(|_| i < r1)
            .ok_or_else(|| Error::param("alpha", "monomial outside the index set"))?;
        p.coeffs[i * spatial_dimension(r2, d) + k] = 1.0;
        Ok(p)
    }

    pub fn coefficient(&self, i: usize, k: usize) -> f64 {
        self.coeffs[i * spatial_dimension(self.r2, self.d) + k]
    }

    pub fn evaluate(&self, t: f64, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(self.eval(t, x))
    }

    /// Horner in `t` over spatial sums; no dimension check.
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        const STACK: usize = 64;
        let nx = spatial_dimension(self.r2, self.d);
        let mut small = [0.0; STACK];
        let mut large = Vec::new();
        let basis: &mut [f64] = if nx <= STACK {
            &mut small[..nx]
        } else {
            large.resize(nx, 0.0);
            &mut large
        };
        spatial_basis(self.r2, x, basis);
        let mut acc = 0.0;
        for i in (0..self.r1).rev() {
            let row = &self.coeffs[i * nx..(i + 1) * nx];
            let s: f64 = row.iter().zip(basis.iter()).map(|(c, b)| c * b).sum();
            acc = acc * t + s;
        }
        acc
    }

    /// Term-by-term sum `Σ c_{i,α} t^i x^α`.
    pub fn evaluate_naive(&self, t: f64, x: &[f64]) -> f64 {
        let idx = multi_indices(self.r2, self.d);
        let mut acc = 0.0;
        for i in 0..self.r1 {
            for (k, a) in idx.iter().enumerate() {
                let xa: f64 = a.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product();
                acc += self.coefficient(i, k) * t.powi(i as i32) * xa;
            }
        }
        acc
    }

    /// `Q(τ, z) = P(φ(τ, z))`.
    pub fn pullback(&self, phi: &AffineMap) -> Result<Self> {
        if phi.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: phi.dim(),
            });
        }
        phi.check()?;
        let d = self.d;
        let nx = spatial_dimension(self.r2, d);
        let space = SpatialAlgebra::new(self.r2, d);

        // (a τ + b)^i in the monomial basis of τ
        let mut tpow = vec![vec![0.0; self.r1]; self.r1];
        for (i, row) in tpow.iter_mut().enumerate() {
            for (k, c) in row.iter_mut().enumerate().take(i + 1) {
                *c = binomial(i, k) * phi.a.powi(k as i32) * phi.b.powi((i - k) as i32);
            }
        }
        // (M z + v)^α for every α
        let linear: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut l = vec![0.0; nx];
                l[0] = phi.v[j];
                for c in 0..d {
                    if nx > 1 {
                        l[1 + c] = phi.m[j * d + c];
                    }
                }
                l
            })
            .collect();
        let xpow: Vec<Vec<f64>> = space
            .indices
            .iter()
            .map(|alpha| {
                let mut acc = space.one();
                for (j, &e) in alpha.iter().enumerate() {
                    for _ in 0..e {
                        acc = space.mul(&acc, &linear[j]);
                    }
                }
                acc
            })
            .collect();

        let mut out = Self::zero(self.r1, self.r2, d);
        for i in 0..self.r1 {
            for k in 0..nx {
                let c = self.coefficient(i, k);
                if c == 0.0 {
                    continue;
                }
                for (ti, &tc) in tpow[i].iter().enumerate() {
                    if tc == 0.0 {
                        continue;
                    }
                    for (kk, &xc) in xpow[k].iter().enumerate() {
                        out.coeffs[ti * nx + kk] += c * tc * xc;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs, ..self.clone() })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
            ..self.clone()
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if (self.r1, self.r2, self.d) != (other.r1, other.r2, other.d) {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                got: other.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Values of `x^α`, `|α| < r2`, in layout order.
pub fn spatial_basis(r2: usize, x: &[f64], out: &mut [f64]) {
    let d = x.len();
    // x^α for graded-lex order, built by multiplying lower-degree entries
    out[0] = 1.0;
    if r2 <= 1 {
        return;
    }
    match d {
        1 => {
            for k in 1..r2 {
                out[k] = out[k - 1] * x[0];
            }
        }
        2 => {
            let mut pos = 1;
            for deg in 1..r2 {
                for a in (0..=deg).rev() {
                    out[pos] = x[0].powi(a as i32) * x[1].powi((deg - a) as i32);
                    pos += 1;
                }
            }
        }
        _ => {
            for (k, alpha) in multi_indices(r2, d).iter().enumerate() {
                out[k] = alpha.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product();
            }
        }
    }
}

/// Values of every basis function `t^i x^α` in layout order.
pub fn full_basis(r1: usize, r2: usize, t: f64, x: &[f64], out: &mut [f64]) {
    let nx = spatial_dimension(r2, x.len());
    spatial_basis(r2, x, &mut out[..nx]);
    for i in 1..r1 {
        let (head, tail) = out.split_at_mut(i * nx);
        let prev = &head[(i - 1) * nx..];
        for k in 0..nx {
            tail[k] = prev[k] * t;
        }
    }
}

/// Dense multiplication of spatial polynomials truncated to `|α| < r2`.
struct SpatialAlgebra {
    indices: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl SpatialAlgebra {
    fn new(r2: usize, d: usize) -> Self {
        let indices = multi_indices(r2, d);
        let lookup = indices.iter().cloned().enumerate().map(|(k, a)| (a, k)).collect();
        Self { indices, lookup }
    }

    fn one(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.indices.len()];
        v[0] = 1.0;
        v
    }

    fn mul(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.indices.len()];
        let mut sum = vec![0; self.indices[0].len()];
        for (i, &ca) in a.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (j, &cb) in b.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                for (s, (x, y)) in sum.iter_mut().zip(self.indices[i].iter().zip(&self.indices[j])) {
                    *s = x + y;
                }
                if let Some(&k) = self.lookup.get(&sum) {
                    out[k] += ca * cb;
                }
            }
        }
        out
    }
}

/// `φ(t, x) = (a t + b, M x + v)` with `M` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AffineMap {
    pub fn identity(d: usize) -> Self {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = 1.0;
        }
        Self {
            a: 1.0,
            b: 0.0,
            m,
            v: vec![0.0; d],
        }
    }

    /// The scaling `(t, x) ↦ (a t + b, c x + v)`.
    pub fn scaling(a: f64, b: f64, c: f64, v: Vec<f64>) -> Self {
        let d = v.len();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = c;
        }
        Self { a, b, m, v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    fn matrix(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim();
        nalgebra::DMatrix::from_row_slice(d, d, &self.m)
    }

    /// `|det ∇φ| = |a · det M|`.
    pub fn jacobian(&self) -> f64 {
        (self.a * self.matrix().determinant()).abs()
    }

    fn check(&self) -> Result<()> {
        let det = self.matrix().determinant();
        let scale = self.m.iter().fold(0.0f64, |s, x| s.max(x.abs())).powi(self.dim() as i32);
        if self.a == 0.0 || !self.a.is_finite() || det.abs() <= 1e-14 * scale || scale == 0.0 {
            return Err(Error::SingularMap);
        }
        Ok(())
    }

    pub fn apply(&self, t: f64, x: &[f64]) -> (f64, Vec<f64>) {
        let d = self.dim();
        let y = (0..d)
            .map(|i| self.v[i] + (0..d).map(|j| self.m[i * d + j] * x[j]).sum::<f64>())
            .collect();
        (self.a * t + self.b, y)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.check()?;
        let inv = self.matrix().try_inverse().ok_or(Error::SingularMap)?;
        let d = self.dim();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = inv[(i, j)];
            }
        }
        let v = (0..d)
            .map(|i| -(0..d).map(|j| m[i * d + j] * self.v[j]).sum::<f64>())
            .collect();
        Ok(Self {
            a: 1.0 / self.a,
            b: -self.b / self.a,
            m,
            v,
        })
    }
}

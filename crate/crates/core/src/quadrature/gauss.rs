//! Gauss–Jacobi rules by the Golub–Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights on `[-1, 1]` for the weight `(1 − x)^α (1 + x)^β`,
/// exact for polynomials of degree `2n − 1`. Nodes ascend.
pub fn gauss_jacobi(n: usize, alpha: usize, beta: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let (a, b) = (alpha as f64, beta as f64);
    let ab = a + b;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + ab;
            let num = 4.0 * m * (m + a) * (m + b) * (m + ab);
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * factorial(alpha) * factorial(beta) / factorial(alpha + beta + 1);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0, 0)
}

/// Gauss–Legendre on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

fn factorial(n: usize) -> f64 {
    crate::geometry::factorial(n)
}

/// Collapsed-coordinate rule on the reference simplex `{λ ≥ 0, Σλ ≤ 1}`.
///
/// Direction `j` (0-based) carries the Jacobian factor `(1 − u_j)^{d−1−j}`,
/// integrated exactly by Gauss–Jacobi with `α = d − 1 − j`.
pub fn collapsed_simplex(d: usize, points: usize) -> (Vec<f64>, Vec<f64>) {
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
        .map(|j| {
            let alpha = d - 1 - j;
            let (x, w) = gauss_jacobi(points, alpha, 0);
            let scale = 2f64.powi(alpha as i32 + 1);
            (
                x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
                w.iter().map(|v| v / scale).collect(),
            )
        })
        .collect();
    let total = points.pow(d as u32);
    let mut lambdas = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let mut rest = 1.0;
        let mut w = 1.0;
        for j in 0..d {
            let u = rules[j].0[idx[j]];
            lambdas.push(u * rest);
            rest *= 1.0 - u;
            w *= rules[j].1[idx[j]];
        }
        weights.push(w);
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < points {
                break;
            }
            idx[j] = 0;
        }
    }
    (lambdas, weights)
}

/// Volume of the simplex spanned by `vertices`.
pub(crate) fn simplex_volume(vertices: &[Vec<f64>]) -> f64 {
    let d = vertices.len() - 1;
    let m = DMatrix::from_fn(d, d, |r, c| vertices[c + 1][r] - vertices[0][r]);
    m.determinant().abs() / factorial(d)
}

pub(crate) fn reference_volume(d: usize) -> f64 {
    1.0 / factorial(d)
}

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::gauss::{collapsed_simplex, gauss_legendre_unit, reference_volume, simplex_volume};
use crate::geometry::{Prism, Simplex};
use crate::{Error, Result};

/// Largest spatial degree served by the collapsed rules.
pub const MAX_SPATIAL_DEGREE: usize = 40;
/// Largest number of temporal Gauss points.
pub const MAX_TEMPORAL_POINTS: usize = 64;

/// Nodes and positive weights on a prism (or a union of prisms).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub d: usize,
    pub t: Vec<f64>,
    /// Spatial coordinates, `d` per node.
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// `(temporal Gauss points, spatial exactness degree)`.
    pub order: (usize, usize),
}

impl QuadratureRule {
    pub fn empty(d: usize, order: (usize, usize)) -> Self {
        Self {
            d,
            t: Vec::new(),
            x: Vec::new(),
            w: Vec::new(),
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn point(&self, i: usize) -> (f64, &[f64]) {
        (self.t[i], &self.x[i * self.d..(i + 1) * self.d])
    }

    pub fn measure(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn extend(&mut self, other: &QuadratureRule) {
        self.t.extend_from_slice(&other.t);
        self.x.extend_from_slice(&other.x);
        self.w.extend_from_slice(&other.w);
    }

    /// Image under `(t, x) ↦ (a t + b, c x + v)`; weights scale by the Jacobian.
    pub fn scaled(&self, a: f64, b: f64, c: f64, v: &[f64]) -> Self {
        let jac = (a * c.powi(self.d as i32)).abs();
        Self {
            d: self.d,
            t: self.t.iter().map(|t| a * t + b).collect(),
            x: self
                .x
                .chunks(self.d)
                .flat_map(|p| p.iter().zip(v).map(|(x, s)| c * x + s).collect::<Vec<_>>())
                .collect(),
            w: self.w.iter().map(|w| w * jac).collect(),
            order: self.order,
        }
    }
}

/// Reference rule on `[0, 1] × {λ ≥ 0, Σλ ≤ 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorRule {
    pub d: usize,
    pub temporal_points: usize,
    pub spatial_degree: usize,
    tn: Vec<f64>,
    tw: Vec<f64>,
    lam: Vec<f64>,
    sw: Vec<f64>,
}

impl TensorRule {
    pub fn new(d: usize, temporal_points: usize, spatial_degree: usize) -> Result<Self> {
        if !(1..=3).contains(&d) || spatial_degree > MAX_SPATIAL_DEGREE {
            return Err(Error::UnsupportedOrder {
                order: spatial_degree,
                dim: d,
            });
        }
        if temporal_points == 0 || temporal_points > MAX_TEMPORAL_POINTS {
            return Err(Error::UnsupportedOrder {
                order: temporal_points,
                dim: 1,
            });
        }
        let (tn, tw) = gauss_legendre_unit(temporal_points);
        let (lam, sw) = collapsed_simplex(d, spatial_degree / 2 + 1);
        Ok(Self {
            d,
            temporal_points,
            spatial_degree,
            tn,
            tw,
            lam,
            sw,
        })
    }

    pub fn nodes_per_prism(&self) -> usize {
        self.tw.len() * self.sw.len()
    }

    /// Appends the rule mapped onto `[t0, t1] × conv(vertices)`.
    pub fn append(&self, out: &mut QuadratureRule, t0: f64, t1: f64, vertices: &[Vec<f64>]) {
        let d = self.d;
        let len = t1 - t0;
        let jac = simplex_volume(vertices) / reference_volume(d);
        let mut x = vec![0.0; d];
        let ns = self.sw.len();
        for s in 0..ns {
            x.copy_from_slice(&vertices[0]);
            for i in 0..d {
                let l = self.lam[s * d + i];
                for j in 0..d {
                    x[j] += l * (vertices[i + 1][j] - vertices[0][j]);
                }
            }
            for (tn, tw) in self.tn.iter().zip(&self.tw) {
                out.t.push(t0 + len * tn);
                out.x.extend_from_slice(&x);
                out.w.push(len * tw * jac * self.sw[s]);
            }
        }
    }

    pub fn on(&self, prism: &Prism) -> QuadratureRule {
        let mut out = self.empty();
        self.append(
            &mut out,
            prism.time.start(),
            prism.time.end(),
            prism.space.vertices(),
        );
        out
    }

    /// Rule on the prism split into `2^levels` intervals times `2^{levels·d}`
    /// bisected simplices.
    pub fn on_subdivided(&self, prism: &Prism, levels: u32) -> Result<QuadratureRule> {
        if levels == 0 {
            return Ok(self.on(prism));
        }
        let mut out = self.empty();
        let times = prism.time.bisect_times(levels);
        let spaces = prism.space.bisect_times(levels * self.d as u32)?;
        for j in &times {
            for s in &spaces {
                self.append(&mut out, j.start(), j.end(), s.vertices());
            }
        }
        Ok(out)
    }

    pub fn empty(&self) -> QuadratureRule {
        QuadratureRule::empty(self.d, (self.temporal_points, self.spatial_degree))
    }
}

type Cache = Mutex<HashMap<(usize, usize, usize), Arc<TensorRule>>>;

/// Shared reference rule; built once per `(d, points, degree)`.
pub fn tensor_rule(d: usize, temporal_points: usize, spatial_degree: usize) -> Result<Arc<TensorRule>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (d, temporal_points, spatial_degree);
    if let Some(r) = cache.lock().expect("rule cache").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(TensorRule::new(d, temporal_points, spatial_degree)?);
    cache.lock().expect("rule cache").insert(key, rule.clone());
    Ok(rule)
}

/// Gauss rule with `temporal_order` points on `J` (exact to degree
/// `2·temporal_order − 1`) times a simplex rule exact to total degree
/// `spatial_order` on `S`.
pub fn prism_rule(prism: &Prism, temporal_order: usize, spatial_order: usize) -> Result<QuadratureRule> {
    if temporal_order == 0 || spatial_order == 0 {
        return Err(Error::param("order", "quadrature orders must be at least 1"));
    }
    Ok(tensor_rule(prism.dim(), temporal_order, spatial_order)?.on(prism))
}

/// Corner points of a prism: both interval ends times every simplex vertex.
pub fn prism_vertices(t0: f64, t1: f64, s: &Simplex) -> Vec<(f64, Vec<f64>)> {
    [t0, t1]
        .iter()
        .flat_map(|&t| s.vertices().iter().map(move |v| (t, v.clone())))
        .collect()
}

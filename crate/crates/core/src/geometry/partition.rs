use serde::{Deserialize, Serialize};

use super::{temporal_level, Interval, Prism, Simplex};
use crate::{Error, Result};

/// Barycentric tolerance for membership in the spatial domain.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A polyhedral spatial domain given as a union of interior-disjoint
/// simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceDomain {
    simplices: Vec<Simplex>,
    /// Whether the union is convex (single simplices, Kuhn cubes).
    convex: bool,
}

impl SpaceDomain {
    pub fn new(simplices: Vec<Simplex>, convex: bool) -> Result<Self> {
        let first = simplices.first().ok_or(Error::EmptyPartition)?;
        let d = first.dim();
        if let Some(bad) = simplices.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        Ok(Self { simplices, convex })
    }

    pub fn simplex(s: Simplex) -> Self {
        Self {
            simplices: vec![s],
            convex: true,
        }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn dim(&self) -> usize {
        self.simplices[0].dim()
    }

    pub fn volume(&self) -> f64 {
        self.simplices.iter().map(Simplex::volume).sum()
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<&Vec<f64>> = self.simplices.iter().flat_map(|s| s.vertices()).collect();
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d2: f64 = pts[i].iter().zip(pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                best = best.max(d2.sqrt());
            }
        }
        best
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        self.simplices.iter().any(|s| s.contains(z, MEMBERSHIP_TOL))
    }

    /// Largest inradius among the member simplices; the computable stand-in
    /// for the Lipschitz parameter of the domain.
    pub fn inradius(&self) -> f64 {
        self.simplices.iter().map(Simplex::inradius).fold(0.0, f64::max)
    }
}

/// A space-time cylinder `I × D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    pub time: Interval,
    pub space: SpaceDomain,
}

impl Cylinder {
    pub fn new(time: Interval, space: SpaceDomain) -> Self {
        Self { time, space }
    }

    /// `[0,1] × [0,1]^d`, meshed by the built-in Kuhn triangulation.
    pub fn unit(d: usize) -> Option<Self> {
        Some(Self::new(Interval::unit(), super::unit_mesh(d)?))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn measure(&self) -> f64 {
        self.time.length() * self.space.volume()
    }
}

impl From<&Prism> for Cylinder {
    fn from(p: &Prism) -> Self {
        Cylinder::new(p.time, SpaceDomain::simplex(p.space.clone()))
    }
}

/// A non-overlapping prism cover of a cylinder together with the anisotropy
/// parameters that drive its refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub elements: Vec<Prism>,
    pub domain: Cylinder,
    /// Size of the initial partition `P_0`.
    pub initial_count: usize,
    pub s1: f64,
    pub s2: f64,
}

impl Partition {
    /// Tensor-product partition: `n_time` equal root intervals of `domain.time`
    /// crossed with every simplex of `domain.space`. All levels start at 0.
    pub fn tensor(domain: Cylinder, n_time: usize, s1: f64, s2: f64) -> Result<Self> {
        if n_time == 0 {
            return Err(Error::param("n_time", "need at least one interval"));
        }
        if !(s1 > 0.0 && s2 > 0.0) {
            return Err(Error::param("s1/s2", "anisotropy parameters must be positive"));
        }
        let (a, len) = (domain.time.start(), domain.time.length());
        let mut elements = Vec::new();
        for i in 0..n_time {
            let lo = a + len * i as f64 / n_time as f64;
            let hi = a + len * (i + 1) as f64 / n_time as f64;
            let j = Interval::new(lo, hi)?;
            for s in domain.space.simplices() {
                let root = Simplex::new(s.vertices().to_vec(), s.tag())?;
                elements.push(Prism::new(j, root));
            }
        }
        let initial_count = elements.len();
        Ok(Self {
            elements,
            domain,
            initial_count,
            s1,
            s2,
        })
    }

    /// One-element partition of a single prism.
    pub fn single(prism: Prism, s1: f64, s2: f64) -> Self {
        let domain = Cylinder::from(&prism);
        Self {
            elements: vec![prism],
            domain,
            initial_count: 1,
            s1,
            s2,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn measure(&self) -> f64 {
        self.elements.iter().map(Prism::measure).sum()
    }

    /// `a(P) = max_{J×S} max(|J|/|S|^e, |S|^e/|J|)`, `e = s2/(s1 d)`.
    pub fn anisotropy_ratio(&self) -> Result<f64> {
        if self.elements.is_empty() {
            return Err(Error::EmptyPartition);
        }
        Ok(self
            .elements
            .iter()
            .map(|p| p.imbalance(self.s1, self.s2))
            .fold(1.0, f64::max))
    }

    /// `κ_P = max κ_S` over the elements.
    pub fn kappa(&self) -> Result<f64> {
        if self.elements.is_empty() {
            return Err(Error::EmptyPartition);
        }
        self.elements
            .iter()
            .map(|p| p.space.kappa())
            .try_fold(0.0, |acc, k| k.map(|k| f64::max(acc, k)))
    }

    /// Temporal level expected at prism level `k`.
    pub fn temporal_level(&self, k: u32) -> u32 {
        temporal_level(k, self.s2 / (self.s1 * self.dim() as f64))
    }

    pub fn to_record(&self) -> PartitionRecord {
        PartitionRecord {
            d: self.dim(),
            s1: self.s1,
            s2: self.s2,
            initial_count: self.initial_count,
            domain: DomainRecord {
                time: [self.domain.time.start(), self.domain.time.end()],
                simplices: self
                    .domain
                    .space
                    .simplices()
                    .iter()
                    .map(|s| s.vertices().to_vec())
                    .collect(),
                tags: self.domain.space.simplices().iter().map(Simplex::tag).collect(),
                convex: self.domain.space.is_convex(),
            },
            elements: self.elements.iter().map(PrismRecord::from).collect(),
        }
    }

    pub fn from_record(rec: &PartitionRecord) -> Result<Self> {
        let space = rec
            .domain
            .simplices
            .iter()
            .zip(&rec.domain.tags)
            .map(|(v, &t)| Simplex::new(v.clone(), t))
            .collect::<Result<Vec<_>>>()?;
        let domain = Cylinder::new(
            Interval::new(rec.domain.time[0], rec.domain.time[1])?,
            SpaceDomain::new(space, rec.domain.convex)?,
        );
        let elements = rec
            .elements
            .iter()
            .map(PrismRecord::to_prism)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            elements,
            domain,
            initial_count: rec.initial_count,
            s1: rec.s1,
            s2: rec.s2,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Levels {
    pub prism: u32,
    pub time: u32,
    pub space: u32,
}

/// JSON form of a prism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrismRecord {
    pub time: [f64; 2],
    pub vertices: Vec<Vec<f64>>,
    pub levels: Levels,
    pub tag: usize,
}

impl From<&Prism> for PrismRecord {
    fn from(p: &Prism) -> Self {
        Self {
            time: [p.time.start(), p.time.end()],
            vertices: p.space.vertices().to_vec(),
            levels: Levels {
                prism: p.level,
                time: p.time.level(),
                space: p.space.level(),
            },
            tag: p.space.tag(),
        }
    }
}

impl PrismRecord {
    pub fn to_prism(&self) -> Result<Prism> {
        Ok(Prism {
            time: Interval::with_level(self.time[0], self.time[1], self.levels.time)?,
            space: Simplex::with_level(self.vertices.clone(), self.tag, self.levels.space)?,
            level: self.levels.prism,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainRecord {
    pub time: [f64; 2],
    pub simplices: Vec<Vec<Vec<f64>>>,
    pub tags: Vec<usize>,
    pub convex: bool,
}

/// JSON form of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub d: usize,
    pub s1: f64,
    pub s2: f64,
    pub initial_count: usize,
    pub domain: DomainRecord,
    pub elements: Vec<PrismRecord>,
}

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A closed time interval `[a, b]` with its bisection generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
    level: u32,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::with_level(a, b, 0)
    }

    pub fn with_level(a: f64, b: f64, level: u32) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::param("interval", format!("need a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b, level })
    }

    pub fn unit() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            level: 0,
        }
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, t: f64, tol: f64) -> bool {
        t >= self.a - tol && t <= self.b + tol
    }

    /// Splits at the midpoint; both halves sit one level deeper.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.midpoint();
        let level = self.level + 1;
        (
            Interval {
                a: self.a,
                b: m,
                level,
            },
            Interval {
                a: m,
                b: self.b,
                level,
            },
        )
    }

    /// `k`-fold uniform bisection, returning `2^k` intervals in order.
    pub fn bisect_times(&self, k: u32) -> Vec<Interval> {
        let mut out = vec![*self];
        for _ in 0..k {
            out = out
                .iter()
                .flat_map(|j| {
                    let (l, r) = j.bisect();
                    [l, r]
                })
                .collect();
        }
        out
    }

    /// Image under `t ↦ scale·t + shift` (`scale > 0`), level preserved.
    pub fn affine_image(&self, scale: f64, shift: f64) -> Result<Interval> {
        Interval::with_level(scale * self.a + shift, scale * self.b + shift, self.level)
    }
}

use super::{Interval, Simplex};
use crate::Result;

/// `⌈x⌉` that treats values within `1e-9` of an integer as that integer, so
/// ratios such as `3 · (1/3)` land on the intended level.
pub fn robust_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as i64
    } else {
        x.ceil() as i64
    }
}

/// Temporal level paired with prism level `k`: `⌈k·s2/(s1·d)⌉`.
pub fn temporal_level(k: u32, ratio: f64) -> u32 {
    robust_ceil(k as f64 * ratio).max(0) as u32
}

/// A space-time element `J × S`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prism {
    pub time: Interval,
    pub space: Simplex,
    /// Number of atomic splits separating this element from its root.
    pub level: u32,
}

impl Prism {
    pub fn new(time: Interval, space: Simplex) -> Self {
        Self {
            time,
            space,
            level: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn measure(&self) -> f64 {
        self.time.length() * self.space.volume()
    }

    /// `|J| / |S|^{s2/(s1 d)}`.
    pub fn balance(&self, s1: f64, s2: f64) -> f64 {
        let e = s2 / (s1 * self.dim() as f64);
        self.time.length() / self.space.volume().powf(e)
    }

    /// `max(b, 1/b)` for `b` the [`balance`](Self::balance).
    pub fn imbalance(&self, s1: f64, s2: f64) -> f64 {
        let b = self.balance(s1, s2);
        b.max(1.0 / b)
    }

    /// Level bookkeeping relative to a level-0 root: `ℓ(S) = k` and
    /// `ℓ(J) = ⌈k·s2/(s1 d)⌉`.
    pub fn levels_consistent(&self, s1: f64, s2: f64) -> bool {
        let ratio = s2 / (s1 * self.dim() as f64);
        self.space.level() == self.level && self.time.level() == temporal_level(self.level, ratio)
    }

    /// Image under the scaling `(t, x) ↦ (a t + b, c x + v)` with `a, c > 0`.
    pub fn scaled(&self, a: f64, b: f64, c: f64, v: &[f64]) -> Result<Prism> {
        Ok(Prism {
            time: self.time.affine_image(a, b)?,
            space: self.space.affine_image(c, v)?,
            level: self.level,
        })
    }
}

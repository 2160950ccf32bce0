//! Adaptive anisotropic piecewise-polynomial approximation on space-time
//! cylinders `I × D ⊂ ℝ^{1+d}`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: intervals, tagged simplices, prisms, partitions and the
//!   bisection primitives.
//! - [`polyspace`]: the anisotropic polynomial space `Π^{r1,r2}` with
//!   evaluation and affine pullback.
//! - [`quadrature`]: tensor Gauss / collapsed-simplex rules and discrete
//!   `L_p` norms.
//! - [`fields`]: the library of test functions.
//! - [`moduli`]: temporal and spatial difference operators and the
//!   supremum / averaged moduli of smoothness.
//! - [`besov`]: dyadic anisotropic Besov seminorm estimates.
//! - [`approx`]: local best `L_p` fits plus Jackson and Whitney harnesses.
//! - [`adaptive`]: atomic anisotropic refinement, the greedy loop and the
//!   direct-estimate driver.
//!
//! Data-parallel loops go through [`par`]; building without the default
//! `parallel` feature replaces rayon with plain sequential iteration.

pub mod adaptive;
pub mod approx;
pub mod besov;
pub mod error;
pub mod exponent;
pub mod fields;
pub mod geometry;
pub mod moduli;
pub mod par;
pub mod polyspace;
pub mod quadrature;
pub mod stats;

pub use error::{Error, Result};

/// `μ(p) = min(1, p)`, the exponent under which `‖·‖_p^μ` is subadditive.
pub fn mu(p: f64) -> f64 {
    p.min(1.0)
}

//! Numerical laboratory for the curve shortening flow `γ_t = γ_ss` of closed
//! curves in ℝⁿ.
//!
//! The crate is organised bottom-up:
//!
//! - [`curve`]: sampled closed curves, arclength calculus, the xy-projection
//!   frame (`c`, `k̄`, `θ`, `N̄`) and snapshot files.
//! - [`flow`]: explicit integrators for the space flow and the graph flow,
//!   and the projected-flow consistency residual.
//! - [`predicates`]: convexity notions, Milnor and Sturm counts, plane
//!   intersection counts, line and plane slopes, the three-point estimator.
//! - [`barriers`]: the sine subsolution and comparison checks built on it.
//! - [`zoo`]: constructors for the named curve families.

pub mod barriers;
pub mod curve;
mod error;
pub mod flow;
pub mod planar;
pub mod predicates;
pub mod zoo;

pub use error::{Error, Result};

//! Numerical substrate: precision-tracked reals, circle arithmetic,
//! compensated sums, bracketed search, and slope fits.

pub mod circle;
pub mod fit;
pub mod real;
pub mod search;
pub mod sum;

pub use circle::{mod1, Arc, CirclePoint};
pub use fit::{linear_slope, loglog_slope};
pub use real::{prec_tol, precision, HighReal, Real};
pub use search::{golden_section_max, maximize_on_circle, minimize_on_circle};
pub use sum::{compensated_sum, CompensatedSum};

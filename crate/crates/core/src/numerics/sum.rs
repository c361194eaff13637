//! Compensated (Neumaier) accumulation.
//!
//! Orbit prefix sums run to q_n ≈ 10⁵ terms and beyond; plain summation
//! would lose a factor of the length in the rounding bound. Neumaier's
//! variant keeps the error at a couple of ulp independent of length.

 

use super::real::Real;
use crate::error::{Error, Result};

/// Running compensated sum.
#[derive(Clone, Debug)]
pub struct CompensatedSum<R: Real> {
    sum: R,
    compensation: R,
}

impl<R: Real> Default for CompensatedSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        CompensatedSum {
            sum: R::zero(),
            compensation: R::zero(),
        }
    }

    pub fn add(&mut self, x: R) {
        let t = self.sum.clone() + x.clone();
        let correction = if self.sum.abs() >= x.abs() {
            (self.sum.clone() - t.clone()) + x
        } else {
            (x - t.clone()) + self.sum.clone()
        };
        self.compensation = self.compensation.clone() + correction;
        self.sum = t;
    }

    pub fn total(&self) -> R {
        self.sum.clone() + self.compensation.clone()
    }
}

/// Sum of a sequence, exact to within 2 ulp at working precision
/// independent of length. Errors on non-finite terms.
pub fn compensated_sum<R: Real, I>(xs: I) -> Result<R>
where
    I: IntoIterator<Item = R>,
{
    let mut acc = CompensatedSum::new();
    for x in xs {
        if !x.is_finite() {
            return Err(Error::NonFinite("compensated_sum"));
        }
        acc.add(x);
    }
    Ok(acc.total())
}

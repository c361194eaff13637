//! One-dimensional maximization: coarse grid plus golden-section
//! refinement. Derivative-free on purpose — the objectives (lengths of
//! iterated segments) are smooth but can be very flat near the maximum.

use super::circle::{mod1, CirclePoint};
use super::real::Real;
use crate::error::{Error, Result};

/// Inverse golden ratio (√5 − 1)/2 at working precision.
fn inv_golden<R: Real>() -> R {
    (R::from_u64(5).unwrap().sqrt() - R::one()) / R::two()
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Assumes `f` is unimodal on the bracket; on flat or multimodal data it
/// still returns a point no worse than the better bracket endpoint probe.
pub fn golden_section_max<R: Real>(
    mut f: impl FnMut(&R) -> R,
    lo: R,
    hi: R,
    steps: usize,
) -> (R, R) {
    let phi = inv_golden::<R>();
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b.clone() - phi.clone() * (b.clone() - a.clone());
    let mut x2 = a.clone() + phi.clone() * (b.clone() - a.clone());
    let mut f1 = f(&x1);
    let mut f2 = f(&x2);
    for _ in 0..steps {
        if f1 >= f2 {
            b = x2;
            x2 = x1.clone();
            f2 = f1.clone();
            x1 = b.clone() - phi.clone() * (b.clone() - a.clone());
            f1 = f(&x1);
        } else {
            a = x1;
            x1 = x2.clone();
            f1 = f2.clone();
            x2 = a.clone() + phi.clone() * (b.clone() - a.clone());
            f2 = f(&x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Approximate maximizer of a continuous function on the circle.
///
/// Evaluates `f` on a uniform grid of `grid_size` points, then refines by
/// golden-section search on the bracket spanning the two grid cells
/// around the best point. The returned value is never below the grid
/// maximum.
pub fn maximize_on_circle<R: Real>(
    mut f: impl FnMut(&CirclePoint<R>) -> R,
    grid_size: usize,
    refinement_steps: usize,
) -> Result<(CirclePoint<R>, R)> {
    if grid_size < 8 {
        return Err(Error::precondition(format!(
            "grid_size must be at least 8, got {grid_size}"
        )));
    }
    let n = R::from_usize(grid_size).unwrap();
    let mut best_i = 0usize;
    let mut best_v: Option<R> = None;
    for i in 0..grid_size {
        let x = R::from_usize(i).unwrap() / n.clone();
        let v = f(&mod1(x)?);
        if best_v.as_ref().map_or(true, |b| v > *b) {
            best_v = Some(v);
            best_i = i;
        }
    }
    let best_v = best_v.unwrap();

    let step = R::one() / n;
    let center = R::from_usize(best_i).unwrap() * step.clone();
    let lo = center.clone() - step.clone();
    let hi = center + step;
    let (x, v) = golden_section_max(
        |t| f(&mod1(t.clone()).expect("finite bracket point")),
        lo,
        hi,
        refinement_steps,
    );
    if v >= best_v {
        Ok((mod1(x)?, v))
    } else {
        let bx = R::from_usize(best_i).unwrap() / R::from_usize(grid_size).unwrap();
        Ok((mod1(bx)?, best_v))
    }
}

/// Minimum of `f` on a uniform circle grid with one golden-section
/// refinement pass; used for derivative-positivity checks.
pub fn minimize_on_circle<R: Real>(
    mut f: impl FnMut(&CirclePoint<R>) -> R,
    grid_size: usize,
    refinement_steps: usize,
) -> Result<(CirclePoint<R>, R)> {
    let (p, negv) = maximize_on_circle(
        |x| R::zero() - f(x),
        grid_size,
        refinement_steps,
    )?;
    Ok((p, -negv))
}

//! Points and oriented arcs on the circle T¹ = R/Z.

 

use super::real::Real;
use crate::error::{Error, Result};

/// A point of the circle, held as its representative in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePoint<R: Real> {
    position: R,
}

impl<R: Real> CirclePoint<R> {
    pub fn position(&self) -> &R {
        &self.position
    }

    pub fn into_position(self) -> R {
        self.position
    }

    /// Oriented (counterclockwise) distance from `self` to `other`,
    /// in `[0, 1)`.
    pub fn distance_to(&self, other: &CirclePoint<R>) -> R {
        reduce(other.position.clone() - self.position.clone())
    }

    /// Unoriented distance: length of the shorter arc, in `[0, 1/2]`.
    pub fn separation(&self, other: &CirclePoint<R>) -> R {
        let d = self.distance_to(other);
        let d2 = R::one() - d.clone();
        d.min_with(&d2)
    }
}

/// Reduces a finite real to `[0, 1)`.
fn reduce<R: Real>(x: R) -> R {
    let mut r = x.clone() - x.floor();
    // A tiny negative argument may round the difference up to exactly 1.
    if r >= R::one() {
        r = R::zero();
    }
    if r.is_negative() {
        r = R::zero();
    }
    r
}

/// `x mod 1`, the canonical projection R → T¹.
pub fn mod1<R: Real>(x: R) -> Result<CirclePoint<R>> {
    if !x.is_finite() {
        return Err(Error::NonFinite("mod1"));
    }
    Ok(CirclePoint { position: reduce(x) })
}

/// An oriented circle arc, counterclockwise from `start` to `end`.
///
/// Membership uses the half-open convention `[start, end)`, which
/// turns "disjoint except at the endpoints" into literal disjointness
/// of the arcs as sets.
#[derive(Clone, Debug)]
pub struct Arc<R: Real> {
    start: CirclePoint<R>,
    end: CirclePoint<R>,
    length: R,
}

impl<R: Real> Arc<R> {
    pub fn new(start: CirclePoint<R>, end: CirclePoint<R>) -> Self {
        let length = start.distance_to(&end);
        Arc { start, end, length }
    }

    pub fn start(&self) -> &CirclePoint<R> {
        &self.start
    }

    pub fn end(&self) -> &CirclePoint<R> {
        &self.end
    }

    pub fn length(&self) -> &R {
        &self.length
    }

    /// Half-open membership: the oriented distance from `start` is
    /// strictly below the length (so `start` is in, `end` is out, except
    /// for the degenerate full-circle arc).
    pub fn contains(&self, p: &CirclePoint<R>) -> bool {
        self.start.distance_to(p) < self.length
            || (p == &self.start)
    }

    /// Whether `other ⊆ self` as half-open arcs, with `snap` absorbing
    /// rounding at shared endpoints.
    pub fn contains_arc(&self, other: &Arc<R>, snap: &R) -> bool {
        let mut d = self.start.distance_to(&other.start);
        // A start sitting a hair "before" ours is a rounded coincidence.
        if d.clone() + snap.clone() > R::one() {
            d = R::zero();
        }
        d.clone() + other.length.clone() <= self.length.clone() + snap.clone()
    }
}

//! Least-squares slopes for scaling-law estimation.

use super::real::Real;
use crate::error::{Error, Result};

/// Ordinary least-squares slope of `y` against `x`.
pub fn linear_slope<R: Real>(points: &[(R, R)]) -> Result<R> {
    if points.len() < 3 {
        return Err(Error::precondition(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = R::from_usize(points.len()).unwrap();
    let mut sx = R::zero();
    let mut sy = R::zero();
    for (x, y) in points {
        sx = sx + x.clone();
        sy = sy + y.clone();
    }
    let mx = sx / n.clone();
    let my = sy / n;
    let mut sxy = R::zero();
    let mut sxx = R::zero();
    for (x, y) in points {
        let dx = x.clone() - mx.clone();
        sxy = sxy + dx.clone() * (y.clone() - my.clone());
        sxx = sxx + dx.clone() * dx;
    }
    if sxx.is_zero() {
        return Err(Error::precondition("slope fit needs at least 2 distinct x"));
    }
    Ok(sxy / sxx)
}

/// Least-squares slope of `log y` against `log x`: the exponent of an
/// underlying power law. All coordinates must be strictly positive.
pub fn loglog_slope<R: Real>(points: &[(R, R)]) -> Result<R> {
    if points.len() < 3 {
        return Err(Error::precondition(format!(
            "loglog_slope needs at least 3 points, got {}",
            points.len()
        )));
    }
    let logs: Vec<(R, R)> = points
        .iter()
        .map(|(x, y)| {
            if !x.is_positive() || !y.is_positive() {
                Err(Error::precondition(
                    "loglog_slope requires strictly positive coordinates",
                ))
            } else {
                Ok((x.ln(), y.ln()))
            }
        })
        .collect::<Result<_>>()?;
    linear_slope(&logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real::{HighReal, Real};
    use num_traits::{FromPrimitive, Signed};

    fn hr(u: u64) -> HighReal {
        HighReal::from_u64(u).unwrap()
    }

    #[test]
    fn exact_square_law() {
        let pts = vec![(hr(1), hr(1)), (hr(2), hr(4)), (hr(4), hr(16))];
        let s = loglog_slope(&pts).unwrap();
        assert!((s - HighReal::two()).abs() < HighReal::pow10(-12));
    }

    #[test]
    fn constant_data_gives_zero() {
        let c = HighReal::from_decimal("0.37").unwrap();
        let pts = vec![(hr(1), c.clone()), (hr(2), c.clone()), (hr(4), c)];
        let s = loglog_slope(&pts).unwrap();
        assert!(s.abs() < HighReal::pow10(-12));
    }

    #[test]
    fn recovers_fractional_exponent() {
        // y = 3 · x^0.7 on x = 2^{-j}, j = 1..10
        let p7 = HighReal::from_decimal("0.7").unwrap();
        let three = hr(3);
        let pts: Vec<_> = (1..=10)
            .map(|j| {
                let x = HighReal::two().powi(-j);
                let y = three.clone() * x.powf(&p7);
                (x, y)
            })
            .collect();
        let s = loglog_slope(&pts).unwrap();
        assert!((s - p7).abs() < HighReal::pow10(-12));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(loglog_slope(&[(1.0f64, 1.0), (2.0, 4.0)]).is_err());
        assert!(loglog_slope(&[(1.0f64, 1.0), (2.0, -4.0), (3.0, 9.0)]).is_err());
    }
}

//! Cross-ratio and ratio-distortion tools, with exact coincident-point
//! limits and the normalized residuals that make the second-order
//! expansion and the distortion bound testable claims.
//!
//! For a strictly increasing f,
//!
//! ```text
//! Cr(x₁,x₂,x₃,x₄)   = (x₁−x₂)(x₃−x₄) / ((x₂−x₃)(x₄−x₁))
//! Dist(x;f)         = Cr(f(x₁),…,f(x₄)) / Cr(x₁,…,x₄)
//! D(x₁,x₂,x₃;f)     = [(f(x₁)−f(x₂))/(x₁−x₂)] : [(f(x₂)−f(x₃))/(x₂−x₃)]
//! ```
//!
//! Coincident points are handled by substituting f′ for the collapsed
//! difference quotient — exactly, not by a numerical limit.

use crate::error::{Error, Result};
use crate::numerics::real::Real;

/// Four real-line coordinates (on the circle: lift coordinates within one
/// fundamental domain).
#[derive(Clone, Debug)]
pub struct FourPoints<R: Real> {
    pub x1: R,
    pub x2: R,
    pub x3: R,
    pub x4: R,
}

impl<R: Real> FourPoints<R> {
    pub fn new(x1: R, x2: R, x3: R, x4: R) -> Self {
        FourPoints { x1, x2, x3, x4 }
    }

    fn as_array(&self) -> [&R; 4] {
        [&self.x1, &self.x2, &self.x3, &self.x4]
    }

    /// Δ = max − min over the four coordinates.
    pub fn spread(&self) -> R {
        let xs = self.as_array();
        let mut lo = xs[0].clone();
        let mut hi = xs[0].clone();
        for x in &xs[1..] {
            lo = lo.min_with(x);
            hi = hi.max_with(x);
        }
        hi - lo
    }
}

/// A monotone map with a first derivative: enough for ratio distortions
/// and their coincident-point limits.
pub trait C1Monotone<R: Real> {
    fn eval(&self, x: &R) -> R;
    fn deriv(&self, x: &R) -> R;
}

/// A C²⁺ᵅ test function on a closed interval, with the data the residual
/// normalizations need.
#[derive(Clone)]
pub struct SmoothTestFunction<R: Real> {
    f: std::sync::Arc<dyn Fn(&R) -> R + Send + Sync>,
    d1: std::sync::Arc<dyn Fn(&R) -> R + Send + Sync>,
    d2: std::sync::Arc<dyn Fn(&R) -> R + Send + Sync>,
    alpha: R,
    domain: (R, R),
}

impl<R: Real> std::fmt::Debug for SmoothTestFunction<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SmoothTestFunction(alpha = {}, domain = [{}, {}])",
            self.alpha, self.domain.0, self.domain.1
        )
    }
}

impl<R: Real> C1Monotone<R> for SmoothTestFunction<R> {
    fn eval(&self, x: &R) -> R {
        (self.f)(x)
    }

    fn deriv(&self, x: &R) -> R {
        (self.d1)(x)
    }
}

impl<R: Real> SmoothTestFunction<R> {
    pub fn new(
        f: impl Fn(&R) -> R + Send + Sync + 'static,
        d1: impl Fn(&R) -> R + Send + Sync + 'static,
        d2: impl Fn(&R) -> R + Send + Sync + 'static,
        alpha: R,
        domain: (R, R),
    ) -> Self {
        SmoothTestFunction {
            f: std::sync::Arc::new(f),
            d1: std::sync::Arc::new(d1),
            d2: std::sync::Arc::new(d2),
            alpha,
            domain,
        }
    }

    pub fn second(&self, x: &R) -> R {
        (self.d2)(x)
    }

    pub fn alpha(&self) -> &R {
        &self.alpha
    }

    pub fn domain(&self) -> &(R, R) {
        &self.domain
    }

    pub fn contains(&self, x: &R) -> bool {
        *x >= self.domain.0 && *x <= self.domain.1
    }

    /// f(x) = a·x + b, a > 0.
    pub fn affine(a: R, b: R, domain: (R, R)) -> Self {
        let a2 = a.clone();
        Self::new(
            move |x: &R| a.clone() * x.clone() + b.clone(),
            move |_: &R| a2.clone(),
            |_: &R| R::zero(),
            R::one(),
            domain,
        )
    }

    /// Increasing Möbius map −1/(x + c); the domain must avoid −c.
    pub fn mobius(c: R, domain: (R, R)) -> Self {
        let c1 = c.clone();
        let c2 = c.clone();
        Self::new(
            move |x: &R| -(R::one() / (x.clone() + c.clone())),
            move |x: &R| {
                let d = x.clone() + c1.clone();
                R::one() / (d.clone() * d)
            },
            move |x: &R| {
                let d = x.clone() + c2.clone();
                -(R::two() / (d.clone() * d.clone() * d))
            },
            R::one(),
            domain,
        )
    }

    /// f(x) = x² on a positive domain.
    pub fn square(domain: (R, R)) -> Self {
        Self::new(
            |x: &R| x.clone() * x.clone(),
            |x: &R| R::two() * x.clone(),
            |_: &R| R::two(),
            R::one(),
            domain,
        )
    }

    pub fn exp_fn(domain: (R, R)) -> Self {
        Self::new(
            |x: &R| x.exp(),
            |x: &R| x.exp(),
            |x: &R| x.exp(),
            R::one(),
            domain,
        )
    }

    /// f(x) = x + a·sin(2πx)/(2π); a diffeomorphism lift for |a| < 1.
    pub fn sine_perturbation(a: R, domain: (R, R)) -> Self {
        let two_pi = R::two() * R::pi();
        let (tp1, tp2, tp3) = (two_pi.clone(), two_pi.clone(), two_pi);
        let a1 = a.clone();
        let a2 = a.clone();
        Self::new(
            move |x: &R| x.clone() + a.clone() * (tp1.clone() * x.clone()).sin() / tp1.clone(),
            move |x: &R| R::one() + a1.clone() * (tp2.clone() * x.clone()).cos(),
            move |x: &R| -(a2.clone() * tp3.clone() * (tp3.clone() * x.clone()).sin()),
            R::one(),
            domain,
        )
    }

    /// The composition f ∘ g with chain-rule derivatives.
    pub fn compose(f: &Self, g: &Self) -> Self {
        let (ff, fd1, fd2) = (f.f.clone(), f.d1.clone(), f.d2.clone());
        let (gf, gd1, gd2) = (g.f.clone(), g.d1.clone(), g.d2.clone());
        let (gf2, gf3) = (g.f.clone(), g.f.clone());
        let (fd1b, gd1b) = (f.d1.clone(), g.d1.clone());
        let alpha = f.alpha.clone().min_with(&g.alpha);
        Self::new(
            move |x: &R| ff(&gf(x)),
            move |x: &R| fd1(&gf2(x)) * gd1(x),
            move |x: &R| {
                let gx = gf3(x);
                let dg = gd1b(x);
                fd2(&gx) * dg.clone() * dg + fd1b(&gx) * gd2(x)
            },
            alpha,
            g.domain.clone(),
        )
    }
}

/// Cross-ratio of four pairwise distinct points.
pub fn cross_ratio<R: Real>(p: &FourPoints<R>) -> Result<R> {
    let num = (p.x1.clone() - p.x2.clone()) * (p.x3.clone() - p.x4.clone());
    let den = (p.x2.clone() - p.x3.clone()) * (p.x4.clone() - p.x1.clone());
    if den.is_zero() {
        return Err(Error::precondition(
            "cross-ratio undefined: coincident points in the denominator",
        ));
    }
    Ok(num / den)
}

/// Difference quotient (f(a) − f(b)) / (a − b), replaced by f′(a) when
/// the points coincide exactly.
fn slope_or_deriv<R: Real>(
    a: &R,
    b: &R,
    fa: &R,
    fb: &R,
    deriv_at_a: impl FnOnce() -> R,
) -> R {
    if a == b {
        deriv_at_a()
    } else {
        (fa.clone() - fb.clone()) / (a.clone() - b.clone())
    }
}

/// Ratio distortion from precomputed values.
///
/// `x` and `fx` are the points and their images; `deriv(i)` supplies
/// f′(x_i) and is called only if a coincident pair shows up.
pub fn ratio_distortion_values<R: Real>(
    x: &[R; 3],
    fx: &[R; 3],
    deriv: impl Fn(usize) -> R,
) -> Result<R> {
    let upper = slope_or_deriv(&x[0], &x[1], &fx[0], &fx[1], || deriv(0));
    let lower = slope_or_deriv(&x[1], &x[2], &fx[1], &fx[2], || deriv(1));
    if lower.is_zero() {
        return Err(Error::precondition(
            "ratio distortion undefined: zero lower slope",
        ));
    }
    Ok(upper / lower)
}

/// Ratio distortion D(x₁,x₂,x₃; f) of three points under a monotone map.
pub fn ratio_distortion<R: Real>(
    x1: &R,
    x2: &R,
    x3: &R,
    f: &impl C1Monotone<R>,
) -> Result<R> {
    let x = [x1.clone(), x2.clone(), x3.clone()];
    let fx = [f.eval(x1), f.eval(x2), f.eval(x3)];
    ratio_distortion_values(&x, &fx, |i| f.deriv(&x[i]))
}

/// Cross-ratio distortion Dist(x; f) = Cr(f(x)) / Cr(x), with coincident
/// pairs resolved through derivative limits.
pub fn cross_ratio_distortion<R: Real>(
    p: &FourPoints<R>,
    f: &impl C1Monotone<R>,
) -> Result<R> {
    // Write Cr(f(x))/Cr(x) as a product of four slope ratios so each
    // factor has its own derivative limit:
    //   Dist = [s(1,2) · s(3,4)] / [s(2,3) · s(4,1)]
    // with s(i,j) = (f(x_i) − f(x_j)) / (x_i − x_j).
    let xs = p.as_array();
    let fx: Vec<R> = xs.iter().map(|x| f.eval(x)).collect();
    let slope = |i: usize, j: usize| -> R {
        slope_or_deriv(xs[i], xs[j], &fx[i], &fx[j], || f.deriv(xs[i]))
    };
    let den = slope(1, 2) * slope(3, 0);
    if den.is_zero() {
        return Err(Error::precondition(
            "cross-ratio distortion undefined: zero denominator slope",
        ));
    }
    Ok(slope(0, 1) * slope(2, 3) / den)
}

/// Normalized second-order expansion residual of the ratio distortion:
///
/// ```text
/// [ D(x₁,x₂,x₃;f) − 1 − (x₁−x₃)·f″(e)/(2f′(e)) ] / ( |x₁−x₃| · Δᵅ )
/// ```
///
/// where Δ is the spread of the triple and `e` is any evaluation point
/// between min and max. Boundedness of this quantity as Δ → 0 is the
/// testable form of the expansion.
pub fn dr_expansion_residual<R: Real>(
    x1: &R,
    x2: &R,
    x3: &R,
    f: &SmoothTestFunction<R>,
    eval_point: &R,
) -> Result<R> {
    for x in [x1, x2, x3] {
        if !f.contains(x) {
            return Err(Error::precondition("point outside the test-function domain"));
        }
    }
    let lo = x1.min_with(x2).min_with(x3);
    let hi = x1.max_with(x2).max_with(x3);
    if *eval_point < lo || *eval_point > hi {
        return Err(Error::precondition(
            "eval_point must lie between min and max of the triple",
        ));
    }
    let spread = hi - lo;
    if spread.is_zero() {
        return Err(Error::precondition("degenerate triple: zero spread"));
    }
    let d = ratio_distortion(x1, x2, x3, f)?;
    let correction =
        (x1.clone() - x3.clone()) * f.second(eval_point) / (R::two() * f.deriv(eval_point));
    let num = d - R::one() - correction;
    let norm = (x1.clone() - x3.clone()).abs() * spread.powf(f.alpha());
    Ok(num / norm)
}

/// Normalized distortion-bound residual |log Dist| / (|x₁−x₃| · Δᵅ),
/// with Δ the spread of the quadruple.
pub fn dist_bound_residual<R: Real>(
    p: &FourPoints<R>,
    f: &SmoothTestFunction<R>,
) -> Result<R> {
    for x in p.as_array() {
        if !f.contains(x) {
            return Err(Error::precondition("point outside the test-function domain"));
        }
    }
    let spread = p.spread();
    if spread.is_zero() {
        return Err(Error::precondition("degenerate quadruple: zero spread"));
    }
    let dist = cross_ratio_distortion(p, f)?;
    if !dist.is_positive() {
        return Err(Error::invariant(format!(
            "cross-ratio distortion must be positive for monotone f, got {dist}"
        )));
    }
    let num = dist.ln().abs();
    let norm = (p.x1.clone() - p.x3.clone()).abs() * spread.powf(f.alpha());
    Ok(num / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real::{prec_tol, HighReal, Real};
    use num_traits::{FromPrimitive, One, Signed, Zero};

    type H = HighReal;

    fn hr(s: &str) -> H {
        H::from_decimal(s).unwrap()
    }

    fn hu(u: u64) -> H {
        H::from_u64(u).unwrap()
    }

    fn wide() -> (H, H) {
        (hr("-10"), hr("10"))
    }

    #[test]
    fn cross_ratio_equally_spaced() {
        let third = -(H::one() / hu(3));
        for pts in [
            FourPoints::new(hu(0), hu(1), hu(2), hu(3)),
            FourPoints::new(hr("0"), hr("0.25"), hr("0.5"), hr("0.75")),
            FourPoints::new(hu(1), hu(2), hu(3), hu(4)),
        ] {
            let cr = cross_ratio(&pts).unwrap();
            assert!((cr - third.clone()).abs() < prec_tol::<H>(5));
        }
    }

    #[test]
    fn ratio_distortion_square_examples() {
        let f = SmoothTestFunction::square(wide());
        let d = ratio_distortion(&hu(1), &hu(2), &hu(3), &f).unwrap();
        assert!((d - hr("0.6")).abs() < prec_tol::<H>(5));

        // coincident-pair limit: D(1,1,2) = f'(1)/slope(1,2) = 2/3
        let d = ratio_distortion(&hu(1), &hu(1), &hu(2), &f).unwrap();
        assert!((d - hu(2) / hu(3)).abs() < prec_tol::<H>(5));
    }

    #[test]
    fn affine_gives_unit_distortion() {
        let f = SmoothTestFunction::affine(hr("2.5"), hr("-0.75"), wide());
        let d = ratio_distortion(&hr("0.3"), &hr("-1.2"), &hr("4.5"), &f).unwrap();
        assert!((d - H::one()).abs() < prec_tol::<H>(5));
        let p = FourPoints::new(hr("-3"), hr("0.5"), hr("2"), hr("7"));
        let dist = cross_ratio_distortion(&p, &f).unwrap();
        assert!((dist - H::one()).abs() < prec_tol::<H>(5));
    }

    #[test]
    fn mobius_preserves_cross_ratio() {
        let f = SmoothTestFunction::mobius(hu(2), (hr("-1"), hr("1.5")));
        let p = FourPoints::new(hr("-0.5"), hr("0.25"), hr("0.75"), hr("1.25"));
        let dist = cross_ratio_distortion(&p, &f).unwrap();
        assert!((dist - H::one()).abs() < prec_tol::<H>(5));
        let r = dist_bound_residual(&p, &f).unwrap();
        assert!(r.abs() < prec_tol::<H>(5));
    }

    #[test]
    fn square_cross_ratio_distortion_21_25() {
        let f = SmoothTestFunction::square(wide());
        let p = FourPoints::new(hu(1), hu(2), hu(3), hu(4));
        let dist = cross_ratio_distortion(&p, &f).unwrap();
        let expect = hu(21) / hu(25);
        assert!((dist.clone() - expect).abs() < prec_tol::<H>(5));
        // Dist = D(x1,x2,x3)/D(x1,x4,x3) = (3/5)/(5/7)
        let d123 = ratio_distortion(&hu(1), &hu(2), &hu(3), &f).unwrap();
        let d143 = ratio_distortion(&hu(1), &hu(4), &hu(3), &f).unwrap();
        assert!((dist - d123 / d143).abs() < prec_tol::<H>(5));
    }

    #[test]
    fn expansion_residual_square_worked_example() {
        // f = x², triple (1,2,3), eval at 2 → 0.025
        let f = SmoothTestFunction::square(wide());
        let r = dr_expansion_residual(&hu(1), &hu(2), &hu(3), &f, &hu(2)).unwrap();
        assert!((r - hr("0.025")).abs() < prec_tol::<H>(5));
    }

    #[test]
    fn expansion_residual_affine_is_zero() {
        let f = SmoothTestFunction::affine(hu(3), hr("0.1"), wide());
        let r = dr_expansion_residual(&hr("0.5"), &hr("0.7"), &hr("1.1"), &f, &hr("0.8"))
            .unwrap();
        assert!(r.is_zero() || r.abs() < prec_tol::<H>(5));
    }

    #[test]
    fn expansion_residual_shrinking_triples_frozen_oracle() {
        // f = x², triple (1, 1+t, 1+2t), eval at midpoint 1+t.
        // Closed form: residual = 1 / (4(1+t)(2+3t)); frozen via exact
        // arithmetic, approaches 1/8 as t → 0.
        let f = SmoothTestFunction::square(wide());
        for j in [2, 6, 10, 20] {
            let t = H::two().powi(-j);
            let x1 = H::one();
            let x2 = H::one() + t.clone();
            let x3 = H::one() + H::two() * t.clone();
            let got = dr_expansion_residual(&x1, &x2, &x3, &f, &x2).unwrap();
            let expect = H::one()
                / (hu(4) * (H::one() + t.clone()) * (H::two() + hu(3) * t.clone()));
            assert!(
                (got.clone() - expect.clone()).abs() < prec_tol::<H>(8),
                "j={j}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn expansion_residual_bounded_in_all_three_orderings() {
        // Cases 1–3: x2 middle, x1 middle, x3 middle.
        let f = SmoothTestFunction::exp_fn(wide());
        let mut sup = H::zero();
        for j in 1..=24 {
            let t = H::two().powi(-j);
            let base = hr("0.3");
            let m0 = base.clone();
            let m1 = base.clone() + t.clone();
            let m2 = base.clone() + H::two() * t.clone();
            let orderings = [
                (m0.clone(), m1.clone(), m2.clone()),
                (m1.clone(), m0.clone(), m2.clone()),
                (m0.clone(), m2.clone(), m1.clone()),
            ];
            for (a, b, c) in orderings {
                let r = dr_expansion_residual(&a, &b, &c, &f, &m1).unwrap().abs();
                sup = sup.max_with(&r);
            }
        }
        assert!(sup < hu(2), "residual sup {sup} not O(1)");
    }

    #[test]
    fn dist_residual_bounded_on_shrinking_quadruples() {
        let f = SmoothTestFunction::square((hr("0.5"), hr("3")));
        let mut sup = H::zero();
        for j in 1..=24 {
            let t = H::two().powi(-j);
            let p = FourPoints::new(
                H::one(),
                H::one() + t.clone(),
                H::one() + H::two() * t.clone(),
                H::one() + hu(3) * t.clone(),
            );
            let r = dist_bound_residual(&p, &f).unwrap();
            sup = sup.max_with(&r);
        }
        assert!(sup < hu(2), "residual sup {sup}");
    }

    #[test]
    fn multiplicativity_under_composition() {
        // D(x; f∘g) = D(x; g) · D(g(x); f), and likewise for Dist.
        let g = SmoothTestFunction::sine_perturbation(hr("0.6"), wide());
        let f = SmoothTestFunction::exp_fn(wide());
        let fg = SmoothTestFunction::compose(&f, &g);
        let tol = prec_tol::<H>(5);

        let (x1, x2, x3) = (hr("0.12"), hr("0.45"), hr("0.83"));
        let lhs = ratio_distortion(&x1, &x2, &x3, &fg).unwrap();
        let inner = ratio_distortion(&x1, &x2, &x3, &g).unwrap();
        let outer =
            ratio_distortion(&g.eval(&x1), &g.eval(&x2), &g.eval(&x3), &f).unwrap();
        assert!((lhs - inner * outer).abs() < tol);

        let p = FourPoints::new(hr("0.1"), hr("0.3"), hr("0.55"), hr("0.9"));
        let gp = FourPoints::new(
            g.eval(&p.x1),
            g.eval(&p.x2),
            g.eval(&p.x3),
            g.eval(&p.x4),
        );
        let lhs = cross_ratio_distortion(&p, &fg).unwrap();
        let rhs = cross_ratio_distortion(&p, &g).unwrap()
            * cross_ratio_distortion(&gp, &f).unwrap();
        assert!((lhs - rhs).abs() < tol);
    }

    #[test]
    fn dist_equals_ratio_of_ratio_distortions_randomized() {
        // 10³ random admissible quadruples against the identity
        // Dist(x₁..x₄; f) = D(x₁,x₂,x₃; f) / D(x₁,x₄,x₃; f).
        let f = SmoothTestFunction::sine_perturbation(hr("0.85"), wide());
        let tol = prec_tol::<H>(5);
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64
        };
        for trial in 0..1000 {
            let base = next() * 6.0 - 3.0;
            let mut offs = [0.0f64; 3];
            for o in offs.iter_mut() {
                *o = next() * 2.0 + 1e-3;
            }
            let x1 = H::from_f64(base).unwrap();
            let x2 = x1.clone() + H::from_f64(offs[0]).unwrap();
            let x3 = x2.clone() + H::from_f64(offs[1]).unwrap();
            let x4 = x3.clone() + H::from_f64(offs[2]).unwrap();
            let p = FourPoints::new(x1.clone(), x2.clone(), x3.clone(), x4.clone());
            let dist = cross_ratio_distortion(&p, &f).unwrap();
            let d123 = ratio_distortion(&x1, &x2, &x3, &f).unwrap();
            let d143 = ratio_distortion(&x1, &x4, &x3, &f).unwrap();
            let diff = (dist - d123 / d143).abs();
            assert!(diff < tol, "trial {trial}: diff {diff}");
        }
    }

    #[test]
    fn rejects_degenerate_and_out_of_domain() {
        let f = SmoothTestFunction::square((hu(0), hu(2)));
        assert!(cross_ratio(&FourPoints::new(hu(1), hu(1), hu(2), hu(1))).is_err());
        assert!(dr_expansion_residual(&hu(1), &hu(1), &hu(1), &f, &hu(1)).is_err());
        assert!(dr_expansion_residual(&hu(0), &hu(1), &hu(3), &f, &hu(1)).is_err());
        assert!(dr_expansion_residual(&hu(0), &hu(1), &hu(2), &f, &hr("1.99")).is_ok());
        assert!(dr_expansion_residual(&hu(0), &hu(1), &hu(2), &f, &hr("2.01")).is_err());
    }
}

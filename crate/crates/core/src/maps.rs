//! Orientation-preserving circle diffeomorphisms: analytic families with
//! degree-1 lifts, first and second derivatives, orbits stored as lift
//! values, and O(1) derivative-of-iterate queries through compensated
//! prefix sums of log T′.

use crate::error::{Error, Result};
use crate::numerics::circle::{mod1, CirclePoint};
use crate::numerics::real::{prec_tol, Real};
use crate::numerics::search::minimize_on_circle;
use crate::numerics::sum::CompensatedSum;

/// Default hard cap on orbit length.
pub const DEFAULT_ORBIT_CAP: usize = 10_000_000;

/// Grid resolution for the derivative-positivity check at construction.
const D1_CHECK_GRID: usize = 1 << 14;

#[derive(Clone, Debug)]
enum MapKind<R: Real> {
    /// ξ ↦ ξ + ρ
    Rotation { rho: R },
    /// lift x + t + (a/2π)·sin(2πx)
    Arnold { t: R, a: R },
    /// lift x + t + (a1/2π)·sin(2πx) + (a2/4π)·sin(4πx + 1/3)
    TwoHarmonic { t: R, a1: R, a2: R },
}

/// An orientation-preserving circle diffeomorphism with two derivatives
/// and a Hölder-exponent tag for its second derivative.
#[derive(Clone, Debug)]
pub struct CircleMap<R: Real> {
    kind: MapKind<R>,
    alpha: R,
}

impl<R: Real> CircleMap<R> {
    /// Rigid rotation by `rho ∈ (0, 1)`.
    pub fn rotation(rho: R) -> Result<Self> {
        if !rho.is_finite() || !rho.is_positive() || rho >= R::one() {
            return Err(Error::precondition(format!(
                "rotation angle must lie in (0,1), got {rho}"
            )));
        }
        Ok(CircleMap {
            kind: MapKind::Rotation { rho },
            alpha: R::one(),
        })
    }

    /// Arnold map with lift x + t + (a/2π)·sin(2πx); |a| < 1.
    pub fn arnold(t: R, a: R) -> Result<Self> {
        Family::arnold(a)?.at(t)
    }

    /// Two-harmonic map; the asymmetric second harmonic breaks the odd
    /// symmetry of the Arnold family so the invariant density is
    /// nonconstant in a generic way.
    pub fn two_harmonic(t: R, a1: R, a2: R) -> Result<Self> {
        Family::two_harmonic(a1, a2)?.at(t)
    }

    /// Hölder tag α ∈ (0, 1] for T″; analytic families carry α = 1.
    pub fn alpha(&self) -> &R {
        &self.alpha
    }

    /// Degree-1 lift L(x); L(x+1) = L(x) + 1.
    pub fn lift(&self, x: &R) -> R {
        match &self.kind {
            MapKind::Rotation { rho } => x.clone() + rho.clone(),
            MapKind::Arnold { t, a } => {
                let two_pi = R::two() * R::pi();
                x.clone() + t.clone() + a.clone() * (two_pi.clone() * x.clone()).sin() / two_pi
            }
            MapKind::TwoHarmonic { t, a1, a2 } => {
                let two_pi = R::two() * R::pi();
                let four_pi = R::two() * two_pi.clone();
                let phase = R::one() / R::from_u64(3).unwrap();
                x.clone()
                    + t.clone()
                    + a1.clone() * (two_pi.clone() * x.clone()).sin() / two_pi
                    + a2.clone() * (four_pi.clone() * x.clone() + phase).sin() / four_pi
            }
        }
    }

    /// Lift derivative (1-periodic, strictly positive).
    pub fn d1(&self, x: &R) -> R {
        match &self.kind {
            MapKind::Rotation { .. } => R::one(),
            MapKind::Arnold { a, .. } => {
                let two_pi = R::two() * R::pi();
                R::one() + a.clone() * (two_pi * x.clone()).cos()
            }
            MapKind::TwoHarmonic { a1, a2, .. } => {
                let two_pi = R::two() * R::pi();
                let four_pi = R::two() * two_pi.clone();
                let phase = R::one() / R::from_u64(3).unwrap();
                R::one()
                    + a1.clone() * (two_pi * x.clone()).cos()
                    + a2.clone() * (four_pi * x.clone() + phase).cos()
            }
        }
    }

    /// Second derivative of the lift (1-periodic).
    pub fn d2(&self, x: &R) -> R {
        match &self.kind {
            MapKind::Rotation { .. } => R::zero(),
            MapKind::Arnold { a, .. } => {
                let two_pi = R::two() * R::pi();
                -(a.clone() * two_pi.clone() * (two_pi * x.clone()).sin())
            }
            MapKind::TwoHarmonic { a1, a2, .. } => {
                let two_pi = R::two() * R::pi();
                let four_pi = R::two() * two_pi.clone();
                let phase = R::one() / R::from_u64(3).unwrap();
                -(a1.clone() * two_pi.clone() * (two_pi * x.clone()).sin())
                    - a2.clone() * four_pi.clone() * (four_pi * x.clone() + phase).sin()
            }
        }
    }

    /// One step on the circle.
    pub fn apply(&self, p: &CirclePoint<R>) -> CirclePoint<R> {
        mod1(self.lift(p.position())).expect("lift of a finite point is finite")
    }

    /// Text descriptor, decimal parameters at full precision;
    /// `parse_descriptor` reproduces the map bit-exactly.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            MapKind::Rotation { rho } => {
                format!("family=rotation rho={}", rho.to_decimal_full())
            }
            MapKind::Arnold { t, a } => format!(
                "family=arnold t={} a={}",
                t.to_decimal_full(),
                a.to_decimal_full()
            ),
            MapKind::TwoHarmonic { t, a1, a2 } => format!(
                "family=two_harmonic t={} a1={} a2={}",
                t.to_decimal_full(),
                a1.to_decimal_full(),
                a2.to_decimal_full()
            ),
        }
    }

    pub fn parse_descriptor(s: &str) -> Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| {
                Error::precondition(format!("descriptor token {tok:?} is not key=value"))
            })?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| -> Result<R> {
            let v = fields
                .get(k)
                .ok_or_else(|| Error::precondition(format!("descriptor missing {k}")))?;
            R::from_decimal(v)
                .ok_or_else(|| Error::precondition(format!("unparsable {k}={v}")))
        };
        match fields.get("family").map(String::as_str) {
            Some("rotation") => Self::rotation(get("rho")?),
            Some("arnold") => Self::arnold(get("t")?, get("a")?),
            Some("two_harmonic") => Self::two_harmonic(get("t")?, get("a1")?, get("a2")?),
            other => Err(Error::precondition(format!(
                "unknown family {other:?} in descriptor"
            ))),
        }
    }
}

/// A one-parameter family t ↦ T_t with the t-independent validity checks
/// done once; tuning sweeps `at(t)` thousands of times.
#[derive(Clone, Debug)]
pub struct Family<R: Real> {
    proto: MapKind<R>,
}

impl<R: Real> Family<R> {
    /// The rotation family t ↦ R_t (the a = 0 Arnold family).
    pub fn rotations() -> Self {
        Family {
            proto: MapKind::Rotation { rho: R::zero() },
        }
    }

    /// Whether this is the rotation family, for which ρ(T_t) = t.
    pub fn is_identity(&self) -> bool {
        matches!(self.proto, MapKind::Rotation { .. })
    }

    pub fn arnold(a: R) -> Result<Self> {
        if !a.is_finite() || a.abs() >= R::one() {
            return Err(Error::precondition(format!(
                "not a diffeomorphism: arnold needs |a| < 1, got a = {a}"
            )));
        }
        if a.is_zero() {
            // the degenerate member is the rotation family, for which
            // tuning is exact
            return Ok(Self::rotations());
        }
        Ok(Family {
            proto: MapKind::Arnold { t: R::zero(), a },
        })
    }

    pub fn two_harmonic(a1: R, a2: R) -> Result<Self> {
        if !a1.is_finite() || !a2.is_finite() {
            return Err(Error::NonFinite("two_harmonic coefficients"));
        }
        let probe = CircleMap {
            kind: MapKind::TwoHarmonic {
                t: R::zero(),
                a1: a1.clone(),
                a2: a2.clone(),
            },
            alpha: R::one(),
        };
        // d1 does not depend on t; scan once per family.
        let (_, min_d1) =
            minimize_on_circle(|p| probe.d1(p.position()), D1_CHECK_GRID, 40)?;
        if min_d1 <= prec_tol::<R>(8) {
            return Err(Error::precondition(format!(
                "not a diffeomorphism: min d1 = {min_d1} for a1 = {a1}, a2 = {a2}"
            )));
        }
        Ok(Family { proto: probe.kind })
    }

    /// The family member at lift parameter `t`.
    pub fn at(&self, t: R) -> Result<CircleMap<R>> {
        if !t.is_finite() {
            return Err(Error::NonFinite("family parameter t"));
        }
        let kind = match &self.proto {
            MapKind::Rotation { .. } => {
                // reduce to (0,1): the rotation family is 1-periodic in t
                let rho = mod1(t)?.into_position();
                if rho.is_zero() {
                    return Err(Error::precondition(
                        "rotation angle 0 has a fixed point",
                    ));
                }
                MapKind::Rotation { rho }
            }
            MapKind::Arnold { a, .. } => MapKind::Arnold { t, a: a.clone() },
            MapKind::TwoHarmonic { a1, a2, .. } => MapKind::TwoHarmonic {
                t,
                a1: a1.clone(),
                a2: a2.clone(),
            },
        };
        Ok(CircleMap {
            kind,
            alpha: R::one(),
        })
    }
}

/// A marked trajectory held as lift values, with compensated prefix sums
/// of log T′ along it.
#[derive(Clone, Debug)]
pub struct Orbit<R: Real> {
    base: CirclePoint<R>,
    /// x_i = L^i(x₀) for 0 ≤ i ≤ N.
    lift_points: Vec<R>,
    /// prefix[i] = Σ_{j<i} log T′(ξ_j); prefix[0] = 0.
    log_d1_prefix: Vec<R>,
}

impl<R: Real> Orbit<R> {
    /// Number of steps N (the orbit holds N + 1 points).
    pub fn len(&self) -> usize {
        self.lift_points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn base(&self) -> &CirclePoint<R> {
        &self.base
    }

    /// Lift value x_i.
    pub fn lift(&self, i: usize) -> &R {
        &self.lift_points[i]
    }

    /// ξ_i as a circle point.
    pub fn point(&self, i: usize) -> CirclePoint<R> {
        mod1(self.lift_points[i].clone()).expect("orbit points are finite")
    }

    pub fn log_d1_prefix(&self, i: usize) -> &R {
        &self.log_d1_prefix[i]
    }

    /// (Tⁿ)′(ξ_i) = exp(prefix[i+n] − prefix[i]); exact chain rule over
    /// the stored trajectory, O(1) per query.
    pub fn iterate_derivative(&self, i: usize, n: usize) -> Result<R> {
        let end = i.checked_add(n).filter(|&e| e <= self.len()).ok_or_else(|| {
            Error::precondition(format!(
                "iterate_derivative window {i}+{n} exceeds orbit length {}",
                self.len()
            ))
        })?;
        Ok((self.log_d1_prefix[end].clone() - self.log_d1_prefix[i].clone()).exp())
    }

    /// log (Tⁿ)′(ξ_i) without exponentiating.
    pub fn log_iterate_derivative(&self, i: usize, n: usize) -> Result<R> {
        let end = i.checked_add(n).filter(|&e| e <= self.len()).ok_or_else(|| {
            Error::precondition(format!(
                "iterate window {i}+{n} exceeds orbit length {}",
                self.len()
            ))
        })?;
        Ok(self.log_d1_prefix[end].clone() - self.log_d1_prefix[i].clone())
    }
}

/// Computes the marked trajectory of length `n` from `xi0`.
pub fn orbit<R: Real>(
    map: &CircleMap<R>,
    xi0: &CirclePoint<R>,
    n: usize,
    cap: usize,
) -> Result<Orbit<R>> {
    if n > cap {
        return Err(Error::ResourceCap {
            what: "orbit length".into(),
            needed: n,
            cap,
        });
    }
    let mut lift_points = Vec::with_capacity(n + 1);
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = CompensatedSum::new();
    let mut x = xi0.position().clone();
    lift_points.push(x.clone());
    prefix.push(R::zero());
    for i in 0..n {
        let d = map.d1(&x);
        if !d.is_positive() {
            return Err(Error::invariant(format!(
                "derivative not positive at orbit step {i}: d1 = {d}"
            )));
        }
        acc.add(d.ln());
        prefix.push(acc.total());
        x = map.lift(&x);
        if !x.is_finite() {
            return Err(Error::NonFinite("orbit lift value"));
        }
        lift_points.push(x.clone());
    }
    Ok(Orbit {
        base: xi0.clone(),
        lift_points,
        log_d1_prefix: prefix,
    })
}

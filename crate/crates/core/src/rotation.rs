//! Rotation numbers two ways — Birkhoff averages for coarse bracketing
//! and partial-quotient extraction from the combinatorics of dynamical
//! convergents — plus parameter tuning that prescribes a target
//! continued fraction to a monotone family.
//!
//! All signed quantities live on the lift: the displacement
//! s_n(ξ) = L^{q_n}(x) − x − p_n keeps the (−1)ⁿ alternation of the
//! dynamical convergents that mod-1 representatives would destroy.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::cfarith::{big_to_real, cf_from_quotients, ContinuedFraction};
use crate::error::{Error, Result};
use crate::maps::{CircleMap, Family};
use crate::numerics::circle::CirclePoint;
use crate::numerics::real::{prec_tol, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    Birkhoff,
    DynamicalCf,
}

/// A rotation-number estimate with a certified residual bound.
#[derive(Clone, Debug)]
pub struct RotationEstimate<R: Real> {
    pub value: R,
    pub method: EstimateMethod,
    /// Partial quotients certified (0 for Birkhoff).
    pub levels: usize,
    pub residual: R,
}

/// Birkhoff estimate (L_Tᴺ(x) − x)/N with residual bound 1/N.
///
/// Coarse by construction; used only for bracketing and cross-checks.
pub fn rotation_number_birkhoff<R: Real>(
    map: &CircleMap<R>,
    xi0: &CirclePoint<R>,
    n: usize,
    cap: usize,
) -> Result<RotationEstimate<R>> {
    if n < 100 {
        return Err(Error::precondition(format!(
            "Birkhoff estimate needs N >= 100, got {n}"
        )));
    }
    if n > cap {
        return Err(Error::ResourceCap {
            what: "Birkhoff orbit".into(),
            needed: n,
            cap,
        });
    }
    let mut x = xi0.position().clone();
    for _ in 0..n {
        x = map.lift(&x);
    }
    let nr = R::from_usize(n).unwrap();
    Ok(RotationEstimate {
        value: (x - xi0.position().clone()) / nr.clone(),
        method: EstimateMethod::Birkhoff,
        levels: 0,
        residual: R::one() / nr,
    })
}

/// Result of the dynamical partial-quotient extraction: the quotients,
/// their exact convergents, and the signed displacements s_n(ξ₀).
#[derive(Clone, Debug)]
pub struct DynamicalCf<R: Real> {
    quotients: Vec<u64>,
    /// p₋₁ … p_N (offset one).
    p: Vec<BigInt>,
    /// q₋₁ … q_N (offset one).
    q: Vec<BigInt>,
    /// s₋₁ … s_N: signed lift displacements at the marked point.
    s: Vec<R>,
    steps_used: usize,
}

impl<R: Real> DynamicalCf<R> {
    pub fn levels(&self) -> usize {
        self.quotients.len()
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn p(&self, n: isize) -> &BigInt {
        &self.p[(n + 1) as usize]
    }

    pub fn q(&self, n: isize) -> &BigInt {
        &self.q[(n + 1) as usize]
    }

    /// Signed displacement s_n(ξ₀) = L^{q_n}(x₀) − x₀ − p_n.
    pub fn displacement(&self, n: isize) -> &R {
        &self.s[(n + 1) as usize]
    }

    pub fn steps_used(&self) -> usize {
        self.steps_used
    }

    /// Best rotation-number estimate: the final convergent, with the
    /// classical residual bound 1/q_N².
    pub fn rho_estimate(&self) -> RotationEstimate<R> {
        let n = self.levels() as isize;
        let qn = big_to_real::<R>(self.q(n));
        RotationEstimate {
            value: big_to_real::<R>(self.p(n)) / qn.clone(),
            method: EstimateMethod::DynamicalCf,
            levels: self.levels(),
            residual: R::one() / (qn.clone() * qn),
        }
    }

    /// Continued-fraction view (value = final convergent).
    pub fn to_continued_fraction(&self) -> ContinuedFraction<R> {
        cf_from_quotients(self.rho_estimate().value, self.quotients.clone())
    }
}

enum StopReason {
    MaxLevel,
    StepBudget,
    /// The per-level count exceeded `count_cap` without a sign change.
    CountCap,
    /// The displacement collapsed below the precision floor.
    Collapse,
    /// The very first return already crossed the marked point.
    ZeroCount,
}

struct Extraction<R: Real> {
    cf: DynamicalCf<R>,
    stop: StopReason,
    /// Returns already counted at the level in progress when the scan
    /// stopped: a lower bound on the next partial quotient.
    partial_count: u64,
}

/// Core extraction loop shared by the public API and the tuner.
///
/// `on_level` sees each new quotient and may stop the scan early
/// (returning false) — the tuner uses this for mismatch early-exit.
fn extract<R: Real>(
    map: &CircleMap<R>,
    xi0: &CirclePoint<R>,
    max_level: usize,
    step_budget: usize,
    count_cap: u64,
    mut on_level: impl FnMut(usize, u64) -> bool,
) -> Extraction<R> {
    let x0 = xi0.position().clone();
    let floor = prec_tol::<R>(10);

    let mut quotients: Vec<u64> = Vec::new();
    let mut p = vec![BigInt::one(), BigInt::zero()];
    let mut q = vec![BigInt::zero(), BigInt::one()];
    let mut s = vec![-R::one(), map.lift(&x0) - x0.clone()];
    let mut steps_used = 1usize;

    let finish = |quotients: Vec<u64>, p, q, s, steps_used, stop, partial_count| Extraction {
        cf: DynamicalCf {
            quotients,
            p,
            q,
            s,
            steps_used,
        },
        stop,
        partial_count,
    };

    loop {
        let n = quotients.len(); // computing k_{n+1}
        if n >= max_level {
            return finish(quotients, p, q, s, steps_used, StopReason::MaxLevel, 0);
        }
        let s_prev = s[s.len() - 2].clone();
        let q_curr = match q[q.len() - 1].to_usize() {
            Some(v) => v,
            None => return finish(quotients, p, q, s, steps_used, StopReason::StepBudget, 0),
        };
        let p_curr_int = &p[p.len() - 1];
        let p_curr = big_to_real::<R>(p_curr_int);

        if steps_used + q_curr > step_budget {
            return finish(quotients, p, q, s, steps_used, StopReason::StepBudget, 0);
        }

        // walk ξ_{q_{n-1} + k·q_n} toward and past the marked point
        let prev_side_negative = s_prev.is_negative();
        let mut z = x0.clone() + s_prev;
        let mut count: u64 = 0;
        let mut last_inside = R::zero();
        loop {
            if steps_used + q_curr > step_budget {
                return finish(
                    quotients,
                    p,
                    q,
                    s,
                    steps_used,
                    StopReason::StepBudget,
                    count,
                );
            }
            for _ in 0..q_curr {
                z = map.lift(&z);
            }
            z = z - p_curr.clone();
            steps_used += q_curr;

            let disp = z.clone() - x0.clone();
            if disp.abs() < floor {
                // collapsed at the (count+1)-th return: the map sits at
                // the mediant rational (p_{n−1} + k·p_n)/(q_{n−1} + k·q_n)
                return finish(
                    quotients,
                    p,
                    q,
                    s,
                    steps_used,
                    StopReason::Collapse,
                    count + 1,
                );
            }
            if disp.is_negative() == prev_side_negative {
                count += 1;
                last_inside = disp;
                if count >= count_cap {
                    return finish(
                        quotients,
                        p,
                        q,
                        s,
                        steps_used,
                        StopReason::CountCap,
                        count,
                    );
                }
            } else {
                break;
            }
        }

        if count == 0 {
            return finish(quotients, p, q, s, steps_used, StopReason::ZeroCount, 0);
        }

        let kb = BigInt::from(count);
        let p_next = &kb * &p[p.len() - 1] + &p[p.len() - 2];
        let q_next = &kb * &q[q.len() - 1] + &q[q.len() - 2];
        quotients.push(count);
        p.push(p_next);
        q.push(q_next);
        s.push(last_inside);

        if !on_level(quotients.len(), count) {
            return finish(quotients, p, q, s, steps_used, StopReason::MaxLevel, 0);
        }
    }
}

/// Extracts the partial quotients of ρ(T) from the returns of the marked
/// orbit into its fundamental segments, maintaining the exact convergent
/// recurrences q_{n+1} = k_{n+1}q_n + q_{n−1}.
///
/// Errors with [`Error::PeriodicOrbit`] when the combinatorics degenerate
/// (a zero count or a collapsed segment — the signature of a numerically
/// rational rotation number), and with a resource error when the orbit
/// cap is hit first.
pub fn partial_quotients_dynamical<R: Real>(
    map: &CircleMap<R>,
    max_level: usize,
    xi0: &CirclePoint<R>,
    cap: usize,
) -> Result<DynamicalCf<R>> {
    let out = extract(map, xi0, max_level, cap, u64::MAX, |_, _| true);
    let level = out.cf.levels();
    match out.stop {
        StopReason::MaxLevel => Ok(out.cf),
        StopReason::StepBudget => Err(Error::ResourceCap {
            what: "dynamical quotient extraction".into(),
            needed: out.cf.steps_used,
            cap,
        }),
        StopReason::CountCap => unreachable!("count cap disabled"),
        StopReason::Collapse => Err(Error::PeriodicOrbit {
            level,
            detail: "fundamental segment collapsed below the precision floor".into(),
        }),
        StopReason::ZeroCount => Err(Error::PeriodicOrbit {
            level,
            detail: "zero return count: no dynamical convergent enters the segment".into(),
        }),
    }
}

/// Outcome of one tuning probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Probe {
    Below,
    Above,
    /// Indistinguishable from the target at the probe's resolution.
    Match,
}

/// Orders ρ(T_t) against the target through the alternating lexicographic
/// order of partial quotients: at odd positions a larger quotient means a
/// smaller value, at even positions a larger one.
fn quotient_order(position: usize, computed: u64, target: u64) -> Probe {
    debug_assert_ne!(computed, target);
    let computed_bigger = computed > target;
    let odd = position % 2 == 1;
    if computed_bigger == odd {
        Probe::Below
    } else {
        Probe::Above
    }
}

fn probe_order<R: Real>(
    family: &Family<R>,
    t: &R,
    target: &ContinuedFraction<R>,
    xi0: &CirclePoint<R>,
    max_level: usize,
    step_budget: usize,
) -> Result<Probe> {
    let map = match family.at(t.clone()) {
        Ok(m) => m,
        // a degenerate member (ρ hits an integer) sits at the bracket edge
        Err(_) => return Ok(Probe::Below),
    };
    let mut mismatch: Option<Probe> = None;
    let out = extract(
        &map,
        xi0,
        max_level,
        step_budget,
        // generous per-level cap; targets here have small quotients
        1 << 24,
        |level, k| {
            let want = target.k(level);
            if k != want {
                mismatch = Some(quotient_order(level, k, want));
                false
            } else {
                true
            }
        },
    );
    if let Some(m) = mismatch {
        return Ok(m);
    }
    let level = out.cf.levels();
    match out.stop {
        StopReason::MaxLevel => Ok(Probe::Match),
        StopReason::StepBudget | StopReason::CountCap => {
            // Stopped mid-count: the accumulated count is a lower bound
            // on the next quotient. Inside a mode-locking tongue the
            // count runs away, so the bound usually already exceeds the
            // target quotient and decides the order; otherwise the probe
            // is genuinely unresolved at this budget.
            if level + 1 <= target.levels() && out.partial_count > target.k(level + 1) {
                Ok(quotient_order(level + 1, out.partial_count, target.k(level + 1)))
            } else {
                Ok(Probe::Match)
            }
        }
        StopReason::Collapse => {
            // numerically rational at the mediant where the walk
            // collapsed; compare that rational with the (irrational)
            // target exactly
            let n = level as isize;
            let k = BigInt::from(out.partial_count);
            let p_rat = out.cf.p(n - 1) + &k * out.cf.p(n);
            let q_rat = out.cf.q(n - 1) + &k * out.cf.q(n);
            let diff =
                big_to_real::<R>(&p_rat) - big_to_real::<R>(&q_rat) * target.value().clone();
            if diff.is_negative() {
                Ok(Probe::Below)
            } else {
                Ok(Probe::Above)
            }
        }
        StopReason::ZeroCount => {
            // the walk crossed immediately: ρ sits at the boundary
            // convergent p_N/q_N of the matched prefix
            let n = level as isize;
            let diff = big_to_real::<R>(out.cf.p(n))
                - big_to_real::<R>(out.cf.q(n)) * target.value().clone();
            if diff.is_negative() {
                Ok(Probe::Below)
            } else {
                Ok(Probe::Above)
            }
        }
    }
}

/// Result of tuning a family to a target rotation number.
#[derive(Clone, Debug)]
pub struct TuneResult<R: Real> {
    /// The tuned lift parameter.
    pub t_star: R,
    /// Quotients re-extracted at `t_star` (at least `depth` of them).
    pub verified_quotients: Vec<u64>,
    pub rho_estimate: RotationEstimate<R>,
    /// Width of the final bisection bracket.
    pub bracket_width: R,
    pub probes: usize,
}

/// Bisects the lift parameter of a monotone family until the member's
/// partial quotients reproduce the first `depth` quotients of `target`.
///
/// Ordering comes from quotient-prefix comparison, which stays exact far
/// below the resolution any real-valued estimate could certify. `tol`
/// bounds the final bracket width in `t` where the combinatorics can
/// still distinguish candidates; once a probe is indistinguishable from
/// the target at the step budget's depth, that probe is the answer.
pub fn tune_parameter<R: Real>(
    family: &Family<R>,
    target: &ContinuedFraction<R>,
    depth: usize,
    tol: &R,
    xi0: &CirclePoint<R>,
    cap: usize,
) -> Result<TuneResult<R>> {
    if depth == 0 || target.levels() < depth {
        return Err(Error::precondition(format!(
            "target provides {} levels, tuning needs at least depth {depth}",
            target.levels()
        )));
    }
    if !tol.is_positive() {
        return Err(Error::precondition("tol must be positive"));
    }
    // Exact step cost of extracting the target's first `depth`
    // quotients: completing level j costs (k_{j+1} + 1)·q_j lift steps.
    let mut depth_steps = 1usize;
    for j in 0..depth {
        let kj = target.k(j + 1) as usize;
        depth_steps = depth_steps.saturating_add(
            kj.saturating_add(1)
                .saturating_mul(target.q_usize(j as isize)?),
        );
    }
    if depth_steps > cap {
        return Err(Error::ResourceCap {
            what: "tuning probe orbit".into(),
            needed: depth_steps,
            cap,
        });
    }
    let probe_budget = (2 * depth_steps + 20_000).min(cap);

    let stagnation = prec_tol::<R>(2);
    let floor_width = if *tol > stagnation { tol.clone() } else { stagnation };

    let mut lo = R::zero();
    let mut hi = R::one();
    let mut matched: Option<R> = None;
    let mut probes = 0usize;

    if family.is_identity() {
        // ρ(R_t) = t: the tuned parameter is the target itself.
        matched = Some(target.value().clone());
        lo = target.value().clone();
        hi = target.value().clone();
    }

    loop {
        let width = hi.clone() - lo.clone();
        if width < floor_width {
            break;
        }
        let mid = (lo.clone() + hi.clone()) / R::two();
        if mid <= lo || mid >= hi {
            break; // bisection stagnates at precision P
        }
        probes += 1;
        match probe_order(family, &mid, target, xi0, depth, probe_budget)? {
            Probe::Below => lo = mid,
            Probe::Above => hi = mid,
            Probe::Match => {
                matched = Some(mid);
                break;
            }
        }
    }

    let t_star = matched.unwrap_or_else(|| (lo.clone() + hi.clone()) / R::two());

    // Final verification: the tuned member must reproduce the prefix.
    let map = family.at(t_star.clone())?;
    let verify_budget = (2 * depth_steps + 20_000).min(cap);
    let out = extract(&map, xi0, depth, verify_budget, u64::MAX, |_, _| true);
    let got = out.cf.quotients();
    if got.len() < depth || got[..depth] != target.quotients()[..depth] {
        return Err(Error::TuningFailed(format!(
            "tuned parameter reproduces {:?}, target prefix {:?}",
            got,
            &target.quotients()[..depth.min(target.levels())]
        )));
    }
    Ok(TuneResult {
        t_star,
        verified_quotients: out.cf.quotients().to_vec(),
        rho_estimate: out.cf.rho_estimate(),
        bracket_width: hi - lo,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfarith::{cf_expand, quadratic_irrational, QuadraticKind};
    use crate::maps::DEFAULT_ORBIT_CAP;
    use crate::numerics::circle::mod1;
    use crate::numerics::real::prelude::*;

    type H = HighReal;

    fn hr(s: &str) -> H {
        H::from_decimal(s).unwrap()
    }

    fn origin() -> CirclePoint<H> {
        mod1(H::zero()).unwrap()
    }

    fn golden() -> H {
        quadratic_irrational(&QuadraticKind::Golden).unwrap()
    }

    fn silver() -> H {
        quadratic_irrational(&QuadraticKind::Silver).unwrap()
    }

    #[test]
    fn birkhoff_exact_on_rotation() {
        let rho = hr("0.3714");
        let map = CircleMap::rotation(rho.clone()).unwrap();
        let est = rotation_number_birkhoff(&map, &origin(), 1000, DEFAULT_ORBIT_CAP).unwrap();
        assert!((est.value - rho).abs() < prec_tol::<H>(5));
    }

    #[test]
    fn birkhoff_zero_at_fixed_point() {
        // Arnold t = 0 has a fixed point at 0: the lift never advances
        let map = CircleMap::arnold(H::zero(), hr("0.5")).unwrap();
        let est = rotation_number_birkhoff(&map, &origin(), 500, DEFAULT_ORBIT_CAP).unwrap();
        assert!(est.value.abs() < prec_tol::<H>(5));
    }

    #[test]
    fn birkhoff_needs_100_steps() {
        let map = CircleMap::rotation(hr("0.3")).unwrap();
        assert!(rotation_number_birkhoff(&map, &origin(), 99, DEFAULT_ORBIT_CAP).is_err());
    }

    #[test]
    fn golden_rotation_quotients_all_ones() {
        let map = CircleMap::rotation(golden()).unwrap();
        let dcf = partial_quotients_dynamical(&map, 20, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        let expect = cf_expand(&golden(), 20).unwrap();
        assert_eq!(dcf.quotients(), expect.quotients());
        for n in 0..20isize {
            assert_eq!(dcf.q(n), expect.q(n), "q_{n}");
        }
    }

    #[test]
    fn silver_rotation_quotients_all_twos() {
        let map = CircleMap::rotation(silver()).unwrap();
        let dcf = partial_quotients_dynamical(&map, 12, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        let expect = cf_expand(&silver(), 12).unwrap();
        assert_eq!(dcf.quotients(), expect.quotients());
    }

    #[test]
    fn pi_rotation_quotients() {
        let rho = H::pi() - H::from_u64_ctx(3);
        let map = CircleMap::rotation(rho.clone()).unwrap();
        let dcf = partial_quotients_dynamical(&map, 4, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(dcf.quotients(), &[7, 15, 1, 292]);
    }

    #[test]
    fn displacement_signs_alternate() {
        let map = CircleMap::rotation(golden()).unwrap();
        let dcf = partial_quotients_dynamical(&map, 10, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        for n in -1..=10isize {
            let s = dcf.displacement(n);
            let negative_expected = n % 2 != 0;
            assert_eq!(
                s.is_negative(),
                negative_expected,
                "sign of s_{n} = {s}"
            );
        }
    }

    #[test]
    fn rational_rotation_detected_as_periodic() {
        let map = CircleMap::rotation(hr("0.4")).unwrap();
        let err =
            partial_quotients_dynamical(&map, 12, &origin(), DEFAULT_ORBIT_CAP).unwrap_err();
        assert!(matches!(err, Error::PeriodicOrbit { .. }), "{err:?}");
    }

    #[test]
    fn rho_estimate_residual_bound_holds() {
        let rho = golden();
        let map = CircleMap::rotation(rho.clone()).unwrap();
        let dcf = partial_quotients_dynamical(&map, 15, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        let est = dcf.rho_estimate();
        assert_eq!(est.levels, 15);
        assert!((est.value - rho).abs() < est.residual);
    }

    #[test]
    fn tuning_identity_family_recovers_target() {
        let target = cf_expand(&golden(), 45).unwrap();
        let fam: Family<H> = Family::rotations();
        let tol = hr("1e-30");
        let res = tune_parameter(&fam, &target, 15, &tol, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(&res.verified_quotients[..15], &[1u64; 15]);
        // for the identity family the tuned parameter IS the target
        assert_eq!(res.t_star, golden());
    }

    #[test]
    fn tuning_arnold_golden_depth_15() {
        let target = cf_expand(&golden(), 45).unwrap();
        let fam: Family<H> = Family::arnold(hr("0.5")).unwrap();
        let tol = hr("1e-12");
        let res = tune_parameter(&fam, &target, 15, &tol, &origin(), DEFAULT_ORBIT_CAP).unwrap();
        assert!(res.verified_quotients.len() >= 15);
        assert_eq!(&res.verified_quotients[..15], &[1u64; 15]);

        // cross-method agreement at the Birkhoff resolution
        let map = fam.at(res.t_star.clone()).unwrap();
        let birk =
            rotation_number_birkhoff(&map, &origin(), 100_000, DEFAULT_ORBIT_CAP).unwrap();
        assert!(
            (birk.value.clone() - golden()).abs() < hr("1e-5"),
            "birkhoff {} vs golden",
            birk.value
        );
    }

    #[test]
    fn tuning_rejects_shallow_target() {
        let target = cf_expand(&golden(), 5).unwrap();
        let fam: Family<H> = Family::rotations();
        assert!(
            tune_parameter(&fam, &target, 10, &hr("1e-10"), &origin(), DEFAULT_ORBIT_CAP)
                .is_err()
        );
    }

    #[test]
    fn tuned_map_order_isomorphic_to_rotation() {
        // circular order of the first 200 orbit points matches i·ρ mod 1
        let target = cf_expand(&golden(), 40).unwrap();
        let fam: Family<H> = Family::arnold(hr("0.5")).unwrap();
        let res =
            tune_parameter(&fam, &target, 15, &hr("1e-9"), &origin(), DEFAULT_ORBIT_CAP).unwrap();
        let map = fam.at(res.t_star).unwrap();
        let orb = crate::maps::orbit(&map, &origin(), 200, DEFAULT_ORBIT_CAP).unwrap();

        let mut order: Vec<usize> = (0..=200).collect();
        order.sort_by(|&a, &b| {
            orb.point(a)
                .position()
                .partial_cmp(orb.point(b).position())
                .unwrap()
        });
        let rot = CircleMap::rotation(golden()).unwrap();
        let rorb = crate::maps::orbit(&rot, &origin(), 200, DEFAULT_ORBIT_CAP).unwrap();
        let mut rorder: Vec<usize> = (0..=200).collect();
        rorder.sort_by(|&a, &b| {
            rorb.point(a)
                .position()
                .partial_cmp(rorb.point(b).position())
                .unwrap()
        });
        assert_eq!(order, rorder);
    }
}

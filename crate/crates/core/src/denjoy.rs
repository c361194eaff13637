//! The Denjoy-type inequality machinery: the error sequence ε_n, the
//! sup of |log (T^{q_n})′| against it, the ratio-distortion functions
//! M_n and K_n anchored at dynamical convergents with their three exact
//! relations, and the decay of k_{n+1}ε_n with its Diophantine
//! refinement.
//!
//! The exact relations are identities of the orbit data — any defect in
//! orbits, segments, or distortion code breaks them, which makes their
//! residuals the strongest single correctness oracle in the crate.

use crate::cfarith::{big_to_real, ContinuedFraction};
use crate::crossratio::ratio_distortion_values;
use crate::error::{Error, Result};
use crate::maps::{CircleMap, Orbit};
use crate::numerics::fit::linear_slope;
use crate::numerics::real::Real;
use crate::partitions::LengthScales;

/// ε_n of the Denjoy-type inequality together with its Diophantine
/// comparison data.
#[derive(Clone, Debug)]
pub struct EpsilonSequence<R: Real> {
    /// ε_0 … ε_{n_max}.
    eps: Vec<R>,
    /// k_{n+1}·ε_n for each level.
    kneps: Vec<R>,
    /// Δ_n^{α/(1+δ̂)}, the Diophantine envelope for ε_n.
    diophantine_envelope: Vec<R>,
}

impl<R: Real> EpsilonSequence<R> {
    pub fn epsilon(&self, n: usize) -> &R {
        &self.eps[n]
    }

    pub fn kneps(&self, n: usize) -> &R {
        &self.kneps[n]
    }

    pub fn diophantine_envelope(&self, n: usize) -> &R {
        &self.diophantine_envelope[n]
    }

    pub fn max_level(&self) -> usize {
        self.eps.len() - 1
    }
}

/// The weighted sum
/// ε_n = l_{n−1}^α + (l_n/l_{n−1})·l_{n−2}^α + … + l_n/l_0,
/// computed through the equivalent recursion
/// ε_n = l_{n−1}^α + (l_n/l_{n−1})·ε_{n−1} with ε_0 = l_{−1}^α = 1.
pub fn epsilon<R: Real>(scales: &LengthScales<R>, alpha: &R, n: usize) -> R {
    let mut eps = R::one(); // ε_0 = l_{-1}^α
    for j in 1..=n {
        let lj = scales.l(j as isize);
        let lj1 = scales.l(j as isize - 1);
        eps = lj1.powf(alpha) + lj.clone() / lj1.clone() * eps;
    }
    eps
}

/// The ε sequence with k_{n+1}ε_n and the Diophantine envelope
/// Δ_n^{α/(1+δ̂)} for n = 0 … n_max.
pub fn epsilon_sequence<R: Real>(
    scales: &LengthScales<R>,
    cf: &ContinuedFraction<R>,
    alpha: &R,
    delta_hat: &R,
    n_max: usize,
) -> Result<EpsilonSequence<R>> {
    if scales.max_level() < n_max {
        return Err(Error::precondition(format!(
            "epsilon_sequence needs scales to level {n_max}, have {}",
            scales.max_level()
        )));
    }
    if cf.levels() < n_max + 1 {
        return Err(Error::precondition(format!(
            "epsilon_sequence needs k up to level {}, have {}",
            n_max + 1,
            cf.levels()
        )));
    }
    let mut eps = Vec::with_capacity(n_max + 1);
    let mut kneps = Vec::with_capacity(n_max + 1);
    let mut bound = Vec::with_capacity(n_max + 1);
    let exponent = alpha.clone() / (R::one() + delta_hat.clone());
    let mut cur = R::one();
    for n in 0..=n_max {
        if n > 0 {
            let ln = scales.l(n as isize);
            let ln1 = scales.l(n as isize - 1);
            cur = ln1.powf(alpha) + ln.clone() / ln1.clone() * cur.clone();
        }
        eps.push(cur.clone());
        kneps.push(R::from_u64(cf.k(n + 1)).unwrap() * cur.clone());
        bound.push(cf.delta(n as isize).powf(&exponent));
    }
    Ok(EpsilonSequence {
        eps,
        kneps,
        diophantine_envelope: bound,
    })
}

/// One level of the Denjoy-type inequality check.
#[derive(Clone, Debug)]
pub struct DenjoyLevel<R: Real> {
    pub level: usize,
    /// S_n = sup over sampled start points of |log (T^{q_n})′(ξ)|.
    pub s_n: R,
    pub epsilon: R,
    /// S_n / ε_n — bounded uniformly in n by the Denjoy-type inequality.
    pub ratio: R,
    /// S_n / l_{n−1}^α — the discredited normalization, reported for
    /// comparison.
    pub ratio_first_term: R,
}

/// Samples |log (T^{q_n})′| over `sample_count` start points spread along
/// the marked orbit and reports the sup against ε_n.
pub fn denjoy_check<R: Real>(
    cf: &ContinuedFraction<R>,
    scales: &LengthScales<R>,
    eps: &EpsilonSequence<R>,
    orb: &Orbit<R>,
    alpha: &R,
    n: usize,
    sample_count: usize,
) -> Result<DenjoyLevel<R>> {
    let q = cf.q_usize(n as isize)?;
    if q > orb.len() {
        return Err(Error::ResourceCap {
            what: "denjoy_check orbit".into(),
            needed: q,
            cap: orb.len(),
        });
    }
    if sample_count < 2 {
        return Err(Error::precondition("sample_count must be at least 2"));
    }
    let span = orb.len() - q;
    let mut sup = R::zero();
    let count = sample_count.min(span + 1).max(1);
    for j in 0..count {
        let i = if count == 1 { 0 } else { j * span / (count - 1) };
        let lg = orb.log_iterate_derivative(i, q)?.abs();
        sup = sup.max_with(&lg);
    }
    let e = eps.epsilon(n).clone();
    let first = scales.l(n as isize - 1).powf(alpha);
    Ok(DenjoyLevel {
        level: n,
        s_n: sup.clone(),
        epsilon: e.clone(),
        ratio: sup.clone() / e,
        ratio_first_term: sup / first,
    })
}

/// Identifies a point of the marked trajectory in lift coordinates near
/// the marked point: dynamical convergent ξ_{q_level} carried to the
/// fundamental domain by its convergent numerator.
#[derive(Clone, Copy, Debug)]
enum Anchor {
    /// ξ₀ itself.
    Base,
    /// ξ_{q_level}, shifted by p_level on the lift.
    Convergent(usize),
}

/// The ratio distortion D(a, b, c; T^{q_f_level}) where a, b, c are
/// anchors on the marked orbit. Everything — points, images,
/// coincident-pair derivatives — comes from stored orbit data.
fn distortion_at_anchors<R: Real>(
    cf: &ContinuedFraction<R>,
    orb: &Orbit<R>,
    f_level: usize,
    anchors: [Anchor; 3],
) -> Result<R> {
    let qf = cf.q_usize(f_level as isize)?;
    let resolve = |a: Anchor| -> Result<(usize, R)> {
        match a {
            Anchor::Base => Ok((0, R::zero())),
            Anchor::Convergent(level) => {
                let idx = cf.q_usize(level as isize)?;
                Ok((idx, big_to_real::<R>(cf.p(level as isize))))
            }
        }
    };
    let mut x = Vec::with_capacity(3);
    let mut fx = Vec::with_capacity(3);
    let mut idxs = Vec::with_capacity(3);
    for a in anchors {
        let (idx, shift) = resolve(a)?;
        if idx + qf > orb.len() {
            return Err(Error::ResourceCap {
                what: "exact-relation anchor".into(),
                needed: idx + qf,
                cap: orb.len(),
            });
        }
        x.push(orb.lift(idx).clone() - shift.clone());
        fx.push(orb.lift(idx + qf).clone() - shift);
        idxs.push(idx);
    }
    let x: [R; 3] = [x[0].clone(), x[1].clone(), x[2].clone()];
    let fx: [R; 3] = [fx[0].clone(), fx[1].clone(), fx[2].clone()];
    ratio_distortion_values(&x, &fx, |i| {
        orb.iterate_derivative(idxs[i], qf)
            .expect("anchor window checked above")
    })
}

/// M_n(ξ) = D(ξ₀, ξ, ξ_{q_{n−1}}; T^{q_n}) and
/// K_n(ξ) = D(ξ₀, ξ, ξ_{q_n}; T^{q_{n−1}}) sampled along their segments,
/// plus the coupling scalar m_n with m_n² = M_n(ξ₀)·M_n(ξ_{q_{n−1}}).
#[derive(Clone, Debug)]
pub struct MKProfile<R: Real> {
    pub level: usize,
    /// (offset from ξ₀ along Δ⁽ⁿ⁻¹⁾₀, M_n value), endpoints included.
    pub m_samples: Vec<(R, R)>,
    /// (offset from ξ₀ along Δ⁽ⁿ⁻²⁾₀, K_n value), endpoints included.
    pub k_samples: Vec<(R, R)>,
    pub m_n: R,
}

impl<R: Real> MKProfile<R> {
    fn spread(values: &[(R, R)]) -> (R, R) {
        let mut lo: Option<R> = None;
        let mut hi: Option<R> = None;
        for (_, v) in values {
            lo = Some(match lo {
                None => v.clone(),
                Some(x) => x.min_with(v),
            });
            hi = Some(match hi {
                None => v.clone(),
                Some(x) => x.max_with(v),
            });
        }
        (lo.unwrap(), hi.unwrap())
    }

    /// (min, max) of the M_n samples.
    pub fn m_range(&self) -> (R, R) {
        Self::spread(&self.m_samples)
    }

    pub fn k_range(&self) -> (R, R) {
        Self::spread(&self.k_samples)
    }

    /// Sampled sup of |log Dist(ξ₀, ξ, ξ_{q_{n−1}}, η; T^{q_n})| over
    /// pairs, which equals log(max M / min M).
    pub fn log_oscillation_m(&self) -> R {
        let (lo, hi) = self.m_range();
        (hi / lo).ln()
    }

    pub fn log_oscillation_k(&self) -> R {
        let (lo, hi) = self.k_range();
        (hi / lo).ln()
    }
}

/// Samples M_n and K_n with `samples` Chebyshev–Lobatto points per
/// segment (endpoints included; an odd count includes the midpoint).
pub fn mk_profile<R: Real>(
    map: &CircleMap<R>,
    cf: &ContinuedFraction<R>,
    orb: &Orbit<R>,
    n: usize,
    samples: usize,
) -> Result<MKProfile<R>> {
    if n < 1 {
        return Err(Error::precondition("mk_profile needs n >= 1"));
    }
    if samples < 3 || samples % 2 == 0 {
        return Err(Error::precondition(
            "samples must be an odd count of at least 3",
        ));
    }
    let q_n = cf.q_usize(n as isize)?;
    let q_nm1 = cf.q_usize(n as isize - 1)?;
    if q_n + q_nm1 > orb.len() {
        return Err(Error::ResourceCap {
            what: "mk_profile orbit".into(),
            needed: q_n + q_nm1,
            cap: orb.len(),
        });
    }

    let x0 = orb.lift(0).clone();
    // signed displacement of the level-l dynamical convergent
    let disp = |l: isize| -> Result<R> {
        if l == -1 {
            return Ok(-R::one());
        }
        let q = cf.q_usize(l)?;
        Ok(orb.lift(q).clone() - x0.clone() - big_to_real::<R>(cf.p(l)))
    };

    let floor = crate::numerics::real::prec_tol::<R>(10);

    // generic sampler of D(ξ₀, ·, ξ_{q_anchor}; T^{q_f}) on the segment
    // [ξ₀, ξ₀ + span]
    let sample_fn = |f_level: usize, anchor_level: usize, span: R| -> Result<Vec<(R, R)>> {
        if span.abs() < floor {
            return Err(Error::precondition(format!(
                "segment at level {n} degenerate (below precision floor)"
            )));
        }
        let qf = cf.q_usize(f_level as isize)?;
        let anchor_idx = cf.q_usize(anchor_level as isize)?;
        let anchor_shift = big_to_real::<R>(cf.p(anchor_level as isize));
        let x_a = x0.clone();
        let fx_a = orb.lift(qf).clone();
        let x_c = orb.lift(anchor_idx).clone() - anchor_shift.clone();
        let fx_c = orb.lift(anchor_idx + qf).clone() - anchor_shift;
        let deriv_a = orb.iterate_derivative(0, qf)?;
        let deriv_mid_at_c = orb.iterate_derivative(anchor_idx, qf)?;

        let mut out = Vec::with_capacity(samples);
        let pi = R::pi();
        let m1 = R::from_usize(samples - 1).unwrap();
        for j in 0..samples {
            // endpoints reuse the exact anchor coordinates so the
            // coincident-pair limits trigger
            let (z, fz) = if j == 0 {
                (x_a.clone(), fx_a.clone())
            } else if j == samples - 1 {
                (x_c.clone(), fx_c.clone())
            } else {
                let jr = R::from_usize(j).unwrap();
                let t = (R::one() - (pi.clone() * jr / m1.clone()).cos()) / R::two();
                let z = x0.clone() + span.clone() * t;
                let mut y = z.clone();
                for _ in 0..qf {
                    y = map.lift(&y);
                }
                (z, y)
            };
            let x = [x_a.clone(), z.clone(), x_c.clone()];
            let fx = [fx_a.clone(), fz, fx_c.clone()];
            let d = ratio_distortion_values(&x, &fx, |i| {
                if i == 0 {
                    deriv_a.clone()
                } else {
                    deriv_mid_at_c.clone()
                }
            })?;
            if !d.is_positive() {
                return Err(Error::invariant(format!(
                    "nonpositive distortion sample at level {n}: {d}"
                )));
            }
            out.push((z - x0.clone(), d));
        }
        Ok(out)
    };

    // M_n on Δ⁽ⁿ⁻¹⁾₀ under T^{q_n}
    let m_samples = sample_fn(n, n - 1, disp(n as isize - 1)?)?;
    // K_n on Δ⁽ⁿ⁻²⁾₀ under T^{q_{n−1}}
    let k_samples = sample_fn(n - 1, n, disp(n as isize - 2)?)?;

    let m_at_base = m_samples[0].1.clone();
    let m_at_end = m_samples[samples - 1].1.clone();
    let m_n = (m_at_base * m_at_end).sqrt();

    Ok(MKProfile {
        level: n,
        m_samples,
        k_samples,
        m_n,
    })
}

/// Residuals of the three exact relations at level n; identities of the
/// orbit data, so they vanish to accumulated rounding.
#[derive(Clone, Debug)]
pub struct ExactRelations<R: Real> {
    pub level: usize,
    /// M_n(ξ₀)·M_n(ξ_{q_{n−1}}) − K_n(ξ₀)·K_n(ξ_{q_n})
    pub r_products: R,
    /// K_{n+1}(ξ_{q_{n−1}}) − 1 − (|Δ⁽ⁿ⁺¹⁾₀|/|Δ⁽ⁿ⁻¹⁾₀|)(M_n(ξ_{q_{n+1}}) − 1)
    pub r_segment_transfer: R,
    /// (T^{q_{n+1}})′(ξ₀)/M_{n+1}(ξ₀) − 1 − (|Δ⁽ⁿ⁺¹⁾₀|/|Δ⁽ⁿ⁾₀|)(1 − (T^{q_n})′(ξ₀)/K_{n+1}(ξ₀))
    pub r_derivative_transfer: R,
}

impl<R: Real> ExactRelations<R> {
    pub fn max_abs(&self) -> R {
        self.r_products
            .abs()
            .max_with(&self.r_segment_transfer.abs())
            .max_with(&self.r_derivative_transfer.abs())
    }
}

/// Evaluates the three exact relations at level n ≥ 1 from a marked
/// orbit of length at least q_{n+1} + q_n.
pub fn verify_exact_relations<R: Real>(
    cf: &ContinuedFraction<R>,
    orb: &Orbit<R>,
    n: usize,
) -> Result<ExactRelations<R>> {
    if n < 1 {
        return Err(Error::precondition("exact relations need n >= 1"));
    }
    let q = |l: isize| cf.q_usize(l);
    let needed = q(n as isize + 1)? + q(n as isize)?;
    if needed > orb.len() {
        return Err(Error::ResourceCap {
            what: "exact-relations orbit".into(),
            needed,
            cap: orb.len(),
        });
    }
    let base = Anchor::Base;
    let conv = Anchor::Convergent;

    // products relation: M_n(ξ₀)M_n(ξ_{q_{n−1}}) = K_n(ξ₀)K_n(ξ_{q_n})
    let m_b = distortion_at_anchors(cf, orb, n, [base, base, conv(n - 1)])?;
    let m_e = distortion_at_anchors(cf, orb, n, [base, conv(n - 1), conv(n - 1)])?;
    let k_b = distortion_at_anchors(cf, orb, n - 1, [base, base, conv(n)])?;
    let k_e = distortion_at_anchors(cf, orb, n - 1, [base, conv(n), conv(n)])?;
    let r_products = m_b * m_e - k_b * k_e;

    // segment lengths at the marked point
    let seg = |l: isize| -> Result<R> {
        let ql = cf.q_usize(l)?;
        Ok((orb.lift(ql).clone() - orb.lift(0).clone() - big_to_real::<R>(cf.p(l))).abs())
    };
    let d_next = seg(n as isize + 1)?;
    let d_prev = seg(n as isize - 1)?;
    let d_cur = seg(n as isize)?;

    // segment-transfer relation
    let k_next_at_prev =
        distortion_at_anchors(cf, orb, n, [base, conv(n - 1), conv(n + 1)])?;
    let m_at_next = distortion_at_anchors(cf, orb, n, [base, conv(n + 1), conv(n - 1)])?;
    let r_segment_transfer =
        k_next_at_prev - R::one() - d_next.clone() / d_prev * (m_at_next - R::one());

    // derivative-transfer relation
    let m_next_b = distortion_at_anchors(cf, orb, n + 1, [base, base, conv(n)])?;
    let k_next_b = distortion_at_anchors(cf, orb, n, [base, base, conv(n + 1)])?;
    let d1_next = orb.iterate_derivative(0, q(n as isize + 1)?)?;
    let d1_cur = orb.iterate_derivative(0, q(n as isize)?)?;
    let r_derivative_transfer = d1_next / m_next_b
        - R::one()
        - d_next / d_cur * (R::one() - d1_cur / k_next_b);

    Ok(ExactRelations {
        level: n,
        r_products,
        r_segment_transfer,
        r_derivative_transfer,
    })
}

/// Decay report for k_{n+1}ε_n.
#[derive(Clone, Debug)]
pub struct KnepsReport<R: Real> {
    /// k_{n+1}ε_n for n = 1 … n_max.
    pub values: Vec<(usize, R)>,
    /// Geometric rate fitted to the values (must be < 1).
    pub fitted_rate: R,
    /// k_{n+1}ε_n / Δ_{n−1}^{α−δ̂} per level.
    pub refined_ratios: Vec<(usize, R)>,
    /// Sup of the refined ratios (bounded by the Diophantine refinement).
    pub refined_max: R,
}

/// Fits the geometric decay of k_{n+1}ε_n and checks the refined bound
/// k_{n+1}ε_n = O(Δ_{n−1}^{α−δ̂}).
pub fn verify_kneps_decay<R: Real>(
    eps: &EpsilonSequence<R>,
    cf: &ContinuedFraction<R>,
    alpha: &R,
    delta_hat: &R,
    n_max: usize,
) -> Result<KnepsReport<R>> {
    if n_max < 4 {
        return Err(Error::precondition(
            "decay fit needs at least 4 levels (n_max >= 4)",
        ));
    }
    if eps.max_level() < n_max {
        return Err(Error::precondition(format!(
            "epsilon sequence reaches level {}, need {n_max}",
            eps.max_level()
        )));
    }
    let exponent = alpha.clone() - delta_hat.clone();
    if !exponent.is_positive() {
        return Err(Error::precondition(format!(
            "refined decay needs α − δ̂ > 0, got {exponent}"
        )));
    }
    let mut values = Vec::new();
    let mut fit_pts = Vec::new();
    let mut refined = Vec::new();
    let mut refined_max = R::zero();
    for n in 1..=n_max {
        let v = eps.kneps(n).clone();
        fit_pts.push((R::from_usize(n).unwrap(), v.ln()));
        values.push((n, v.clone()));
        let envelope = cf.delta(n as isize - 1).powf(&exponent);
        let ratio = v / envelope;
        refined_max = refined_max.max_with(&ratio);
        refined.push((n, ratio));
    }
    let slope = linear_slope(&fit_pts)?;
    Ok(KnepsReport {
        values,
        fitted_rate: slope.exp(),
        refined_ratios: refined,
        refined_max,
    })
}

/// One row of the per-level report.
#[derive(Clone, Debug)]
pub struct LevelRow<R: Real> {
    pub n: usize,
    pub q_n: num_bigint::BigInt,
    pub delta_n: R,
    pub l_n: R,
    pub eps_n: R,
    pub s_n: R,
    pub s_over_eps: R,
    pub kneps: R,
    pub res_products: R,
    pub res_segment_transfer: R,
    pub res_derivative_transfer: R,
}

/// The full per-level suite for one map: length scales, ε, the Denjoy
/// check, exact-relation residuals, and the fitted decay rates.
#[derive(Clone, Debug)]
pub struct DenjoySuite<R: Real> {
    pub rows: Vec<LevelRow<R>>,
    pub delta_hat: R,
    /// Statement A constant: sup |log (T^{q_n})′| over levels and points.
    pub a_sup: R,
    /// Statement B fitted rate.
    pub lambda_hat: R,
    /// Geometric rate fitted to S_n (`None` when S_n is identically
    /// zero, as for rigid rotations).
    pub s_n_rate: Option<R>,
    pub kneps_rate: R,
    pub kneps_refined_max: R,
    pub max_relation_residual: R,
}

/// Runs the whole level-by-level analysis for `n` = 1 … `n_max`.
///
/// The marked orbit (length q_{n_max+1} + q_{n_max}) is built once and
/// shared by the scales scan, the derivative sups, and the exact
/// relations.
pub fn denjoy_suite<R: Real>(
    map: &CircleMap<R>,
    cf: &ContinuedFraction<R>,
    n_max: usize,
    sample_count: usize,
    xi0: &crate::numerics::circle::CirclePoint<R>,
    cap: usize,
) -> Result<DenjoySuite<R>> {
    if n_max < 4 {
        return Err(Error::precondition("denjoy suite needs n_max >= 4"));
    }
    if cf.levels() < n_max + 2 {
        return Err(Error::precondition(format!(
            "denjoy suite at n_max = {n_max} needs {} continued-fraction levels, have {}",
            n_max + 2,
            cf.levels()
        )));
    }
    let alpha = map.alpha().clone();
    let orb = match crate::partitions::marked_orbit_for_level(map, cf, n_max, xi0, cap) {
        Ok(o) => o,
        Err(Error::ResourceCap { needed, cap, .. }) => {
            // report how deep the cap does reach
            let mut reachable = 0usize;
            for n in (1..n_max).rev() {
                let len = cf.q_usize(n as isize + 1)? + cf.q_usize(n as isize)?;
                if len <= cap {
                    reachable = n;
                    break;
                }
            }
            return Err(Error::ResourceCap {
                what: format!(
                    "denjoy suite at level {n_max} (deepest level within the cap is {reachable}); orbit"
                ),
                needed,
                cap,
            });
        }
        Err(e) => return Err(e),
    };
    let scales = crate::partitions::length_scales(map, cf, n_max, &orb, 24)?;
    let dio = crate::cfarith::estimate_diophantine_class(cf)?;
    let eps = epsilon_sequence(&scales, cf, &alpha, &dio.delta_hat, n_max)?;
    let statements = crate::partitions::verify_statements_a_b(cf, n_max, &orb)?;
    let kneps = verify_kneps_decay(&eps, cf, &alpha, &dio.delta_hat, n_max)?;

    let mut rows = Vec::with_capacity(n_max);
    let mut max_rel = R::zero();
    let mut sn_fit = Vec::new();
    let floor = crate::numerics::real::prec_tol::<R>(8);
    for n in 1..=n_max {
        let lvl = denjoy_check(cf, &scales, &eps, &orb, &alpha, n, sample_count)?;
        let rel = verify_exact_relations(cf, &orb, n)?;
        max_rel = max_rel.max_with(&rel.max_abs());
        if lvl.s_n > floor {
            sn_fit.push((R::from_usize(n).unwrap(), lvl.s_n.ln()));
        }
        rows.push(LevelRow {
            n,
            q_n: cf.q(n as isize).clone(),
            delta_n: cf.delta(n as isize).clone(),
            l_n: scales.l(n as isize).clone(),
            eps_n: lvl.epsilon.clone(),
            s_n: lvl.s_n.clone(),
            s_over_eps: lvl.ratio.clone(),
            kneps: eps.kneps(n).clone(),
            res_products: rel.r_products,
            res_segment_transfer: rel.r_segment_transfer,
            res_derivative_transfer: rel.r_derivative_transfer,
        });
    }
    let s_n_rate = if sn_fit.len() >= 3 {
        Some(linear_slope(&sn_fit)?.exp())
    } else {
        None
    };
    Ok(DenjoySuite {
        rows,
        delta_hat: dio.delta_hat,
        a_sup: statements.a_sup,
        lambda_hat: statements.lambda_hat,
        s_n_rate,
        kneps_rate: kneps.fitted_rate,
        kneps_refined_max: kneps.refined_max,
        max_relation_residual: max_rel,
    })
}

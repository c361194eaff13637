//! Fundamental segments and dynamical partitions: the tiling of the
//! circle by iterated fundamental segments, its disjointness and covering
//! checks, the length scales l_n, segment counting r(n+m, n), and the
//! classical Denjoy statements A and B in verifiable form.
//!
//! The rank-n partition consists of the q_{n+1} segments Δ⁽ⁿ⁾_i,
//! 0 ≤ i < q_{n+1}, together with the q_n segments Δ⁽ⁿ⁺¹⁾_i, 0 ≤ i < q_n.
//! For the rigid rotation their lengths are Δ_n and Δ_{n+1}, and
//! q_{n+1}Δ_n + q_nΔ_{n+1} = 1 — the covering identity the tests pin
//! (for the golden number at n = 2: 3γ³ + 2γ⁴ = 1).

use num_bigint::BigUint;
use num_traits::One;

use crate::cfarith::{big_to_real, ContinuedFraction};
use crate::error::{Error, Result};
use crate::maps::{orbit, CircleMap, Orbit};
use crate::numerics::circle::{mod1, Arc, CirclePoint};
use crate::numerics::fit::linear_slope;
use crate::numerics::real::{prec_tol, Real};
use crate::numerics::search::golden_section_max;
use crate::numerics::sum::compensated_sum;

/// One fundamental segment Δ⁽ˡᵉᵛᵉˡ⁾_index of a marked orbit.
#[derive(Clone, Debug)]
pub struct Segment<R: Real> {
    pub level: usize,
    pub index: usize,
    /// Counterclockwise arc; orientation follows the parity of `level`.
    pub arc: Arc<R>,
    /// |L^{q_level}(x_index) − x_index − p_level|, measured on the lift.
    pub length: R,
}

/// Builds Δ⁽ˡᵉᵛᵉˡ⁾ at orbit index `i` from lift values.
fn fundamental_segment<R: Real>(
    orb: &Orbit<R>,
    cf: &ContinuedFraction<R>,
    level: usize,
    i: usize,
) -> Result<Segment<R>> {
    let q = cf.q_usize(level as isize)?;
    if i + q > orb.len() {
        return Err(Error::precondition(format!(
            "segment level {level} index {i} needs orbit length {} > {}",
            i + q,
            orb.len()
        )));
    }
    let p = big_to_real::<R>(cf.p(level as isize));
    let signed = orb.lift(i + q).clone() - orb.lift(i).clone() - p;
    let length = signed.abs();
    let a = orb.point(i);
    let b = mod1(orb.lift(i + q).clone())?;
    // arc [ξ, T^{q_n}ξ] for even level, [T^{q_n}ξ, ξ] for odd level
    let arc = if level % 2 == 0 {
        Arc::new(a, b)
    } else {
        Arc::new(b, a)
    };
    Ok(Segment {
        level,
        index: i,
        arc,
        length,
    })
}

/// The rank-n dynamical partition of a marked orbit.
#[derive(Clone, Debug)]
pub struct DynamicalPartition<R: Real> {
    pub level: usize,
    /// q_{n+1} level-n segments followed by q_n level-(n+1) segments.
    pub segments: Vec<Segment<R>>,
    marked_orbit: Orbit<R>,
}

impl<R: Real> DynamicalPartition<R> {
    pub fn marked_orbit(&self) -> &Orbit<R> {
        &self.marked_orbit
    }

    /// Sum of all segment lengths (compensated); equals 1 for a genuine
    /// partition up to accumulated rounding.
    pub fn total_length(&self) -> R {
        compensated_sum(self.segments.iter().map(|s| s.length.clone()))
            .expect("segment lengths are finite")
    }
}

/// Minimal orbit supporting the rank-n partition.
pub fn marked_orbit_for_level<R: Real>(
    map: &CircleMap<R>,
    cf: &ContinuedFraction<R>,
    n: usize,
    xi0: &CirclePoint<R>,
    cap: usize,
) -> Result<Orbit<R>> {
    let needed = cf.q_usize(n as isize + 1)? + cf.q_usize(n as isize)?;
    orbit(map, xi0, needed, cap)
}

/// Builds the rank-n partition from a marked orbit of sufficient length.
pub fn partition_from_orbit<R: Real>(
    cf: &ContinuedFraction<R>,
    n: usize,
    orb: &Orbit<R>,
) -> Result<DynamicalPartition<R>> {
    if cf.levels() < n + 1 {
        return Err(Error::precondition(format!(
            "partition at level {n} needs {} continued-fraction levels, have {}",
            n + 1,
            cf.levels()
        )));
    }
    let q_next = cf.q_usize(n as isize + 1)?;
    let q_cur = cf.q_usize(n as isize)?;
    let mut segments = Vec::with_capacity(q_next + q_cur);
    for i in 0..q_next {
        segments.push(fundamental_segment(orb, cf, n, i)?);
    }
    for i in 0..q_cur {
        segments.push(fundamental_segment(orb, cf, n + 1, i)?);
    }
    Ok(DynamicalPartition {
        level: n,
        segments,
        marked_orbit: orb.clone(),
    })
}

/// Builds the rank-n partition, computing the marked orbit of length
/// q_{n+1} + q_n it is made from.
pub fn build_partition<R: Real>(
    map: &CircleMap<R>,
    cf: &ContinuedFraction<R>,
    n: usize,
    xi0: &CirclePoint<R>,
    cap: usize,
) -> Result<DynamicalPartition<R>> {
    let orb = marked_orbit_for_level(map, cf, n, xi0, cap)?;
    partition_from_orbit(cf, n, &orb)
}

/// Disjointness/covering scan results.
#[derive(Clone, Debug)]
pub struct DisjointnessReport<R: Real> {
    pub segment_count: usize,
    /// Most negative inter-segment gap found (≥ −rounding for a genuine
    /// partition; a real overlap is an invariant violation).
    pub min_gap: R,
    /// |Σ lengths − 1|.
    pub covering_defect: R,
}

/// Sorts segments around the circle and verifies that consecutive ones
/// share endpoints without interior overlap, i.e. the partition tiles.
/// Pairwise same-level disjointness (the "disjoint except at the
/// endpoints" statement) is implied: overlapping segments of one level
/// would produce a negative gap in the scan.
pub fn verify_segments_disjoint<R: Real>(segments: &[Segment<R>]) -> Result<DisjointnessReport<R>> {
    if segments.is_empty() {
        return Err(Error::precondition("empty segment list"));
    }
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&a, &b| {
        segments[a]
            .arc
            .start()
            .position()
            .partial_cmp(segments[b].arc.start().position())
            .expect("finite positions")
    });
    let tol = prec_tol::<R>(8);
    let mut min_gap: Option<R> = None;
    for w in 0..order.len() {
        let cur = &segments[order[w]];
        let next = &segments[order[(w + 1) % order.len()]];
        // oriented distance from cur's end to next's start
        let mut gap = next.arc.start().position().clone()
            - cur.arc.start().position().clone()
            - cur.length.clone();
        if w + 1 == order.len() {
            gap = gap + R::one();
        }
        if gap.clone() + tol.clone() < R::zero() {
            return Err(Error::invariant(format!(
                "segments overlap: level {} index {} runs {} past the start of level {} index {}",
                cur.level,
                cur.index,
                (-gap).to_decimal_full(),
                next.level,
                next.index,
            )));
        }
        min_gap = Some(match min_gap {
            None => gap,
            Some(g) => g.min_with(&gap),
        });
    }
    let total = compensated_sum(segments.iter().map(|s| s.length.clone()))?;
    Ok(DisjointnessReport {
        segment_count: segments.len(),
        min_gap: min_gap.unwrap(),
        covering_defect: (total - R::one()).abs(),
    })
}

/// Disjointness and covering checks for a partition.
pub fn verify_disjointness<R: Real>(
    partition: &DynamicalPartition<R>,
) -> Result<DisjointnessReport<R>> {
    verify_segments_disjoint(&partition.segments)
}

/// The scales l_n = ‖T^{q_n} − Id‖₀ for 0 ≤ n ≤ n_max, with the
/// convention l_{−1} = 1.
#[derive(Clone, Debug)]
pub struct LengthScales<R: Real> {
    l: Vec<R>,
}

impl<R: Real> LengthScales<R> {
    /// l_n for −1 ≤ n ≤ n_max.
    pub fn l(&self, n: isize) -> &R {
        assert!(n >= -1, "l_n defined for n >= -1");
        &self.l[(n + 1) as usize]
    }

    pub fn max_level(&self) -> usize {
        self.l.len() - 2
    }
}

/// Computes l_0 … l_{n_max} from a marked orbit: the maximum of the
/// lift displacement |L^{q_n}(x) − x − p_n| over all orbit points, then
/// one golden-section refinement pass around the best endpoint (which is
/// already a 2-approximation of the supremum).
pub fn length_scales<R: Real>(
    map: &CircleMap<R>,
    cf: &ContinuedFraction<R>,
    n_max: usize,
    orb: &Orbit<R>,
    refinement_steps: usize,
) -> Result<LengthScales<R>> {
    let mut l = Vec::with_capacity(n_max + 2);
    l.push(R::one()); // l_{-1}
    for n in 0..=n_max {
        let q = cf.q_usize(n as isize)?;
        if q > orb.len() {
            return Err(Error::precondition(format!(
                "l_{n} needs orbit length at least q_{n} = {q}, have {}",
                orb.len()
            )));
        }
        let p = big_to_real::<R>(cf.p(n as isize));
        let mut best = R::zero();
        let mut best_i = 0usize;
        for i in 0..=(orb.len() - q) {
            let d = (orb.lift(i + q).clone() - orb.lift(i).clone() - p.clone()).abs();
            if d > best {
                best = d.clone();
                best_i = i;
            }
        }
        // refine on the lift in a one-scale bracket around the best point
        let center = orb.lift(best_i).clone();
        let half = best.clone();
        let displacement = |z: &R| -> R {
            let mut y = z.clone();
            for _ in 0..q {
                y = map.lift(&y);
            }
            (y - z.clone() - p.clone()).abs()
        };
        let (_, refined) = golden_section_max(
            displacement,
            center.clone() - half.clone(),
            center + half,
            refinement_steps,
        );
        l.push(best.max_with(&refined));
    }
    Ok(LengthScales { l })
}

/// l_n alone, from a self-built orbit of length q_{n+1} + q_n.
pub fn l_n<R: Real>(
    map: &CircleMap<R>,
    cf: &ContinuedFraction<R>,
    n: usize,
    xi0: &CirclePoint<R>,
    cap: usize,
) -> Result<R> {
    let orb = marked_orbit_for_level(map, cf, n, xi0, cap)?;
    let scales = length_scales(map, cf, n, &orb, 24)?;
    Ok(scales.l(n as isize).clone())
}

/// Direct count of level-(n+m) segments contained in Δ⁽ⁿ⁾₀.
///
/// Satisfies r(n,n) = 1, r(n+1,n) = k_{n+2} and the recurrence
/// r(n+m,n) = r(n+m−1,n)·k_{n+m+1} + r(n+m−2,n); see
/// [`count_r_recurrence`] for the closed computation the direct count is
/// tested against.
pub fn count_r<R: Real>(
    cf: &ContinuedFraction<R>,
    n: usize,
    m: usize,
    orb: &Orbit<R>,
) -> Result<BigUint> {
    let level = n + m;
    let q_scan = cf.q_usize(level as isize + 1)?;
    let q_seg = cf.q_usize(level as isize)?;
    if q_scan + q_seg > orb.len() + 1 {
        return Err(Error::precondition(format!(
            "count_r(n+m = {level}) needs orbit length {}, have {}",
            q_scan + q_seg - 1,
            orb.len()
        )));
    }
    let base = fundamental_segment(orb, cf, n, 0)?;
    let snap = prec_tol::<R>(8);
    let mut count: u64 = 0;
    for i in 0..q_scan {
        let seg = fundamental_segment(orb, cf, level, i)?;
        if base.arc.contains_arc(&seg.arc, &snap) {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// r(n+m, n) through its counting recurrence, in exact integers.
pub fn count_r_recurrence<R: Real>(
    cf: &ContinuedFraction<R>,
    n: usize,
    m: usize,
) -> Result<BigUint> {
    if cf.levels() < n + m + 1 {
        return Err(Error::precondition(format!(
            "recurrence for r(n+{m}, n) needs k up to level {}, have {}",
            n + m + 1,
            cf.levels()
        )));
    }
    let mut prev = BigUint::one(); // r(n, n)
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = BigUint::from(cf.k(n + 2)); // r(n+1, n)
    for j in 2..=m {
        let next = &cur * BigUint::from(cf.k(n + j + 1)) + &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Per-level data for Denjoy statement A and the geometric decay of
/// statement B.
#[derive(Clone, Debug)]
pub struct StatementsReport<R: Real> {
    /// sup over orbit points of |log (T^{q_n})′(ξ_i)|, per level.
    pub a_sup_per_level: Vec<R>,
    /// The overall sup (statement A's O(1) constant, empirically).
    pub a_sup: R,
    /// Fitted geometric rate of |Δ⁽ᵐ⁾₀| decay (statement B's λ).
    pub lambda_hat: R,
    /// |Δ⁽ᵐ⁾₀| at the marked point for m = 0..=n_max.
    pub segment_lengths_at_base: Vec<R>,
}

/// Verifies statements A and B numerically: boundedness of
/// log (T^{q_n})′ over the marked orbit and geometric decay of the
/// fundamental-segment lengths at the marked point.
pub fn verify_statements_a_b<R: Real>(
    cf: &ContinuedFraction<R>,
    n_max: usize,
    orb: &Orbit<R>,
) -> Result<StatementsReport<R>> {
    let mut a_sup_per_level = Vec::with_capacity(n_max + 1);
    let mut lengths = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let q = cf.q_usize(n as isize)?;
        if q > orb.len() {
            return Err(Error::precondition(format!(
                "statement scan at level {n} needs q_{n} = {q} <= orbit length {}",
                orb.len()
            )));
        }
        let mut sup = R::zero();
        for i in 0..=(orb.len() - q) {
            let lg = orb.log_iterate_derivative(i, q)?.abs();
            sup = sup.max_with(&lg);
        }
        a_sup_per_level.push(sup);

        let p = big_to_real::<R>(cf.p(n as isize));
        lengths.push((orb.lift(q).clone() - orb.lift(0).clone() - p).abs());
    }
    let a_sup = a_sup_per_level
        .iter()
        .fold(R::zero(), |a, b| a.max_with(b));

    // fit log |Δ⁽ᵐ⁾₀| against m; slope = log λ
    let pts: Vec<(R, R)> = lengths
        .iter()
        .enumerate()
        .map(|(m, len)| (R::from_usize(m).unwrap(), len.ln()))
        .collect();
    let slope = linear_slope(&pts)?;
    Ok(StatementsReport {
        a_sup_per_level,
        a_sup,
        lambda_hat: slope.exp(),
        segment_lengths_at_base: lengths,
    })
}

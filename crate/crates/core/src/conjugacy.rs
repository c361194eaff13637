//! Constructive conjugacy to the rigid rotation: the additive recurrence
//! γ(ξ_{i+1}) = γ(ξ_i) − log T′(ξ_i) along a long orbit, the invariant
//! density h = e^γ / ∫e^γ, the conjugacy φ(ξ) = ∫_{ξ₀}^ξ h, residual
//! checks of the homological equation and of the commutation with the
//! rotation, the invariant-measure identity for fundamental segments,
//! and a sup-envelope Hölder-exponent estimator for h.
//!
//! γ is the quantity with the additive recurrence and the controlled
//! modulus of continuity, so h is always evaluated by interpolating γ
//! and exponentiating, never by interpolating h itself.

use crate::cfarith::{big_to_real, ContinuedFraction};
use crate::denjoy::EpsilonSequence;
use crate::error::{Error, Result};
use crate::maps::{orbit, CircleMap, Orbit};
use crate::numerics::circle::{mod1, CirclePoint};
use crate::numerics::fit::loglog_slope;
use crate::numerics::real::{prec_tol, Real};
use crate::numerics::sum::CompensatedSum;

/// Sampled conjugacy data along one orbit, sorted by circle position.
#[derive(Clone, Debug)]
pub struct ConjugacyProfile<R: Real> {
    orbit: Orbit<R>,
    /// sorted slot → orbit index
    order: Vec<usize>,
    /// orbit index → sorted slot
    slot_of_orbit: Vec<usize>,
    /// positions in increasing circle order
    positions: Vec<R>,
    /// γ at each sorted slot
    gamma: Vec<R>,
    /// normalized density e^γ / Z at each sorted slot
    h: Vec<R>,
    /// φ(position) = ∫_{ξ₀}^{position} h, in [0, 1)
    phi: Vec<R>,
    /// normalization Z = ∫ e^γ
    z: R,
    /// max |γ gap| between circle-adjacent samples
    gamma_gap_max: R,
    /// max position gap between adjacent samples
    max_gap: R,
}

/// γ samples along the orbit, sorted by circle position:
/// (position, γ, orbit index).
pub fn gamma_on_orbit<R: Real>(
    map: &CircleMap<R>,
    xi0: &CirclePoint<R>,
    n: usize,
    cap: usize,
) -> Result<Vec<(R, R, usize)>> {
    let orb = orbit(map, xi0, n, cap)?;
    Ok(gamma_samples_sorted(&orb))
}

fn gamma_samples_sorted<R: Real>(orb: &Orbit<R>) -> Vec<(R, R, usize)> {
    let n = orb.len();
    let mut samples: Vec<(R, R, usize)> = (0..=n)
        .map(|i| {
            let pos = orb.point(i).into_position();
            // γ(ξ_i) = −log (T^i)′(ξ₀), exactly the negated prefix sum
            let p = orb.log_d1_prefix(i);
            let g = if p.is_zero() { R::zero() } else { R::zero() - p.clone() };
            (pos, g, i)
        })
        .collect();
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite positions"));
    samples
}

/// Builds the full profile: γ along the orbit, density, and conjugacy.
pub fn build_profile<R: Real>(
    map: &CircleMap<R>,
    xi0: &CirclePoint<R>,
    n: usize,
    cap: usize,
) -> Result<ConjugacyProfile<R>> {
    let orb = orbit(map, xi0, n, cap)?;
    profile_from_orbit(orb)
}

/// The density stage alone: normalized h from sorted (position, γ)
/// samples, without an underlying orbit. Useful for synthetic densities
/// and estimator calibration.
#[derive(Clone, Debug)]
pub struct DensitySamples<R: Real> {
    pub positions: Vec<R>,
    pub gamma: Vec<R>,
    pub h: Vec<R>,
    /// Normalization Z = ∫ e^γ.
    pub z: R,
}

/// Normalizes γ samples into a density: Z = ∫ e^γ by trapezoid with
/// periodic closure, h = e^γ / Z.
pub fn build_density<R: Real>(samples: &[(R, R)]) -> Result<DensitySamples<R>> {
    if samples.len() < 1000 {
        return Err(Error::precondition(format!(
            "density construction needs at least 1000 samples, got {}",
            samples.len()
        )));
    }
    let count = samples.len();
    for w in samples.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::precondition(
                "density samples must be strictly sorted by position",
            ));
        }
    }
    let expg: Vec<R> = samples.iter().map(|(_, g)| g.exp()).collect();
    let half = R::one() / R::two();
    let mut acc = CompensatedSum::new();
    for k in 0..count {
        let k2 = (k + 1) % count;
        let mut dx = samples[k2].0.clone() - samples[k].0.clone();
        if k2 == 0 {
            dx = dx + R::one();
        }
        acc.add(dx * (expg[k].clone() + expg[k2].clone()) * half.clone());
    }
    let z = acc.total();
    if !z.is_positive() {
        return Err(Error::invariant(format!("normalization Z = {z} not positive")));
    }
    Ok(DensitySamples {
        positions: samples.iter().map(|(p, _)| p.clone()).collect(),
        gamma: samples.iter().map(|(_, g)| g.clone()).collect(),
        h: expg.iter().map(|e| e.clone() / z.clone()).collect(),
        z,
    })
}

/// The conjugacy stage: φ(position) = ∫ from `base` (an index into the
/// samples) by cumulative trapezoid. Strictly increasing along the
/// circle, φ(base) = 0, total increment 1.
pub fn build_phi<R: Real>(density: &DensitySamples<R>, base: usize) -> Result<Vec<R>> {
    let count = density.positions.len();
    if base >= count {
        return Err(Error::precondition("phi base index out of range"));
    }
    let half = R::one() / R::two();
    let mut cum = Vec::with_capacity(count);
    let mut acc = CompensatedSum::new();
    cum.push(R::zero());
    for k in 1..count {
        let dx = density.positions[k].clone() - density.positions[k - 1].clone();
        acc.add(dx * (density.h[k - 1].clone() + density.h[k].clone()) * half.clone());
        let c = acc.total();
        if *cum.last().unwrap() > c {
            return Err(Error::invariant(
                "cumulative density decreased: nonpositive h",
            ));
        }
        cum.push(c);
    }
    let base_phi = cum[base].clone();
    Ok(cum
        .iter()
        .map(|c| {
            let mut v = c.clone() - base_phi.clone();
            if v.is_negative() {
                v = v + R::one();
            }
            if v.is_zero() {
                v = R::zero();
            }
            v
        })
        .collect())
}

/// Builds the profile from an existing orbit.
pub fn profile_from_orbit<R: Real>(orb: Orbit<R>) -> Result<ConjugacyProfile<R>> {
    let n = orb.len();
    if n + 1 < 1000 {
        return Err(Error::precondition(format!(
            "density construction needs at least 1000 samples, got {}",
            n + 1
        )));
    }
    let samples = gamma_samples_sorted(&orb);

    let count = samples.len();
    let mut positions = Vec::with_capacity(count);
    let mut gamma = Vec::with_capacity(count);
    let mut order = Vec::with_capacity(count);
    for (pos, g, i) in samples {
        positions.push(pos);
        gamma.push(g);
        order.push(i);
    }
    let mut slot_of_orbit = vec![0usize; count];
    for (slot, &i) in order.iter().enumerate() {
        slot_of_orbit[i] = slot;
    }

    // Z = ∫ e^γ by trapezoid over the sorted samples with periodic wrap,
    // tracking the adjacent-sample envelopes that bound the
    // interpolation error.
    let expg: Vec<R> = gamma.iter().map(|g| g.exp()).collect();
    let mut z_acc = CompensatedSum::new();
    let mut gamma_gap_max = R::zero();
    let mut max_gap = R::zero();
    let half = R::one() / R::two();
    for k in 0..count {
        let k2 = (k + 1) % count;
        let mut dx = positions[k2].clone() - positions[k].clone();
        if k2 == 0 {
            dx = dx + R::one();
        }
        z_acc.add(dx.clone() * (expg[k].clone() + expg[k2].clone()) * half.clone());
        let ggap = (gamma[k2].clone() - gamma[k].clone()).abs();
        gamma_gap_max = gamma_gap_max.max_with(&ggap);
        max_gap = max_gap.max_with(&dx);
    }
    let z = z_acc.total();
    if !z.is_positive() {
        return Err(Error::invariant(format!("normalization Z = {z} not positive")));
    }

    let h: Vec<R> = expg.iter().map(|e| e.clone() / z.clone()).collect();

    // cumulative trapezoid for φ, rebased so φ(ξ₀) = 0
    let mut cum = Vec::with_capacity(count);
    let mut acc = CompensatedSum::new();
    cum.push(R::zero());
    for k in 1..count {
        let dx = positions[k].clone() - positions[k - 1].clone();
        acc.add(dx * (h[k - 1].clone() + h[k].clone()) * half.clone());
        let c = acc.total();
        if *cum.last().unwrap() > c {
            return Err(Error::invariant(
                "cumulative density decreased: nonpositive h",
            ));
        }
        cum.push(c);
    }
    let base_slot = slot_of_orbit[0];
    let base_phi = cum[base_slot].clone();
    let phi: Vec<R> = cum
        .iter()
        .map(|c| {
            let mut v = c.clone() - base_phi.clone();
            if v.is_negative() {
                v = v + R::one();
            }
            if v.is_zero() {
                v = R::zero();
            }
            v
        })
        .collect();

    Ok(ConjugacyProfile {
        orbit: orb,
        order,
        slot_of_orbit,
        positions,
        gamma,
        h,
        phi,
        z,
        gamma_gap_max,
        max_gap,
    })
}

impl<R: Real> ConjugacyProfile<R> {
    pub fn sample_count(&self) -> usize {
        self.positions.len()
    }

    pub fn orbit(&self) -> &Orbit<R> {
        &self.orbit
    }

    pub fn normalization(&self) -> &R {
        &self.z
    }

    pub fn gamma_gap_max(&self) -> &R {
        &self.gamma_gap_max
    }

    pub fn max_gap(&self) -> &R {
        &self.max_gap
    }

    pub fn positions(&self) -> &[R] {
        &self.positions
    }

    pub fn h_values(&self) -> &[R] {
        &self.h
    }

    pub fn phi_values(&self) -> &[R] {
        &self.phi
    }

    pub fn gamma_values(&self) -> &[R] {
        &self.gamma
    }

    /// ∫ h dξ by the same quadrature that built the normalization; equal
    /// to 1 up to the compensation residue.
    pub fn density_mass(&self) -> R {
        let count = self.sample_count();
        let half = R::one() / R::two();
        let mut acc = CompensatedSum::new();
        for k in 0..count {
            let k2 = (k + 1) % count;
            let mut dx = self.positions[k2].clone() - self.positions[k].clone();
            if k2 == 0 {
                dx = dx + R::one();
            }
            acc.add(dx * (self.h[k].clone() + self.h[k2].clone()) * half.clone());
        }
        acc.total()
    }

    pub fn min_h(&self) -> R {
        self.h
            .iter()
            .fold(None::<R>, |acc, v| {
                Some(match acc {
                    None => v.clone(),
                    Some(a) => a.min_with(v),
                })
            })
            .expect("nonempty profile")
    }

    pub fn max_h(&self) -> R {
        self.h
            .iter()
            .fold(R::zero(), |a, v| a.max_with(v))
    }

    /// Sorted-slot index of the sample at or before circle position `x`.
    fn slot_before(&self, x: &R) -> usize {
        match self
            .positions
            .binary_search_by(|p| p.partial_cmp(x).expect("finite"))
        {
            Ok(k) => k,
            Err(0) => self.sample_count() - 1, // wraps below the first sample
            Err(k) => k - 1,
        }
    }

    /// γ at an arbitrary point by piecewise-linear interpolation with
    /// periodic closure.
    pub fn eval_gamma(&self, p: &CirclePoint<R>) -> R {
        let x = p.position();
        let k = self.slot_before(x);
        let k2 = (k + 1) % self.sample_count();
        let mut dx = self.positions[k2].clone() - self.positions[k].clone();
        let mut off = x.clone() - self.positions[k].clone();
        if k2 == 0 || off.is_negative() {
            dx = dx + R::one();
        }
        if off.is_negative() {
            off = off + R::one();
        }
        if dx.is_zero() {
            return self.gamma[k].clone();
        }
        let t = off / dx;
        self.gamma[k].clone() + t * (self.gamma[k2].clone() - self.gamma[k].clone())
    }

    /// h at an arbitrary point: exp of interpolated γ over Z.
    pub fn eval_h(&self, p: &CirclePoint<R>) -> R {
        self.eval_gamma(p).exp() / self.z.clone()
    }

    /// φ at the i-th orbit point (exact cumulative measure at a sample).
    pub fn phi_at_orbit(&self, i: usize) -> &R {
        &self.phi[self.slot_of_orbit[i]]
    }
}

/// sup over a uniform grid of |h(Tξ)·T′(ξ) − h(ξ)|, the residual of the
/// homological equation under the interpolated density.
pub fn homological_residual<R: Real>(
    map: &CircleMap<R>,
    profile: &ConjugacyProfile<R>,
    grid: usize,
) -> Result<R> {
    if grid < 16 {
        return Err(Error::precondition("homological residual grid too small"));
    }
    let n = R::from_usize(grid).unwrap();
    let mut sup = R::zero();
    for i in 0..grid {
        let x = mod1(R::from_usize(i).unwrap() / n.clone())?;
        let tx = map.apply(&x);
        let r = (profile.eval_h(&tx) * map.d1(x.position()) - profile.eval_h(&x)).abs();
        sup = sup.max_with(&r);
    }
    Ok(sup)
}

/// sup over orbit steps of the wrapped defect |φ(Tξ_i) − φ(ξ_i) − ρ|,
/// evaluated where φ is the exact cumulative measure.
pub fn commutation_residual<R: Real>(
    profile: &ConjugacyProfile<R>,
    rho: &R,
) -> Result<R> {
    let n = profile.orbit.len();
    if n == 0 {
        return Err(Error::precondition("empty orbit"));
    }
    let half = R::one() / R::two();
    let mut sup = R::zero();
    for i in 0..n {
        let mut d = profile.phi_at_orbit(i + 1).clone() - profile.phi_at_orbit(i).clone();
        if d.is_negative() {
            d = d + R::one();
        }
        let mut r = d - rho.clone();
        // wrap to [−1/2, 1/2)
        if r > half {
            r = r - R::one();
        } else if -r.clone() > half {
            r = r + R::one();
        }
        sup = sup.max_with(&r.abs());
    }
    Ok(sup)
}

/// |∫ |Δ⁽ⁿ⁾(ξ)| h(ξ) dξ − Δ_n|: the invariant-measure identity for
/// level-n fundamental segments, quadratured over the profile samples.
pub fn verify_measure_identity<R: Real>(
    cf: &ContinuedFraction<R>,
    profile: &ConjugacyProfile<R>,
    n: usize,
) -> Result<R> {
    let q = cf.q_usize(n as isize)?;
    let orb = &profile.orbit;
    if q >= orb.len() {
        return Err(Error::ResourceCap {
            what: "measure-identity level".into(),
            needed: q + 1,
            cap: orb.len(),
        });
    }
    let p = big_to_real::<R>(cf.p(n as isize));
    // integrand |s_n|·h at every sample whose orbit window exists,
    // trapezoided in circle order with periodic closure
    let mut nodes: Vec<(R, R)> = Vec::with_capacity(profile.sample_count());
    for slot in 0..profile.sample_count() {
        let i = profile.order[slot];
        if i + q > orb.len() {
            continue;
        }
        let seg = (orb.lift(i + q).clone() - orb.lift(i).clone() - p.clone()).abs();
        nodes.push((
            profile.positions[slot].clone(),
            seg * profile.h[slot].clone(),
        ));
    }
    if nodes.len() < 100 {
        return Err(Error::precondition(
            "too few usable samples for the measure identity",
        ));
    }
    let half = R::one() / R::two();
    let mut acc = CompensatedSum::new();
    for k in 0..nodes.len() {
        let k2 = (k + 1) % nodes.len();
        let mut dx = nodes[k2].0.clone() - nodes[k].0.clone();
        if k2 == 0 {
            dx = dx + R::one();
        }
        acc.add(dx * (nodes[k].1.clone() + nodes[k2].1.clone()) * half.clone());
    }
    Ok((acc.total() - cf.delta(n as isize).clone()).abs())
}

/// Outcome of the Hölder scan.
#[derive(Clone, Debug)]
pub enum HolderVerdict<R: Real> {
    /// Oscillation below resolution at every scale (constant density).
    Flat,
    /// Fitted slope ≥ 1: Lipschitz or better at the sampled scales.
    LipschitzOrBetter { slope: R },
    /// The estimated Hölder exponent.
    Exponent { slope: R },
}

#[derive(Clone, Debug)]
pub struct HolderScan<R: Real> {
    /// (scale r_j, sup oscillation within [r_{j+1}, r_j)).
    pub envelope: Vec<(R, R)>,
    pub verdict: HolderVerdict<R>,
    pub base_count: usize,
}

impl<R: Real> HolderScan<R> {
    /// The slope when one was fitted.
    pub fn slope(&self) -> Option<&R> {
        match &self.verdict {
            HolderVerdict::Flat => None,
            HolderVerdict::LipschitzOrBetter { slope } => Some(slope),
            HolderVerdict::Exponent { slope } => Some(slope),
        }
    }
}

/// Sup-envelope Hölder estimation from raw sorted samples: for each
/// dyadic scale r_j = 2^{−j}, the sup of |h(ξ) − h(ξ₀)| over sample
/// pairs whose circle distance falls in [r_{j+1}, r_j), with ξ₀ ranging
/// over `base_count` points equidistributed by φ-measure. The slope of
/// the log-log envelope is the exponent estimate.
pub fn holder_exponent_from_samples<R: Real>(
    positions: &[R],
    h: &[R],
    phi: &[R],
    base_count: usize,
    j_min: u32,
) -> Result<HolderScan<R>> {
    let count = positions.len();
    if count < 64 || h.len() != count || phi.len() != count {
        return Err(Error::precondition("holder scan needs coherent samples"));
    }
    if base_count < 4 {
        return Err(Error::precondition("holder scan needs at least 4 base points"));
    }
    // resolution floor: annuli must stay above the largest sample gap
    let mut max_gap = R::zero();
    for k in 0..count {
        let k2 = (k + 1) % count;
        let mut dx = positions[k2].clone() - positions[k].clone();
        if k2 == 0 {
            dx = dx + R::one();
        }
        max_gap = max_gap.max_with(&dx);
    }
    let gap_f = max_gap.to_f64().unwrap_or(1.0).max(1e-300);
    let j_max_resolution = (1.0 / (8.0 * gap_f)).log2().floor() as i64 - 1;
    if j_max_resolution < j_min as i64 + 3 {
        return Err(Error::precondition(format!(
            "fewer than 4 usable dyadic scales above the sample-resolution floor \
             (max gap {max_gap})"
        )));
    }
    let j_max = j_max_resolution as u32;

    // base points equidistributed by φ
    let mut bases = Vec::with_capacity(base_count);
    for k in 0..base_count {
        let target = R::from_usize(k).unwrap() / R::from_usize(base_count).unwrap();
        let slot = match phi.binary_search_by(|p| p.partial_cmp(&target).expect("finite")) {
            Ok(s) => s,
            Err(s) => s.min(count - 1),
        };
        bases.push(slot);
    }
    bases.sort_unstable();
    bases.dedup();

    let scale_count = (j_max - j_min + 1) as usize;
    let mut osc = vec![R::zero(); scale_count];
    let mut pairs = vec![0usize; scale_count];
    let half = R::one() / R::two();
    for &b in &bases {
        let pb = &positions[b];
        let hb = &h[b];
        for k in 0..count {
            if k == b {
                continue;
            }
            let mut d = positions[k].clone() - pb.clone();
            if d.is_negative() {
                d = d + R::one();
            }
            if d > half {
                d = R::one() - d;
            }
            let df = match d.to_f64() {
                Some(v) if v > 0.0 => v,
                _ => continue,
            };
            let j = (-df.log2()).floor() as i64;
            if j < j_min as i64 || j > j_max as i64 {
                continue;
            }
            let idx = (j - j_min as i64) as usize;
            let delta = (h[k].clone() - hb.clone()).abs();
            osc[idx] = osc[idx].max_with(&delta);
            pairs[idx] += 1;
        }
    }

    let mut envelope = Vec::with_capacity(scale_count);
    let mut fit_pts = Vec::new();
    let floor = prec_tol::<R>(20);
    for (idx, o) in osc.iter().enumerate() {
        let j = j_min + idx as u32;
        let r = R::two().powi(-(j as i32));
        envelope.push((r.clone(), o.clone()));
        if pairs[idx] > 0 && *o > floor {
            fit_pts.push((r, o.clone()));
        }
    }
    if fit_pts.is_empty() {
        return Ok(HolderScan {
            envelope,
            verdict: HolderVerdict::Flat,
            base_count: bases.len(),
        });
    }
    if fit_pts.len() < 4 {
        return Err(Error::precondition(format!(
            "only {} usable scales with oscillation data, need 4",
            fit_pts.len()
        )));
    }
    let slope = loglog_slope(&fit_pts)?;
    let verdict = if slope >= R::one() {
        HolderVerdict::LipschitzOrBetter { slope }
    } else {
        HolderVerdict::Exponent { slope }
    };
    Ok(HolderScan {
        envelope,
        verdict,
        base_count: bases.len(),
    })
}

/// Hölder scan of a built profile with `base_count` φ-equidistributed
/// base points and dyadic scales from 2^{−3} down to the resolution
/// floor.
pub fn holder_exponent<R: Real>(
    profile: &ConjugacyProfile<R>,
    base_count: usize,
) -> Result<HolderScan<R>> {
    holder_exponent_from_samples(
        &profile.positions,
        &profile.h,
        &profile.phi,
        base_count,
        3,
    )
}

/// γ-coherence report: the empirical constant in
/// |γ(ξ_i) − γ(ξ_j)| ≤ C·(ε_n + Σ_{s>n} k_{s+1}ε_s) for ξ_j ∈ Δ⁽ⁿ⁾_i.
#[derive(Clone, Debug)]
pub struct CoherenceReport<R: Real> {
    pub trials: usize,
    pub max_ratio: R,
}

/// Checks the γ modulus of continuity over random (n, i, j) triples with
/// ξ_j in the level-n fundamental segment of ξ_i.
pub fn gamma_coherence<R: Real>(
    cf: &ContinuedFraction<R>,
    eps: &EpsilonSequence<R>,
    profile: &ConjugacyProfile<R>,
    n_range: (usize, usize),
    trials: usize,
    seed: u64,
) -> Result<CoherenceReport<R>> {
    let orb = &profile.orbit;
    let mut state = seed.max(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    // tail sums Σ_{s>n} k_{s+1} ε_s up to the computed horizon
    let n_max = eps.max_level();
    let mut bounds = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut b = eps.epsilon(n).clone();
        for s in (n + 1)..=n_max {
            b = b + eps.kneps(s).clone();
        }
        bounds.push(b);
    }

    let mut max_ratio = R::zero();
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < trials && attempts < trials * 20 {
        attempts += 1;
        let n = n_range.0 + (next() as usize) % (n_range.1 - n_range.0 + 1);
        if n > n_max || cf.levels() < n + 1 {
            continue;
        }
        let q = cf.q_usize(n as isize)?;
        let window = cf.q_usize(n as isize + 1)?.min(orb.len().saturating_sub(q));
        if window == 0 {
            continue;
        }
        let i = (next() as usize) % window;
        // ξ_j must land inside Δ⁽ⁿ⁾_i: walk sorted samples inside the
        // segment's position range
        let p = big_to_real::<R>(cf.p(n as isize));
        let signed = orb.lift(i + q).clone() - orb.lift(i).clone() - p;
        let (start, len) = if signed.is_negative() {
            (mod1(orb.lift(i + q).clone())?, signed.abs())
        } else {
            (orb.point(i), signed.clone())
        };
        // sample a few random sorted slots inside the arc
        let mut candidate: Option<usize> = None;
        for _ in 0..40 {
            let slot = (next() as usize) % profile.sample_count();
            let mut off = profile.positions[slot].clone() - start.position().clone();
            if off.is_negative() {
                off = off + R::one();
            }
            let j = profile.order[slot];
            if off < len && j != i {
                candidate = Some(j);
                break;
            }
        }
        let Some(j) = candidate else { continue };
        let gi = R::zero() - orb.log_d1_prefix(i).clone();
        let gj = R::zero() - orb.log_d1_prefix(j).clone();
        let ratio = (gi - gj).abs() / bounds[n].clone();
        max_ratio = max_ratio.max_with(&ratio);
        done += 1;
    }
    if done == 0 {
        return Err(Error::precondition(
            "no usable coherence triples found in range",
        ));
    }
    Ok(CoherenceReport {
        trials: done,
        max_ratio,
    })
}

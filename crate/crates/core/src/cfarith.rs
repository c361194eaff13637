//! Continued-fraction arithmetic for rotation numbers: partial quotients,
//! exact big-integer convergents, the approximation errors Δ_n, and a
//! per-level Diophantine-class estimate.
//!
//! Conventions: ρ = [k₁, k₂, …] ∈ (0, 1) with p₀ = 0, q₀ = 1, p₋₁ = 1,
//! q₋₁ = 0 and the recurrences pₙ = kₙpₙ₋₁ + pₙ₋₂, qₙ = kₙqₙ₋₁ + qₙ₋₂.
//! Δₙ = |qₙρ − pₙ| is computed through its own three-term recurrence
//! Δₙ = Δₙ₋₂ − kₙΔₙ₋₁, which avoids the catastrophic cancellation of the
//! literal qₙρ − pₙ once qₙ is large.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::real::{prec_tol, Real};

/// A truncated continued-fraction expansion with exact convergents.
#[derive(Clone, Debug)]
pub struct ContinuedFraction<R: Real> {
    value: R,
    /// k₁ … k_N
    quotients: Vec<u64>,
    /// p₋₁, p₀, …, p_N (offset by one)
    p: Vec<BigInt>,
    /// q₋₁, q₀, …, q_N (offset by one)
    q: Vec<BigInt>,
    /// Δ₋₁, Δ₀, …, Δ_N (offset by one)
    deltas: Vec<R>,
}

impl<R: Real> ContinuedFraction<R> {
    /// Number of computed levels N (quotients k₁ … k_N).
    pub fn levels(&self) -> usize {
        self.quotients.len()
    }

    pub fn value(&self) -> &R {
        &self.value
    }

    /// Partial quotient k_n for 1 ≤ n ≤ N.
    pub fn k(&self, n: usize) -> u64 {
        assert!(n >= 1 && n <= self.levels(), "k_{n} out of range");
        self.quotients[n - 1]
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// Convergent numerator p_n for −1 ≤ n ≤ N.
    pub fn p(&self, n: isize) -> &BigInt {
        &self.p[(n + 1) as usize]
    }

    /// Convergent denominator q_n for −1 ≤ n ≤ N.
    pub fn q(&self, n: isize) -> &BigInt {
        &self.q[(n + 1) as usize]
    }

    /// q_n as a machine size, for orbit lengths.
    pub fn q_usize(&self, n: isize) -> Result<usize> {
        self.q(n).to_usize().ok_or_else(|| Error::ResourceCap {
            what: "orbit length q_n".into(),
            needed: usize::MAX,
            cap: usize::MAX,
        })
    }

    /// Δ_n = |q_n ρ − p_n| for −1 ≤ n ≤ N.
    pub fn delta(&self, n: isize) -> &R {
        &self.deltas[(n + 1) as usize]
    }

    /// The whole Δ sequence, Δ₋₁ … Δ_N.
    pub fn deltas(&self) -> &[R] {
        &self.deltas
    }

    /// Highest level n such that the expansion has all of k₁…k_n,
    /// q_{n+1} and Δ_{n+1} available (needed by partition builders).
    pub fn max_partition_level(&self) -> usize {
        self.levels().saturating_sub(1)
    }
}

/// Expands `rho ∈ (0, 1)` to `n_levels` partial quotients.
///
/// The expansion stops early (with an error) once Δ_n drops below
/// 10^−(P−10): beyond that the quotients of a P-digit value are noise.
pub fn cf_expand<R: Real>(rho: &R, n_levels: usize) -> Result<ContinuedFraction<R>> {
    if !rho.is_finite() || !rho.is_positive() || *rho >= R::one() {
        return Err(Error::precondition(format!(
            "rotation number must lie in (0,1), got {rho}"
        )));
    }
    let floor_delta = prec_tol::<R>(10);

    let mut quotients = Vec::with_capacity(n_levels);
    let mut p = vec![BigInt::one(), BigInt::zero()];
    let mut q = vec![BigInt::zero(), BigInt::one()];
    let mut deltas = vec![R::one(), rho.clone()];

    let mut x = rho.clone();
    while quotients.len() < n_levels {
        let inv = R::one() / x.clone();
        let kf = inv.floor();
        let k = match kf.to_u64() {
            Some(k) if k >= 1 => k,
            _ => {
                return Err(Error::PrecisionExhausted {
                    achieved: quotients.len(),
                    requested: n_levels,
                })
            }
        };
        x = inv - kf;

        let kb = BigInt::from(k);
        let pn = &kb * &p[p.len() - 1] + &p[p.len() - 2];
        let qn = &kb * &q[q.len() - 1] + &q[q.len() - 2];
        let kr = R::from_u64(k).unwrap();
        let dn = deltas[deltas.len() - 2].clone() - kr * deltas[deltas.len() - 1].clone();

        if dn <= floor_delta || dn.is_negative() {
            return Err(Error::PrecisionExhausted {
                achieved: quotients.len(),
                requested: n_levels,
            });
        }
        quotients.push(k);
        p.push(pn);
        q.push(qn);
        deltas.push(dn);
    }

    Ok(ContinuedFraction {
        value: rho.clone(),
        quotients,
        p,
        q,
        deltas,
    })
}

/// Builds the continued fraction of a known value from externally
/// computed quotients (used by the dynamical extraction, where ρ itself
/// is only known through its convergents).
pub(crate) fn cf_from_quotients<R: Real>(value: R, quotients: Vec<u64>) -> ContinuedFraction<R> {
    let mut p = vec![BigInt::one(), BigInt::zero()];
    let mut q = vec![BigInt::zero(), BigInt::one()];
    let mut deltas = vec![R::one(), value.clone()];
    for &k in &quotients {
        let kb = BigInt::from(k);
        p.push(&kb * &p[p.len() - 1] + &p[p.len() - 2]);
        q.push(&kb * &q[q.len() - 1] + &q[q.len() - 2]);
        let kr = R::from_u64(k).unwrap();
        let dn = deltas[deltas.len() - 2].clone() - kr * deltas[deltas.len() - 1].clone();
        deltas.push(dn.abs());
    }
    ContinuedFraction {
        value,
        quotients,
        p,
        q,
        deltas,
    }
}

/// Per-level Diophantine exponents and their supremum over a window.
///
/// δ_n is the unique exponent solving Δ_{n−1}^{1+δ_n} = Δ_n, i.e.
/// δ_n = log Δ_n / log Δ_{n−1} − 1, clamped at zero. `delta_hat` is the
/// maximum over levels n ≥ 2 of the window.
#[derive(Clone, Debug)]
pub struct DiophantineEstimate<R: Real> {
    pub delta_hat: R,
    /// (level, δ_level) pairs for levels 1 … N.
    pub per_level: Vec<(usize, R)>,
    /// Levels that entered `delta_hat`.
    pub window: (usize, usize),
}

pub fn estimate_diophantine_class<R: Real>(
    cf: &ContinuedFraction<R>,
) -> Result<DiophantineEstimate<R>> {
    let n = cf.levels();
    if n < 5 {
        return Err(Error::precondition(format!(
            "Diophantine estimate needs at least 5 levels, got {n}"
        )));
    }
    let mut per_level = Vec::with_capacity(n);
    for lvl in 1..=n {
        let num = cf.delta(lvl as isize).ln();
        let den = cf.delta(lvl as isize - 1).ln();
        let mut d = num / den - R::one();
        if d.is_negative() {
            d = R::zero();
        }
        per_level.push((lvl, d));
    }
    let delta_hat = per_level
        .iter()
        .filter(|(lvl, _)| *lvl >= 2)
        .map(|(_, d)| d.clone())
        .fold(R::zero(), |a, b| a.max_with(&b));
    Ok(DiophantineEstimate {
        delta_hat,
        per_level,
        window: (2, n),
    })
}

/// Quadratic irrationals with prescribed (eventually periodic) quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadraticKind {
    /// (√5 − 1)/2 = [1, 1, 1, …]
    Golden,
    /// √2 − 1 = [2, 2, 2, …]
    Silver,
    /// Purely periodic word of partial quotients.
    Periodic(Vec<u64>),
}

/// The value in (0, 1) whose continued fraction repeats `kind`'s word.
///
/// For a word (a₁ … a_m), the reciprocal y = 1/x satisfies the fixed
/// point equation of the word's convergent matrix, a quadratic with one
/// root above 1; x is its reciprocal.
pub fn quadratic_irrational<R: Real>(kind: &QuadraticKind) -> Result<R> {
    let word: &[u64] = match kind {
        QuadraticKind::Golden => &[1],
        QuadraticKind::Silver => &[2],
        QuadraticKind::Periodic(w) => w.as_slice(),
    };
    if word.is_empty() || word.iter().any(|&k| k == 0) {
        return Err(Error::precondition(
            "periodic word must be nonempty with positive quotients",
        ));
    }
    // Convergents of [a₁; a₂, …, a_m] (integer part a₁).
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p_cur = BigInt::from(word[0]);
    let mut q_cur = BigInt::one();
    for &a in &word[1..] {
        let ab = BigInt::from(a);
        let p_next = &ab * &p_cur + &p_prev;
        let q_next = &ab * &q_cur + &q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
    }
    // y = (p_cur·y + p_prev) / (q_cur·y + q_prev)
    // ⇒ q_cur·y² + (q_prev − p_cur)·y − p_prev = 0, take the root > 1.
    let a = big_to_real::<R>(&q_cur);
    let b = big_to_real::<R>(&(&q_prev - &p_cur));
    let c = -big_to_real::<R>(&p_prev);
    let disc = (b.clone() * b.clone() - R::from_u64(4).unwrap() * a.clone() * c).sqrt();
    let y = (disc - b) / (R::two() * a);
    Ok(R::one() / y)
}

/// Exact conversion of a big integer to a scalar (all integers in this
/// crate fit the mantissa comfortably).
pub fn big_to_real<R: Real>(x: &BigInt) -> R {
    R::from_decimal(&x.to_string()).expect("integer literal parses")
}

//! Scalar substrate: a real-number trait and its implementations.
//!
//! Everything in this crate is generic over [`Real`]. Two families of
//! scalars implement it:
//!
//! * native floats (`f32`, `f64`) — the "fast mode" for smoke tests;
//! * [`HighReal`] — an arbitrary-precision float holding P significant
//!   decimal digits, where P is fixed per computation context (thread) and
//!   defaults to 50.
//!
//! The context is deliberately thread-local: orbits, partitions and
//! residual scans are pure functions of their inputs, so a computation
//! never changes precision midway, and values born in different contexts
//! must not be mixed (debug builds assert on it).

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Precision context for [`HighReal`] values.
///
/// The context is the number of significant decimal digits P (≥ 17). All
/// `HighReal` constructors read it; binary operations inherit the operand
/// precision. Internally values carry 64 guard bits beyond the decimal
/// request so that long chains stay correctly rounded at P digits.
pub mod precision {
    use super::*;

    pub const MIN_DIGITS: u32 = 17;
    pub const DEFAULT_DIGITS: u32 = 50;

    thread_local! {
        static DIGITS: Cell<u32> = const { Cell::new(DEFAULT_DIGITS) };
        static CONSTS: RefCell<Option<Consts>> = const { RefCell::new(None) };
    }

    /// Current context precision in decimal digits.
    pub fn digits() -> u32 {
        DIGITS.with(|d| d.get())
    }

    /// Sets the context precision for the current thread.
    ///
    /// Panics if `d < 17`: below that the substrate cannot honour its
    /// rounding contract, and native floats cover the use case anyway.
    pub fn set_digits(d: u32) {
        assert!(
            (MIN_DIGITS..=100_000).contains(&d),
            "precision must be between {MIN_DIGITS} and 100000 decimal digits, got {d}"
        );
        DIGITS.with(|c| c.set(d));
    }

    /// Runs `f` with the context set to `d` digits, then restores the
    /// previous context.
    pub fn with_digits<T>(d: u32, f: impl FnOnce() -> T) -> T {
        let old = digits();
        set_digits(d);
        let out = f();
        DIGITS.with(|c| c.set(old));
        out
    }

    /// Mantissa length in bits for the current context: the decimal
    /// request converted to bits, plus 64 guard bits, word-aligned.
    pub(crate) fn bits() -> usize {
        bits_for(digits())
    }

    pub(crate) fn bits_for(d: u32) -> usize {
        let core = (d as f64 * std::f64::consts::LOG2_10).ceil() as usize;
        (core + 64).next_multiple_of(64)
    }

    pub(crate) fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
        CONSTS.with(|cc| {
            let mut slot = cc.borrow_mut();
            let consts = slot.get_or_insert_with(|| {
                Consts::new().expect("constants cache allocation")
            });
            f(consts)
        })
    }
}

/// Everything call sites on concrete scalars usually want in scope:
/// the numeric traits whose methods `Real` builds on, plus the scalar
/// types themselves.
pub mod prelude {
    pub use super::{prec_tol, precision, HighReal, Real};
    pub use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
}

/// Tolerance `10^(margin - P)` at the current working precision of `R`.
///
/// Tolerances of the form `1e-(P-m)` are all built through this helper
/// so that tests track the context automatically.
pub fn prec_tol<R: Real>(margin: u32) -> R {
    R::pow10(margin as i32 - R::precision_digits() as i32)
}

/// The real-scalar abstraction the whole crate is written against.
///
/// The bounds come from `num-traits` (note `num_traits::Float` cannot be
/// used: it requires `Copy`, which a heap mantissa cannot provide); the
/// extra methods are the transcendentals and conversions the algorithms
/// need.
pub trait Real:
    Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + PartialOrd
    + Clone
    + fmt::Display
    + fmt::Debug
    + Send
    + Sync
    + 'static
{
    /// Significant decimal digits carried by this scalar type in the
    /// current context.
    fn precision_digits() -> u32;

    /// Parses a decimal string (plain or scientific notation), rounding
    /// once to working precision.
    fn from_decimal(s: &str) -> Option<Self>;

    /// Full-precision decimal rendering; parsing it back must reproduce
    /// the value exactly.
    fn to_decimal_full(&self) -> String;

    /// Exact power of ten (rounded once to working precision).
    fn pow10(e: i32) -> Self;

    fn pi() -> Self;

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// `self^e` for positive bases.
    fn powf(&self, e: &Self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn floor(&self) -> Self;

    fn is_finite(&self) -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// `max(self, other)` under the total order of finite values.
    fn max_with(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn min_with(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

macro_rules! impl_real_native {
    ($t:ty, $digits:expr) => {
        impl Real for $t {
            fn precision_digits() -> u32 {
                $digits
            }

            fn from_decimal(s: &str) -> Option<Self> {
                s.parse().ok()
            }

            fn to_decimal_full(&self) -> String {
                // The shortest round-trippable form, which `Display`
                // guarantees for native floats.
                let mut s = format!("{:e}", self);
                if !s.contains('.') {
                    // normalize "5e0" to "5.0e0" so all emitters agree
                    if let Some(pos) = s.find('e') {
                        s.insert_str(pos, ".0");
                    }
                }
                s
            }

            fn pow10(e: i32) -> Self {
                (10.0 as $t).powi(e)
            }

            fn pi() -> Self {
                std::f64::consts::PI as $t
            }

            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn powf(&self, e: &Self) -> Self {
                <$t>::powf(*self, *e)
            }
            fn powi(&self, n: i32) -> Self {
                <$t>::powi(*self, n)
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
        }
    };
}

impl_real_native!(f32, 7);
impl_real_native!(f64, 16);

/// Arbitrary-precision real scalar at the context precision.
///
/// Arithmetic is correctly rounded (round-to-even) at the context's bit
/// length, which exceeds the requested P decimal digits by 64 guard bits.
/// Transcendentals go through a per-thread constants cache.
#[derive(Clone, Debug)]
pub struct HighReal(BigFloat);

impl HighReal {
    fn ctx_bits() -> usize {
        precision::bits()
    }

    /// Operand precision for a binary operation. Values from different
    /// contexts must not meet; debug builds assert it. Zeros and
    /// non-finite values carry no context of their own.
    fn join_bits(a: &BigFloat, b: &BigFloat) -> usize {
        let pick = |v: &BigFloat| v.precision().filter(|&p| p > 0);
        match (pick(a), pick(b)) {
            (Some(x), Some(y)) => {
                debug_assert_eq!(
                    x, y,
                    "HighReal values from different precision contexts were mixed"
                );
                x.max(y)
            }
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => Self::ctx_bits(),
        }
    }

    pub fn from_f64_ctx(x: f64) -> Self {
        HighReal(BigFloat::from_f64(x, Self::ctx_bits()))
    }

    pub fn from_u64_ctx(x: u64) -> Self {
        HighReal(BigFloat::from_u64(x, Self::ctx_bits()))
    }

    pub fn from_i64_ctx(x: i64) -> Self {
        HighReal(BigFloat::from_i64(x, Self::ctx_bits()))
    }

    /// Exact conversion of a big integer (rounded once if it exceeds the
    /// mantissa, which no quantity in this crate does).
    pub fn from_bigint(x: &BigInt) -> Self {
        Self::from_decimal_str(&x.to_string()).expect("integer literal")
    }

    pub fn from_decimal_str(s: &str) -> Option<Self> {
        let p = Self::ctx_bits();
        let v = precision::with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc));
        if v.is_nan() && !s.trim().eq_ignore_ascii_case("nan") {
            return None;
        }
        Some(HighReal(v))
    }

    /// Raw access for exact extraction: `(words, bit_len, negative, exp)`
    /// with value `= ±(words as little-endian integer) / 2^bit_len * 2^exp`.
    fn raw(&self) -> Option<(Vec<u64>, usize, bool, i64)> {
        let (words, len, sign, e, _) = self.0.as_raw_parts()?;
        Some((
            words.to_vec(),
            len,
            sign == Sign::Neg,
            e as i64,
        ))
    }

    /// Exact value as `(mantissa, e2)` with `self = mantissa * 2^e2`.
    /// `None` for non-finite values.
    pub fn to_exact_mantissa_exp(&self) -> Option<(BigInt, i64)> {
        if self.0.is_inf() || self.0.is_nan() {
            return None;
        }
        if self.0.is_zero() {
            return Some((BigInt::zero(), 0));
        }
        let (words, len, neg, e) = self.raw()?;
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        let mag = BigUint::from_bytes_le(&bytes);
        let sign = if neg { IntSign::Minus } else { IntSign::Plus };
        Some((BigInt::from_biguint(sign, mag), e - len as i64))
    }

    /// Exact conversion to an integer; `None` if the value is not an
    /// integer or not finite.
    pub fn to_exact_bigint(&self) -> Option<BigInt> {
        let (m, e2) = self.to_exact_mantissa_exp()?;
        if e2 >= 0 {
            Some(m << e2 as usize)
        } else {
            let shift = (-e2) as usize;
            let rest = &m % (BigInt::one() << shift);
            if rest.is_zero() {
                Some(m >> shift)
            } else {
                None
            }
        }
    }

    fn bin(a: &BigFloat, b: &BigFloat, f: impl FnOnce(&BigFloat, &BigFloat, usize) -> BigFloat) -> HighReal {
        let p = Self::join_bits(a, b);
        HighReal(f(a, b, p))
    }

    fn self_bits(&self) -> usize {
        match self.0.precision() {
            Some(p) if p > 0 => p,
            _ => Self::ctx_bits(),
        }
    }

}

impl fmt::Display for HighReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl PartialEq for HighReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for HighReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! impl_bigfloat_binop {
    ($trait:ident, $method:ident, $raw:ident) => {
        impl std::ops::$trait for HighReal {
            type Output = HighReal;
            fn $method(self, rhs: HighReal) -> HighReal {
                HighReal::bin(&self.0, &rhs.0, |a, b, p| a.$raw(b, p, RM))
            }
        }

        impl<'a> std::ops::$trait<&'a HighReal> for &'a HighReal {
            type Output = HighReal;
            fn $method(self, rhs: &'a HighReal) -> HighReal {
                HighReal::bin(&self.0, &rhs.0, |a, b, p| a.$raw(b, p, RM))
            }
        }
    };
}

impl_bigfloat_binop!(Add, add, add);
impl_bigfloat_binop!(Sub, sub, sub);
impl_bigfloat_binop!(Mul, mul, mul);
impl_bigfloat_binop!(Div, div, div);

impl std::ops::Rem for HighReal {
    type Output = HighReal;
    fn rem(self, rhs: HighReal) -> HighReal {
        HighReal(self.0.rem(&rhs.0))
    }
}

impl std::ops::Neg for HighReal {
    type Output = HighReal;
    fn neg(self) -> HighReal {
        HighReal(self.0.neg())
    }
}

impl Zero for HighReal {
    fn zero() -> Self {
        HighReal(BigFloat::new(Self::ctx_bits()))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for HighReal {
    fn one() -> Self {
        Self::from_u64_ctx(1)
    }
}

impl Num for HighReal {
    type FromStrRadixErr = Error;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::precondition("only radix 10 is supported"));
        }
        Self::from_decimal_str(s)
            .ok_or_else(|| Error::precondition(format!("unparsable decimal {s:?}")))
    }
}

impl Signed for HighReal {
    fn abs(&self) -> Self {
        HighReal(self.0.abs())
    }

    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self.clone() - other.clone()
        }
    }

    fn signum(&self) -> Self {
        // Not delegated: the upstream signum narrows the mantissa, which
        // would leak a foreign precision into the context.
        if self.0.is_nan() {
            return HighReal(BigFloat::nan(None));
        }
        if self.0.is_zero() {
            Self::zero()
        } else if self.0.is_negative() {
            -Self::one()
        } else {
            Self::one()
        }
    }

    fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_positive()
    }

    fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }
}

impl FromPrimitive for HighReal {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::from_i64_ctx(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::from_u64_ctx(n))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Self::from_f64_ctx(n))
    }
}

impl ToPrimitive for HighReal {
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(self.floor().to_exact_bigint()?).ok()
    }

    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self.floor().to_exact_bigint()?).ok()
    }

    fn to_f64(&self) -> Option<f64> {
        if self.0.is_nan() {
            return Some(f64::NAN);
        }
        if self.0.is_inf_pos() {
            return Some(f64::INFINITY);
        }
        if self.0.is_inf_neg() {
            return Some(f64::NEG_INFINITY);
        }
        if self.0.is_zero() {
            return Some(0.0);
        }
        let (words, len, neg, e) = self.raw()?;
        let nw = words.len();
        let hi = words[nw - 1] as f64;
        let lo = if nw >= 2 { words[nw - 2] as f64 } else { 0.0 };
        // value = (hi/2^64 + lo/2^128) * 2^e, with len = 64*nw bits total
        debug_assert_eq!(len, 64 * nw);
        let mag = hi * exp2i(e - 64) + lo * exp2i(e - 128);
        Some(if neg { -mag } else { mag })
    }
}

/// `2^k` with saturation, valid across the full f64 exponent range.
fn exp2i(k: i64) -> f64 {
    if k > 1100 {
        f64::INFINITY
    } else if k < -1150 {
        0.0
    } else {
        // split to stay within subnormal-safe range
        let half = k / 2;
        (half as f64).exp2() * ((k - half) as f64).exp2()
    }
}

impl Real for HighReal {
    fn precision_digits() -> u32 {
        precision::digits()
    }

    fn from_decimal(s: &str) -> Option<Self> {
        Self::from_decimal_str(s)
    }

    fn to_decimal_full(&self) -> String {
        format!("{}", self.0)
    }

    fn pow10(e: i32) -> Self {
        let ten = Self::from_u64_ctx(10);
        ten.powi(e)
    }

    fn pi() -> Self {
        let p = Self::ctx_bits();
        HighReal(precision::with_consts(|cc| cc.pi(p, RM)))
    }

    fn exp(&self) -> Self {
        let p = self.self_bits();
        HighReal(precision::with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    fn ln(&self) -> Self {
        let p = self.self_bits();
        HighReal(precision::with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    fn sin(&self) -> Self {
        let p = self.self_bits();
        HighReal(precision::with_consts(|cc| self.0.sin(p, RM, cc)))
    }

    fn cos(&self) -> Self {
        let p = self.self_bits();
        HighReal(precision::with_consts(|cc| self.0.cos(p, RM, cc)))
    }

    fn sqrt(&self) -> Self {
        let p = self.self_bits();
        HighReal(self.0.sqrt(p, RM))
    }

    fn powf(&self, e: &Self) -> Self {
        let p = Self::join_bits(&self.0, &e.0);
        HighReal(precision::with_consts(|cc| self.0.pow(&e.0, p, RM, cc)))
    }

    fn powi(&self, n: i32) -> Self {
        let p = self.self_bits();
        if n >= 0 {
            HighReal(self.0.powi(n as usize, p, RM))
        } else {
            HighReal(self.0.powi((-(n as i64)) as usize, p, RM).reciprocal(p, RM))
        }
    }

    fn floor(&self) -> Self {
        HighReal(self.0.floor())
    }

    fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }
}

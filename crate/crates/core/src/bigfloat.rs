//! Arbitrary-precision binary floating-point numbers with directed rounding.
//!
//! A [`BigFloat`] is `±mant * 2^exp` with an arbitrary-size integer mantissa.
//! The representation is canonical: the mantissa is odd, or the value is zero
//! (and then `exp == 0`, `neg == false`). Rounding operations take an explicit
//! precision in bits and a [`Round`] direction.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::mag::{ldexp, Mag};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
    /// To nearest, ties to even.
    Nearest,
    /// Toward zero.
    Zero,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BigFloat {
    neg: bool,
    mant: BigUint,
    exp: i64,
}

fn bits_of(m: &BigUint) -> i64 {
    m.bits() as i64
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat::default()
    }

    pub fn one() -> Self {
        BigFloat::from_i64(1)
    }

    /// Builds `±mant * 2^exp` exactly.
    pub fn from_parts(neg: bool, mant: BigUint, exp: i64) -> Self {
        let mut r = BigFloat { neg, mant, exp };
        r.normalize();
        r
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        BigFloat::from_bigint_2exp(v, 0)
    }

    /// Exactly `v * 2^e`.
    pub fn from_bigint_2exp(v: &BigInt, e: i64) -> Self {
        BigFloat::from_parts(v.sign() == Sign::Minus, v.magnitude().clone(), e)
    }

    pub fn from_i64(v: i64) -> Self {
        BigFloat::from_parts(v < 0, BigUint::from(v.unsigned_abs()), 0)
    }

    pub fn from_u64(v: u64) -> Self {
        BigFloat::from_parts(false, BigUint::from(v), 0)
    }

    /// Exact conversion; panics on NaN or infinity.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64 {x}");
        if x == 0.0 {
            return BigFloat::zero();
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        BigFloat::from_parts(neg, BigUint::from(m), e)
    }

    /// Exactly `2^e`.
    pub fn pow2(e: i64) -> Self {
        BigFloat::from_parts(false, BigUint::one(), e)
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.neg = false;
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    pub fn is_positive(&self) -> bool {
        !self.neg && !self.is_zero()
    }

    /// Sign as -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Number of significant bits (0 for zero).
    pub fn precision_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `e` with `2^(e-1) <= |self| < 2^e`; `i64::MIN` for zero.
    pub fn top(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + bits_of(&self.mant)
        }
    }

    /// The exact value as a rational.
    pub fn to_rational(&self) -> num_rational::BigRational {
        let m = self.signed_mantissa();
        if self.exp >= 0 {
            num_rational::BigRational::from_integer(m << self.exp as usize)
        } else {
            num_rational::BigRational::new(m, BigInt::from(1) << (-self.exp) as usize)
        }
    }

    /// Signed mantissa as a big integer.
    pub fn signed_mantissa(&self) -> BigInt {
        let s = if self.neg { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(s, self.mant.clone())
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        if !r.is_zero() {
            r.neg = !r.neg;
        }
        r
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    /// Exactly `self * 2^e`.
    pub fn mul_2exp(&self, e: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            neg: self.neg,
            mant: self.mant.clone(),
            exp: self.exp + e,
        }
    }

    /// Nearest `f64` (saturating to ±inf); for heuristics and display.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = bits_of(&self.mant);
        let (m, e) = if b > 64 {
            let sh = (b - 64) as usize;
            ((&self.mant >> sh).to_u64().unwrap(), self.exp + sh as i64)
        } else {
            (self.mant.to_u64().unwrap(), self.exp)
        };
        let v = ldexp(m as f64, e);
        if self.neg {
            -v
        } else {
            v
        }
    }

    /// Upper bound on `|self|` as a radius-grade magnitude.
    pub fn mag_upper(&self) -> Mag {
        self.mag_dir(true)
    }

    /// Lower bound on `|self|`.
    pub fn mag_lower(&self) -> Mag {
        self.mag_dir(false)
    }

    fn mag_dir(&self, up: bool) -> Mag {
        if self.is_zero() {
            return Mag::zero();
        }
        let b = bits_of(&self.mant);
        if b <= 100 {
            let m = self.mant.to_u128().unwrap();
            return if up {
                Mag::from_parts_up(m, self.exp)
            } else {
                Mag::from_parts_down(m, self.exp)
            };
        }
        let sh = (b - 64) as usize;
        let m = (&self.mant >> sh).to_u128().unwrap();
        // the mantissa is odd, so the shift always drops a nonzero tail
        if up {
            Mag::from_parts_up((m << 1) | 1, self.exp + sh as i64 - 1)
        } else {
            Mag::from_parts_down(m, self.exp + sh as i64)
        }
    }

    /// Exact value of a finite magnitude.
    pub fn from_mag(m: Mag) -> Self {
        assert!(m.is_finite(), "infinite magnitude has no BigFloat value");
        if m.is_zero() {
            return BigFloat::zero();
        }
        let (man, exp) = m.parts();
        BigFloat::from_parts(false, BigUint::from(man), exp)
    }

    /// Rounds `±(mant + δ) * 2^exp` where `δ ∈ (0,1)` if `sticky`.
    ///
    /// Returns the rounded value and whether it differs from the exact one.
    /// When `sticky` is set the caller must supply at least `prec + 2` bits.
    fn round_raw(
        neg: bool,
        mant: BigUint,
        exp: i64,
        sticky: bool,
        prec: u64,
        mode: Round,
    ) -> (BigFloat, bool) {
        assert!(prec >= 2, "precision must be at least 2 bits");
        let len = mant.bits();
        if len <= prec {
            debug_assert!(!sticky, "sticky rounding needs guard bits");
            return (BigFloat::from_parts(neg, mant, exp), false);
        }
        let drop = len - prec;
        let tz = mant.trailing_zeros().unwrap_or(0);
        let tail_zero = tz >= drop && !sticky;
        let mut q: BigUint = &mant >> drop as usize;
        let inc = if tail_zero {
            false
        } else {
            match mode {
                Round::Zero => false,
                Round::Up => !neg,
                Round::Down => neg,
                Round::Nearest => {
                    let half_bit = mant.bit(drop - 1);
                    if !half_bit {
                        false
                    } else {
                        // exactly half iff all bits below the half bit are zero
                        let below_zero = tz >= drop - 1 && !sticky;
                        if below_zero {
                            q.bit(0)
                        } else {
                            true
                        }
                    }
                }
            }
        };
        if inc {
            q += 1u32;
        }
        (BigFloat::from_parts(neg, q, exp + drop as i64), !tail_zero)
    }

    /// Rounds to `prec` bits.
    pub fn round(&self, prec: u64, mode: Round) -> Self {
        BigFloat::round_raw(self.neg, self.mant.clone(), self.exp, false, prec, mode).0
    }

    /// Rounds to nearest at `prec` bits and returns an upper bound for the error.
    pub fn round_err(&self, prec: u64) -> (Self, Mag) {
        let (r, inexact) =
            BigFloat::round_raw(self.neg, self.mant.clone(), self.exp, false, prec, Round::Nearest);
        let err = if inexact { ulp_bound(&r, prec) } else { Mag::zero() };
        (r, err)
    }

    /// Exact sum. Intended for operands of comparable magnitude.
    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = self.signed_mantissa() << (self.exp - e) as usize;
        let b = other.signed_mantissa() << (other.exp - e) as usize;
        BigFloat::from_bigint_2exp(&(a + b), e)
    }

    pub fn sub_exact(&self, other: &Self) -> Self {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return BigFloat::zero();
        }
        BigFloat {
            neg: self.neg != other.neg,
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    fn add_inner(&self, other: &Self, prec: u64, mode: Round) -> (Self, bool) {
        if self.is_zero() {
            let (r, i) =
                BigFloat::round_raw(other.neg, other.mant.clone(), other.exp, false, prec, mode);
            return (r, i);
        }
        if other.is_zero() {
            let (r, i) =
                BigFloat::round_raw(self.neg, self.mant.clone(), self.exp, false, prec, mode);
            return (r, i);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        // An operand lying strictly inside one rounding cell of the other can
        // be replaced by any value of the same sign inside that cell.
        let cell = big.exp.min(big.top() - prec as i64 - 2);
        let sum = if small.top() <= cell - 1 {
            let tiny = BigFloat {
                neg: small.neg,
                mant: BigUint::one(),
                exp: cell - 2,
            };
            big.add_exact(&tiny)
        } else {
            big.add_exact(small)
        };
        BigFloat::round_raw(sum.neg, sum.mant, sum.exp, false, prec, mode)
    }

    pub fn add(&self, other: &Self, prec: u64, mode: Round) -> Self {
        self.add_inner(other, prec, mode).0
    }

    pub fn sub(&self, other: &Self, prec: u64, mode: Round) -> Self {
        self.add_inner(&other.neg(), prec, mode).0
    }

    /// Nearest-rounded sum plus an error bound.
    pub fn add_err(&self, other: &Self, prec: u64) -> (Self, Mag) {
        let (r, inexact) = self.add_inner(other, prec, Round::Nearest);
        let err = if inexact { ulp_bound(&r, prec) } else { Mag::zero() };
        (r, err)
    }

    pub fn mul(&self, other: &Self, prec: u64, mode: Round) -> Self {
        let p = self.mul_exact(other);
        BigFloat::round_raw(p.neg, p.mant, p.exp, false, prec, mode).0
    }

    pub fn mul_err(&self, other: &Self, prec: u64) -> (Self, Mag) {
        let p = self.mul_exact(other);
        let (r, inexact) = BigFloat::round_raw(p.neg, p.mant, p.exp, false, prec, Round::Nearest);
        let err = if inexact { ulp_bound(&r, prec) } else { Mag::zero() };
        (r, err)
    }

    fn div_inner(&self, other: &Self, prec: u64, mode: Round) -> (Self, bool) {
        assert!(!other.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return (BigFloat::zero(), false);
        }
        let want = prec as i64 + 3;
        let shift = (want + bits_of(&other.mant) - bits_of(&self.mant)).max(0);
        let num = &self.mant << shift as usize;
        let (q, r) = num.div_rem(&other.mant);
        let exp = self.exp - shift - other.exp;
        BigFloat::round_raw(self.neg != other.neg, q, exp, !r.is_zero(), prec, mode)
    }

    pub fn div(&self, other: &Self, prec: u64, mode: Round) -> Self {
        self.div_inner(other, prec, mode).0
    }

    pub fn div_err(&self, other: &Self, prec: u64) -> (Self, Mag) {
        let (r, inexact) = self.div_inner(other, prec, Round::Nearest);
        let err = if inexact { ulp_bound(&r, prec) } else { Mag::zero() };
        (r, err)
    }

    fn sqrt_inner(&self, prec: u64, mode: Round) -> (Self, bool) {
        assert!(!self.neg, "square root of a negative BigFloat");
        if self.is_zero() {
            return (BigFloat::zero(), false);
        }
        let want = 2 * (prec as i64 + 3) + 1;
        let mut shift = (want - bits_of(&self.mant)).max(0);
        if (self.exp - shift) & 1 != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as usize;
        let s = m.sqrt();
        let exact = &s * &s == m;
        BigFloat::round_raw(false, s, (self.exp - shift) / 2, !exact, prec, mode)
    }

    pub fn sqrt(&self, prec: u64, mode: Round) -> Self {
        self.sqrt_inner(prec, mode).0
    }

    pub fn sqrt_err(&self, prec: u64) -> (Self, Mag) {
        let (r, inexact) = self.sqrt_inner(prec, Round::Nearest);
        let err = if inexact { ulp_bound(&r, prec) } else { Mag::zero() };
        (r, err)
    }

    /// `trunc(self * 2^t)` as an integer (rounding toward zero) and whether
    /// the conversion was exact.
    pub fn to_fixed(&self, t: i64) -> (BigInt, bool) {
        if self.is_zero() {
            return (BigInt::zero(), true);
        }
        let e = self.exp + t;
        let (mag, exact) = if e >= 0 {
            (&self.mant << e as usize, true)
        } else {
            let sh = (-e) as u64;
            let exact = self.mant.trailing_zeros().unwrap_or(0) >= sh;
            (&self.mant >> sh as usize, exact)
        };
        let s = if self.neg { Sign::Minus } else { Sign::Plus };
        (BigInt::from_biguint(s, mag), exact)
    }

    /// `floor(self)` as an integer.
    pub fn floor(&self) -> BigInt {
        let (t, exact) = self.to_fixed(0);
        if self.neg && !exact {
            t - 1
        } else {
            t
        }
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            return ta.cmp(&tb);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        a.cmp(&b)
    }
}

/// One ulp of `r` at `prec` bits (an upper bound for a nearest-rounding error).
fn ulp_bound(r: &BigFloat, prec: u64) -> Mag {
    if r.is_zero() {
        return Mag::zero();
    }
    Mag::pow2(r.top() - prec as i64)
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => a.cmp(&b),
            (0, 0) => Ordering::Equal,
            (1, _) => self.cmp_abs(other),
            _ => other.cmp_abs(self),
        }
    }
}

impl std::fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}0x{:x}p{} (~{:e})",
            if self.neg { "-" } else { "" },
            self.mant,
            self.exp,
            self.to_f64()
        )
    }
}

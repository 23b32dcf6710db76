//! Midpoint-radius (ball) arithmetic.
//!
//! A [`Ball`] `[m ± r]` stands for the closed interval `[m - r, m + r]`. Every
//! operation returns a ball containing the exact image of every point of its
//! inputs; midpoints are rounded to nearest at the requested precision and
//! the rounding error is folded into the (upward-rounded) radius.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bigfloat::{BigFloat, Round};
use crate::error::{Error, Result};
use crate::mag::Mag;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Ball {
    mid: BigFloat,
    rad: Mag,
}

impl Ball {
    pub fn new(mid: BigFloat, rad: Mag) -> Self {
        Ball { mid, rad }
    }

    pub fn zero() -> Self {
        Ball::default()
    }

    pub fn one() -> Self {
        Ball::exact(BigFloat::one())
    }

    pub fn exact(mid: BigFloat) -> Self {
        Ball {
            mid,
            rad: Mag::zero(),
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Ball::exact(BigFloat::from_i64(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Ball::exact(BigFloat::from_bigint(v))
    }

    /// Ball containing `num / den`, midpoint at `prec` bits.
    pub fn from_ratio(num: i64, den: i64, prec: u64) -> Self {
        Ball::from_i64(num).div(&Ball::from_i64(den), prec)
    }

    /// Ball containing the rational `q`, midpoint at `prec` bits.
    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        Ball::from_bigint(q.numer()).div(&Ball::from_bigint(q.denom()), prec)
    }

    /// The whole interval `[lo, hi]` (requires `lo <= hi`).
    pub fn from_endpoints(lo: &BigFloat, hi: &BigFloat) -> Self {
        debug_assert!(lo <= hi);
        let mid = lo.add_exact(hi).mul_2exp(-1);
        let half = hi.sub_exact(lo).mul_2exp(-1);
        Ball {
            mid,
            rad: half.mag_upper(),
        }
    }

    pub fn mid(&self) -> &BigFloat {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite()
    }

    /// True for the infinite-radius result of a division by a ball containing 0.
    pub fn is_indeterminate(&self) -> bool {
        self.rad.is_inf()
    }

    /// Lower endpoint, exactly. Requires a finite radius.
    pub fn lo(&self) -> BigFloat {
        self.mid.sub_exact(&BigFloat::from_mag(self.rad))
    }

    /// Upper endpoint, exactly. Requires a finite radius.
    pub fn hi(&self) -> BigFloat {
        self.mid.add_exact(&BigFloat::from_mag(self.rad))
    }

    /// Upper bound for `max |x|` over the ball.
    pub fn mag_upper(&self) -> Mag {
        self.mid.mag_upper().add(self.rad)
    }

    /// Lower bound for `min |x|` over the ball.
    pub fn mag_lower(&self) -> Mag {
        self.mid.mag_lower().sub_down(self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.rad.is_inf()
            || self.mid.cmp_abs(&BigFloat::from_mag(self.rad)) != std::cmp::Ordering::Greater
    }

    /// Strictly positive on the whole ball.
    pub fn is_positive(&self) -> bool {
        self.mid.is_positive() && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_negative() && !self.contains_zero()
    }

    pub fn contains_point(&self, x: &BigFloat) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        let d = self.mid.sub_exact(x);
        d.cmp_abs(&BigFloat::from_mag(self.rad)) != std::cmp::Ordering::Greater
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        // |q - mid| <= rad  <=>  |num - mid*den| <= rad*den, all scaled to integers
        let mid = &self.mid;
        let rad = BigFloat::from_mag(self.rad);
        let e = mid.exponent().min(rad.exponent()).min(0);
        let scale = |x: &BigFloat| -> BigInt { x.signed_mantissa() << (x.exponent() - e) as usize };
        let m = scale(mid);
        let r = scale(&rad);
        let num = q.numer() << (-e) as usize;
        let den = q.denom();
        let diff = (num - m * den).abs();
        diff <= r * den
    }

    /// Both balls contain a common point.
    pub fn overlaps(&self, other: &Ball) -> bool {
        if self.rad.is_inf() || other.rad.is_inf() {
            return true;
        }
        let d = self.mid.sub_exact(&other.mid);
        let r = BigFloat::from_mag(self.rad).add_exact(&BigFloat::from_mag(other.rad));
        d.cmp_abs(&r) != std::cmp::Ordering::Greater
    }

    /// `other` lies inside `self`.
    pub fn contains(&self, other: &Ball) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        if other.rad.is_inf() {
            return false;
        }
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    /// `other` lies strictly inside `self`.
    pub fn contains_interior(&self, other: &Ball) -> bool {
        if self.rad.is_inf() || other.rad.is_inf() {
            return false;
        }
        self.lo() < other.lo() && other.hi() < self.hi()
    }

    /// Intersection of two overlapping balls.
    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        if other.rad.is_inf() {
            return Some(self.clone());
        }
        if self.rad.is_inf() {
            return Some(other.clone());
        }
        let lo = self.lo().max(other.lo());
        let hi = self.hi().min(other.hi());
        if lo > hi {
            return None;
        }
        Some(Ball::from_endpoints(&lo, &hi))
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad,
        }
    }

    pub fn abs(&self) -> Ball {
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn mul_2exp(&self, e: i64) -> Ball {
        Ball {
            mid: self.mid.mul_2exp(e),
            rad: self.rad.mul_2exp(e),
        }
    }

    /// Widens the radius by `err`.
    pub fn add_error(&self, err: Mag) -> Ball {
        Ball {
            mid: self.mid.clone(),
            rad: self.rad.add(err),
        }
    }

    /// Rounds the midpoint to `prec` bits, keeping containment.
    pub fn round(&self, prec: u64) -> Ball {
        let (mid, err) = self.mid.round_err(prec);
        Ball {
            mid,
            rad: self.rad.add(err),
        }
    }

    pub fn add(&self, other: &Ball, prec: u64) -> Ball {
        let (mid, err) = self.mid.add_err(&other.mid, prec);
        Ball {
            mid,
            rad: self.rad.add(other.rad).add(err),
        }
    }

    pub fn sub(&self, other: &Ball, prec: u64) -> Ball {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Ball, prec: u64) -> Ball {
        let (mid, err) = self.mid.mul_err(&other.mid, prec);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            err
        } else {
            let a = self.mid.mag_upper();
            let b = other.mid.mag_upper();
            a.mul(other.rad)
                .add(b.mul(self.rad))
                .add(self.rad.mul(other.rad))
                .add(err)
        };
        Ball { mid, rad }
    }

    pub fn sqr(&self, prec: u64) -> Ball {
        self.mul(self, prec)
    }

    /// Quotient; an infinite-radius (indeterminate) ball if `other` contains 0.
    pub fn div(&self, other: &Ball, prec: u64) -> Ball {
        if other.contains_zero() {
            return Ball {
                mid: BigFloat::zero(),
                rad: Mag::inf(),
            };
        }
        let (mid, err) = self.mid.div_err(&other.mid, prec);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            err
        } else {
            let a = self.mid.mag_upper();
            let b_lo = other.mid.mag_lower();
            let num = a.mul(other.rad).add(other.mid.mag_upper().mul(self.rad));
            let den = b_lo.mul_down(b_lo.sub_down(other.rad));
            num.div(den).add(err)
        };
        Ball { mid, rad }
    }

    /// Multiplication by an exact integer.
    pub fn mul_bigint(&self, c: &BigInt, prec: u64) -> Ball {
        let cf = BigFloat::from_bigint(c);
        let (mid, err) = self.mid.mul_err(&cf, prec);
        Ball {
            mid,
            rad: self.rad.mul(cf.mag_upper()).add(err),
        }
    }

    /// Division by a nonzero exact integer.
    pub fn div_bigint(&self, c: &BigInt, prec: u64) -> Ball {
        assert!(!c.is_zero(), "division of a ball by the integer 0");
        let cf = BigFloat::from_bigint(c);
        let (mid, err) = self.mid.div_err(&cf, prec);
        Ball {
            mid,
            rad: self.rad.div(cf.mag_lower()).add(err),
        }
    }

    pub fn mul_i64(&self, c: i64, prec: u64) -> Ball {
        self.mul_bigint(&BigInt::from(c), prec)
    }

    pub fn div_i64(&self, c: i64, prec: u64) -> Ball {
        self.div_bigint(&BigInt::from(c), prec)
    }

    /// Square root over the nonnegative part of the ball.
    pub fn sqrt(&self, prec: u64) -> Result<Ball> {
        if self.rad.is_inf() {
            return Ok(Ball {
                mid: BigFloat::zero(),
                rad: Mag::inf(),
            });
        }
        if self.is_negative() {
            return Err(Error::Domain("square root of a negative ball".into()));
        }
        if self.rad.is_zero() {
            let (mid, err) = self.mid.sqrt_err(prec);
            return Ok(Ball { mid, rad: err });
        }
        let lo = self.lo();
        if !lo.is_positive() {
            // the ball reaches down to (or past) zero: enclose [0, sqrt(hi)]
            let top = self.hi().sqrt(prec, Round::Up);
            let half = top.mul_2exp(-1);
            return Ok(Ball {
                mid: half.clone(),
                rad: half.mag_upper(),
            });
        }
        let (mid, err) = self.mid.sqrt_err(prec);
        // |sqrt(x) - sqrt(m)| = |x - m| / (sqrt(x) + sqrt(m)) <= r / (sqrt(m - r) + sqrt(m))
        let den = lo.mag_lower().sqrt_down().add_down(self.mid.mag_lower().sqrt_down());
        Ok(Ball {
            mid,
            rad: self.rad.div(den).add(err),
        })
    }

    /// Positive integer power by binary powering.
    pub fn pow_u64(&self, mut k: u64, prec: u64) -> Ball {
        let mut acc = Ball::one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr(prec);
            }
        }
        acc
    }

    /// Smallest ball containing both.
    pub fn union(&self, other: &Ball) -> Ball {
        if self.rad.is_inf() || other.rad.is_inf() {
            return Ball {
                mid: BigFloat::zero(),
                rad: Mag::inf(),
            };
        }
        let lo = self.lo().min(other.lo());
        let hi = self.hi().max(other.hi());
        Ball::from_endpoints(&lo, &hi)
    }

    /// Radius relative to the smallest magnitude in the ball (`+inf` if it contains 0).
    pub fn rel_rad(&self) -> Mag {
        self.rad.div(self.mag_lower())
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} ± {:e}]", self.mid.to_f64(), self.rad.to_f64())
    }
}

impl From<BigFloat> for Ball {
    fn from(mid: BigFloat) -> Self {
        Ball::exact(mid)
    }
}

/// `2^e` as a ball.
pub fn pow2_ball(e: i64) -> Ball {
    Ball::exact(BigFloat::pow2(e))
}

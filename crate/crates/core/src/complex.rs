//! Rectangular complex balls.

use std::fmt;

use num_bigint::BigInt;

use crate::ball::Ball;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Default)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        ComplexBall { re, im }
    }

    pub fn from_real(re: Ball) -> Self {
        ComplexBall {
            re,
            im: Ball::zero(),
        }
    }

    pub fn zero() -> Self {
        ComplexBall::default()
    }

    pub fn one() -> Self {
        ComplexBall::from_real(Ball::one())
    }

    pub fn i() -> Self {
        ComplexBall::new(Ball::zero(), Ball::one())
    }

    pub fn add(&self, o: &ComplexBall, prec: u64) -> ComplexBall {
        ComplexBall::new(self.re.add(&o.re, prec), self.im.add(&o.im, prec))
    }

    pub fn sub(&self, o: &ComplexBall, prec: u64) -> ComplexBall {
        ComplexBall::new(self.re.sub(&o.re, prec), self.im.sub(&o.im, prec))
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &ComplexBall, prec: u64) -> ComplexBall {
        let re = self.re.mul(&o.re, prec).sub(&self.im.mul(&o.im, prec), prec);
        let im = self.re.mul(&o.im, prec).add(&self.im.mul(&o.re, prec), prec);
        ComplexBall::new(re, im)
    }

    pub fn sqr(&self, prec: u64) -> ComplexBall {
        let re = self.re.sqr(prec).sub(&self.im.sqr(prec), prec);
        let im = self.re.mul(&self.im, prec).mul_2exp(1);
        ComplexBall::new(re, im)
    }

    pub fn mul_real(&self, r: &Ball, prec: u64) -> ComplexBall {
        ComplexBall::new(self.re.mul(r, prec), self.im.mul(r, prec))
    }

    pub fn mul_bigint(&self, c: &BigInt, prec: u64) -> ComplexBall {
        ComplexBall::new(self.re.mul_bigint(c, prec), self.im.mul_bigint(c, prec))
    }

    pub fn div_bigint(&self, c: &BigInt, prec: u64) -> ComplexBall {
        ComplexBall::new(self.re.div_bigint(c, prec), self.im.div_bigint(c, prec))
    }

    /// `|z|` as a real ball.
    pub fn abs(&self, prec: u64) -> Result<Ball> {
        self.re.sqr(prec).add(&self.im.sqr(prec), prec).sqrt(prec)
    }

    /// Integer power by binary powering.
    pub fn pow_u64(&self, mut k: u64, prec: u64) -> ComplexBall {
        let mut acc = ComplexBall::one();
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

    /// Principal square root.
    ///
    /// Fails with a domain error when the rectangle touches the branch cut
    /// (the closed negative real axis, including 0).
    pub fn sqrt(&self, prec: u64) -> Result<ComplexBall> {
        let wp = prec + 8;
        let r = self.abs(wp)?;
        if self.re.is_positive() {
            let s_re = r.add(&self.re, wp).mul_2exp(-1).sqrt(wp)?;
            let s_im = self.im.div(&s_re.mul_2exp(1), wp);
            return Ok(ComplexBall::new(s_re.round(prec), s_im.round(prec)));
        }
        let sign = if self.im.is_positive() {
            1
        } else if self.im.is_negative() {
            -1
        } else {
            return Err(Error::Domain(
                "complex square root across the branch cut".into(),
            ));
        };
        let mut s_im = r.sub(&self.re, wp).mul_2exp(-1).sqrt(wp)?;
        if sign < 0 {
            s_im = s_im.neg();
        }
        let s_re = self.im.div(&s_im.mul_2exp(1), wp);
        Ok(ComplexBall::new(s_re.round(prec), s_im.round(prec)))
    }

    /// `z^(m/2)` for odd `m >= 1` on the principal branch, computed as
    /// `z^((m-1)/2) * sqrt(z)`.
    pub fn pow_half_odd(&self, m: u64, prec: u64) -> Result<ComplexBall> {
        if m % 2 == 0 {
            return Err(Error::Precondition(format!(
                "half-integer power needs an odd numerator, got {m}"
            )));
        }
        let root = self.sqrt(prec)?;
        Ok(self.pow_u64((m - 1) / 2, prec).mul(&root, prec))
    }

    pub fn overlaps(&self, o: &ComplexBall) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }
}

impl fmt::Debug for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + {:?}i", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::BigFloat;
    use crate::mag::Mag;

    const PREC: u64 = 80;

    fn half_sqrt2() -> Ball {
        Ball::from_i64(2).sqrt(PREC + 20).unwrap().mul_2exp(-1)
    }

    #[test]
    fn one_to_five_halves() {
        let r = ComplexBall::one().pow_half_odd(5, PREC).unwrap();
        assert!(r.re.contains_point(&BigFloat::one()));
        assert!(r.im.contains_point(&BigFloat::zero()));
    }

    #[test]
    fn sqrt_of_i() {
        let r = ComplexBall::i().pow_half_odd(1, PREC).unwrap();
        let h = half_sqrt2();
        assert!(r.re.overlaps(&h) && r.im.overlaps(&h));
        assert!(r.re.rad() <= Mag::pow2(-(PREC as i64) + 2));
    }

    #[test]
    fn i_to_three_halves() {
        let r = ComplexBall::i().pow_half_odd(3, PREC).unwrap();
        let h = half_sqrt2();
        assert!(r.re.overlaps(&h.neg()) && r.im.overlaps(&h));
    }

    #[test]
    fn branch_cut_rejected() {
        let z = ComplexBall::new(
            Ball::from_i64(-1),
            Ball::new(BigFloat::zero(), Mag::pow2(-10)),
        );
        assert!(matches!(z.sqrt(PREC), Err(Error::Domain(_))));
        assert!(ComplexBall::one().pow_half_odd(4, PREC).is_err());
    }

    #[test]
    fn square_root_squares_back() {
        let z = ComplexBall::new(Ball::from_ratio(3, 10, PREC), Ball::from_ratio(-7, 5, PREC));
        let s = z.sqrt(PREC).unwrap();
        let back = s.sqr(PREC);
        assert!(back.overlaps(&z));
        assert!(s.re.is_positive());
    }
}

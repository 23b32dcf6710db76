//! Low-precision unsigned magnitudes used as ball radii and error bounds.
//!
//! A [`Mag`] is `man * 2^exp` with a 30-bit mantissa, or `+inf`. Every
//! operation has an explicit rounding direction: the plain methods round
//! upward (they produce upper bounds), the `_down` variants round toward zero
//! (they produce lower bounds).

use std::cmp::Ordering;
use std::fmt;

const MAG_BITS: u32 = 30;
const MAN_LO: u64 = 1 << (MAG_BITS - 1);
const MAN_HI: u64 = 1 << MAG_BITS;
/// Exponents beyond this are treated as overflow and become `+inf`.
const EXP_LIMIT: i64 = 1 << 60;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mag {
    /// 0, or in `[2^29, 2^30)`; `u64::MAX` marks infinity.
    man: u64,
    exp: i64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Up,
    Down,
}

fn isqrt_u128(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = (v as f64).sqrt() as u128;
    while x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x
}

impl Mag {
    pub const fn zero() -> Self {
        Mag { man: 0, exp: 0 }
    }

    pub const fn inf() -> Self {
        Mag {
            man: u64::MAX,
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Mag::pow2(0)
    }

    /// Exactly `2^e`.
    pub fn pow2(e: i64) -> Self {
        Mag::from_u128(1, e, Dir::Up)
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn is_inf(&self) -> bool {
        self.man == u64::MAX
    }

    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    /// Mantissa and exponent of a finite value.
    pub fn parts(&self) -> (u64, i64) {
        debug_assert!(self.is_finite());
        (self.man, self.exp)
    }

    /// Builds `m * 2^e` rounded in the given direction.
    fn from_u128(m: u128, e: i64, dir: Dir) -> Self {
        if m == 0 {
            return Mag::zero();
        }
        let bits = 128 - m.leading_zeros();
        let (man, exp) = if bits > MAG_BITS {
            let shift = bits - MAG_BITS;
            let mut q = (m >> shift) as u64;
            let inexact = m & ((1u128 << shift) - 1) != 0;
            let mut exp = e + shift as i64;
            if inexact && dir == Dir::Up {
                q += 1;
                if q == MAN_HI {
                    q >>= 1;
                    exp += 1;
                }
            }
            (q, exp)
        } else {
            let shift = MAG_BITS - bits;
            ((m as u64) << shift, e - shift as i64)
        };
        if exp > EXP_LIMIT {
            return if dir == Dir::Up {
                Mag::inf()
            } else {
                Mag {
                    man: MAN_HI - 1,
                    exp: EXP_LIMIT,
                }
            };
        }
        if exp < -EXP_LIMIT {
            return if dir == Dir::Up {
                Mag {
                    man: MAN_LO,
                    exp: -EXP_LIMIT,
                }
            } else {
                Mag::zero()
            };
        }
        Mag { man, exp }
    }

    /// Upper bound for `m * 2^e`.
    pub fn from_parts_up(m: u128, e: i64) -> Self {
        Mag::from_u128(m, e, Dir::Up)
    }

    /// Lower bound for `m * 2^e`.
    pub fn from_parts_down(m: u128, e: i64) -> Self {
        Mag::from_u128(m, e, Dir::Down)
    }

    pub fn from_u64(v: u64) -> Self {
        Mag::from_u128(v as u128, 0, Dir::Up)
    }

    pub fn from_u64_down(v: u64) -> Self {
        Mag::from_u128(v as u128, 0, Dir::Down)
    }

    /// Upper bound for `num / den`.
    pub fn from_ratio(num: u64, den: u64) -> Self {
        Mag::from_u64(num).div(Mag::from_u64_down(den))
    }

    /// Lower bound for `num / den`.
    pub fn from_ratio_down(num: u64, den: u64) -> Self {
        Mag::from_u64_down(num).div_down(Mag::from_u64(den))
    }

    /// Upper bound for `|x|`; NaN and infinities give `+inf`.
    pub fn from_f64(x: f64) -> Self {
        Mag::from_f64_dir(x, Dir::Up)
    }

    /// Lower bound for `|x|`.
    pub fn from_f64_down(x: f64) -> Self {
        Mag::from_f64_dir(x, Dir::Down)
    }

    fn from_f64_dir(x: f64, dir: Dir) -> Self {
        let x = x.abs();
        if x.is_nan() || x.is_infinite() {
            return if dir == Dir::Up { Mag::inf() } else { Mag::zero() };
        }
        if x == 0.0 {
            return Mag::zero();
        }
        let bits = x.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Mag::from_u128(m as u128, e, dir)
    }

    /// Nearest `f64` (saturating); for heuristics and display only.
    pub fn to_f64(&self) -> f64 {
        if self.is_inf() {
            return f64::INFINITY;
        }
        if self.is_zero() {
            return 0.0;
        }
        ldexp(self.man as f64, self.exp)
    }

    /// Approximate `log2` of the value; `-inf` for zero.
    pub fn log2_approx(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        if self.is_inf() {
            return f64::INFINITY;
        }
        (self.man as f64).log2() + self.exp as f64
    }

    /// Smallest `e` with `self <= 2^e` (for finite nonzero values).
    pub fn ceil_log2(&self) -> i64 {
        debug_assert!(self.is_finite() && !self.is_zero());
        let top = self.exp + MAG_BITS as i64;
        if self.man == MAN_LO {
            top - 1
        } else {
            top
        }
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        if self.is_zero() || self.is_inf() {
            return *self;
        }
        Mag::from_u128(self.man as u128, self.exp + e, Dir::Up)
    }

    fn add_dir(self, other: Mag, dir: Dir) -> Mag {
        if self.is_inf() || other.is_inf() {
            return Mag::inf();
        }
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (a, b) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let d = (a.exp - b.exp) as u64;
        if d > 90 {
            return match dir {
                Dir::Up => Mag::from_u128(((a.man as u128) << 2) + 1, a.exp - 2, Dir::Up),
                Dir::Down => a,
            };
        }
        let m = ((a.man as u128) << d) + b.man as u128;
        Mag::from_u128(m, b.exp, dir)
    }

    /// Upper bound for `self + other`.
    pub fn add(self, other: Mag) -> Mag {
        self.add_dir(other, Dir::Up)
    }

    /// Lower bound for `self + other`.
    pub fn add_down(self, other: Mag) -> Mag {
        self.add_dir(other, Dir::Down)
    }

    fn sub_dir(self, other: Mag, dir: Dir) -> Mag {
        if other.is_zero() {
            return self;
        }
        if self.is_inf() {
            return if other.is_inf() { Mag::zero() } else { self };
        }
        if other.is_inf() || self <= other {
            return Mag::zero();
        }
        // self > other > 0, both normalized, hence self.exp >= other.exp
        let d = (self.exp - other.exp) as u64;
        if d > 90 {
            return match dir {
                Dir::Up => self,
                Dir::Down => Mag::from_u128(((self.man as u128) << 2) - 1, self.exp - 2, Dir::Down),
            };
        }
        let m = ((self.man as u128) << d) - other.man as u128;
        Mag::from_u128(m, other.exp, dir)
    }

    /// Lower bound for `max(self - other, 0)`.
    pub fn sub_down(self, other: Mag) -> Mag {
        self.sub_dir(other, Dir::Down)
    }

    /// Upper bound for `max(self - other, 0)`.
    pub fn sub_up(self, other: Mag) -> Mag {
        self.sub_dir(other, Dir::Up)
    }

    fn mul_dir(self, other: Mag, dir: Dir) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        if self.is_inf() || other.is_inf() {
            return Mag::inf();
        }
        let m = self.man as u128 * other.man as u128;
        Mag::from_u128(m, self.exp + other.exp, dir)
    }

    /// Upper bound for `self * other` (`0 * inf = 0`).
    pub fn mul(self, other: Mag) -> Mag {
        self.mul_dir(other, Dir::Up)
    }

    pub fn mul_down(self, other: Mag) -> Mag {
        self.mul_dir(other, Dir::Down)
    }

    fn div_dir(self, other: Mag, dir: Dir) -> Mag {
        if self.is_zero() {
            return Mag::zero();
        }
        if other.is_zero() || self.is_inf() {
            return if dir == Dir::Up || self.is_inf() {
                Mag::inf()
            } else {
                Mag::zero()
            };
        }
        if other.is_inf() {
            return Mag::zero();
        }
        let num = (self.man as u128) << 64;
        let den = other.man as u128;
        let mut q = num / den;
        if dir == Dir::Up && num % den != 0 {
            q += 1;
        }
        Mag::from_u128(q, self.exp - other.exp - 64, dir)
    }

    /// Upper bound for `self / other`; division by zero gives `+inf`.
    pub fn div(self, other: Mag) -> Mag {
        self.div_dir(other, Dir::Up)
    }

    pub fn div_down(self, other: Mag) -> Mag {
        self.div_dir(other, Dir::Down)
    }

    fn sqrt_dir(self, dir: Dir) -> Mag {
        if self.is_zero() || self.is_inf() {
            return self;
        }
        let mut m = self.man as u128;
        let mut e = self.exp;
        if e & 1 != 0 {
            m <<= 1;
            e -= 1;
        }
        m <<= 64;
        e -= 64;
        let mut r = isqrt_u128(m);
        if dir == Dir::Up && r * r != m {
            r += 1;
        }
        Mag::from_u128(r, e / 2, dir)
    }

    pub fn sqrt(self) -> Mag {
        self.sqrt_dir(Dir::Up)
    }

    pub fn sqrt_down(self) -> Mag {
        self.sqrt_dir(Dir::Down)
    }

    fn pow_dir(self, mut k: u64, dir: Dir) -> Mag {
        let mut base = self;
        let mut acc = Mag::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_dir(base, dir);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_dir(base, dir);
            }
        }
        acc
    }

    /// Upper bound for `self^k`.
    pub fn pow(self, k: u64) -> Mag {
        self.pow_dir(k, Dir::Up)
    }

    pub fn pow_down(self, k: u64) -> Mag {
        self.pow_dir(k, Dir::Down)
    }

    pub fn max(self, other: Mag) -> Mag {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Mag) -> Mag {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_inf(), other.is_inf()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.exp
            .cmp(&other.exp)
            .then_with(|| self.man.cmp(&other.man))
    }
}

impl Default for Mag {
    fn default() -> Self {
        Mag::zero()
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "Mag(+inf)")
        } else {
            write!(f, "Mag({}*2^{} ~ {:e})", self.man, self.exp, self.to_f64())
        }
    }
}

/// `x * 2^e` without intermediate overflow in the scale factor.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

//! Mathematical constants and the few elementary functions the library needs.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ball::Ball;
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::mag::Mag;

type Cache = RwLock<HashMap<u64, Ball>>;

fn cached(cell: &'static OnceLock<Cache>, prec: u64, f: impl FnOnce(u64) -> Ball) -> Ball {
    let cache = cell.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().unwrap().get(&prec) {
        return b.clone();
    }
    let b = f(prec);
    cache.write().unwrap().entry(prec).or_insert(b).clone()
}

/// `Σ_{k≥0} s^k floor(2^w / (x^(2k+1) (2k+1)))` with `s = -1` when `alternating`.
///
/// Returns the sum and the number of ulps of error (truncations plus tail).
fn arc_series(x: u64, w: u64, alternating: bool) -> (BigInt, u64) {
    let x2 = BigInt::from(x) * x;
    let mut power = (BigInt::one() << w as usize) / x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if alternating && k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        power /= &x2;
        k += 1;
    }
    // each term is truncated by < 1 ulp; the omitted tail is below 2 ulps
    (sum, k + 2)
}

/// Turns a fixed-point value `v * 2^-w` with error `err` ulps into a ball
/// whose midpoint has `prec` bits.
fn fixed_to_ball(v: &BigInt, err: u64, w: u64, prec: u64) -> Ball {
    let exact = BigFloat::from_bigint_2exp(v, -(w as i64));
    let (mid, _) = exact.round_err(prec);
    let diff = mid.sub_exact(&exact).mag_upper();
    let rad = diff.add(Mag::from_u64(err).mul_2exp(-(w as i64)));
    Ball::new(mid, rad)
}

fn compute_pi(prec: u64) -> Ball {
    let w = prec + 24;
    let (a, ea) = arc_series(5, w, true);
    let (b, eb) = arc_series(239, w, true);
    let v = a * 16 - b * 4;
    fixed_to_ball(&v, 16 * ea + 4 * eb, w, prec)
}

fn compute_ln2(prec: u64) -> Ball {
    let w = prec + 24;
    let (a, ea) = arc_series(3, w, false);
    fixed_to_ball(&(a * 2), 2 * ea, w, prec)
}

fn compute_ln3(prec: u64) -> Ball {
    // ln 3 = 2 atanh(1/3) + 2 atanh(1/5)
    let w = prec + 24;
    let (a, ea) = arc_series(3, w, false);
    let (b, eb) = arc_series(5, w, false);
    fixed_to_ball(&((a + b) * 2), 2 * (ea + eb), w, prec)
}

static PI: OnceLock<Cache> = OnceLock::new();
static LN2: OnceLock<Cache> = OnceLock::new();
static LN3: OnceLock<Cache> = OnceLock::new();

/// π with radius at most `2^(1-prec)`; cached per precision.
pub fn const_pi(prec: u64) -> Ball {
    cached(&PI, prec, compute_pi)
}

/// ln 2, cached per precision.
pub fn const_ln2(prec: u64) -> Ball {
    cached(&LN2, prec, compute_ln2)
}

/// ln 3, cached per precision.
pub fn const_ln3(prec: u64) -> Ball {
    cached(&LN3, prec, compute_ln3)
}

/// Natural logarithm of a ball with positive lower endpoint.
pub fn ln(x: &Ball, prec: u64) -> Result<Ball> {
    if !x.is_positive() || !x.is_finite() {
        return Err(Error::Domain("logarithm of a ball that is not positive".into()));
    }
    let wp = prec + 16;
    let m = x.mid();
    // m = 2^e * f with f in [1, 2)
    let e = m.top() - 1;
    let f = Ball::exact(m.mul_2exp(-e));
    // ln f = 2 atanh(t), t = (f-1)/(f+1) in [0, 1/3)
    let t = f.sub(&Ball::one(), wp).div(&f.add(&Ball::one(), wp), wp);
    let t2 = t.sqr(wp);
    let tmag = t.mag_upper();
    let t2mag = tmag.mul(tmag);
    let mut sum = Ball::zero();
    let mut pw = t.clone();
    let mut k: u64 = 0;
    let target = Mag::pow2(-(wp as i64));
    loop {
        let term = pw.div_i64((2 * k + 1) as i64, wp);
        sum = sum.add(&term, wp);
        k += 1;
        pw = pw.mul(&t2, wp);
        // remaining tail ≤ |t|^(2k+1) / ((2k+1)(1 - t²))
        let tail = pw
            .mag_upper()
            .div(Mag::from_u64(2 * k + 1))
            .div(Mag::one().sub_down(t2mag));
        if tail <= target || tmag.is_zero() {
            sum = sum.add_error(tail);
            break;
        }
    }
    let mut r = sum.mul_2exp(1);
    if e != 0 {
        r = r.add(&const_ln2(wp).mul_i64(e, wp), wp);
    }
    // |d ln / dx| ≤ 1/lo on the ball
    let prop = x.rad().div(x.mag_lower());
    Ok(r.add_error(prop).round(prec))
}

/// Exponential of a finite ball.
pub fn exp(x: &Ball, prec: u64) -> Result<Ball> {
    if !x.is_finite() {
        return Err(Error::Domain("exponential of an unbounded ball".into()));
    }
    let xm = x.mag_upper().to_f64();
    if xm > 1e15 {
        return Err(Error::Domain("exponential argument too large".into()));
    }
    let guard = 24 + (xm.max(1.0).log2().ceil() as u64);
    let wp = prec + guard;
    let ln2 = const_ln2(wp + 64);
    let kf = (x.mid().to_f64() / std::f64::consts::LN_2).round();
    let k = kf as i64;
    let r = x.sub(&ln2.mul_i64(k, wp + 64), wp);
    let s: i64 = 12;
    let r = r.mul_2exp(-s);
    let rmag = r.mag_upper();
    let mut sum = Ball::one();
    let mut term = Ball::one();
    let mut j: u64 = 1;
    let target = Mag::pow2(-(wp as i64) - 4);
    loop {
        term = term.mul(&r, wp).div_i64(j as i64, wp);
        sum = sum.add(&term, wp);
        j += 1;
        // tail ≤ |term| |r| / (j (1 - |r|)) with |r| ≤ 1/2
        let tail = term.mag_upper().mul(rmag).div(Mag::from_u64(j)).mul_2exp(1);
        if tail <= target || rmag.is_zero() {
            sum = sum.add_error(tail);
            break;
        }
    }
    for _ in 0..s {
        sum = sum.sqr(wp);
    }
    Ok(sum.mul_2exp(k).round(prec))
}

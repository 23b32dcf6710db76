#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use legq::format::{parse_decimal, parse_hex};
use legq::fxp::legendre_pair_rec_ball;
use legq::{Ball, BigFloat, Mag};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `2^(n(t+1)) P_n(X 2^-t)` as an exact integer.
pub fn legendre_scaled(xhat: &BigInt, t: u64, n: u64) -> BigInt {
    let s = BigInt::from(1) << (2 * (t + 1)) as usize;
    let mut prev = BigInt::from(1);
    if n == 0 {
        return prev;
    }
    let mut cur = xhat * 2;
    for k in 1..n {
        let next = (BigInt::from(2 * k + 1) * xhat * 2 * &cur - BigInt::from(k) * &s * &prev)
            / BigInt::from(k + 1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact coefficients of `P_n` in the monomial basis, lowest degree first.
pub fn legendre_coeffs(n: u64) -> Vec<BigRational> {
    let mut prev = vec![BigRational::from_integer(1.into())];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![BigRational::from_integer(0.into()), BigRational::from_integer(1.into())];
    for k in 1..n {
        let mut next = vec![BigRational::from_integer(0.into()); (k + 2) as usize];
        let a = BigRational::new((2 * k + 1).into(), (k + 1).into());
        let b = BigRational::new(k.into(), (k + 1).into());
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += &a * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= &b * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Reference `(P_n(x), P'_n(x))` from the recurrence at `prec` bits.
pub fn reference(n: u64, x: &BigFloat, prec: u64) -> (Ball, Ball) {
    let one = BigFloat::one();
    if n == 0 {
        return (Ball::one(), Ball::zero());
    }
    if x.abs() == one {
        let sign = if x.is_negative() && n % 2 == 1 { -1 } else { 1 };
        let dsign = if x.is_negative() && n % 2 == 0 { -1 } else { 1 };
        let d = (n * (n + 1) / 2) as i64;
        return (Ball::from_i64(sign), Ball::from_i64(dsign * d));
    }
    let wp = prec + 2 * (64 - n.leading_zeros() as u64) + 64;
    let (pm1, pn) = legendre_pair_rec_ball(x, n, wp).expect("reference recurrence");
    let xb = Ball::exact(x.clone());
    let num = xb.mul(&pn, wp).sub(&pm1, wp).mul_i64(n as i64, wp);
    let den = xb.sqr(wp).sub(&Ball::one(), wp);
    (pn, num.div(&den, wp))
}

/// Mixture of uniform, near-1, near-0 and cosine-distributed arguments.
pub fn random_x(rng: &mut StdRng) -> f64 {
    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    match rng.gen_range(0..5) {
        0 => rng.gen_range(-1.0..=1.0),
        1 => s * (1.0 - 10f64.powf(-rng.gen_range(1.0..14.0))),
        2 => s * 10f64.powf(-rng.gen_range(0.0..8.0)),
        3 => rng.gen_range(0.0..std::f64::consts::PI).cos(),
        _ => [0.0, 1.0, -1.0, 0.5][rng.gen_range(0..4)],
    }
}

pub fn random_n(rng: &mut StdRng, max: u64) -> u64 {
    match rng.gen_range(0..3) {
        0 => rng.gen_range(0..=30),
        1 => rng.gen_range(2..=max / 10),
        _ => rng.gen_range(2..=max),
    }
}

/// A tight reference must have its midpoint in `outer` (the true value may
/// sit on the edge of `outer`); a loose one only has to overlap.
pub fn encloses(outer: &Ball, inner: &Ball) -> bool {
    if inner.rad().mul_2exp(2) <= outer.rad() {
        outer.contains(inner) || (outer.overlaps(inner) && outer.contains_point(inner.mid()))
    } else {
        outer.overlaps(inner)
    }
}

pub fn decimal_ball(s: &str, digits_err: i64) -> Ball {
    let q = parse_decimal(s).expect("decimal");
    let b = Ball::from_rational(&q, 1400);
    // a `digits`-digit decimal is within 10^(e-digits) of the true value
    b.add_error(Mag::pow2(-((digits_err as f64) * 3.3219) as i64))
}

pub fn hex(s: &str) -> BigFloat {
    parse_hex(s).expect("hex literal")
}

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn verdict(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

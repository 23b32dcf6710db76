//! Asymptotic expansion in `n`, summed over complex balls.
//!
//! `P_n(x) = (πy)^(-1/2) Re[(1-i) z^(n+1/2) Σ_{k<K} C_{n,k} ω^k] + ξ_{n,K}`
//! with `z = x + yi`, `y = √(1-x²)`, `ω = 1 - (x/y) i`.

use crate::ball::{pow2_ball, Ball};
use crate::bigfloat::BigFloat;
use crate::complex::ComplexBall;
use crate::consts::const_pi;
use crate::error::Result;
use crate::evaluator::Method;
use crate::mag::Mag;
use crate::rectsplit::{default_m, hyper_sum, PowersTable, TermRatio};
use crate::scalars::central_binomial_ball;

use super::{const_prec, escalate, inapplicable, tail_target, working_prec, ESCALATIONS};

fn pi_lower() -> Mag {
    Mag::from_ratio_down(314_159_265, 100_000_000)
}

/// Coefficient ratio `C_{n,k}/C_{n,k-1} = (2k-1)² / (4k(2n+2k+1))`.
pub fn ratio(n: u64) -> TermRatio {
    let n = n as i64;
    TermRatio::new([1, -4, 4], [0, 8 * n + 4, 8])
}

/// `C_{n,k} ≤ k! n! / (π √n 2^k (n+k)!)`, rounded up.
pub fn coeff_bound(n: u64, k: u64) -> Mag {
    let mut r = Mag::one();
    for j in 1..=k {
        r = r.mul(Mag::from_u64(j)).div(Mag::from_u64_down(n + j));
    }
    r.mul_2exp(-(k as i64))
        .div(pi_lower().mul_down(Mag::from_u64_down(n).sqrt_down()))
}

/// Bound on `|ξ_{n,K}|` given a lower bound for `y`; `+inf` when `y_lower = 0`.
pub fn asym_tail_bound(n: u64, k: u64, y_lower: Mag) -> Mag {
    if y_lower.is_zero() || n == 0 {
        return Mag::inf();
    }
    let pref = Mag::from_u64(2)
        .div(pi_lower().mul_down(y_lower))
        .sqrt()
        .mul_2exp(1);
    pref.mul(coeff_bound(n, k)).div(y_lower.pow_down(k))
}

/// Smallest `K` whose (approximate) tail bound is below `2^-bits`, if any.
pub fn choose_k(n: u64, y: f64, bits: f64) -> Option<u64> {
    if n == 0 || y <= 0.0 {
        return None;
    }
    let nf = n as f64;
    let ly = y.log2();
    let mut l = 1.0 + 0.5 * (2.0 / (std::f64::consts::PI * y)).log2()
        - (std::f64::consts::PI * nf.sqrt()).log2();
    let mut k: u64 = 0;
    loop {
        if l <= -bits {
            return Some(k.max(1));
        }
        k += 1;
        let step = (k as f64).log2() - (nf + k as f64).log2() - 1.0 - ly;
        if step >= 0.0 || k > 1 << 22 {
            return None;
        }
        l += step;
    }
}

/// `C_{n,0} = 2^(2n+1) / (√π (2n+1) C(2n,n))`.
fn leading_coeff(n: u64, wp: u64) -> Ball {
    let cp = const_prec(wp);
    let binom = central_binomial_ball(n, cp);
    let sqrt_pi = const_pi(cp).sqrt(cp).expect("π is positive");
    let den = sqrt_pi.mul(&binom, wp).mul_i64(2 * n as i64 + 1, wp);
    pow2_ball(2 * n as i64 + 1).div(&den, wp)
}

struct Geometry {
    z: ComplexBall,
    omega: ComplexBall,
    y: Ball,
}

fn geometry(x: &BigFloat, wp: u64) -> Result<Geometry> {
    let xb = Ball::exact(x.clone());
    let y2 = Ball::one()
        .sub(&xb, wp)
        .mul(&Ball::one().add(&xb, wp), wp);
    let y = y2.sqrt(wp)?;
    if !y.is_positive() {
        return Err(inapplicable(Method::Asym, "argument too close to 1"));
    }
    let omega = ComplexBall::new(Ball::one(), xb.div(&y, wp).neg());
    let z = ComplexBall::new(xb, y.clone());
    Ok(Geometry { z, omega, y })
}

/// The `K`-term approximation for `P_n` (and `P_{n-1}` if `want_prev`), without the tail.
pub fn partial(
    n: u64,
    x: &BigFloat,
    k: u64,
    wp: u64,
    want_prev: bool,
) -> Result<(Ball, Option<Ball>)> {
    let g = geometry(x, wp)?;
    let table = PowersTable::new(&g.omega, default_m(k.max(1), want_prev), wp);
    let series = |deg: u64| -> Result<ComplexBall> {
        let s = hyper_sum(&g.omega, &ratio(deg), k, 1, Some(&table), wp)?;
        Ok(if k >= 1 { s.add(&ComplexBall::one(), wp) } else { s })
    };
    let zp = g.z.pow_half_odd(2 * n + 1, wp)?;
    let c0 = leading_coeff(n, wp);
    let inv_root = Ball::one().div(
        &const_pi(const_prec(wp)).mul(&g.y, wp).sqrt(wp)?,
        wp,
    );
    let combine = |w: ComplexBall, c: &Ball| -> Ball {
        // Re[(1-i) w] = Re w + Im w
        w.re.add(&w.im, wp).mul(c, wp).mul(&inv_root, wp)
    };
    let val = combine(zp.mul(&series(n)?, wp), &c0);
    let prev = if want_prev && n >= 2 {
        let c0p = c0.mul_i64(2 * n as i64 + 1, wp).div_i64(2 * n as i64, wp);
        let zq = zp.mul(&g.z.conj(), wp);
        Some(combine(zq.mul(&series(n - 1)?, wp), &c0p))
    } else {
        None
    };
    Ok((val, prev))
}

/// `P_n(x)` (and `P_{n-1}(x)`) for `0 ≤ x < 1`, `n ≥ 1`, starting from `K = k`.
pub fn eval_asymptotic(
    n: u64,
    x: &BigFloat,
    p_target: u64,
    k: u64,
    want_prev: bool,
) -> Result<(Ball, Option<Ball>)> {
    if n == 0 || x.is_negative() {
        return Err(inapplicable(Method::Asym, "needs n >= 1 and x >= 0"));
    }
    let y_lo = geometry(x, 64)?.y.mag_lower();
    let target = tail_target(p_target);
    let paired = want_prev && n >= 2;
    let tails = |k: u64| {
        let t = asym_tail_bound(n, k, y_lo);
        let tp = if paired { asym_tail_bound(n - 1, k, y_lo) } else { Mag::zero() };
        (t, tp)
    };
    let mut k = k.max(1);
    let mut ok = false;
    for _ in 0..=ESCALATIONS {
        let (t, tp) = tails(k);
        if t <= target && tp <= target {
            ok = true;
            break;
        }
        k = escalate(k);
    }
    if !ok {
        return Err(inapplicable(Method::Asym, "truncation bound not reached"));
    }
    let (t, tp) = tails(k);
    let wp = working_prec(p_target, 0, n);
    let (v, pv) = partial(n, x, k, wp, want_prev)?;
    Ok((v.add_error(t), pv.map(|b| b.add_error(tp))))
}

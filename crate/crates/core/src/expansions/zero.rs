//! Expansion at `x = 0` in the monomial basis, in powers of `-x²`.

use crate::ball::Ball;
use crate::bigfloat::BigFloat;
use crate::error::Result;
use crate::evaluator::Method;
use crate::mag::Mag;
use crate::rectsplit::{hyper_sum, TermRatio};
use crate::scalars::{binom_log2_upper, binom_mag_upper, central_binomial_ball};

use super::{
    cancellation_bits, const_prec, escalate, inapplicable, tail_target, working_prec, CancelKind,
    ESCALATIONS,
};

/// `d = ⌊n/2⌋` and `σ = -1` for even `n`, `+1` for odd `n`.
pub fn split(n: u64) -> (u64, i64) {
    (n / 2, if n % 2 == 0 { -1 } else { 1 })
}

/// `A_σ(d,k)/A_σ(d,k-1) = (d-k+1)(2d+2k+σ) / (k(2k+σ))`.
pub fn ratio(d: u64, sigma: i64) -> TermRatio {
    let d = d as i64;
    TermRatio::new([(d + 1) * (2 * d + sigma), 2 - sigma, -2], [0, sigma, 2])
}

/// `(-1)^d 2^(-2d) C(2d,d)` for even `n`; `(-1)^d (d+1) 2^(-2d-1) C(2d+2,d+1) x` for odd `n`.
pub fn prefactor(n: u64, x: &BigFloat, wp: u64) -> Ball {
    let (d, sigma) = split(n);
    let cp = const_prec(wp);
    let mut b = if sigma < 0 {
        central_binomial_ball(d, cp).mul_2exp(-2 * d as i64)
    } else {
        central_binomial_ball(d + 1, cp)
            .mul_i64(d as i64 + 1, wp)
            .mul_2exp(-(2 * d as i64) - 1)
            .mul(&Ball::exact(x.clone()), wp)
    };
    if d % 2 == 1 {
        b = b.neg();
    }
    b.round(wp)
}

/// The first `k` terms (`k ≤ d+1`) at working precision `wp`, without tail.
pub fn partial(n: u64, x: &BigFloat, k: u64, wp: u64) -> Result<Ball> {
    let (d, sigma) = split(n);
    let k = k.min(d + 1);
    if k == 0 {
        return Ok(Ball::zero());
    }
    let arg = Ball::exact(x.mul_exact(x).neg());
    let s = hyper_sum(&arg, &ratio(d, sigma), k, 1, None, wp)?.add(&Ball::one(), wp);
    Ok(prefactor(n, x, wp).mul(&s, wp))
}

/// Bound on the omitted terms `k ≥ K` of `P_n`, given `|x| ≤ x_upper`.
///
/// `+inf` when the geometric comparison ratio is not below 1.
pub fn tail_bound(n: u64, k: u64, x_upper: Mag) -> Mag {
    let (d, sigma) = split(n);
    if k > d {
        return Mag::zero();
    }
    if x_upper.is_zero() {
        return if k == 0 && sigma < 0 { Mag::inf() } else { Mag::zero() };
    }
    if k == 0 {
        return Mag::inf();
    }
    let eps = if sigma < 0 { 0 } else { 1 };
    let x2 = x_upper.mul(x_upper);
    let two_k_sigma = (2 * k as i64 + sigma) as u64;
    let alpha = x2
        .mul(Mag::from_u64(d - k + 1))
        .mul(Mag::from_u64((2 * d as i64 + 2 * k as i64 + sigma) as u64))
        .div(Mag::from_u64_down(k).mul_down(Mag::from_u64_down(two_k_sigma)));
    if alpha >= Mag::one() {
        return Mag::inf();
    }
    binom_mag_upper(n, d - k)
        .mul(binom_mag_upper(n + 2 * k + eps, n))
        .mul(x_upper.pow(2 * k + eps))
        .mul_2exp(-(n as i64))
        .div(Mag::one().sub_down(alpha))
}

/// `log2` of an upper estimate for the term `k` of `P_n`.
fn term_log2(n: u64, k: u64, lx: f64) -> f64 {
    let (d, sigma) = split(n);
    let eps = if sigma < 0 { 0 } else { 1 };
    -(n as f64)
        + binom_log2_upper(n, d - k).unwrap_or(0.0)
        + binom_log2_upper(n + 2 * k + eps, n).unwrap_or(0.0)
        + (2 * k + eps) as f64 * lx
}

/// First `k` in `[lo, hi]` with `pred(k)`, assuming `pred` is monotone; `hi` if none.
pub(crate) fn first_true(mut lo: u64, mut hi: u64, pred: impl Fn(u64) -> bool) -> u64 {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Heuristic number of terms for an absolute error of about `2^-bits`.
pub fn choose_k(n: u64, x: f64, bits: f64) -> u64 {
    let (d, sigma) = split(n);
    let x = x.abs();
    if x == 0.0 {
        return 1;
    }
    let x2 = x * x;
    let r = |k: u64| {
        x2 * ((d + 1 - k) as f64) * ((2 * d + 2 * k) as f64 + sigma as f64)
            / (k as f64 * (2.0 * k as f64 + sigma as f64))
    };
    // terms decrease from k0 on
    let k0 = first_true(1, d + 1, |k| r(k) < 0.5);
    let lx = x.log2();
    first_true(k0, d + 1, |k| k > d || term_log2(n, k, lx) <= -bits - 4.0).max(1)
}

/// `P_n(x)` for `0 ≤ x ≤ 1` starting from `K = k` terms.
pub fn eval_zero(n: u64, x: &BigFloat, p_target: u64, k: u64) -> Result<Ball> {
    let (d, _) = split(n);
    let xu = x.mag_upper();
    let target = tail_target(p_target);
    let mut k = k.clamp(1, d + 1);
    let mut ok = false;
    for _ in 0..=ESCALATIONS {
        if tail_bound(n, k, xu) <= target {
            ok = true;
            break;
        }
        k = escalate(k).min(d + 1);
    }
    if !ok {
        return Err(inapplicable(Method::Zero, "truncation bound not reached"));
    }
    let p_a = cancellation_bits(CancelKind::Zero, n, x.to_f64());
    let wp = working_prec(p_target, p_a, n);
    Ok(partial(n, x, k, wp)?.add_error(tail_bound(n, k, xu)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn p4_coefficients() {
        let r = ratio(2, -1);
        let a1 = BigRational::new(r.p.eval(1), r.q.eval(1));
        let a2 = &a1 * BigRational::new(r.p.eval(2), r.q.eval(2));
        assert_eq!(a1, BigRational::from_integer(10.into()));
        assert_eq!(a2, BigRational::new(35.into(), 3.into()));
        let v = eval_zero(4, &BigFloat::zero(), 64, 1).unwrap();
        assert!(v.contains_rational(&BigRational::new(3.into(), 8.into())));
    }

    #[test]
    fn odd_at_zero() {
        let v = eval_zero(5, &BigFloat::zero(), 64, 1).unwrap();
        assert!(v.contains_point(&BigFloat::zero()));
        assert!(v.rad() <= Mag::pow2(-64));
    }

    #[test]
    fn small_n_values() {
        // P_2(1/2) = -1/8, P_3(1/2) = -7/16
        let h = BigFloat::from_f64(0.5);
        let v = eval_zero(2, &h, 64, 2).unwrap();
        assert!(v.contains_rational(&BigRational::new((-1).into(), 8.into())));
        let v = eval_zero(3, &h, 64, 2).unwrap();
        assert!(v.contains_rational(&BigRational::new((-7).into(), 16.into())));
    }

    #[test]
    fn selected_k_is_enough() {
        for (n, x) in [(100u64, 0.1f64), (1000, 0.01), (50, 0.7), (2001, 0.3)] {
            let k = choose_k(n, x, 64.0);
            let t = tail_bound(n, k, Mag::from_f64(x));
            assert!(t <= Mag::pow2(-64), "n={n} x={x} k={k} t={t:?}");
        }
    }
}

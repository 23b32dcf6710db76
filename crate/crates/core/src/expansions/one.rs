//! Expansion at `x = 1` in powers of `u = (x-1)/2`.

use crate::ball::Ball;
use crate::bigfloat::BigFloat;
use crate::error::Result;
use crate::evaluator::Method;
use crate::mag::Mag;
use crate::rectsplit::{hyper_sum, TermRatio};
use crate::scalars::{binom_log2_upper, binom_mag_upper};

use super::zero::first_true;
use super::{
    cancellation_bits, escalate, inapplicable, tail_target, working_prec, CancelKind, ESCALATIONS,
};

/// `c_{n,k}/c_{n,k-1} = (n-k+1)(n+k)/k²`.
pub fn ratio(n: u64) -> TermRatio {
    let n = n as i64;
    TermRatio::new([n * (n + 1), 1, -1], [0, 0, 1])
}

/// `c'_{n,k}/c'_{n,k-1} = (n-k)(n+k+1)/(k(k+1))`.
pub fn deriv_ratio(n: u64) -> TermRatio {
    let n = n as i64;
    TermRatio::new([n * (n + 1), -1, -1], [0, 1, 1])
}

/// Number of terms of the full polynomial.
pub fn full_len(n: u64, deriv: bool) -> u64 {
    if deriv {
        n
    } else {
        n + 1
    }
}

/// `u = (x-1)/2`, exact.
pub fn u_of(x: &BigFloat) -> BigFloat {
    x.sub_exact(&BigFloat::one()).mul_2exp(-1)
}

/// The first `k` terms at working precision `wp`, without tail.
pub fn partial(n: u64, x: &BigFloat, k: u64, wp: u64, deriv: bool) -> Result<Ball> {
    let k = k.min(full_len(n, deriv));
    if k == 0 {
        return Ok(Ball::zero());
    }
    let u = Ball::exact(u_of(x));
    let r = if deriv { deriv_ratio(n) } else { ratio(n) };
    let s = hyper_sum(&u, &r, k, 1, None, wp)?.add(&Ball::one(), wp);
    Ok(if deriv {
        s.mul_i64((n * (n + 1) / 2) as i64, wp)
    } else {
        s
    })
}

/// Bound on the omitted terms `k ≥ K`, given `|u| ≤ u_upper`.
pub fn tail_bound(n: u64, k: u64, u_upper: Mag, deriv: bool) -> Mag {
    if k >= full_len(n, deriv) {
        return Mag::zero();
    }
    if u_upper.is_zero() {
        return if k == 0 { Mag::inf() } else { Mag::zero() };
    }
    let alpha = u_upper
        .mul(Mag::from_u64(n - k))
        .mul(Mag::from_u64(n + k + 1))
        .div(Mag::from_u64_down(k + 1).pow_down(2));
    if alpha >= Mag::one() {
        return Mag::inf();
    }
    let coeff = if deriv {
        binom_mag_upper(n, k + 1)
            .mul(binom_mag_upper(n + k + 1, k + 1))
            .mul(Mag::from_u64(n))
    } else {
        binom_mag_upper(n, k).mul(binom_mag_upper(n + k, k))
    };
    coeff
        .mul(u_upper.pow(k))
        .div(Mag::one().sub_down(alpha))
}

/// Heuristic number of terms for an absolute error of about `2^-bits`.
pub fn choose_k(n: u64, x: f64, bits: f64, deriv: bool) -> u64 {
    let full = full_len(n, deriv);
    let u = ((1.0 - x) / 2.0).abs();
    if u == 0.0 {
        return 1;
    }
    let nf = n as f64;
    let r = |k: u64| u * (nf - k as f64) * (nf + k as f64 + 1.0) / ((k as f64 + 1.0).powi(2));
    let k0 = first_true(0, full, |k| r(k) < 0.5);
    let lu = u.log2();
    let extra = if deriv { nf.log2() } else { 0.0 };
    let term = |k: u64| {
        if deriv {
            extra
                + binom_log2_upper(n, k + 1).unwrap_or(0.0)
                + binom_log2_upper(n + k + 1, k + 1).unwrap_or(0.0)
                + k as f64 * lu
        } else {
            binom_log2_upper(n, k).unwrap_or(0.0)
                + binom_log2_upper(n + k, k).unwrap_or(0.0)
                + k as f64 * lu
        }
    };
    first_true(k0, full, |k| term(k) <= -bits - 4.0).max(1)
}

/// `P_n(x)`, or `P'_n(x)` when `deriv`, for `-1 ≤ x ≤ 1`, starting from `K = k`.
pub fn eval_one(n: u64, x: &BigFloat, p_target: u64, k: u64, deriv: bool) -> Result<Ball> {
    let full = full_len(n, deriv);
    if full == 0 {
        return Ok(Ball::zero());
    }
    let uu = u_of(x).mag_upper();
    let target = tail_target(p_target);
    let mut k = k.clamp(1, full);
    let mut ok = false;
    for _ in 0..=ESCALATIONS {
        if tail_bound(n, k, uu, deriv) <= target {
            ok = true;
            break;
        }
        k = escalate(k).min(full);
    }
    if !ok {
        return Err(inapplicable(Method::One, "truncation bound not reached"));
    }
    let p_a = cancellation_bits(CancelKind::One, n, x.to_f64());
    let wp = working_prec(p_target, p_a, n);
    Ok(partial(n, x, k, wp, deriv)?.add_error(tail_bound(n, k, uu, deriv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn at_one() {
        let v = eval_one(37, &BigFloat::one(), 64, 1, false).unwrap();
        assert_eq!(v, Ball::one());
        let d = eval_one(100, &BigFloat::one(), 64, 1, true).unwrap();
        assert!(d.contains_point(&BigFloat::from_i64(5050)));
    }

    #[test]
    fn coefficient_closed_forms() {
        let r = ratio(5);
        assert_eq!(BigRational::new(r.p.eval(1), r.q.eval(1)), BigRational::from_integer(30.into()));
        assert_eq!(full_len(5, true), 5);
    }

    #[test]
    fn tail_example() {
        let t = tail_bound(10, 5, Mag::from_f64(0.05), false).to_f64();
        let direct = 756756.0 * 0.05f64.powi(5) / (1.0 - 0.05 * 80.0 / 36.0);
        assert!(t >= direct && t < direct * 1.0001, "{t} vs {direct}");
    }

    #[test]
    fn derivative_small() {
        // P'_3(x) = (15x² - 3)/2
        let x = BigFloat::from_f64(0.25);
        let d = eval_one(3, &x, 80, 3, true).unwrap();
        let e = BigRational::new((15 - 48).into(), 32.into());
        assert!(d.contains_rational(&e));
    }

    #[test]
    fn selected_k_is_enough() {
        for (n, x) in [(10_000u64, 1.0 - 1e-6), (100, 0.99), (300, 0.9999)] {
            for deriv in [false, true] {
                let k = choose_k(n, x, 333.0, deriv);
                let u = Mag::from_f64((1.0 - x) / 2.0);
                assert!(tail_bound(n, k, u, deriv) <= Mag::pow2(-333), "n={n} x={x}");
                assert!(k <= full_len(n, deriv));
                if n == 10_000 {
                    assert!(k < n / 100, "k={k}");
                }
            }
        }
    }
}

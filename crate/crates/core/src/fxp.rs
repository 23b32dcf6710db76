//! Three-term recurrence in integer fixed-point arithmetic.

use num_bigint::BigInt;
use num_traits::One;

use crate::ball::Ball;
use crate::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::mag::Mag;

/// Returns `(p, q)` with `p ≈ 2^t P_{n-1}(x)` and `q ≈ 2^t P_n(x)` for
/// `x = xhat 2^-t`, each within `0.75 (n+1)(n+2) + 1` of the exact value.
///
/// All divisions truncate toward zero. Requires `|xhat| ≤ 2^t` and `n ≥ 1`.
pub fn legendre_pair_fixed(xhat: &BigInt, t: u64, n: u64) -> (BigInt, BigInt) {
    assert!(n >= 1, "recurrence needs n >= 1");
    let mut p = BigInt::one() << t as usize;
    let mut q = xhat.clone();
    let mut den: u64 = 1;
    for k in 1..n {
        let tmp = trunc_shift(&q * xhat, t);
        let k2 = BigInt::from(k) * k;
        let next = tmp * (2 * k + 1) - k2 * &p;
        p = std::mem::replace(&mut q, next);
        match den.checked_mul(k + 1) {
            Some(d) => den = d,
            None => {
                p /= den;
                q /= den;
                den = k + 1;
            }
        }
    }
    p /= den / n;
    q /= den;
    (p, q)
}

/// `trunc(v / 2^t)`.
fn trunc_shift(v: BigInt, t: u64) -> BigInt {
    if v.sign() == num_bigint::Sign::Minus {
        -((-v) >> t as usize)
    } else {
        v >> t as usize
    }
}

/// Error constant of [`legendre_pair_fixed`] in units of `2^-t`, rounded up.
pub fn fixed_error_ulps(n: u64) -> Mag {
    Mag::from_parts_up(3 * (n as u128 + 1) * (n as u128 + 2) + 4, -2)
}

/// Guard bits so that the fixed-point error stays below `2^-p`.
pub fn guard_bits(n: u64) -> u64 {
    let e = 0.75 * (n as f64 + 1.0) * (n as f64 + 2.0) + 2.0;
    e.log2().ceil() as u64 + 2
}

/// Balls for `(P_{n-1}(x), P_n(x))` at a point `x ∈ [-1, 1]`, `n ≥ 1`.
pub fn legendre_pair_rec_ball(x: &BigFloat, n: u64, prec: u64) -> Result<(Ball, Ball)> {
    if x.cmp_abs(&BigFloat::one()) == std::cmp::Ordering::Greater {
        return Err(Error::Domain("recurrence argument outside [-1, 1]".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("recurrence needs n >= 1".into()));
    }
    let t = prec + guard_bits(n);
    let (xhat, exact) = x.to_fixed(t as i64);
    let (p, q) = legendre_pair_fixed(&xhat, t, n);
    let base = fixed_error_ulps(n);
    // truncating x moves it by < 2^-t; |P'_k| ≤ k(k+1)/2 on [-1, 1]
    let (ep, eq) = if exact {
        (base, base)
    } else {
        (
            base.add(Mag::from_u64(n * (n - 1) / 2)),
            base.add(Mag::from_u64(n * (n + 1) / 2)),
        )
    };
    let s = -(t as i64);
    let bp = Ball::new(BigFloat::from_bigint_2exp(&p, s), ep.mul_2exp(s));
    let bq = Ball::new(BigFloat::from_bigint_2exp(&q, s), eq.mul_2exp(s));
    Ok((bp, bq))
}

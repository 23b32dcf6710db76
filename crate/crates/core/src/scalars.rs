//! Central binomial coefficients and binomial magnitude estimates.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ball::Ball;
use crate::bigfloat::BigFloat;
use crate::consts;
use crate::error::{Error, Result};
use crate::mag::Mag;

/// Exact `C(2n, n)` from its prime factorization.
pub fn central_binomial_exact(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let m = 2 * n as usize;
    let mut sieve = vec![true; m + 1];
    let mut factors: Vec<BigUint> = Vec::new();
    for p in 2..=m {
        if !sieve[p] {
            continue;
        }
        let mut j = p * p;
        while j <= m {
            sieve[j] = false;
            j += p;
        }
        let (pp, nn) = (p as u64, n);
        let mut e = 0u32;
        let mut q = pp;
        loop {
            e += ((2 * nn) / q - 2 * (nn / q)) as u32;
            match q.checked_mul(pp) {
                Some(v) if v <= 2 * nn => q = v,
                _ => break,
            }
        }
        if e > 0 {
            factors.push(BigUint::from(pp).pow(e));
        }
    }
    product_tree(&factors)
}

fn product_tree(v: &[BigUint]) -> BigUint {
    match v.len() {
        0 => BigUint::one(),
        1 => v[0].clone(),
        n => product_tree(&v[..n / 2]) * product_tree(&v[n / 2..]),
    }
}

/// Above this degree the Stirling route is used.
pub fn exact_cutoff(prec: u64) -> u64 {
    6 * prec + 200
}

static BINOM_CACHE: OnceLock<RwLock<HashMap<(u64, u64), Ball>>> = OnceLock::new();

/// Ball containing `C(2n, n)` with midpoint at `prec` bits. Cached.
pub fn central_binomial_ball(n: u64, prec: u64) -> Ball {
    let cache = BINOM_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().unwrap().get(&(n, prec)) {
        return b.clone();
    }
    let b = if n < exact_cutoff(prec) {
        None
    } else {
        central_binomial_stirling(n, prec)
    };
    let b = b.unwrap_or_else(|| {
        Ball::from_bigint(&BigInt::from(central_binomial_exact(n))).round(prec)
    });
    cache.write().unwrap().entry((n, prec)).or_insert(b).clone()
}

/// Tangent numbers `T_1..T_count`.
fn tangent_numbers(count: usize) -> Vec<BigUint> {
    let mut t = vec![BigUint::zero(); count + 1];
    if count == 0 {
        return t;
    }
    t[1] = BigUint::one();
    for k in 2..=count {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=count {
        for j in k..=count {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    t
}

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// `B_{2k}` for `k = 1..=count` (index 0 of the result is `B_2`).
fn bernoulli_even(count: usize) -> Vec<BigRational> {
    let cell = BERNOULLI.get_or_init(|| Mutex::new(Vec::new()));
    let mut g = cell.lock().unwrap();
    if g.len() < count {
        let t = tangent_numbers(count);
        let mut out = Vec::with_capacity(count);
        for k in 1..=count {
            let four_k = BigInt::one() << (2 * k);
            let num = BigInt::from(t[k].clone()) * (2 * k);
            let den = &four_k * (&four_k - 1);
            let mut b = BigRational::new(num, den);
            if k % 2 == 0 {
                b = -b;
            }
            out.push(b);
        }
        *g = out;
    }
    g[..count].to_vec()
}

const MAX_STIRLING_TERMS: usize = 400;

/// `log2` of `|B_{2k}| / (2k (2k-1) z^(2k-1))`, approximately.
fn stirling_term_log2(k: usize, z: f64) -> f64 {
    // |B_2k| ≈ 2 (2k)! / (2π)^(2k)
    let kf = k as f64;
    let lg_fact = ln_gamma_approx(2.0 * kf + 1.0) / std::f64::consts::LN_2;
    1.0 + lg_fact - 2.0 * kf * (2.0 * std::f64::consts::PI).log2()
        - (2.0 * kf * (2.0 * kf - 1.0)).log2()
        - (2.0 * kf - 1.0) * z.log2()
}

/// Stirling approximation of `ln Γ` for `x ≥ 1`, machine precision.
fn ln_gamma_approx(x: f64) -> f64 {
    if x < 10.0 {
        let mut acc = 0.0;
        let mut y = x;
        while y < 10.0 {
            acc -= y.ln();
            y += 1.0;
        }
        return acc + ln_gamma_approx(y);
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
}

/// `C(2n,n) = 4^n / √(πn) · exp(S(2n) − 2 S(n))` with the Stirling correction
/// series `S` truncated after `M` terms; the first omitted term bounds each remainder.
fn central_binomial_stirling(n: u64, prec: u64) -> Option<Ball> {
    let wp = prec + 24;
    let nf = n as f64;
    let mut m = 1;
    while stirling_term_log2(m + 1, nf) > -(wp as f64) - 4.0 {
        m += 1;
        if m >= MAX_STIRLING_TERMS {
            return None;
        }
    }
    let bern = bernoulli_even(m + 1);
    let s_of = |z: u64| -> (Ball, Mag) {
        let zb = Ball::from_i64(z as i64);
        let z2 = zb.sqr(wp);
        let mut zpow = zb.clone();
        let mut sum = Ball::zero();
        for (i, b) in bern.iter().take(m).enumerate() {
            let k = (i + 1) as i64;
            let term = Ball::from_rational(b, wp)
                .div_i64(2 * k * (2 * k - 1), wp)
                .div(&zpow, wp);
            sum = sum.add(&term, wp);
            zpow = zpow.mul(&z2, wp);
        }
        let k = (m + 1) as i64;
        let rem = Ball::from_rational(&bern[m], wp)
            .div_i64(2 * k * (2 * k - 1), wp)
            .div(&zpow, wp)
            .mag_upper();
        (sum, rem)
    };
    let (s2, r2) = s_of(2 * n);
    let (s1, r1) = s_of(n);
    let delta = s2
        .sub(&s1.mul_2exp(1), wp)
        .add_error(r2.add(r1.mul_2exp(1)));
    let e = consts::exp(&delta, wp).ok()?;
    let pin = consts::const_pi(wp).mul_i64(n as i64, wp);
    let root = pin.sqrt(wp).ok()?;
    let four_n = Ball::exact(BigFloat::pow2(2 * n as i64));
    Some(four_n.div(&root, wp).mul(&e, wp).round(prec))
}

const TABLE_SIZE: usize = 256;

fn entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

static ENTROPY: OnceLock<Vec<(f64, f64)>> = OnceLock::new();

/// Samples `(G(a), G'(a))` at `a = i/256`.
fn entropy_table() -> &'static [(f64, f64)] {
    ENTROPY.get_or_init(|| {
        (0..=TABLE_SIZE)
            .map(|i| {
                let a = i as f64 / TABLE_SIZE as f64;
                let slope = if i == 0 || i == TABLE_SIZE {
                    f64::NAN
                } else {
                    ((1.0 - a) / a).log2()
                };
                (entropy(a), slope)
            })
            .collect()
    })
}

/// Upper bound for the binary entropy `G(x)` on `[0, 1]` from a 257-point table.
///
/// `G` is concave, so the tangent at either bracketing sample lies above it.
/// The two outermost cells, where the slope is unbounded, use the formula.
pub fn entropy_upper(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let pad = |v: f64| v * (1.0 + 1e-12) + 1e-14;
    let h = 1.0 / TABLE_SIZE as f64;
    if x <= h || x >= 1.0 - h {
        return pad(entropy(x));
    }
    let t = entropy_table();
    let i = ((x * TABLE_SIZE as f64).floor() as usize).min(TABLE_SIZE - 1);
    let a = i as f64 * h;
    let b = a + h;
    let (ga, sa) = t[i];
    let (gb, sb) = t[i + 1];
    let left = ga + sa * (x - a);
    let right = gb + sb * (x - b);
    pad(left.min(right).max(0.0))
}

/// Upper bound on `log2 C(n, k)` (`n G(k/n)`).
pub fn binom_log2_upper(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("binomial C({n}, {k}) with k > n")));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    Ok(n as f64 * entropy_upper(k as f64 / n as f64))
}

/// Rigorous upper bound `n^n / (k^k (n-k)^(n-k)) ≥ C(n, k)` as a [`Mag`].
pub fn binom_upper_mag(n: u64, k: u64) -> Mag {
    if k == 0 || k >= n {
        return Mag::one();
    }
    let num = Mag::from_u64(n).pow(n);
    let den = Mag::from_u64_down(k)
        .pow_down(k)
        .mul_down(Mag::from_u64_down(n - k).pow_down(n - k));
    num.div(den).min(Mag::pow2(n as i64))
}

/// Upper bound on `C(n, k)` as a [`Mag`]: exact for moderate `n`, closed form otherwise.
pub fn binom_mag_upper(n: u64, k: u64) -> Mag {
    if k > n {
        return Mag::zero();
    }
    let k = k.min(n - k);
    if n <= 4096 {
        let mut r = BigUint::one();
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        return BigFloat::from_bigint(&BigInt::from(r)).mag_upper();
    }
    binom_upper_mag(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: u64, k: u64) -> BigUint {
        let mut r = BigUint::one();
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    }

    #[test]
    fn small_values() {
        assert_eq!(central_binomial_exact(0), BigUint::one());
        assert_eq!(central_binomial_exact(5), BigUint::from(252u32));
        for n in 0..200u64 {
            assert_eq!(central_binomial_exact(n), binom(2 * n, n), "n={n}");
        }
        assert!(central_binomial_ball(5, 64).is_exact());
        assert_eq!(central_binomial_ball(0, 64), Ball::one());
    }

    #[test]
    fn tangent_and_bernoulli() {
        let t = tangent_numbers(5);
        let v: Vec<u64> = t[1..].iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(v, vec![1, 2, 16, 272, 7936]);
        let b = bernoulli_even(4);
        let r = |a: i64, c: i64| BigRational::new(a.into(), c.into());
        assert_eq!(b, vec![r(1, 6), r(-1, 30), r(1, 42), r(-1, 30)]);
    }

    #[test]
    fn stirling_route_contains_exact() {
        for (n, prec) in [(584u64, 64u64), (1000, 64), (100_000, 64), (5000, 300)] {
            let b = central_binomial_stirling(n, prec).expect("series long enough");
            let exact = BigInt::from(central_binomial_exact(n));
            assert!(b.contains_rational(&BigRational::from_integer(exact)), "n={n}");
            assert!(b.rel_rad() <= Mag::pow2(-(prec as i64) + 2), "n={n}");
        }
        let b = central_binomial_ball(100_000, 64);
        let lg = b.mid().top() as f64;
        let expect = 2e5 - 0.5 * (std::f64::consts::PI * 1e5).log2();
        assert!((lg - expect).abs() < 1.0);
    }

    #[test]
    fn cache_determinism() {
        assert_eq!(central_binomial_ball(7000, 128), central_binomial_ball(7000, 128));
    }

    #[test]
    fn mag_binomials() {
        assert_eq!(binom_mag_upper(10, 5).to_f64(), 252.0);
        assert_eq!(binom_mag_upper(10, 11), Mag::zero());
        let big = binom_mag_upper(10_000, 10);
        let lg = binom_log2_upper(10_000, 10).unwrap();
        assert!(big.log2_approx() <= lg + 1e-3);
    }

    #[test]
    fn entropy_bounds() {
        assert_eq!(binom_log2_upper(10, 0).unwrap(), 0.0);
        let b = binom_log2_upper(10, 3).unwrap();
        assert!(b > 8.80 && b < 8.85, "{b}");
        assert!(2f64.powf(b) >= 120.0);
        let h = binom_log2_upper(200, 100).unwrap();
        assert!((h - 200.0).abs() < 1e-6);
        assert!(binom_log2_upper(3, 4).is_err());
    }

    #[test]
    fn bounds_dominate_binomials() {
        for n in 0..=500u64 {
            for k in 0..=n {
                let c = binom(n, k);
                let lg = binom_log2_upper(n, k).unwrap();
                let bits = c.bits() as f64 - 1.0;
                // c < 2^bits ≤ 2^lg must hold; compare via exact float when small
                if c.bits() < 1000 {
                    let cf: f64 = c.to_string().parse().unwrap();
                    assert!(cf.log2() <= lg + 1e-9, "n={n} k={k}");
                } else {
                    assert!(bits <= lg);
                }
                let m = binom_upper_mag(n, k);
                let (man, e) = m.parts();
                let ok = if e >= 0 {
                    c <= BigUint::from(man) << e as usize
                } else {
                    c << (-e) as usize <= BigUint::from(man)
                };
                assert!(ok, "mag n={n} k={k}");
            }
        }
    }
}

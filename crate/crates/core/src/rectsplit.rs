//! Truncated hypergeometric sums by rectangular splitting.
//!
//! Computes `Σ_{k=Ω}^{K-1} x^k Π_{j=Ω}^{k} p(j)/q(j)` for integer polynomials
//! `p`, `q` of degree at most 2. Terms are visited from high to low index;
//! integer coefficients are collected exactly over windows of `u` terms, and
//! only every `m`-th step costs a full multiplication by `x^m`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ball::Ball;
use crate::complex::ComplexBall;
use crate::error::{Error, Result};

/// Operations a series argument must support.
pub trait SeriesElem: Clone {
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn s_add(&self, o: &Self, prec: u64) -> Self;
    fn s_mul(&self, o: &Self, prec: u64) -> Self;
    fn s_mul_int(&self, c: &BigInt, prec: u64) -> Self;
    fn s_div_int(&self, c: &BigInt, prec: u64) -> Self;
}

impl SeriesElem for Ball {
    fn s_zero() -> Self {
        Ball::zero()
    }
    fn s_one() -> Self {
        Ball::one()
    }
    fn s_add(&self, o: &Self, prec: u64) -> Self {
        self.add(o, prec)
    }
    fn s_mul(&self, o: &Self, prec: u64) -> Self {
        self.mul(o, prec)
    }
    fn s_mul_int(&self, c: &BigInt, prec: u64) -> Self {
        self.mul_bigint(c, prec)
    }
    fn s_div_int(&self, c: &BigInt, prec: u64) -> Self {
        self.div_bigint(c, prec)
    }
}

impl SeriesElem for ComplexBall {
    fn s_zero() -> Self {
        ComplexBall::zero()
    }
    fn s_one() -> Self {
        ComplexBall::one()
    }
    fn s_add(&self, o: &Self, prec: u64) -> Self {
        self.add(o, prec)
    }
    fn s_mul(&self, o: &Self, prec: u64) -> Self {
        self.mul(o, prec)
    }
    fn s_mul_int(&self, c: &BigInt, prec: u64) -> Self {
        self.mul_bigint(c, prec)
    }
    fn s_div_int(&self, c: &BigInt, prec: u64) -> Self {
        self.div_bigint(c, prec)
    }
}

/// `c0 + c1 k + c2 k^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntPoly(pub [i64; 3]);

impl IntPoly {
    pub fn eval(&self, k: u64) -> BigInt {
        let k = k as i128;
        let [a, b, c] = self.0.map(|v| v as i128);
        // |values| stay far below i128 range for k < 2^40 and 63-bit coefficients
        BigInt::from(a) + BigInt::from(b * k) + BigInt::from(c * k) * k
    }
}

/// Term ratio `p(k)/q(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermRatio {
    pub p: IntPoly,
    pub q: IntPoly,
}

impl TermRatio {
    pub fn new(p: [i64; 3], q: [i64; 3]) -> Self {
        TermRatio {
            p: IntPoly(p),
            q: IntPoly(q),
        }
    }
}

/// `[x^0, x^1, ..., x^m]`.
#[derive(Debug, Clone)]
pub struct PowersTable<T> {
    pub powers: Vec<T>,
}

impl<T: SeriesElem> PowersTable<T> {
    pub fn new(x: &T, m: usize, prec: u64) -> Self {
        assert!(m >= 1, "power table needs m >= 1");
        let mut powers = Vec::with_capacity(m + 1);
        powers.push(T::s_one());
        powers.push(x.clone());
        for i in 2..=m {
            let v = if i % 2 == 0 {
                powers[i / 2].s_mul(&powers[i / 2], prec)
            } else {
                powers[i - 1].s_mul(x, prec)
            };
            powers.push(v);
        }
        PowersTable { powers }
    }

    pub fn m(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn base(&self) -> &T {
        &self.powers[1]
    }
}

/// Default splitting parameter; `paired` when two sums share one table.
pub fn default_m(k: u64, paired: bool) -> usize {
    let kk = if paired { 2 * k } else { k };
    ((kk as f64).sqrt().floor() as usize).max(1)
}

pub const DEFAULT_UNROLL: usize = 4;

/// Effective truncation: terms vanish from the first zero of `p` onward.
fn effective_len(ratio: &TermRatio, k_max: u64, omega: u64) -> Result<u64> {
    let mut end = k_max;
    for j in omega..k_max {
        if ratio.q.eval(j).is_zero() {
            return Err(Error::Precondition(format!("q({j}) = 0 in the summation range")));
        }
        if ratio.p.eval(j).is_zero() {
            end = j;
            break;
        }
    }
    Ok(end)
}

/// Rectangular-splitting sum with the default `u`, building a table if none is given.
pub fn hyper_sum<T: SeriesElem>(
    x: &T,
    ratio: &TermRatio,
    k_max: u64,
    omega: u64,
    table: Option<&PowersTable<T>>,
    prec: u64,
) -> Result<T> {
    hyper_sum_tuned(x, ratio, k_max, omega, table, None, DEFAULT_UNROLL, prec)
}

/// Rectangular-splitting sum with explicit `m` (ignored if a table is given) and `u`.
#[allow(clippy::too_many_arguments)]
pub fn hyper_sum_tuned<T: SeriesElem>(
    x: &T,
    ratio: &TermRatio,
    k_max: u64,
    omega: u64,
    table: Option<&PowersTable<T>>,
    m: Option<usize>,
    u: usize,
    prec: u64,
) -> Result<T> {
    assert!(omega <= 1, "Ω must be 0 or 1");
    assert!(u >= 1);
    let end = effective_len(ratio, k_max, omega)?;
    if end <= omega {
        return Ok(T::s_zero());
    }
    let owned;
    let tab = match table {
        Some(t) => t,
        None => {
            let m = m.unwrap_or_else(|| default_m(end - omega, false));
            owned = PowersTable::new(x, m, prec);
            &owned
        }
    };
    let m = tab.m() as u64;
    let mut s = T::s_zero();
    let mut hi = end - 1;
    loop {
        let lo = hi.saturating_sub(u as u64 - 1).max(omega);
        let mut c = BigInt::one();
        for j in lo..=hi {
            c *= ratio.p.eval(j);
        }
        let mut k = hi;
        loop {
            let xr = &tab.powers[(k % m) as usize];
            if k == hi {
                s = s.s_add(xr, prec).s_mul_int(&c, prec);
            } else {
                s = s.s_add(&xr.s_mul_int(&c, prec), prec);
            }
            if k % m == 0 && k != 0 {
                s = s.s_mul(&tab.powers[m as usize], prec);
            }
            c = c / ratio.p.eval(k) * ratio.q.eval(k);
            if k == lo {
                break;
            }
            k -= 1;
        }
        s = s.s_div_int(&c, prec);
        if lo == omega {
            break;
        }
        hi = lo - 1;
    }
    Ok(s)
}

/// Term-by-term reference evaluation.
pub fn hyper_sum_naive<T: SeriesElem>(
    x: &T,
    ratio: &TermRatio,
    k_max: u64,
    omega: u64,
    prec: u64,
) -> Result<T> {
    let end = effective_len(ratio, k_max, omega)?;
    let mut s = T::s_zero();
    let mut term = T::s_one();
    for _ in 0..omega {
        term = term.s_mul(x, prec);
    }
    for k in omega..end {
        if k > omega {
            term = term.s_mul(x, prec);
        }
        term = term
            .s_mul_int(&ratio.p.eval(k), prec)
            .s_div_int(&ratio.q.eval(k), prec);
        s = s.s_add(&term, prec);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::BigFloat;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn exact_sum(x: &BigRational, r: &TermRatio, k_max: u64, omega: u64) -> BigRational {
        let mut s = BigRational::zero();
        let mut t = BigRational::one();
        let mut xp = BigRational::one();
        for _ in 0..omega {
            xp = &xp * x;
        }
        for k in omega..k_max {
            if k > omega {
                xp = &xp * x;
            }
            t = t * BigRational::new(r.p.eval(k), r.q.eval(k));
            s += &t * &xp;
        }
        s
    }

    #[test]
    fn geometric() {
        let r = TermRatio::new([1, 0, 0], [1, 0, 0]);
        let s = hyper_sum(&Ball::from_i64(2), &r, 4, 0, None, 64).unwrap();
        assert!(s.contains_point(&BigFloat::from_i64(15)));
        assert!(s.is_exact());
    }

    #[test]
    fn exponential_terms() {
        let r = TermRatio::new([1, 0, 0], [0, 1, 0]);
        let s = hyper_sum(&Ball::one(), &r, 4, 1, None, 64).unwrap();
        assert!(s.contains_rational(&BigRational::new(5.into(), 3.into())));
    }

    #[test]
    fn powers_tables() {
        let t = PowersTable::new(&Ball::from_i64(2), 3, 64);
        let v: Vec<f64> = t.powers.iter().map(|b| b.mid().to_f64()).collect();
        assert_eq!(v, vec![1.0, 2.0, 4.0, 8.0]);
        let t = PowersTable::new(&Ball::from_ratio(1, 3, 16), 2, 16);
        assert!(t.powers[2].contains_rational(&BigRational::new(1.into(), 9.into())));
        let t = PowersTable::new(&ComplexBall::i(), 4, 64);
        let expect = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 0)];
        for (p, (a, b)) in t.powers.iter().zip(expect) {
            assert!(p.re.contains_point(&BigFloat::from_i64(a)));
            assert!(p.im.contains_point(&BigFloat::from_i64(b)));
        }
    }

    #[test]
    fn zero_denominator_rejected() {
        let r = TermRatio::new([1, 0, 0], [-3, 1, 0]);
        assert!(hyper_sum(&Ball::one(), &r, 10, 0, None, 64).is_err());
    }

    #[test]
    fn numerator_zero_truncates() {
        // (k - 3): terms vanish from k = 3
        let r = TermRatio::new([-3, 1, 0], [1, 1, 0]);
        let x = BigRational::new(1.into(), 2.into());
        let xb = Ball::from_ratio(1, 2, 64);
        let s = hyper_sum(&xb, &r, 50, 1, None, 64).unwrap();
        assert!(s.contains_rational(&exact_sum(&x, &r, 3, 1)));
    }

    #[test]
    fn complex_matches_naive() {
        let r = TermRatio::new([1, -4, 4], [0, 12, 8]);
        let z = ComplexBall::new(Ball::from_ratio(1, 1, 64), Ball::from_ratio(-3, 7, 100));
        let a = hyper_sum(&z, &r, 30, 1, None, 100).unwrap();
        let b = hyper_sum_naive(&z, &r, 30, 1, 100).unwrap();
        assert!(a.overlaps(&b));
    }

    fn poly() -> impl Strategy<Value = [i64; 3]> {
        (-20i64..20, -20i64..20, -3i64..4).prop_map(|(a, b, c)| [a, b, c])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn matches_exact_and_naive(
            p in poly(), q in poly(), k_max in 0u64..120, omega in 0u64..2,
            num in -64i64..=64, m_sel in 0usize..3, u in prop::sample::select(vec![1usize, 2, 4, 8]),
        ) {
            let r = TermRatio::new(p, q);
            prop_assume!((omega..k_max).all(|j| !r.q.eval(j).is_zero()));
            let x = BigRational::new(num.into(), 64.into());
            let prec = 200;
            let xb = Ball::from_rational(&x, prec);
            let kk = k_max.max(1);
            let m = [1usize, default_m(kk, false), kk as usize][m_sel].max(1);
            let s = hyper_sum_tuned(&xb, &r, k_max, omega, None, Some(m), u, prec).unwrap();
            let nv = hyper_sum_naive(&xb, &r, k_max, omega, prec).unwrap();
            prop_assert!(s.overlaps(&nv));
            let mut end = k_max;
            for j in omega..k_max {
                if r.p.eval(j).is_zero() { end = j; break; }
            }
            let ex = exact_sum(&x, &r, end, omega);
            prop_assert!(s.contains_rational(&ex));
            prop_assert!(nv.contains_rational(&ex));
        }

        #[test]
        fn omega_split(p in poly(), q in poly(), k_max in 1u64..60, num in -64i64..=64) {
            let r = TermRatio::new(p, q);
            prop_assume!((0..k_max).all(|j| !r.q.eval(j).is_zero()));
            prop_assume!((0..k_max).all(|j| !r.p.eval(j).is_zero()));
            let prec = 200;
            let xb = Ball::from_ratio(num, 64, prec);
            let full = hyper_sum(&xb, &r, k_max, 0, None, prec).unwrap();
            let a0 = Ball::from_bigint(&r.p.eval(0)).div(&Ball::from_bigint(&r.q.eval(0)), prec);
            // the Ω=0 sum equals a0 * (1 + the Ω=1 sum of the ratio shifted into the Ω=1 form)
            let tail = hyper_sum(&xb, &r, k_max, 1, None, prec).unwrap();
            prop_assert!(full.overlaps(&a0.mul(&Ball::one().add(&tail, prec), prec)));
        }
    }
}

//! Method selection and certified evaluation of `P_n` and `P'_n` on balls.

use std::cmp::Ordering;
use std::fmt;

use crate::ball::Ball;
use crate::bigfloat::{BigFloat, Round};
use crate::error::{Error, Result};
use crate::expansions::{
    asymptotic, cancellation_bits, ceil_log2, const_prec, one, zero, CancelKind,
};
use crate::fxp::legendre_pair_rec_ball;
use crate::mag::Mag;
use crate::scalars::central_binomial_ball;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Rec,
    Asym,
    Zero,
    One,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Rec, Method::Asym, Method::Zero, Method::One];

    /// Tie-break rank (lower wins).
    fn rank(self) -> u8 {
        match self {
            Method::Zero => 0,
            Method::One => 1,
            Method::Asym => 2,
            Method::Rec => 3,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rec => "rec",
            Method::Asym => "asym",
            Method::Zero => "zero",
            Method::One => "one",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rec" => Ok(Method::Rec),
            "asym" => Ok(Method::Asym),
            "zero" => Ok(Method::Zero),
            "one" => Ok(Method::One),
            _ => Err(format!("unknown method {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivStrategy {
    /// `P'_n = n (x P_n - P_{n-1}) / (x² - 1)`.
    PairMixed,
    /// Differentiated series at `x = 1`.
    DirectOne,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    Value,
    ValueAndDeriv,
    Deriv,
}

impl Want {
    pub fn deriv(self) -> bool {
        !matches!(self, Want::Value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodChoice {
    pub method: Method,
    /// Truncation order; `None` if the method is not applicable.
    pub k: Option<u64>,
    pub p_a: u64,
    pub deriv: DerivStrategy,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct EvalRequest {
    pub n: u64,
    pub x: Ball,
    pub prec: u64,
    pub want: Want,
    /// Forces one algorithm (no fallback).
    pub method: Option<Method>,
    /// Forces a derivative strategy.
    pub deriv_strategy: Option<DerivStrategy>,
    /// Retry once at doubled precision if the value ball contains 0.
    pub relative: bool,
}

impl EvalRequest {
    pub fn new(n: u64, x: Ball, prec: u64, want: Want) -> Self {
        EvalRequest {
            n,
            x,
            prec,
            want,
            method: None,
            deriv_strategy: None,
            relative: false,
        }
    }

    pub fn with_method(mut self, m: Method) -> Self {
        self.method = Some(m);
        self
    }

    pub fn with_deriv_strategy(mut self, s: DerivStrategy) -> Self {
        self.deriv_strategy = Some(s);
        self
    }

    pub fn relative(mut self, on: bool) -> Self {
        self.relative = on;
        self
    }
}

#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: Ball,
    pub deriv: Option<Ball>,
    /// Algorithm used at the midpoint; `None` for closed-form shortcuts.
    pub method: Option<Method>,
}

/// Absolute accuracy goal in bits for a `p`-bit request.
pub fn target_bits(n: u64, p: u64) -> u64 {
    p + ceil_log2(n + 1).div_ceil(2) + 4
}

/// Extra bits for the mixed derivative formula.
fn mixed_extra_bits(n: u64, x: f64) -> u64 {
    let one_minus = ((1.0 - x) * (1.0 + x)).max(f64::MIN_POSITIVE);
    ceil_log2(n) + (-one_minus.log2()).max(0.0).ceil() as u64 + 2
}

fn in_basecase_box(n: u64, x: f64, p: u64, want: Want) -> bool {
    if want.deriv() {
        n <= 300 && p <= 800 && x > 0.01 && x < 0.99
    } else {
        n <= 100 && p <= 500
    }
}

fn use_direct_one(x: f64, p: u64) -> bool {
    1.0 - x < (-(p as f64) / 8.0).exp2()
}

fn choice_for(method: Method, n: u64, x: f64, p: u64, want: Want) -> MethodChoice {
    let pt = target_bits(n, p) as f64 + 2.0;
    let (k, p_a, mult) = match method {
        Method::Rec => (Some(n), 0, 0.25),
        Method::Asym => {
            let y = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
            (asymptotic::choose_k(n, y, pt), 0, 2.0)
        }
        Method::Zero => (
            Some(zero::choose_k(n, x, pt)),
            cancellation_bits(CancelKind::Zero, n, x),
            1.0,
        ),
        Method::One => (
            Some(one::choose_k(n, x, pt, false)),
            cancellation_bits(CancelKind::One, n, x),
            1.0,
        ),
    };
    let deriv = if !want.deriv() {
        DerivStrategy::None
    } else if method == Method::One || use_direct_one(x, p) {
        DerivStrategy::DirectOne
    } else {
        DerivStrategy::PairMixed
    };
    let cost = match k {
        Some(_) if method == Method::Rec => n as f64 * pt * mult,
        Some(k) => k as f64 * (pt + p_a as f64) * mult,
        None => f64::INFINITY,
    };
    MethodChoice {
        method,
        k,
        p_a,
        deriv,
        cost,
    }
}

/// All candidate methods in order of preference. Inside the basecase box REC
/// comes first; otherwise applicable series by increasing cost (ties by ZERO,
/// ONE, ASYM), then REC as fallback.
pub fn candidates(n: u64, x_approx: f64, p: u64, want: Want) -> Vec<MethodChoice> {
    let x = x_approx.abs().min(1.0);
    let mut v: Vec<MethodChoice> = [Method::Zero, Method::One, Method::Asym]
        .into_iter()
        .map(|m| choice_for(m, n, x, p, want))
        .filter(|c| c.k.is_some())
        .collect();
    v.sort_by(|a, b| {
        a.cost
            .partial_cmp(&b.cost)
            .unwrap_or(Ordering::Equal)
            .then(a.method.rank().cmp(&b.method.rank()))
    });
    let rec = choice_for(Method::Rec, n, x, p, want);
    if in_basecase_box(n, x, p, want) {
        v.insert(0, rec);
    } else {
        v.push(rec);
    }
    v
}

/// The cheapest method for `n`, `x ∈ [0, 1]` and `p` bits.
pub fn select_method(n: u64, x_approx: f64, p: u64, want: Want) -> MethodChoice {
    candidates(n, x_approx, p, want).remove(0)
}

fn sqrt_pi_lower() -> Mag {
    Mag::from_ratio_down(1_772_453, 1_000_000)
}

/// Upper bounds `(B1, B2)` for `|P'_n|` and `|P''_n|` on a hull `[lo, hi] ⊆ [-1, 1]`.
pub fn deriv_envelope_bounds(n: u64, lo: &BigFloat, hi: &BigFloat) -> (Mag, Mag) {
    let a = if lo.cmp_abs(hi) == Ordering::Greater {
        lo.abs()
    } else {
        hi.abs()
    };
    let one = BigFloat::one();
    let v = if a >= one {
        Mag::zero()
    } else {
        one.sub_exact(&a).mul_exact(&one.add_exact(&a)).mag_lower()
    };
    let nn = n as u128;
    let poly1 = Mag::from_parts_up(nn * (nn + 1), -1);
    let poly2 = if n == 0 {
        Mag::zero()
    } else {
        Mag::from_parts_up((nn - 1) * nn * (nn + 1) * (nn + 2), -3)
    };
    if v.is_zero() {
        return (poly1, poly2);
    }
    let q = v.sqrt_down().sqrt_down();
    let v34 = v.sqrt_down().mul_down(q);
    let v54 = v.mul_down(q);
    let sn = Mag::from_u64(n).sqrt();
    let arm1 = Mag::pow2(1).mul(Mag::from_u64(2).sqrt()).mul(sn).div(sqrt_pi_lower().mul_down(v34));
    let arm2 = Mag::pow2(2)
        .mul(Mag::from_u64(2).sqrt())
        .mul(sn.pow(3))
        .div(sqrt_pi_lower().mul_down(v54));
    (arm1.min(poly1), arm2.min(poly2))
}

/// `P_n(0)`: `(-1)^(n/2) 2^-n C(n, n/2)` for even `n`, else 0.
fn value_at_zero(n: u64, prec: u64) -> Ball {
    if n % 2 == 1 {
        return Ball::zero();
    }
    let d = n / 2;
    let b = central_binomial_ball(d, prec).mul_2exp(-(n as i64));
    if d % 2 == 1 {
        b.neg()
    } else {
        b
    }
}

/// Values at a point `0 ≤ m ≤ 1`, `n ≥ 2`.
fn eval_point(
    n: u64,
    m: &BigFloat,
    p: u64,
    want: Want,
    forced: Option<Method>,
    strategy: Option<DerivStrategy>,
) -> Result<(Ball, Option<Ball>, Option<Method>)> {
    let pt = target_bits(n, p);
    if *m == BigFloat::one() {
        let d = want.deriv().then(|| Ball::from_i64((n * (n + 1) / 2) as i64));
        return Ok((Ball::one(), d, None));
    }
    if m.is_zero() {
        let wp = const_prec(pt + 8);
        let v = value_at_zero(n, wp).round(pt + 8);
        let d = want
            .deriv()
            .then(|| value_at_zero(n - 1, wp).mul_i64(n as i64, wp).round(pt + 8));
        return Ok((v, d, None));
    }
    let xf = m.to_f64();
    let list = match forced {
        Some(method) => vec![choice_for(method, n, xf, p, want)],
        None => candidates(n, xf, p, want),
    };
    let mut last_err = None;
    for c in list {
        let mut c = c;
        if let Some(s) = strategy {
            if want.deriv() {
                c.deriv = s;
            }
        }
        match eval_with(n, m, p, want, &c) {
            Ok((v, d)) => return Ok((v, d, Some(c.method))),
            Err(e @ Error::Inapplicable { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Precondition("no evaluation method".into())))
}

/// `(P_{n-1}, P_n)` with method `c` at target `pt`.
fn pair_with(n: u64, m: &BigFloat, pt: u64, c: &MethodChoice) -> Result<(Ball, Ball)> {
    let k = c.k.unwrap_or(1);
    match c.method {
        Method::Rec => legendre_pair_rec_ball(m, n, pt),
        Method::Asym => {
            let k = c.k.ok_or_else(|| crate::expansions::inapplicable(Method::Asym, "no K"))?;
            let (v, pv) = asymptotic::eval_asymptotic(n, m, pt, k, true)?;
            Ok((pv.expect("paired evaluation"), v))
        }
        Method::Zero => Ok((
            zero::eval_zero(n - 1, m, pt, k)?,
            zero::eval_zero(n, m, pt, k)?,
        )),
        Method::One => Ok((
            one::eval_one(n - 1, m, pt, k, false)?,
            one::eval_one(n, m, pt, k, false)?,
        )),
    }
}

fn value_with(n: u64, m: &BigFloat, pt: u64, c: &MethodChoice) -> Result<Ball> {
    let k = c.k.unwrap_or(1);
    match c.method {
        Method::Rec => Ok(legendre_pair_rec_ball(m, n, pt)?.1),
        Method::Asym => {
            let k = c.k.ok_or_else(|| crate::expansions::inapplicable(Method::Asym, "no K"))?;
            Ok(asymptotic::eval_asymptotic(n, m, pt, k, false)?.0)
        }
        Method::Zero => zero::eval_zero(n, m, pt, k),
        Method::One => one::eval_one(n, m, pt, k, false),
    }
}

fn eval_with(
    n: u64,
    m: &BigFloat,
    p: u64,
    want: Want,
    c: &MethodChoice,
) -> Result<(Ball, Option<Ball>)> {
    let pt = target_bits(n, p);
    if !want.deriv() {
        return Ok((value_with(n, m, pt, c)?, None));
    }
    let xf = m.to_f64();
    match c.deriv {
        DerivStrategy::DirectOne | DerivStrategy::None => {
            let pd = pt + ceil_log2(n) * 2;
            let kd = one::choose_k(n, xf, pd as f64 + 2.0, true);
            let d = one::eval_one(n, m, pd, kd, true)?;
            let v = value_with(n, m, pt, c)?;
            Ok((v, Some(d)))
        }
        DerivStrategy::PairMixed => {
            let pd = pt + mixed_extra_bits(n, xf);
            let (pm1, pn) = pair_with(n, m, pd, c)?;
            let wp = pd + 16;
            let xb = Ball::exact(m.clone());
            let num = xb.mul(&pn, wp).sub(&pm1, wp).mul_i64(n as i64, wp);
            let den = xb.sqr(wp).sub(&Ball::one(), wp);
            let d = num.div(&den, wp);
            Ok((pn.round(pt + 8), Some(d.round(pd + 8))))
        }
    }
}

/// Certified enclosures of `P_n(x)` (and `P'_n(x)`) for every `x` in the input ball.
pub fn legendre_eval(req: &EvalRequest) -> Result<EvalResult> {
    let r = legendre_eval_once(req, req.prec)?;
    if req.relative && r.value.contains_zero() {
        return legendre_eval_once(req, 2 * req.prec);
    }
    Ok(r)
}

fn legendre_eval_once(req: &EvalRequest, p: u64) -> Result<EvalResult> {
    let n = req.n;
    let x = &req.x;
    if p < 2 {
        return Err(Error::Precondition("precision must be at least 2 bits".into()));
    }
    if !x.is_finite() {
        return Err(Error::Domain("argument ball is unbounded".into()));
    }
    let one = BigFloat::one();
    if x.lo() < one.neg() || x.hi() > one {
        return Err(Error::Domain("argument not contained in [-1, 1]".into()));
    }
    let want_d = req.want.deriv();
    match n {
        0 => {
            return Ok(EvalResult {
                value: Ball::one(),
                deriv: want_d.then(Ball::zero),
                method: None,
            })
        }
        1 => {
            return Ok(EvalResult {
                value: x.clone(),
                deriv: want_d.then(Ball::one),
                method: None,
            })
        }
        _ => {}
    }
    // round an over-long midpoint; the difference joins the radius
    let cap = target_bits(n, p) + mixed_extra_bits(n, 0.5) + 64;
    let mut mid = x.mid().clone();
    let mut rad = x.rad();
    if mid.precision_bits() > cap {
        let r = mid.round(cap, Round::Nearest);
        rad = rad.add(r.sub_exact(&mid).mag_upper());
        mid = r;
    }
    let neg = mid.is_negative();
    let m = mid.abs();
    let (mut v, mut d, method) =
        eval_point(n, &m, p, req.want, req.method, req.deriv_strategy)?;
    if neg {
        if n % 2 == 1 {
            v = v.neg();
        }
        if n % 2 == 0 {
            d = d.map(|b| b.neg());
        }
    }
    if !rad.is_zero() {
        let lo = mid.sub(&BigFloat::from_mag(rad), 64, Round::Down);
        let hi = mid.add(&BigFloat::from_mag(rad), 64, Round::Up);
        let (lo, hi) = (lo.max(one.neg()), hi.min(one.clone()));
        let (b1, b2) = deriv_envelope_bounds(n, &lo, &hi);
        v = v.add_error(rad.mul(b1));
        d = d.map(|b| b.add_error(rad.mul(b2)));
    }
    Ok(EvalResult {
        value: v,
        deriv: d,
        method,
    })
}

/// `P_n(x)` at a point, convenience wrapper.
pub fn legendre_p(n: u64, x: &Ball, prec: u64) -> Result<Ball> {
    Ok(legendre_eval(&EvalRequest::new(n, x.clone(), prec, Want::Value))?.value)
}

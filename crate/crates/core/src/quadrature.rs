//! Certified Gauss–Legendre rules.
//!
//! Nodes come from interval Newton steps on a precision ladder; weights from
//! `w = 2 / ((1 - x²) P'_n(x)²)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::ball::Ball;
use crate::bigfloat::{BigFloat, Round};
use crate::error::{Error, Result};
use crate::evaluator::{legendre_eval, EvalRequest, Want};
use crate::expansions::ceil_log2;
use crate::mag::Mag;

/// An interval believed (or, once `certified`, proven) to hold root `k` of `P_n`.
#[derive(Debug, Clone)]
pub struct NodeEnclosure {
    pub n: u64,
    /// Root index; `k = 0` is the root closest to 1.
    pub k: u64,
    pub lo: BigFloat,
    pub hi: BigFloat,
    pub certified: bool,
}

impl NodeEnclosure {
    pub fn ball(&self) -> Ball {
        Ball::from_endpoints(&self.lo, &self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub n: u64,
    pub p: u64,
    /// Ascending.
    pub nodes: Vec<Ball>,
    pub weights: Vec<Ball>,
}

const MAX_WIDENINGS: usize = 40;
const LADDER_START: u64 = 64;

/// Interval `cos θ` for `θ ∈ ((k+1/2)π/(n+1/2), (k+1)π/(n+1/2))`, padded outward.
pub fn initial_enclosure(n: u64, k: u64) -> NodeEnclosure {
    let h = n as f64 + 0.5;
    let t_lo = (k as f64 + 0.5) * PI / h;
    let t_hi = ((k as f64 + 1.0) * PI / h).min(PI);
    let pad = 1e-15;
    let lo = (t_hi.cos() - pad).max(-1.0);
    let hi = (t_lo.cos() + pad).min(1.0);
    NodeEnclosure {
        n,
        k,
        lo: BigFloat::from_f64(lo),
        hi: BigFloat::from_f64(hi),
        certified: false,
    }
}

fn guard_bits(n: u64) -> u64 {
    2 * ceil_log2(n + 1)
}

/// Machine-precision root estimate by Newton's method from a Tricomi-type guess.
fn heuristic_root(enc: &NodeEnclosure) -> Result<f64> {
    let (n, k) = (enc.n as f64, enc.k as f64);
    let (lo, hi) = (enc.lo.to_f64(), enc.hi.to_f64());
    let theta = (4.0 * k + 3.0) * PI / (4.0 * n + 2.0);
    let mut x = (1.0 - (n - 1.0) / (8.0 * n * n * n)) * theta.cos();
    x = x.clamp(lo, hi);
    for _ in 0..30 {
        let r = legendre_eval(&EvalRequest::new(
            enc.n,
            Ball::exact(BigFloat::from_f64(x)),
            64,
            Want::ValueAndDeriv,
        ))?;
        let v = r.value.mid().to_f64();
        let d = r.deriv.expect("derivative requested").mid().to_f64();
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = (x - v / d).clamp(lo, hi);
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(x)
}

/// One interval Newton step `N(X) = m - P_n(m) / P'_n(X)` at precision `w`.
fn newton_step(n: u64, x: &Ball, w: u64) -> Result<Ball> {
    let mut m = x.mid().round(w, Round::Nearest);
    if !x.contains_point(&m) {
        m = x.mid().clone();
    }
    let v = legendre_eval(&EvalRequest::new(n, Ball::exact(m.clone()), w, Want::Value))?.value;
    let d = legendre_eval(&EvalRequest::new(n, x.clone(), w, Want::Deriv))?
        .deriv
        .expect("derivative requested");
    if d.contains_zero() {
        return Ok(Ball::new(m, Mag::inf()));
    }
    Ok(Ball::exact(m).sub(&v.div(&d, w), w))
}

fn rad_goal(x: &Ball, p: u64) -> Mag {
    let scale = x.mag_lower().max(Mag::pow2(-(p as i64)));
    scale.mul_2exp(-(p as i64) - 4)
}

/// Certified enclosure of root `enc.k` with radius `≤ 2^(-p-4) max(|x_k|, 2^-p)`.
pub fn refine_node(enc: &NodeEnclosure, p: u64) -> Result<Ball> {
    Ok(certify_node(enc, p)?.ball())
}

/// As [`refine_node`], returning the contracted interval with `certified` set.
pub fn certify_node(enc: &NodeEnclosure, p: u64) -> Result<NodeEnclosure> {
    let n = enc.n;
    let fail = || Error::UncertifiedRoot { n, k: enc.k };
    let done = |x: &Ball| NodeEnclosure {
        n,
        k: enc.k,
        lo: x.lo(),
        hi: x.hi(),
        certified: true,
    };
    if n % 2 == 1 && enc.k == (n - 1) / 2 {
        return Ok(done(&Ball::zero()));
    }
    let bounds = enc.ball();
    let x0 = heuristic_root(enc)?;
    let final_prec = p + 32 + guard_bits(n);

    // find a small box that contracts
    let mut eps = (x0.abs() * 2f64.powi(-40)).max(2f64.powi(-60));
    let mut x = None;
    for _ in 0..MAX_WIDENINGS {
        let lo = BigFloat::from_f64(x0 - eps).max(bounds.lo());
        let hi = BigFloat::from_f64(x0 + eps).min(bounds.hi());
        if lo < hi {
            let cand = Ball::from_endpoints(&lo, &hi);
            let nx = newton_step(n, &cand, LADDER_START)?;
            if cand.contains_interior(&nx) {
                x = Some(nx);
                break;
            }
        }
        eps *= 4.0;
    }
    let mut x = x.ok_or_else(fail)?;

    let mut w = LADDER_START;
    loop {
        w = (2 * w).min(final_prec);
        let mut steps = 0;
        loop {
            let nx = newton_step(n, &x, w)?;
            if !x.contains(&nx) {
                // contraction lost: keep the certified box
                match x.intersect(&nx) {
                    Some(i) if i.rad() < x.rad() => x = i,
                    _ => return Err(fail()),
                }
            } else {
                let improved = nx.rad() < x.rad();
                x = nx;
                if !improved {
                    break;
                }
            }
            steps += 1;
            if w < final_prec || x.rad() <= rad_goal(&x, p) || steps >= 6 {
                break;
            }
        }
        if w == final_prec {
            break;
        }
    }
    if x.rad() > rad_goal(&x, p) || !x.is_positive() {
        return Err(fail());
    }
    Ok(done(&x))
}

/// `2 / ((1-x)(1+x) P'_n(x)²)` over the node ball.
pub fn node_weight(n: u64, node: &Ball, p: u64) -> Result<Ball> {
    let mut wp = p + 16 + guard_bits(n);
    for _ in 0..4 {
        let d = legendre_eval(&EvalRequest::new(n, node.clone(), wp, Want::Deriv))?
            .deriv
            .expect("derivative requested");
        if !d.contains_zero() {
            let one = Ball::one();
            let s = one.sub(node, wp).mul(&one.add(node, wp), wp);
            return Ok(Ball::from_i64(2).div(&s.mul(&d.sqr(wp), wp), wp).round(p + 16));
        }
        wp *= 2;
    }
    Err(Error::Precondition(format!(
        "derivative of P_{n} not bounded away from zero at a node"
    )))
}

/// The `n`-point rule at `p` bits, using `threads` workers (0 = rayon default).
pub fn build_rule(n: u64, p: u64, threads: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Precondition("rule degree must be at least 1".into()));
    }
    if p < 8 {
        return Err(Error::Precondition("precision must be at least 8 bits".into()));
    }
    let half = n.div_ceil(2);
    let task = |k: u64| -> Result<(Ball, Ball)> {
        let x = refine_node(&initial_enclosure(n, k), p)?;
        let w = node_weight(n, &x, p)?;
        Ok((x, w))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let upper: Vec<(Ball, Ball)> =
        pool.install(|| (0..half).into_par_iter().map(task).collect::<Result<Vec<_>>>())?;

    let n_us = n as usize;
    let mut nodes = vec![Ball::zero(); n_us];
    let mut weights = vec![Ball::zero(); n_us];
    for (k, (x, w)) in upper.into_iter().enumerate() {
        nodes[n_us - 1 - k] = x.clone();
        weights[n_us - 1 - k] = w.clone();
        nodes[k] = x.neg();
        weights[k] = w;
    }
    for i in 1..n_us {
        if !(nodes[i - 1].hi() < nodes[i].lo()) {
            return Err(Error::UncertifiedRoot { n, k: i as u64 });
        }
    }
    Ok(QuadratureRule {
        n,
        p,
        nodes,
        weights,
    })
}

/// `Σ w_i f(x_i)` (the discrete sum; no quadrature error is included).
pub fn apply_rule<F>(rule: &QuadratureRule, f: F) -> Result<Ball>
where
    F: Fn(&Ball) -> Result<Ball>,
{
    let wp = rule.p + 16 + 2 * ceil_log2(rule.n + 1);
    let mut s = Ball::zero();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        s = s.add(&w.mul(&f(x)?, wp), wp);
    }
    Ok(s)
}

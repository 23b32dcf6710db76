//! Benchmark suites: rule timings, the log-integral error table and an
//! evaluation sweep over `θ`.

use std::io::{self, Write};
use std::time::Instant;

use legq::consts::ln;
use legq::evaluator::{legendre_eval, EvalRequest, Want};
use legq::format::rational_to_decimal;
use legq::{apply_rule, build_rule, Ball, BigFloat, Method, Result};

/// Expected orders of magnitude of the log-integral error.
pub const TABLE3_REFERENCE: [(u64, f64); 4] = [(12, 1e-14), (24, 1e-28), (48, 1e-56), (96, 1e-111)];
pub const TABLE3_DEGREES: [u64; 6] = [12, 24, 48, 96, 192, 384];
/// About 1000 decimal digits.
pub const TABLE3_PREC: u64 = 3322;

/// `∫_{-1}^{1} ln(2+x) dx = 3 ln 3 - 2`.
pub fn log_integral_reference(p: u64) -> Result<Ball> {
    let wp = p + 32;
    Ok(ln(&Ball::from_i64(3), wp)?.mul_i64(3, wp).sub(&Ball::from_i64(2), wp))
}

#[derive(Debug, Clone)]
pub struct Table3Row {
    pub n: u64,
    /// `Σ w_i ln(2 + x_i) - (3 ln 3 - 2)`.
    pub error: Ball,
    pub seconds: f64,
}

impl Table3Row {
    /// `log10 |error|` from the midpoint.
    pub fn log10_error(&self) -> f64 {
        self.error.mid().mag_upper().log2_approx() * std::f64::consts::LOG10_2
    }
}

pub fn table3_row(n: u64, p: u64, threads: usize) -> Result<Table3Row> {
    let t = Instant::now();
    let rule = build_rule(n, p, threads)?;
    let wp = p + 32;
    let two = Ball::from_i64(2);
    let s = apply_rule(&rule, |x| ln(&two.add(x, wp), wp))?;
    let error = s.sub(&log_integral_reference(p)?, wp);
    Ok(Table3Row {
        n,
        error,
        seconds: t.elapsed().as_secs_f64(),
    })
}

fn short(b: &Ball) -> String {
    rational_to_decimal(&b.mid().to_rational(), 3).0
}

pub fn table3(out: &mut dyn Write, max_n: u64, p: u64, threads: usize) -> io::Result<()> {
    writeln!(out, "n,error,log10_error,error_radius_log10,seconds")?;
    for n in TABLE3_DEGREES.into_iter().filter(|&n| n <= max_n) {
        match table3_row(n, p, threads) {
            Ok(r) => writeln!(
                out,
                "{},{},{:.2},{:.1},{:.3}",
                r.n,
                short(&r.error),
                r.log10_error(),
                r.error.rad().log2_approx() * std::f64::consts::LOG10_2,
                r.seconds
            )?,
            Err(e) => writeln!(out, "{n},error: {e},,,")?,
        }
    }
    Ok(())
}

pub fn timings(out: &mut dyn Write, max_n: u64, max_prec: u64, threads: usize) -> io::Result<()> {
    const NS: [u64; 10] = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000];
    const PS: [u64; 7] = [64, 128, 256, 512, 1024, 2048, 3322];
    writeln!(out, "n,p,seconds")?;
    for &n in NS.iter().filter(|&&n| n <= max_n) {
        for &p in PS.iter().filter(|&&p| p <= max_prec) {
            let t = Instant::now();
            let ok = build_rule(n, p, threads).is_ok();
            let secs = t.elapsed().as_secs_f64();
            if ok {
                writeln!(out, "{n},{p},{secs:.4}")?;
            } else {
                writeln!(out, "{n},{p},failed")?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub theta: f64,
    pub x: f64,
    pub method: Option<Method>,
    pub seconds: f64,
}

/// Times `P_n(cos θ)` at `points` values of `θ` spread over `(0, π/2)`.
pub fn sweep_points(n: u64, p: u64, points: usize) -> Result<Vec<SweepPoint>> {
    let mut v = Vec::with_capacity(points);
    for j in 0..points {
        let theta = (j as f64 + 0.5) / points as f64 * std::f64::consts::FRAC_PI_2;
        let x = theta.cos();
        let t = Instant::now();
        let r = legendre_eval(&EvalRequest::new(
            n,
            Ball::exact(BigFloat::from_f64(x)),
            p,
            Want::Value,
        ))?;
        v.push(SweepPoint {
            theta,
            x,
            method: r.method,
            seconds: t.elapsed().as_secs_f64(),
        });
    }
    Ok(v)
}

pub fn sweep(out: &mut dyn Write, n: u64, p: u64, points: usize) -> io::Result<()> {
    writeln!(out, "theta,x,method,seconds")?;
    match sweep_points(n, p, points) {
        Ok(pts) => {
            for s in pts {
                let m = s.method.map_or("closed".to_string(), |m| m.to_string());
                writeln!(out, "{:.6},{:.17},{m},{:.6}", s.theta, s.x, s.seconds)?;
            }
        }
        Err(e) => writeln!(out, "error: {e}")?,
    }
    Ok(())
}

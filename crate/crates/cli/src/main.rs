use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use legq::format::{parse_ball, parse_real, parse_u64};
use legq::{build_rule, legendre_eval, Ball, EvalRequest, Method, Want};
use legq_cli::bench;
use legq_cli::report::{rule_text, BallJson, EvalJson, RuleJson};
use legq_cli::rulefile::RuleFileV1;

#[derive(Parser)]
#[command(name = "legq", version, about = "Certified Legendre polynomials and Gauss-Legendre rules")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate P_n(x) and optionally P'_n(x).
    Eval {
        #[arg(long)]
        n: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Radius around x (ball input).
        #[arg(long)]
        rad: Option<String>,
        #[arg(long, default_value = "64")]
        prec: String,
        #[arg(long)]
        deriv: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compute an n-point Gauss-Legendre rule.
    Rule {
        #[arg(long)]
        n: String,
        #[arg(long, default_value = "64")]
        prec: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value_t = RuleFormat::Text)]
        format: RuleFormat,
        #[arg(long, env = "LEGQ_THREADS", default_value = "0")]
        threads: String,
    },
    /// Run a benchmark suite and print CSV.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        max_n: Option<String>,
        #[arg(long)]
        max_prec: Option<String>,
        #[arg(long, env = "LEGQ_THREADS", default_value = "0")]
        threads: String,
    },
    /// Quick internal consistency checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Rec,
    Asym,
    Zero,
    One,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RuleFormat {
    Text,
    Json,
    Rulefile,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Timings,
    Table3,
    Sweep,
}

enum Fail {
    Parse(String),
    Domain(String),
    Io(String),
    Other(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Parse(_) => 2,
            Fail::Domain(_) => 3,
            Fail::Io(_) => 4,
            Fail::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Parse(m) | Fail::Domain(m) | Fail::Io(m) | Fail::Other(m) => m,
        }
    }
}

impl From<legq::Error> for Fail {
    fn from(e: legq::Error) -> Self {
        match e {
            legq::Error::Domain(_) => Fail::Domain(e.to_string()),
            legq::Error::Precondition(_) => Fail::Parse(e.to_string()),
            _ => Fail::Other(e.to_string()),
        }
    }
}

impl From<legq::format::ParseError> for Fail {
    fn from(e: legq::format::ParseError) -> Self {
        Fail::Parse(e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Io(e.to_string())
    }
}

fn prec_flag(s: &str) -> Result<u64, Fail> {
    let p = parse_u64(s)?;
    if p < 8 {
        return Err(Fail::Parse(format!("--prec must be at least 8, got {p}")));
    }
    Ok(p)
}

fn emit(out: Option<&str>, text: &str) -> Result<(), Fail> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Fail::Io(format!("{path}: {e}"))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_eval(
    n: &str,
    x: &str,
    rad: Option<&str>,
    prec: &str,
    deriv: bool,
    method: MethodArg,
    format: Format,
) -> Result<(), Fail> {
    let n = parse_u64(n)?;
    let p = prec_flag(prec)?;
    let mut xb = parse_ball(x, p + 64)?;
    if let Some(r) = rad {
        let r = Ball::from_rational(&parse_real(r)?, 64);
        if r.mid().is_negative() {
            return Err(Fail::Parse("--rad must be nonnegative".into()));
        }
        xb = xb.add_error(r.mag_upper());
    }
    let want = if deriv { Want::ValueAndDeriv } else { Want::Value };
    let mut req = EvalRequest::new(n, xb, p, want);
    req.method = match method {
        MethodArg::Auto => None,
        MethodArg::Rec => Some(Method::Rec),
        MethodArg::Asym => Some(Method::Asym),
        MethodArg::Zero => Some(Method::Zero),
        MethodArg::One => Some(Method::One),
    };
    let r = legendre_eval(&req)?;
    let report = EvalJson {
        n,
        prec: p,
        method: r.method.map_or("closed".into(), |m| m.to_string()),
        value: BallJson::new(&r.value, p),
        deriv: r.deriv.as_ref().map(|d| BallJson::new(d, p)),
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        Format::Text => {
            let mut s = format!("method: {}\nvalue: {}\n", report.method, report.value.text());
            if let Some(d) = &report.deriv {
                s.push_str(&format!("deriv: {}\n", d.text()));
            }
            s
        }
    };
    emit(None, &text)
}

fn cmd_rule(n: &str, prec: &str, out: Option<&str>, format: RuleFormat, threads: &str) -> Result<(), Fail> {
    let n = parse_u64(n)?;
    if n == 0 {
        return Err(Fail::Parse("--n must be at least 1".into()));
    }
    let p = prec_flag(prec)?;
    let threads = parse_u64(threads)? as usize;
    let rule = build_rule(n, p, threads)?;
    let text = match format {
        RuleFormat::Text => rule_text(&rule),
        RuleFormat::Json => serde_json::to_string_pretty(&RuleJson::new(&rule)).expect("serializable") + "\n",
        RuleFormat::Rulefile => RuleFileV1::from_rule(&rule).render(),
    };
    emit(out, &text)
}

fn cmd_bench(suite: Suite, max_n: Option<&str>, max_prec: Option<&str>, threads: &str) -> Result<(), Fail> {
    let threads = parse_u64(threads)? as usize;
    let max_n = max_n.map(parse_u64).transpose()?;
    let max_prec = max_prec.map(parse_u64).transpose()?;
    let mut out = io::stdout().lock();
    match suite {
        Suite::Timings => bench::timings(&mut out, max_n.unwrap_or(1000), max_prec.unwrap_or(1024), threads)?,
        Suite::Table3 => bench::table3(
            &mut out,
            max_n.unwrap_or(96),
            max_prec.unwrap_or(bench::TABLE3_PREC),
            threads,
        )?,
        Suite::Sweep => bench::sweep(&mut out, max_n.unwrap_or(10_000), max_prec.unwrap_or(256), 64)?,
    }
    Ok(())
}

fn cmd_selftest() -> Result<(), Fail> {
    let mut failed = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };
    let v = legq::legendre_p(4, &Ball::zero(), 64)?;
    check("p4_at_zero", v.contains_point(&legq::BigFloat::from_f64(0.375)));
    let x = Ball::from_ratio(3, 10, 128);
    let a = legq::legendre_p(10, &x, 64)?;
    let b = legendre_eval(&EvalRequest::new(10, x.clone(), 64, Want::Value).with_method(Method::Rec))?.value;
    check("methods_overlap", a.overlaps(&b));
    let rule = build_rule(5, 128, 1)?;
    let w = Ball::from_ratio(128, 225, 160);
    check("five_point_middle_weight", rule.weights[2].overlaps(&w));
    let text = RuleFileV1::from_rule(&rule).render();
    let back = RuleFileV1::parse(&text).map(|r| r.render());
    check("rulefile_round_trip", back.is_ok_and(|b| b == text));
    let sum = legq::apply_rule(&rule, |_| Ok(Ball::one()))?;
    check("weight_sum", sum.contains_point(&legq::BigFloat::from_i64(2)));
    if failed > 0 {
        Err(Fail::Other(format!("{failed} self-test checks failed")))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Eval {
            n,
            x,
            rad,
            prec,
            deriv,
            method,
            format,
        } => cmd_eval(n, x, rad.as_deref(), prec, *deriv, *method, *format),
        Cmd::Rule {
            n,
            prec,
            out,
            format,
            threads,
        } => cmd_rule(n, prec, out.as_deref(), *format, threads),
        Cmd::Bench {
            suite,
            max_n,
            max_prec,
            threads,
        } => cmd_bench(*suite, max_n.as_deref(), max_prec.as_deref(), threads),
        Cmd::Selftest => cmd_selftest(),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("legq: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

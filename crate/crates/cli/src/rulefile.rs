//! Line-oriented rule file with exact hex-float balls.
//!
//! ```text
//! LEGQ-RULE v1 n=<n> p=<p> gen=<version>
//! <index> <node mid> <node rad> <weight mid> <weight rad>
//! ```

use std::fmt::Write as _;

use legq::format::{bigfloat_to_hex, mag_to_hex, parse_hex, parse_mag_hex};
use legq::{Ball, QuadratureRule};

pub const MAGIC: &str = "LEGQ-RULE";
pub const VERSION: &str = "v1";
pub const GENERATOR: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct RuleFileV1 {
    pub n: u64,
    pub p: u64,
    pub generator: String,
    pub nodes: Vec<Ball>,
    pub weights: Vec<Ball>,
}

#[derive(Debug)]
pub enum RuleFileError {
    Header(String),
    Record { line: usize, reason: String },
    Count { expected: u64, found: usize },
}

impl std::fmt::Display for RuleFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleFileError::Header(s) => write!(f, "bad rule file header: {s}"),
            RuleFileError::Record { line, reason } => write!(f, "bad record on line {line}: {reason}"),
            RuleFileError::Count { expected, found } => {
                write!(f, "expected {expected} records, found {found}")
            }
        }
    }
}

impl std::error::Error for RuleFileError {}

impl RuleFileV1 {
    pub fn from_rule(rule: &QuadratureRule) -> Self {
        RuleFileV1 {
            n: rule.n,
            p: rule.p,
            generator: GENERATOR.to_string(),
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
        }
    }

    pub fn into_rule(self) -> QuadratureRule {
        QuadratureRule {
            n: self.n,
            p: self.p,
            nodes: self.nodes,
            weights: self.weights,
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!("{MAGIC} {VERSION} n={} p={} gen={}\n", self.n, self.p, self.generator);
        for (i, (x, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            writeln!(
                s,
                "{i} {} {} {} {}",
                bigfloat_to_hex(x.mid()),
                mag_to_hex(x.rad()),
                bigfloat_to_hex(w.mid()),
                mag_to_hex(w.rad())
            )
            .expect("writing to a string");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, RuleFileError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| RuleFileError::Header("empty file".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some(MAGIC) || fields.next() != Some(VERSION) {
            return Err(RuleFileError::Header(header.to_string()));
        }
        let mut kv = |key: &str| -> Result<String, RuleFileError> {
            let f = fields.next().unwrap_or_default();
            f.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| RuleFileError::Header(format!("missing {key}")))
        };
        let num = |v: String, key: &str| {
            v.parse::<u64>()
                .map_err(|_| RuleFileError::Header(format!("bad {key}")))
        };
        let n = num(kv("n")?, "n")?;
        let p = num(kv("p")?, "p")?;
        let generator = kv("gen")?;

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| RuleFileError::Record { line: i + 2, reason };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(bad("expected 5 fields".into()));
            }
            if f[0].parse::<usize>().ok() != Some(nodes.len()) {
                return Err(bad("index out of sequence".into()));
            }
            let ball = |m: &str, r: &str| -> Result<Ball, RuleFileError> {
                let mid = parse_hex(m).map_err(|e| bad(e.to_string()))?;
                let rad = parse_mag_hex(r).map_err(|e| bad(e.to_string()))?;
                Ok(Ball::new(mid, rad))
            };
            nodes.push(ball(f[1], f[2])?);
            weights.push(ball(f[3], f[4])?);
        }
        if nodes.len() as u64 != n {
            return Err(RuleFileError::Count {
                expected: n,
                found: nodes.len(),
            });
        }
        Ok(RuleFileV1 {
            n,
            p,
            generator,
            nodes,
            weights,
        })
    }
}

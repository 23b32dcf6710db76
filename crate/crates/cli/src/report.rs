//! Text and JSON renderings of balls and rules.

use serde::Serialize;

use legq::format::{ball_to_decimal, bigfloat_to_hex, mag_to_hex};
use legq::{Ball, QuadratureRule};

#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct BallJson {
    pub mid: String,
    pub rad: String,
    pub mid_hex: String,
    pub rad_hex: String,
}

impl BallJson {
    pub fn new(b: &Ball, p: u64) -> Self {
        let (mid, rad) = ball_to_decimal(b, p);
        BallJson {
            mid,
            rad,
            mid_hex: bigfloat_to_hex(b.mid()),
            rad_hex: mag_to_hex(b.rad()),
        }
    }

    pub fn text(&self) -> String {
        format!("{} +/- {}", self.mid, self.rad)
    }
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct EvalJson {
    pub n: u64,
    pub prec: u64,
    pub method: String,
    pub value: BallJson,
    pub deriv: Option<BallJson>,
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct RuleJson {
    pub n: u64,
    pub prec: u64,
    pub nodes: Vec<BallJson>,
    pub weights: Vec<BallJson>,
}

impl RuleJson {
    pub fn new(rule: &QuadratureRule) -> Self {
        RuleJson {
            n: rule.n,
            prec: rule.p,
            nodes: rule.nodes.iter().map(|b| BallJson::new(b, rule.p)).collect(),
            weights: rule.weights.iter().map(|b| BallJson::new(b, rule.p)).collect(),
        }
    }
}

/// One line per node: `index node weight`.
pub fn rule_text(rule: &QuadratureRule) -> String {
    let mut s = String::new();
    for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let x = BallJson::new(x, rule.p).text();
        let w = BallJson::new(w, rule.p).text();
        s.push_str(&format!("{i} {x} {w}\n"));
    }
    s
}

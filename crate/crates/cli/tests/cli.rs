use std::process::{Command, Output};

use legq::format::{parse_decimal, parse_hex, parse_mag_hex};
use legq::{Ball, BigFloat};
use legq_cli::report::{BallJson, EvalJson, RuleJson};
use legq_cli::rulefile::RuleFileV1;

fn legq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legq"))
        .args(args)
        .env_remove("LEGQ_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = legq(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn ball_of(j: &BallJson) -> Ball {
    Ball::new(parse_hex(&j.mid_hex).unwrap(), parse_mag_hex(&j.rad_hex).unwrap())
}

#[test]
fn eval_p4_at_zero() {
    let out = stdout(&["eval", "--n", "4", "--x", "0", "--prec", "64", "--format", "json"]);
    let r: EvalJson = serde_json::from_str(&out).unwrap();
    let b = ball_of(&r.value);
    assert!(b.contains_point(&BigFloat::from_f64(0.375)));
    assert!(b.rad().log2_approx() <= -60.0 || b.rad().is_zero());
}

#[test]
fn eval_at_one_with_derivative() {
    let out = stdout(&["eval", "--n", "100", "--x", "1", "--prec", "64", "--deriv"]);
    assert!(out.contains("value: 1 +/- 0"), "{out}");
    assert!(out.contains("deriv: 5050 +/- 0"), "{out}");
}

#[test]
fn forced_methods_overlap() {
    let get = |m: &str| {
        let out = stdout(&["eval", "--n", "10", "--x", "0.3", "--prec", "64", "--method", m, "--format", "json"]);
        let r: EvalJson = serde_json::from_str(&out).unwrap();
        assert_eq!(r.method, m);
        ball_of(&r.value)
    };
    let (z, a, r) = (get("zero"), get("asym"), get("rec"));
    assert!(z.overlaps(&a) && z.overlaps(&r) && a.overlaps(&r));
}

#[test]
fn hex_argument_and_ball_radius() {
    let out = stdout(&["eval", "--n", "4", "--x", "0x0p0", "--rad", "1e-3", "--format", "json"]);
    let r: EvalJson = serde_json::from_str(&out).unwrap();
    let b = ball_of(&r.value);
    let p4 = |t: f64| (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0;
    assert!(b.contains_point(&BigFloat::from_f64(p4(1e-3))));
}

#[test]
fn text_and_json_agree() {
    let t = stdout(&["eval", "--n", "37", "--x", "-0.71", "--prec", "128"]);
    let j: EvalJson = serde_json::from_str(&stdout(&[
        "eval", "--n", "37", "--x", "-0.71", "--prec", "128", "--format", "json",
    ]))
    .unwrap();
    assert!(t.contains(&j.value.text()));
    let mid = parse_decimal(&j.value.mid).unwrap();
    let rad = parse_decimal(&j.value.rad).unwrap();
    let b = ball_of(&j.value);
    let d = mid - b.mid().to_rational();
    assert!(d <= rad && -d <= rad);
}

#[test]
fn exit_codes() {
    assert_eq!(legq(&["eval", "--n", "3", "--x", "1.5"]).status.code(), Some(3));
    assert_eq!(legq(&["eval", "--n", "3", "--x", "abc"]).status.code(), Some(2));
    assert_eq!(legq(&["eval", "--n", "3", "--x", "0.5", "--prec", "4"]).status.code(), Some(2));
    assert_eq!(legq(&["eval", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        legq(&["rule", "--n", "3", "--out", "/nonexistent-dir/rule.txt"]).status.code(),
        Some(4)
    );
}

#[test]
fn one_point_rule() {
    let out = stdout(&["rule", "--n", "1", "--prec", "64"]);
    assert_eq!(out.lines().count(), 1);
    assert_eq!(out.trim(), "0 0 +/- 0 2 +/- 0");
}

#[test]
fn five_point_json_matches_radicals() {
    let out = stdout(&["rule", "--n", "5", "--prec", "256", "--format", "json"]);
    let r: RuleJson = serde_json::from_str(&out).unwrap();
    let w = 400;
    let s = Ball::from_ratio(10, 7, w).sqrt(w).unwrap().mul_i64(2, w);
    let outer = Ball::from_i64(5).add(&s, w).div_i64(9, w).sqrt(w).unwrap();
    let inner = Ball::from_i64(5).sub(&s, w).div_i64(9, w).sqrt(w).unwrap();
    let nodes: Vec<Ball> = r.nodes.iter().map(ball_of).collect();
    assert!(nodes[4].overlaps(&outer) && nodes[3].overlaps(&inner));
    assert!(nodes[0].overlaps(&outer.neg()) && nodes[2].contains_point(&BigFloat::zero()));
}

#[test]
fn threads_do_not_change_output() {
    let a = stdout(&["rule", "--n", "20", "--prec", "64", "--threads", "1", "--format", "rulefile"]);
    let b = stdout(&["rule", "--n", "20", "--prec", "64", "--threads", "4", "--format", "rulefile"]);
    assert_eq!(a, b);
    let c = Command::new(env!("CARGO_BIN_EXE_legq"))
        .args(["rule", "--n", "20", "--prec", "64", "--format", "rulefile"])
        .env("LEGQ_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(c.stdout).unwrap(), a);
}

#[test]
fn rulefile_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.txt");
    let p = path.to_str().unwrap();
    stdout(&["rule", "--n", "9", "--prec", "128", "--format", "rulefile", "--out", p]);
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = RuleFileV1::parse(&text).unwrap();
    assert_eq!(parsed.render(), text);
    assert_eq!(parsed.n, 9);
    let direct = legq::build_rule(9, 128, 1).unwrap();
    assert_eq!(parsed.into_rule(), direct);
}

#[test]
fn selftest_passes() {
    let out = stdout(&["selftest"]);
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn bench_suites_emit_csv() {
    let out = stdout(&["bench", "--suite", "table3", "--max-n", "12", "--max-prec", "128"]);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("12,"), "{out}");
    let out = stdout(&["bench", "--suite", "timings", "--max-n", "20", "--max-prec", "64"]);
    assert_eq!(out.lines().count(), 3);
    let out = stdout(&["bench", "--suite", "sweep", "--max-n", "1000", "--max-prec", "64"]);
    assert_eq!(out.lines().count(), 65);
}

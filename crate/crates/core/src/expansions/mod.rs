//! Series expansions of `P_n` with rigorous truncation bounds.
//!
//! Every routine evaluates at a point `x ∈ [0, 1]`; parity and ball inputs
//! are handled by the evaluator.

pub mod asymptotic;
pub mod one;
pub mod zero;

use crate::evaluator::Method;
use crate::error::Error;
use crate::mag::Mag;

/// `⌈log2 v⌉` for `v ≥ 1`.
pub fn ceil_log2(v: u64) -> u64 {
    if v <= 1 {
        0
    } else {
        64 - (v - 1).leading_zeros() as u64
    }
}

/// Working precision for a series evaluation.
pub fn working_prec(p_target: u64, p_a: u64, n: u64) -> u64 {
    p_target + p_a + 10 + ceil_log2(n + 1)
}

/// Rounds a precision up to a multiple of 64 so cached constants get reused.
pub(crate) fn const_prec(wp: u64) -> u64 {
    wp.div_ceil(64) * 64
}

/// Largest admissible truncation error for a target of `p_target` bits.
pub(crate) fn tail_target(p_target: u64) -> Mag {
    Mag::pow2(-(p_target as i64) - 2)
}

/// The truncation order after one failed tail check.
pub(crate) fn escalate(k: u64) -> u64 {
    k + k / 10 + 1
}

pub(crate) const ESCALATIONS: usize = 3;

pub(crate) fn inapplicable(method: Method, reason: impl Into<String>) -> Error {
    Error::Inapplicable {
        method,
        reason: reason.into(),
    }
}

/// Which cancellation estimate to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CancelKind {
    Zero,
    One,
}

/// Estimated bits lost to cancellation (a heuristic; soundness does not depend on it).
pub fn cancellation_bits(kind: CancelKind, n: u64, x: f64) -> u64 {
    let x = x.abs().min(1.0);
    let bits = match kind {
        CancelKind::Zero => n as f64 * (x + (1.0 + x * x).sqrt()).log2(),
        CancelKind::One => {
            let u = (x - 1.0) / 2.0;
            2.0 * n as f64 * (-u).max(0.0).sqrt() / std::f64::consts::LN_2
        }
    };
    bits.max(0.0).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_examples() {
        assert_eq!(cancellation_bits(CancelKind::Zero, 77, 0.0), 0);
        assert_eq!(cancellation_bits(CancelKind::One, 77, 1.0), 0);
        assert_eq!(cancellation_bits(CancelKind::One, 100, 0.82), 87);
        assert_eq!(cancellation_bits(CancelKind::Zero, 100, 1.0), 128);
    }

    #[test]
    fn log2_ceilings() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }
}

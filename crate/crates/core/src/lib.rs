//! Rigorous Legendre polynomial evaluation and certified Gauss–Legendre rules
//! in midpoint-radius arbitrary-precision arithmetic.

pub mod ball;
pub mod bigfloat;
pub mod complex;
pub mod consts;
pub mod error;
pub mod evaluator;
pub mod expansions;
pub mod format;
pub mod fxp;
pub mod mag;
pub mod quadrature;
pub mod rectsplit;
pub mod scalars;

pub use ball::Ball;
pub use bigfloat::{BigFloat, Round};
pub use complex::ComplexBall;
pub use error::{Error, Result};
pub use evaluator::{legendre_eval, legendre_p, EvalRequest, EvalResult, Method, Want};
pub use mag::Mag;
pub use quadrature::{apply_rule, build_rule, QuadratureRule};

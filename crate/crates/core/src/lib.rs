//! Stability solvers and exhaustive oracles for exchange economies with
//! indivisible goods.
//!
//! * [`model`]: economies, utilities and structural checks.
//! * [`oracle`]: brute-force cores, pairwise stability, the pairwise
//!   bargaining set and NTU-game balancedness / ordinal convexity.
//! * [`ttc`]: Top Trading Cycles on housing markets.
//! * [`toperator`]: the antitone operator `T_k`, its iteration, and the
//!   bargaining-set allocation built from a `T²` fixed point.
//! * [`rounding`]: fractional assignment matrices and the two rounding
//!   procedures that certify balancedness constructively.

pub mod catalog;
pub mod error;
pub mod generate;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rounding;
pub mod toperator;
pub mod ttc;

pub use error::{Error, Result};
pub use model::{Allocation, Budget, Bundle, Coalition, Economy, ExtValue, Rational, Utility};

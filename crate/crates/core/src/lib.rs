//! Exact equilibrium and social-optimum solvers for congestion games whose
//! strategy spaces are integer points of totally unimodular systems or
//! integral polymatroids.

pub mod document;
pub mod dynamics;
pub mod error;
pub mod frontends;
pub mod lp;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod polymatroid;
pub mod reductions;
pub mod symmetric;
pub mod tu;

pub use error::{Error, Result};
pub use model::{DelayTable, GameInstance, GameState, ShiftMode, StrategySpace, TuSystem};
pub use numeric::{IntMatrix, IntVector, Rational};
pub use polymatroid::{PolymatroidMode, PolymatroidOracle};

/// Linear program over arbitrary-precision rationals.
pub type RationalLp = lp::LinearProgram<Rational>;
/// Outcome of a [`RationalLp`].
pub type RationalOutcome = lp::LpOutcome<Rational>;
/// Machine-word rationals; fine for small programs, may overflow on large ones.
pub type SmallRational = num_rational::Ratio<i64>;
/// Linear program over [`SmallRational`].
pub type SmallLp = lp::LinearProgram<SmallRational>;

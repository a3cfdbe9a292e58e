//! Exact checks for Lipschitz and valuative Lipschitz stratification
//! conditions over the field Q(ε) of rational functions in an
//! infinitesimal.

pub mod chains;
pub mod error;
pub mod expr;
pub mod field;
pub mod flags;
pub mod grassmann;
pub mod linalg;
pub mod rectify;
pub mod strat;
pub mod suites;
pub mod verdict;

pub use error::{Error, Result};
pub use expr::RationalExpr;
pub use field::{ExtendedValuation, FieldElement};
pub use linalg::Matrix;

//! Construction, simulation and analysis of a generalized n-particle Hardy
//! nonlocality test.
//!
//! The crate builds the n-site state whose u/v expansion lacks the all-u
//! component and verifies the three sets of nonlocality conditions it
//! satisfies: an impossible joint outcome, perfect conditional
//! correlations, and strictly positive "forbidden" probabilities. From
//! those it reproduces the quantitative consequences: the combined
//! nonlocal probability and its closed forms, the optimum over the
//! transform coefficient, the ~15.6% large-n limit, entanglement entropy
//! and negativity, and the integrated nonlocal probability.
//!
//! Two independent routes cover every quantity: the analytic expansions in
//! [`hardy`] and post-selected circuits simulated on the dense statevector
//! engine in [`linalg`]/[`circuit`]. The [`verify`] module cross-checks the
//! routes and certifies the paradox; [`analytics`] holds the closed forms
//! and numerical analysis.
//!
//! All computation is pure: functions take immutable inputs and return new
//! values, so sweeps parallelize from the outside without shared state.

pub mod analytics;
pub mod circuit;
pub mod error;
pub mod hardy;
pub mod linalg;
pub mod sites;
pub mod verify;

pub use error::{Error, Result};
pub use hardy::{HardyState, TransformCoefficients};
pub use linalg::Statevector;
pub use sites::SiteSet;

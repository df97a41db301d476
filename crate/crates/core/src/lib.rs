//! Modifying zero-sum games so that a chosen strategy profile becomes the
//! unique Nash equilibrium (or unique Markov perfect equilibrium) at small
//! cost.

pub mod erps;
pub mod error;
pub mod feasibility;
pub mod generate;
pub mod golden;
pub mod harness;
pub mod io;
pub mod lp;
pub mod markov;
pub mod normal;
pub mod types;
pub mod uniqueness;

pub use erps::{build_erps, ErpsGame};
pub use error::{Error, Result};
pub use feasibility::{check_feasibility_markov, check_feasibility_normal, FeasibilityReport, Violation};
pub use markov::{
    backward_induction, rap_mg, stagewise_optimum, verify_mpe_unique, MarkovModificationResult, MpeVerification,
};
pub use normal::{rap, ModificationResult};
pub use types::{
    CostSpec, Limit, MarkovGame, MarkovPolicy, MatrixGame, ModificationRequest, SolverStats, StrategyProfile,
    ValueRange,
};
pub use uniqueness::{
    enumerate_nash, solve_zero_sum, verify_unique_ne, NashEnumeration, Tolerances, UniquenessCertificate,
};

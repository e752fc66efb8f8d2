//! Link scheduling under the physical (SINR) interference model.
//!
//! The crate covers the radio model and feasibility checks, the LP
//! relaxation with randomized rounding, an exact exhaustive oracle for small
//! instances, a distributed carrier-sensing protocol, and simplified
//! baselines for comparison.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod admission;
pub mod baselines;
pub mod centralized;
pub mod distributed;
pub mod error;
pub mod experiment;
pub mod feasibility;
pub mod fixtures;
pub mod lp;
pub mod radio;
pub mod scenario;

pub use baselines::{run_baseline, BaselineKind, BaselineSchedule};
pub use centralized::{
    app_schedule, exhaustive_opt, theorem1_bound, ExactOptimum, RoundingOutcome,
};
pub use distributed::{run_distributed, run_distributed_frame, ProtocolParams, SimTrace};
pub use error::{Error, Result};
pub use feasibility::{check_all, ConstraintReport, Schedule};
pub use lp::{build_lp, solve_lp, FractionalSolution, LpModel};
pub use radio::{Link, NetworkInstance, Node, RadioParams};
pub use scenario::{generate_scenario, ScenarioConfig};

pub mod bounds;
pub mod cli;
pub mod error;
pub mod eval;
pub mod models;
pub mod policy;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::{Error, Result, Warning};
pub use models::{Arm, ArmDistribution, MeanSpace, MeanVector, OutcomeModel};
pub use policy::{AllocationSchedule, PolicyKind, PolicyState};
pub use sim::{Engine, ExperimentConfig, RegretEstimate, RunRecord};
pub use stats::Prob;

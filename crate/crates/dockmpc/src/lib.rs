//! Model-predictive coupling of omnidirectional mobile robots.

pub mod ad;
pub mod angles;
pub mod cli;
pub mod coupling;
pub mod dynamics;
pub mod export;
pub mod gradient_check;
pub mod metrics;
pub mod nlp;
pub mod objective;
pub mod scenario;
pub mod simulation;
pub mod solver;
pub mod types;

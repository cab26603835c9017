//! Detection, explanation and resolution of goal conflicts between two
//! agents that hold partially inconsistent beliefs about a shared world.

pub mod cli;
pub mod engine;
pub mod logic;
pub mod report;
pub mod sat;
pub mod scenario;
pub mod temporal;
pub mod world;

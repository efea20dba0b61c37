pub mod approx;
pub mod cli;
pub mod construct;
pub mod error;
pub mod groups;
pub mod length;
pub mod report;
pub mod scenario;
pub mod witnesses;

pub use error::{Error, Result};
pub use scenario::run_scenario_str;

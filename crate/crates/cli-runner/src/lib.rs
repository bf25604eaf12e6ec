//! Scenario files, presets, and the `jc` command-line front end tying the
//! simulation crates together.

pub mod output;
pub mod presets;
pub mod runner;
pub mod scenario;

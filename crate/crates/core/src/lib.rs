pub mod assignment;
pub mod cli;
pub mod descriptor;
pub mod error;
pub mod fusion;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod report;
pub mod synth;
pub mod tracker;
pub mod types;

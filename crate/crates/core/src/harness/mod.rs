//! Experiment drivers: configuration, presets for the published figures,
//! result files and curve comparison.

pub mod compare;
pub mod config;
pub mod presets;
pub mod reference;
pub mod run;
pub mod table;

pub use compare::{compare_curves, compare_files, Column, ComparisonReport};
pub use config::{Figure, Method, RunConfig, Task};
pub use run::{reproduce, run_task, run_to_file};
pub use table::{CurveRow, RateRow};

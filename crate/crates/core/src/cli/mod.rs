//! Configuration, experiment presets and batch drivers behind the `subdiff` binary.

pub mod config;
pub mod props;
pub mod run;
pub mod study;

pub use config::{parse_config, validate, Preset, RunConfig};
pub use props::{run_props, PropsReport};
pub use run::{execute, run_command, RunReport, FAILURE_MARKER, NORMS_HEADER};
pub use study::{convergence_study, observed_order, StudyTable, STUDY_HEADER};

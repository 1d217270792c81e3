//! Simulation of a student's knowledge under a teacher's lessons.
//!
//! The model tracks knowledge split into categories of increasing durability,
//! a workability factor that drains with work and recovers on breaks, and a
//! day schedule of lessons and breaks. See [`engine::run`] for the entry
//! point and [`experiments`] for ready-made studies.

pub mod config;
pub mod csv;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod model;
pub mod schedule;
pub mod svg;

pub use config::{parse_config, parse_config_with_warnings, serialize_config};
pub use csv::write_csv;
pub use engine::{apply_transition, run, step, Method, Row, SimConfig, Trajectory};
pub use error::{Diagnostic, Result, Severity, SimError};
pub use experiments::{
    break_length_study, optimize_constant_u, parameter_sweep, pr1_config, replicate_pr1, Objective, StudyResult,
    UOptimum,
};
pub use model::{
    break_derivatives, effort, gamma_from_tau, lesson_derivatives, strength_coefficient, total_knowledge, workability,
    EffortSpec, ModelParams, Segment, SegmentKind, SimState,
};
pub use schedule::Schedule;
pub use svg::{render_svg, PlotScales};

//! Scenario files and the runner behind the command-line tool.

mod ini;
mod runner;
mod scenario;

pub use ini::Diagnostic;
pub use runner::{
    run_scenario, RunError, RunOutcome, Summary, TaskSummary, ToleranceProfile,
    TOLERANCE_PROFILE_VAR,
};
pub use scenario::{
    parse_scenario, parse_scenario_str, ClassicalSpec, ConstructionKind, ConstructionSpec,
    MethodSpec, Scenario, ScenarioError, TaskKind, TaskSpec,
};

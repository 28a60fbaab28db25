//! The planning LP: model container, builder, solver backends and solutions.

mod backend;
mod build;
mod model;
mod solution;

pub use backend::{available_backends, backend_by_name, LpResult, MicroLp, SolveStatus, SolverBackend};
#[cfg(feature = "highs")]
pub use backend::Highs;
pub use build::{build_lp, BuildOptions, FlowFormulation, Linearization, PlanningModel, SsscMode, VariableCatalog};
pub use model::{check_feasibility, Col, Column, Family, FeasibilityReport, PlanningLP, Row, Sense, Violation};
pub use solution::{solve, CostBreakdown, Solution, FEASIBILITY_TOL};

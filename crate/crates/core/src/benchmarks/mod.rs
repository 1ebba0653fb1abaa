//! Benchmark problems, exact errors and experiment drivers.

mod diagnostic;
mod errors;
mod exact;
mod experiment;
mod weight;

pub use diagnostic::{side_condition_diagnostic, SideConditionDiagnostic};
pub use errors::{compute_errors, ErrorNorms};
pub use exact::{exact_solution, ExactSolution};
pub use experiment::{run_experiment, write_csv, write_records, ConvergenceRecord, CSV_HEADER};
pub use weight::{weight, WeightMode, LSHAPE_EIGENVALUE};

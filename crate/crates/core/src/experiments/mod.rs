//! Experiment drivers and their configuration, metrics and CSV output.

mod config;
mod drivers;
mod metrics;
mod sources;
mod table;

pub use config::{default_rho_constants, ExperimentConfig, HMode, Method, PointKind, DEFAULT_EVAL_GRID, KEYS, POINTS_DIR_ENV};
pub use drivers::{
    describe_points, kernel_info, run_convergence, run_decompose, run_noise, run_timing, DecomposeJob, EvalGrid, RhoChoice,
};
pub use metrics::{component_errors, cost_at_error, extrapolate_cost, l2_error, l2_error_values, loglog_slope, median, rates, rmse_values, ErrorTriple};
pub use sources::{acquire, fetch_note, find_point_file, h_value, FILE_NORM_TOL};
pub use table::{fmt_f64, CsvTable};

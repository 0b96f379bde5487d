//! Seeded verification campaigns, the sharpness scan for the classical
//! extremal function, and radius tables.

mod campaign;
mod scan;
mod suites;
mod table;

pub use campaign::{
    derive_instance_seed, equispaced_grid, replay_trial, run_campaign, run_campaign_with_threads, threads_from_env,
    with_thread_cap, CampaignConfig, OutputSpec, Report, ReportFormat, Suite, Summary, TrialRecord, ALGEBRA_RADII,
    COMPOSITION_RADIUS, DEFAULT_GRID_POINTS, DEFAULT_TOLERANCE, MAX_DEGREE, MAX_DIM, THREADS_ENV,
};
pub use scan::{run_sharpness_scan, threshold_trend, ScanRow, SharpnessScan, ThresholdTrend, SCAN_DEGREE, THRESHOLD_TOL};
pub use suites::{check_polyanalytic_family, MAX_CAMPAIGN_ORDER};
pub use table::{radius_table, write_table, ParamGrid, TableRow};

//! Scenario runner: wires sensors, filter, PID, mixer and plant together,
//! writes CSV traces and computes step-response metrics.

mod config;
mod metrics;
pub mod presets;
mod run;
mod scenario;
mod sweep;
mod trace;

pub use config::{parse_config, parse_config_str, to_config_string};
pub use metrics::{report_metrics, AxisMetrics, Metrics};
pub use run::{gyro_only_track, run_scenario, run_scenario_with_probe, LoopProbe, Stage, TraceRow};
pub use scenario::{AxisGains, FilterSettings, Mode, Scenario, ScheduleEntry, SweepSettings};
pub use sweep::{sweep_report, SweepPoint, SweepReport, SWEEP_ANGLES};
pub use trace::{emit_csv, read_csv, read_csv_file, write_csv_file};

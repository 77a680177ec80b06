//! Scan planning, trigger timing, the acquisition loop and record persistence.

mod acquire;
mod plan;
mod record_io;

pub use acquire::{run_acquisition, AcquisitionRecord, FrameEntry, Observation};
pub use plan::{
    estimate_time, full_scan_plan, full_scan_plan_with, plan_intervals, ScanGeometry, ScanPlan,
    TimingParams,
};
pub use record_io::{load_observation, load_record, save_record, JITTER_LOG, MANIFEST};

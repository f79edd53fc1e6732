//! Vehicle trajectories: a synthetic generator and a CSV trace format.

mod generate;
mod trace;

pub use generate::{generate_trace, kmh_to_mps, TrafficError, TrafficParams};
pub use trace::{Sample, Trace, TraceError, Track};

//! Discrete-event simulation of the vehicular scenario: topology, wired
//! links, consumer and producer applications, and the event loop.

mod apps;
mod config;
mod engine;
mod event;
mod link;
mod rng;

pub use apps::{
    assign_apps, consumer_next_name, producer_on_interest, producer_prefixes, AppState, ConsumerSpec,
    DISTINCT_PREFIX, SHARED_PREFIX,
};
pub use config::{AppsConfig, ConfigError, DurationsConfig, ModeConfig, ScenarioConfig, TopologyConfig};
pub use engine::{build_trace, run, FrameRecord, SimError, Simulation};
pub use event::EventQueue;
pub use link::WiredLink;
pub use rng::{stream, Stream};

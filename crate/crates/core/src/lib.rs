//! Deterministic discrete-event simulator for Named Data Networking over
//! infrastructure-mode 802.11 along a vehicular corridor.

pub mod mobility;
pub mod ndn;
pub mod sim;
pub mod stats;
pub mod time;
pub mod wireless;

pub use time::SimTime;

//! Named Data Networking forwarding: names, packets, tables and the
//! forwarding pipeline.

pub mod cs;
pub mod face;
pub mod fib;
pub mod forwarder;
pub mod mode;
pub mod name;
pub mod packet;
pub mod pit;

pub use cs::ContentStore;
pub use face::{Face, FaceId, FaceKind, NodeId};
pub use fib::{Fib, FibEntry, LearnedMac, NextHop};
pub use forwarder::{DropReason, ForwardAction, Forwarder, ForwarderConfig, ForwarderCounters};
pub use mode::{select_frame_destination, DeploymentMode, Direction, FrameDestination};
pub use name::{Component, Name, NameError};
pub use packet::{Data, Interest, MacAddress, Packet};
pub use pit::{InRecord, OutRecord, Pit, PitEntry, PitFull};

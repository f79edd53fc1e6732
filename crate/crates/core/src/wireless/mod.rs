//! Abstracted 802.11 link layer: per-frame airtime, FIFO medium per BSS,
//! acknowledged unicast with retries, unacknowledged basic-rate broadcast,
//! and distance-based association.

mod assoc;
mod bss;
mod phy;

pub use assoc::associate;
pub use bss::{Bss, TxOutcome};
pub use phy::{airtime, Frame, PhyError, PhyProfile};

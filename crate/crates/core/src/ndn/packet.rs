use std::fmt;
use std::time::Duration;

use super::name::{var_number_len, Name};

/// Conventional NDN interest lifetime.
pub const DEFAULT_INTEREST_LIFETIME: Duration = Duration::from_secs(4);

/// Payload size used by every producer in the vehicular scenarios.
pub const DEFAULT_PAYLOAD_SIZE: usize = 1024;

/// 48-bit link-layer address.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacAddress(u64);

impl MacAddress {
    pub const BROADCAST: MacAddress = MacAddress(0xFFFF_FFFF_FFFF);

    pub const fn new(raw: u64) -> Self {
        MacAddress(raw & 0xFFFF_FFFF_FFFF)
    }

    /// Locally administered unicast address derived from an index.
    pub const fn local(index: u32) -> Self {
        MacAddress(0x0200_0000_0000 | index as u64)
    }

    pub fn is_broadcast(self) -> bool {
        self == Self::BROADCAST
    }

    pub fn octets(self) -> [u8; 6] {
        let b = self.0.to_be_bytes();
        [b[2], b[3], b[4], b[5], b[6], b[7]]
    }
}

impl fmt::Display for MacAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = self.octets();
        write!(f, "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", o[0], o[1], o[2], o[3], o[4], o[5])
    }
}

impl fmt::Debug for MacAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interest {
    pub name: Name,
    pub nonce: u32,
    pub lifetime: Duration,
}

impl Interest {
    pub fn new(name: Name, nonce: u32) -> Self {
        Interest {
            name,
            nonce,
            lifetime: DEFAULT_INTEREST_LIFETIME,
        }
    }

    pub fn with_lifetime(mut self, lifetime: Duration) -> Self {
        self.lifetime = lifetime;
        self
    }

    /// Approximate TLV wire size: name, nonce, lifetime.
    pub fn wire_size(&self) -> usize {
        let lifetime_ms = self.lifetime.as_millis() as u64;
        let inner = self.name.encoded_len() + (2 + 4) + (2 + nonneg_int_len(lifetime_ms));
        1 + var_number_len(inner) + inner
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Data {
    pub name: Name,
    pub payload_size: usize,
    pub freshness: Duration,
}

impl Data {
    pub fn new(name: Name, payload_size: usize) -> Self {
        Data {
            name,
            payload_size,
            freshness: Duration::ZERO,
        }
    }

    /// Approximate TLV wire size: name, meta info, content and a
    /// 32-byte digest signature.
    pub fn wire_size(&self) -> usize {
        let freshness_ms = self.freshness.as_millis() as u64;
        let meta = 2 + 2 + nonneg_int_len(freshness_ms);
        let content = 1 + var_number_len(self.payload_size) + self.payload_size;
        let sig_info = 2 + 3;
        let sig_value = 2 + 32;
        let inner = self.name.encoded_len() + meta + content + sig_info + sig_value;
        1 + var_number_len(inner) + inner
    }
}

/// Network-layer packet as carried on a face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Packet {
    Interest(Interest),
    Data(Data),
}

impl Packet {
    pub fn name(&self) -> &Name {
        match self {
            Packet::Interest(i) => &i.name,
            Packet::Data(d) => &d.name,
        }
    }

    pub fn wire_size(&self) -> usize {
        match self {
            Packet::Interest(i) => i.wire_size(),
            Packet::Data(d) => d.wire_size(),
        }
    }

    pub fn is_interest(&self) -> bool {
        matches!(self, Packet::Interest(_))
    }
}

fn nonneg_int_len(v: u64) -> usize {
    match v {
        0..=0xFF => 1,
        0x100..=0xFFFF => 2,
        0x1_0000..=0xFFFF_FFFF => 4,
        _ => 8,
    }
}

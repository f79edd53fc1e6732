use rustc_hash::FxHashMap as HashMap;

use super::face::FaceId;
use super::name::Name;
use super::packet::MacAddress;
use crate::time::SimTime;

/// Downstream record: who asked, with which nonce, from which link-layer
/// senders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InRecord {
    pub face: FaceId,
    pub nonce: u32,
    pub expiry: SimTime,
    /// Frame sources observed on `face` for this name, in arrival order.
    pub sender_macs: Vec<MacAddress>,
}

impl InRecord {
    pub fn add_sender(&mut self, mac: MacAddress) {
        if !self.sender_macs.contains(&mac) {
            self.sender_macs.push(mac);
        }
    }
}

/// Upstream record: where the interest was forwarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutRecord {
    pub face: FaceId,
    pub nonce: u32,
    pub expiry: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitEntry {
    pub name: Name,
    pub in_records: Vec<InRecord>,
    pub out_records: Vec<OutRecord>,
}

impl PitEntry {
    pub fn new(name: Name) -> Self {
        PitEntry {
            name,
            in_records: Vec::new(),
            out_records: Vec::new(),
        }
    }

    pub fn in_record(&self, face: FaceId) -> Option<&InRecord> {
        self.in_records.iter().find(|r| r.face == face)
    }

    pub fn in_record_mut(&mut self, face: FaceId) -> Option<&mut InRecord> {
        self.in_records.iter_mut().find(|r| r.face == face)
    }

    pub fn has_nonce(&self, nonce: u32) -> bool {
        self.in_records.iter().any(|r| r.nonce == nonce) || self.out_records.iter().any(|r| r.nonce == nonce)
    }

    pub fn has_live_out_record(&self, now: SimTime) -> bool {
        self.out_records.iter().any(|r| r.expiry > now)
    }

    pub fn live_in_records(&self, now: SimTime) -> impl Iterator<Item = &InRecord> {
        self.in_records.iter().filter(move |r| r.expiry > now)
    }

    /// Records or refreshes the in-record for `face`. Returns the nonce it
    /// replaced, if different.
    pub fn upsert_in_record(&mut self, face: FaceId, nonce: u32, expiry: SimTime, sender: Option<MacAddress>) -> Option<u32> {
        match self.in_record_mut(face) {
            Some(rec) => {
                let old = std::mem::replace(&mut rec.nonce, nonce);
                rec.expiry = rec.expiry.max(expiry);
                if let Some(mac) = sender {
                    rec.add_sender(mac);
                }
                (old != nonce).then_some(old)
            }
            None => {
                self.in_records.push(InRecord {
                    face,
                    nonce,
                    expiry,
                    sender_macs: sender.into_iter().collect(),
                });
                None
            }
        }
    }

    /// Like [`PitEntry::upsert_in_record`] for the out-record of `face`.
    pub fn upsert_out_record(&mut self, face: FaceId, nonce: u32, expiry: SimTime) -> Option<u32> {
        match self.out_records.iter_mut().find(|r| r.face == face) {
            Some(rec) => {
                let old = std::mem::replace(&mut rec.nonce, nonce);
                rec.expiry = expiry;
                (old != nonce).then_some(old)
            }
            None => {
                self.out_records.push(OutRecord { face, nonce, expiry });
                None
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PitFull;

/// Pending Interest Table keyed by exact name.
#[derive(Debug, Clone, Default)]
pub struct Pit {
    entries: HashMap<Name, PitEntry>,
    capacity: Option<usize>,
}

impl Pit {
    pub fn new(capacity: Option<usize>) -> Self {
        Pit {
            entries: HashMap::default(),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &Name) -> Option<&mut PitEntry> {
        self.entries.get_mut(name)
    }

    /// Finds or creates the entry for `name`. The boolean is true when the
    /// entry was created by this call.
    pub fn find_or_insert(&mut self, name: &Name) -> Result<(&mut PitEntry, bool), PitFull> {
        if self.entries.contains_key(name) {
            return Ok((self.entries.get_mut(name).unwrap(), false));
        }
        if self.capacity.is_some_and(|cap| self.entries.len() >= cap) {
            return Err(PitFull);
        }
        let entry = self.entries.entry(name.clone()).or_insert_with(|| PitEntry::new(name.clone()));
        Ok((entry, true))
    }

    pub fn remove(&mut self, name: &Name) -> Option<PitEntry> {
        self.entries.remove(name)
    }

    /// Drops every record with `expiry <= now`. Entries left without any
    /// in-record are deleted and returned, sorted by name. `dropped` sees
    /// the nonce of each record removed from an entry that stays.
    pub fn expire(&mut self, now: SimTime, mut dropped: impl FnMut(&Name, u32)) -> Vec<PitEntry> {
        let mut dead = Vec::new();
        self.entries.retain(|_, entry| {
            if entry.in_records.iter().any(|r| r.expiry > now) {
                for r in entry.out_records.iter().filter(|r| r.expiry <= now) {
                    dropped(&entry.name, r.nonce);
                }
                for r in entry.in_records.iter().filter(|r| r.expiry <= now) {
                    dropped(&entry.name, r.nonce);
                }
                entry.out_records.retain(|r| r.expiry > now);
                entry.in_records.retain(|r| r.expiry > now);
                return true;
            }
            dead.push(std::mem::replace(entry, PitEntry::new(Name::root())));
            false
        });
        dead.sort_by(|a, b| a.name.cmp(&b.name));
        dead
    }

    pub fn iter(&self) -> impl Iterator<Item = &PitEntry> {
        self.entries.values()
    }
}

use std::collections::BTreeMap;

use rustc_hash::FxHashMap as HashMap;

use super::name::Name;
use super::packet::Data;

/// Packet cache with exact-name lookup and least-recently-used eviction.
///
/// Recency is a monotonically increasing tick; `order` maps tick to name so
/// the oldest entry is always the first key.
#[derive(Debug, Clone)]
pub struct ContentStore {
    capacity: usize,
    entries: HashMap<Name, (Data, u64)>,
    order: BTreeMap<u64, Name>,
    tick: u64,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        ContentStore {
            capacity,
            entries: HashMap::default(),
            order: BTreeMap::new(),
            tick: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact-name lookup. A hit refreshes the entry's recency.
    pub fn lookup(&mut self, name: &Name) -> Option<&Data> {
        let tick = self.next_tick();
        let (data, stamp) = self.entries.get_mut(name)?;
        let old = std::mem::replace(stamp, tick);
        let key = self.order.remove(&old).expect("lru order out of sync");
        self.order.insert(tick, key);
        Some(data)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.contains_key(name)
    }

    /// Inserts or refreshes `data`, evicting the least recently used entry
    /// when full. Returns the evicted name, if any.
    pub fn insert(&mut self, data: Data) -> Option<Name> {
        if self.capacity == 0 {
            return None;
        }
        let tick = self.next_tick();
        if let Some((old_data, stamp)) = self.entries.get_mut(&data.name) {
            let old = std::mem::replace(stamp, tick);
            let key = self.order.remove(&old).expect("lru order out of sync");
            self.order.insert(tick, key);
            *old_data = data;
            return None;
        }
        let mut evicted = None;
        if self.entries.len() >= self.capacity {
            if let Some((_, victim)) = self.order.pop_first() {
                self.entries.remove(&victim);
                evicted = Some(victim);
            }
        }
        self.order.insert(tick, data.name.clone());
        self.entries.insert(data.name.clone(), (data, tick));
        evicted
    }

    /// Names from least to most recently used.
    pub fn lru_order(&self) -> impl Iterator<Item = &Name> {
        self.order.values()
    }

    fn next_tick(&mut self) -> u64 {
        self.tick += 1;
        self.tick
    }
}

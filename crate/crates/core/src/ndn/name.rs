use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Upper bound on the encoded size of a name carried by a packet.
pub const MAX_NAME_ENCODED_LEN: usize = 8 * 1024;

/// One name component. Components are opaque bytes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component(Box<[u8]>);

impl Component {
    pub fn new(bytes: impl Into<Box<[u8]>>) -> Self {
        Component(bytes.into())
    }

    pub fn from_number(n: u64) -> Self {
        Component(n.to_string().into_bytes().into_boxed_slice())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Interprets the component as an unsigned decimal number.
    pub fn to_number(&self) -> Option<u64> {
        if self.0.is_empty() || !self.0.iter().all(u8::is_ascii_digit) {
            return None;
        }
        std::str::from_utf8(&self.0).ok()?.parse().ok()
    }

    /// TLV size of this component (type + length + value).
    pub fn encoded_len(&self) -> usize {
        1 + var_number_len(self.0.len()) + self.0.len()
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.0.iter() {
            if b.is_ascii_alphanumeric() || b"-._~=".contains(&b) {
                write!(f, "{}", b as char)?;
            } else {
                write!(f, "%{b:02X}")?;
            }
        }
        Ok(())
    }
}

impl From<&str> for Component {
    fn from(s: &str) -> Self {
        Component(s.as_bytes().into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("packet names need at least one component")]
    Empty,
    #[error("encoded name is {0} bytes, limit is {MAX_NAME_ENCODED_LEN}")]
    TooLong(usize),
    #[error("name must start with '/': {0:?}")]
    NotAbsolute(String),
    #[error("bad percent-escape in {0:?}")]
    BadEscape(String),
}

/// Hierarchical content name. The empty name is the root prefix `/`.
///
/// Components are shared, and the hash is computed once at construction
/// since names are keys of several per-packet tables.
#[derive(Clone)]
pub struct Name {
    comps: Arc<[Component]>,
    hash: u64,
}

fn hash_components(c: &[Component]) -> u64 {
    let mut h = rustc_hash::FxHasher::default();
    c.hash(&mut h);
    h.finish()
}

impl Name {
    pub fn root() -> Self {
        Self::from_arc(Arc::from([]))
    }

    pub fn from_components(components: Vec<Component>) -> Self {
        Self::from_arc(components.into())
    }

    fn from_arc(comps: Arc<[Component]>) -> Self {
        let hash = hash_components(&comps);
        Name { comps, hash }
    }

    pub(crate) fn shared_components(&self) -> &Arc<[Component]> {
        &self.comps
    }

    pub fn components(&self) -> &[Component] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn push(&mut self, c: impl Into<Component>) {
        let mut v = Vec::with_capacity(self.comps.len() + 1);
        v.extend_from_slice(&self.comps);
        v.push(c.into());
        *self = Self::from_arc(v.into());
    }

    pub fn append(mut self, c: impl Into<Component>) -> Self {
        self.push(c);
        self
    }

    pub fn append_number(mut self, n: u64) -> Self {
        self.push(Component::from_number(n));
        self
    }

    /// True iff `self` is a leading sublist of `other` (a name is a prefix of itself).
    pub fn is_prefix_of(&self, other: &Name) -> bool {
        other.comps.starts_with(&self.comps)
    }

    /// The first `n` components as a borrowed slice.
    pub fn prefix(&self, n: usize) -> &[Component] {
        &self.comps[..n.min(self.comps.len())]
    }

    /// Sequence number carried by the final component, if numeric.
    pub fn sequence(&self) -> Option<u64> {
        self.comps.last().and_then(Component::to_number)
    }

    /// TLV size of the whole name.
    pub fn encoded_len(&self) -> usize {
        let inner: usize = self.comps.iter().map(Component::encoded_len).sum();
        1 + var_number_len(inner) + inner
    }

    /// Checks the constraints a name must satisfy to travel in a packet.
    pub fn validate_for_packet(&self) -> Result<(), NameError> {
        if self.comps.is_empty() {
            return Err(NameError::Empty);
        }
        let len = self.encoded_len();
        if len > MAX_NAME_ENCODED_LEN {
            return Err(NameError::TooLong(len));
        }
        Ok(())
    }
}

impl Default for Name {
    fn default() -> Self {
        Self::root()
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && self.comps == other.comps
    }
}

impl Eq for Name {}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        self.comps.cmp(&other.comps)
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("/");
        }
        for c in self.comps.iter() {
            write!(f, "/{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({self})")
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rest = s
            .strip_prefix('/')
            .ok_or_else(|| NameError::NotAbsolute(s.to_owned()))?;
        let mut components = Vec::new();
        for part in rest.split('/').filter(|p| !p.is_empty()) {
            components.push(Component::new(unescape(part).ok_or_else(|| NameError::BadEscape(s.to_owned()))?));
        }
        Ok(Name::from_components(components))
    }
}

fn unescape(part: &str) -> Option<Vec<u8>> {
    let bytes = part.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = part.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    Some(out)
}

/// Size of an NDN TLV variable-length number.
pub(crate) fn var_number_len(n: usize) -> usize {
    match n {
        0..=252 => 1,
        253..=0xFFFF => 3,
        0x1_0000..=0xFFFF_FFFF => 5,
        _ => 9,
    }
}

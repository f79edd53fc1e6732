use std::fmt;

/// Identifier of a simulated node (vehicle, AP, router or producer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Face identifier, unique within one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceId(pub u32);

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "face{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceKind {
    /// Multi-access Wi-Fi interface. The only kind with MAC semantics.
    Wireless,
    /// Point-to-point wired link.
    WiredP2p,
    /// Local application (consumer or producer).
    Application,
}

impl FaceKind {
    pub fn carries_frames(self) -> bool {
        !matches!(self, FaceKind::Application)
    }

    pub fn has_mac(self) -> bool {
        matches!(self, FaceKind::Wireless)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: FaceId,
    pub kind: FaceKind,
    pub node: NodeId,
}

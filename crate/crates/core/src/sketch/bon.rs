use super::attrs::NodeAttrs;

/// Nodes by breadth-first position: `order[i]` sits at position `i`
/// (1-based, slot 0 unused). Also serves as the queue of the restructuring
/// search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BonArray {
    order: Vec<u32>,
}

impl BonArray {
    /// Room for positions `1..=len`.
    pub fn new(len: usize) -> Self {
        BonArray {
            order: vec![0; len + 1],
        }
    }

    /// Positions available.
    pub fn len(&self) -> usize {
        self.order.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, pos: u32) -> u32 {
        self.order[pos as usize]
    }

    #[inline]
    pub fn set(&mut self, pos: u32, v: u32) {
        self.order[pos as usize] = v;
    }

    /// Positions `1..=len` in order.
    pub fn as_slice(&self) -> &[u32] {
        &self.order[1..]
    }

    /// First position `i` in `1..upto` where `b[order[i]] != i`, if any.
    pub fn first_mismatch(&self, attrs: &NodeAttrs, upto: u32) -> Option<u32> {
        (1..upto).find(|&i| attrs.b[self.get(i) as usize] != i)
    }

    pub fn memory_bytes(&self) -> u64 {
        4 * self.order.len() as u64
    }
}

/// Parent marker for children of the dummy root.
pub const ROOT: u32 = u32::MAX;

// Order values of nodes removed before the main loop of the partitioned
// algorithm. They sit above every real position and setup sentinel.
pub const B_SOURCE: u32 = u32::MAX - 1;
pub const B_SINK: u32 = u32::MAX - 2;
pub const B_ISOLATED: u32 = u32::MAX - 3;

/// The two attributes kept per node: breadth-first order `b` (1-based) and
/// parent `p` (or [`ROOT`]).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeAttrs {
    pub b: Vec<u32>,
    pub p: Vec<u32>,
}

impl NodeAttrs {
    /// Every node a child of the root, ordered by id.
    pub fn star(n: usize) -> Self {
        NodeAttrs {
            b: (1..=n as u32).collect(),
            p: vec![ROOT; n],
        }
    }

    /// Orders from the setup sentinel `n + 1 + id`; all parents root.
    pub fn unordered(n: usize) -> Self {
        NodeAttrs {
            b: (0..n as u32).map(|v| n as u32 + 1 + v).collect(),
            p: vec![ROOT; n],
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// Order of `p` as a parent. The root sorts before everything.
    #[inline]
    pub fn parent_order(&self, v: u32) -> u32 {
        match self.p[v as usize] {
            ROOT => 0,
            p => self.b[p as usize],
        }
    }

    pub fn memory_bytes(&self) -> u64 {
        8 * self.b.len() as u64
    }
}

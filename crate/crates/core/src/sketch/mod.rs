//! The bounded in-memory sketch: per-node order and parent, the ordered tree
//! plus staged edges in one slot pool, and the breadth-first position array.

mod attrs;
mod bon;
mod evicted;
mod pool;

pub use attrs::{NodeAttrs, B_ISOLATED, B_SINK, B_SOURCE, ROOT};
pub use bon::BonArray;
pub use evicted::{read_evicted, EvictedEdges, EVICTED_RECORD_BYTES};
pub(crate) use pool::prefetch;
pub use pool::{Chain, Sketch, NIL};

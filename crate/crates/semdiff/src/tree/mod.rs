//! Language-agnostic labeled ordered trees with byte spans, derived
//! attributes (height, size, two subtree hashes), mapping stores that allow
//! one-to-many and many-to-one pairs, node addressing by `(file, label,
//! span)`, a canonical pretty-printer, and a strict JSON interchange format.

mod interchange;
mod node;
mod print;
mod store;

pub use interchange::{parse_interchange, serialize_tree, InterchangeError};
pub use node::{
    flags, AstTree, IsoMode, NodeId, Span, TreeBuilder, TreeError,
};
pub use print::pretty;
pub(crate) use print::{invocation_name_index, pretty_with_offsets};
pub use store::{locate, LocateError, MappingStore, NodeRef, PairStore};

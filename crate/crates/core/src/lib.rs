//! Indexing for close consecutive occurrence queries over byte texts.
//!
//! Given a text `S` and a pattern `P`, a *consecutive occurrence* is a pair
//! `(i, j)` of positions where `P` occurs, with `i < j` and no occurrence of
//! `P` strictly between them. Its distance is `j - i`. This crate builds
//! indexes that report, for any pattern, the `k` consecutive occurrences
//! with smallest (or largest) distance, or all of them within a distance
//! band, without rescanning the text.
//!
//! Two index families are provided:
//!
//! * [`FullIndex`]: one persistent sorted list per heavy path of the suffix
//!   tree, holding every consecutive pair alive along the path. Queries are
//!   output-sensitive; space grows with `n log n` list segments.
//! * [`RecursiveIndex`]: a hierarchy of cluster partitions of the suffix
//!   tree. Each cluster spine keeps only the top `tau` pairs per depth under
//!   the configured order, with payloads compressed to suffix-array offsets
//!   local to the spine. Smaller, with a bounded enumeration fallback for
//!   large `k`.
//!
//! All query entry points are pure reads (`&self`) and safe to share across
//! threads. Every reported pair is deterministic: ties are broken by
//! position, never by construction order.
//!
//! ```
//! use cooc::{FullIndex, Mode, RecursiveIndex, Text};
//!
//! # fn main() -> Result<(), cooc::Error> {
//! let text = Text::new(b"BATMAN AND ANNA SING NANANANA AND EAT BANANAS".to_vec())?;
//! let full = FullIndex::build(text.clone(), true); // with far lists
//! let top = full.query_topk(b"AN", 5);
//! assert_eq!((top[0].left, top[0].right, top[0].distance()), (22, 24, 2));
//!
//! let rec = RecursiveIndex::build(
//!     text,
//!     (1, 2), // epsilon = 1/2
//!     &[Mode::Closest, Mode::Farthest, Mode::FarthestMaxGap(4)],
//! )?;
//! let band = rec.query_gap_with_alpha(b"AN", 3)?; // distances in [3, 4]
//! assert_eq!(band.len(), 3);
//! # Ok(())
//! # }
//! ```

pub mod cluster;
pub mod error;
pub mod extend;
pub mod heavy;
pub mod oracle;
pub mod packed;
pub mod pairs;
pub mod plist;
pub mod text;
mod walk;

pub use cluster::{RecursiveIndex, RecursiveIndexStats, Route, Trace};
pub use error::Error;
pub use heavy::{FullIndex, HeavyPathDecomposition};
pub use pairs::{ConsecutivePair, PairOrder};
pub use plist::{LifeSegment, QueryStats, VersionedOrderedList};
pub use text::{LocusResult, Text, TextIndex};
pub use walk::Mode;

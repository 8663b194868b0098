pub mod arith;
pub mod bulk;
pub mod error;
pub mod geometry;
pub mod matrices;
pub mod render;
pub mod shuffle;
pub mod spectral;
pub mod tiling;

pub use error::{Error, Result, Violation, ViolationKind};
pub use geometry::{enumerate, enumerate_with_cap, section_domain, validate, BoxDims, PathFamily, SectionDomain};
pub use tiling::{to_lozenges, Lozenge, LozengeCounts, LozengeKind, LozengeTiling};

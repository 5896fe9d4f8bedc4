//! Information-geometric significance tests for code features.

mod coords;
mod fisher;
mod testing;

pub use coords::*;
pub use fisher::*;
pub use testing::*;

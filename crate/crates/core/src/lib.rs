pub mod bench;
pub mod code;
pub mod error;
pub mod gf2;
pub mod ideal;
pub mod infogeo;
pub mod placecell;
pub mod report;
pub mod topology;

pub use code::{CodeMatrix, Codeword, NeuronSet};
pub use error::{Error, Result};

pub mod decode;
pub mod distance;
pub mod error;
pub mod evalcode;
pub mod galois;
pub mod io;
pub mod matring;
pub mod qbch;
pub mod qccore;
pub mod recipe;
pub mod repro;
pub mod simulate;

pub use error::{Error, Result};

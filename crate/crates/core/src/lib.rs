pub mod census;
pub mod extremal;
pub mod error;
pub mod fields;
pub mod laurent;
pub mod newton;
pub mod parser;
pub mod poly;
pub mod roots;
pub mod trees;

pub use error::{Error, Result};

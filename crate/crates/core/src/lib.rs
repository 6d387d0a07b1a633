pub mod bigfloat;
pub mod bridge;
pub mod error;
pub mod exact;
pub mod graph;
pub mod matrix;
pub mod numerics;
pub mod quadrature;
pub mod relation;
pub mod selberg;
pub mod special;
pub mod trees;
pub mod verify;
pub mod words;

pub use error::{Error, Result};

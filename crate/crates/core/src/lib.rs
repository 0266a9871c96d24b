pub mod automorph;
pub mod diamond;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod modlab;
pub mod poly;
pub mod scalars;
pub mod skew;

pub use error::{Error, Result};

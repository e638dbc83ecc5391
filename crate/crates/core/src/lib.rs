pub mod cohomology;
pub mod cone;
pub mod corpus;
pub mod crepant;
pub mod error;
pub mod fan;
pub mod io;
pub mod ifunction;
pub mod linalg;
pub mod lp;
pub mod operators;
pub mod picard;
pub mod poly;

pub use error::{Error, Result};

pub mod error;
pub mod cex;
pub mod fd;
pub mod infer;
pub mod query;
pub mod rel;
pub mod table;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use fd::AttrFd;
pub use rel::{Carrier, Rel, Value};
pub use table::{Row, Scheme, Table};

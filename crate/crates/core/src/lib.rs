pub mod correlators;
pub mod dispersions;
pub mod energy;
pub mod error;
pub mod figures;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod units;
pub mod verify;

pub use error::{Error, Result};

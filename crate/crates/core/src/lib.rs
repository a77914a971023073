//! Exact combinatorics of Arthur parameters, endoscopy and cohomological
//! packets for unitary groups `U(a, b)`.

pub mod acceptance;
pub mod bounds;
pub mod cohomology;
pub mod decay;
pub mod endoscopy;
pub mod error;
pub mod exact;
pub mod hyperendoscopy;
pub mod params;

pub use error::{Error, Result};
pub use exact::{Rational, Sign};

pub mod error;
pub mod cache;
pub mod clifford;
pub mod exterior;
pub mod geometry;
pub mod groups;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod suite;
pub mod torsion;

pub use error::{Error, Result};
pub use exterior::{Blade, Form, FormBasis, SkewMatrix};
pub use scalar::{Backend, Rational, Scalar};
pub use report::{Case, Status, SuiteId, VerificationReport};
pub use suite::{run_suite, SuiteConfig};

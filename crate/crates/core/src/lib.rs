pub mod driver;
pub mod error;
pub mod iqr;
pub mod matrix;
pub mod numkernel;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod reduce;
pub mod ritz;
pub mod shifting;

pub use driver::{GlobalData, RunParams};
pub use error::{Error, Result};
pub use matrix::{DenseMatrix, HessenbergMatrix, ShiftList};
pub use num_complex::Complex;
pub use ritz::{AberthSolver, SmallEigSolver};

//! SU(1,1) nonlinear Fourier transform on the integers.
//!
//! Forward transform of finitely supported sequences, its inverse on
//! half-line data through the Schur algorithm, the daisy construction that
//! drives the argument of `a^(*)` to large oscillation, and the bridge to
//! orthogonal polynomials on the unit circle.

pub mod error;
pub mod daisy;
pub mod exec;
pub mod fft;
pub mod formats;
pub mod harmonic;
pub mod inverse;
pub mod laurent;
pub mod nlft;
pub mod opuc;
pub mod verify;

pub use error::{NlftError, Result};
pub use exec::Execution;
pub use laurent::{CircleGrid, LaurentPoly};
pub use nlft::{ComplexSequence, NlftPair};

//! Weyl–Moyal algebra and complex-germ semiclassics.
//!
//! The crate is organised bottom-up:
//!
//! * [`symplectic`]: Sp(2n, R), the Siegel half-plane, branch tracking and the Maslov index.
//! * [`moyal`]: exact polynomial symbols with a formal hbar and the Moyal product.
//! * [`dynamics`]: Hamilton flow, action, monodromy and Riccati germ integration.
//! * [`germ`]: Gaussian packet propagation and the canonical operator for curves.
//! * [`oracle`]: grid quantum mechanics in one dimension used as ground truth.
//! * [`qft`]: the one-mode field theory, Green functions and Feynman diagrams.

pub mod dynamics;
pub mod error;
pub mod germ;
pub mod linalg;
pub mod quad;
pub mod moyal;
pub mod oracle;
pub mod qft;
pub mod symplectic;

pub use error::{Error, Result};

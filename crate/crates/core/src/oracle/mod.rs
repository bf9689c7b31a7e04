//! Grid quantum mechanics in one dimension: the reference against which the
//! semiclassical constructions are checked.

mod evolve;
mod fourier;
mod grid;
mod weil;
mod weyl_op;

pub use evolve::{evolve_schrodinger, EvolveOptions, Evolution, Potential, QuantumHamiltonian};
pub use fourier::{fourier_h, inverse_fourier_h, NYQUIST_TOL};
pub use grid::{l2_error, Grid1D, WavefunctionGrid, EDGE_TOL};
pub use weil::{weil_generator_act, WeilAction};
pub use weyl_op::{apply_weyl_op, MAX_WEYL_DEGREE};

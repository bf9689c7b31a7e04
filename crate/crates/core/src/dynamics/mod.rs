//! Classical backbone: Hamilton flow, action, monodromy and germ transport.

mod flow;
mod hamiltonian;
mod riccati;

pub use flow::{integrate_flow, variational_generator, Method, StepControl, Trajectory, TrajectorySample};
pub use hamiltonian::{DerivativeMode, HamiltonianKind, HamiltonianSpec, Hessian};
pub use riccati::{jacobian_amplitude, jacobian_determinants, moebius_germs, riccati_integrate};

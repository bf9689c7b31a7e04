//! Semiclassical states: Gaussian packets carried by the classical flow,
//! exact evolution under quadratic Hamiltonians, and superpositions of
//! packets along Lagrangian curves.

mod curve;
mod packet;
mod quadratic;

pub use curve::{
    canonical_superpose, closed_curve_maslov_index, reconstruct_on_grid, stationary_phase_reconstruct, CurvePoint,
    LagrangianCurve, CURVE_TOL, FOCAL_TOL, SAMPLES_PER_WIDTH, SUPERPOSE_TOL,
};
pub use packet::{packet_to_grid, propagate_packet, propagate_packet_track, GaussianPacket, PacketSample, COVERAGE_SIGMAS};
pub use quadratic::{exact_quadratic_propagate, transport_amplitude};

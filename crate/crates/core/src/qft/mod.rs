//! The anharmonic oscillator as a one-mode field theory: frequency-split
//! mode algebra, vacuum averages and Green functions, Feynman diagrams with
//! their symmetry factors, and the tree-level classical limit.

mod diagram;
mod evaluate;
mod green;
mod laurent;
mod mode;
mod propagator;
mod tree;

pub use diagram::{enumerate_diagrams, Diagram, MAX_LEGS, MAX_VERTICES, VALENCE};
pub use evaluate::{evaluate_diagram, DiagramValue, LegFactor};
pub use green::{
    coefficient_values, green_function, green_function_symbolic, two_point_symbolic, wick_sum_symbolic, MAX_INSERTIONS,
};
pub use laurent::Laurent;
pub use mode::{
    mode_commutator, mode_star, vacuum_average, weyl_field_power, weyl_monomial, CompiledMode, ModePolynomial,
    FIRST_PHASE_VAR, HBAR_VAR, MU_VAR,
};
pub use propagator::{feynman_kernel_extrapolated, feynman_kernel_numeric, pv_kernel_numeric, Propagator0p1, PropagatorKind};
pub use tree::{tree_commutator, tree_series_vs_classical, TreeCheck};

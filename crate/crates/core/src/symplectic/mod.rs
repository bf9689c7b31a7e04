//! Linear symplectic geometry: the group Sp(2n, R), its action on the Siegel
//! half-plane, continuous square-root branches and the Maslov index.

mod block;
mod branch;
mod siegel;

pub use block::{
    is_symplectic, symplectify, weil_generator_matrix, SymplecticBlock, WeilGenerator, MAX_REPAIRABLE_DEFECT, SYM_TOL,
};
pub use branch::{
    branch_track, branch_track_fn, maslov_index, maslov_index_fn, MaslovIndex, MetaplecticPath, BRANCH_GUARD,
    BRANCH_STEP_LIMIT, DEFAULT_EPS_SCHEDULE, HALF_PERIOD_INDEX, MASLOV_INTEGER_TOL, REFINED_STEP,
};
pub use siegel::{cz_plus_d, moebius_act, moebius_act_real, riccati_rhs, RealLagrangian, SiegelMatrix, PD_TOL};

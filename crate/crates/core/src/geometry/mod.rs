//! Hyperbolic geometry behind the invariants.

pub mod potential;
pub mod system;
pub mod tetra;
pub mod torsion;

pub use potential::{
    d2u_dxi2, du_dalpha, du_dxi, potential_u, potential_v, potential_w, truncated_tet_volume, xi_of_alpha,
};
pub use system::{
    edge_lengths, find_critical_point, ConeData, GeometricSolution, SolverOptions, SystemPotential,
};
pub use tetra::{gram_det, gram_matrix, is_hyperideal_type};
pub use torsion::{torsion, IdentityCheck, TorsionReport};

//! Classical oscillator layer: homogeneous solutions u, v, the Wronskian Ω,
//! ρ, τ, θ, and the displacement trajectories u_f / x_p with their phases.

mod canonical;
mod displacement;
pub(crate) mod integrator;
mod solution;

pub use canonical::{canonical_frame, CanonicalParameters};
pub use displacement::{solve_displacement, DisplacementFrame, DisplacementKind, DisplacementSolution};
pub use solution::{ermakov_defect, solve_classical, ClassicalSolution, InitialConditions, TrajectoryFrame};

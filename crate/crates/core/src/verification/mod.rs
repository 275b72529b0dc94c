//! Numerical checks of constructed states: Schrödinger residuals, local
//! energies, norms, marginal densities and exchange symmetry.

mod eigen;
mod geometry;
mod hamiltonian;
mod quadrature;
mod residual;
mod sampling;

pub use eigen::{eigen_check, eigen_check_with_step, EigenEstimate};
pub use quadrature::{
    density_scan, marginal_density, norm_estimate, DensityScan, DensityValue, NormEstimate,
    QuadratureMethod, GRID_MAX_DIMS,
};
pub use residual::{
    default_buffer, residual_ratio, residual_scan, schrodinger_residual, ResidualPoint,
    ResidualRatio, ResidualReport, StencilSteps,
};
pub use sampling::{buffered_configurations, buffered_points};

use crate::error::{Error, Result};
use crate::wavefunctions::StateEvaluator;

/// Envelope centre and quadrature half-width of |ψ(t,·)|² per coordinate.
pub fn geometry_of<S: StateEvaluator + ?Sized>(state: &S, t: f64) -> Result<(f64, f64)> {
    let g = geometry::Geometry::of(state, t)?;
    Ok((g.center, g.half_width))
}

/// |ψ(t, x) − ψ(t, x with coordinates i and j swapped)|.
pub fn exchange_defect<S: StateEvaluator + ?Sized>(
    state: &S,
    t: f64,
    x: &[f64],
    i: usize,
    j: usize,
) -> Result<f64> {
    let len = state.model().coordinate_count();
    if i >= len || j >= len || x.len() != len {
        return Err(Error::Index { i, j, len: x.len() });
    }
    let mut swapped = x.to_vec();
    swapped.swap(i, j);
    let snap = state.snapshot(t)?;
    let a = snap.log_amplitude(x)?.to_complex();
    let b = snap.log_amplitude(&swapped)?.to_complex();
    Ok((a - b).norm())
}

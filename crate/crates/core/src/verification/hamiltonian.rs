use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};
use crate::util::symmetric_sum;
use crate::wavefunctions::{LogAmplitude, Snapshot};

/// Coefficients of H = −ħ²/(2M) Σ∂² + ½ M w² Σx² + V/M − F Σx at one instant.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coefficients {
    pub mass: f64,
    pub frequency_sq: f64,
    pub force: f64,
}

impl Coefficients {
    /// Reference Hamiltonian of the stationary problems: M = 1, unit trap
    /// except on the circle.
    pub fn reference(model: &ModelSpec) -> Self {
        Self {
            mass: 1.0,
            frequency_sq: if model.kind == ModelKind::Trigonometric { 0.0 } else { 1.0 },
            force: 0.0,
        }
    }
}

/// (Hψ)/ψ at x from central second differences of the frozen amplitude.
pub(crate) fn local_energy(
    snap: &Snapshot<'_>,
    model: &ModelSpec,
    coefficients: Coefficients,
    x: &[f64],
    center: LogAmplitude,
    h_x: f64,
) -> Result<Complex64> {
    let hbar = model.hbar;
    let mut shifted = x.to_vec();
    let mut laplacian = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        shifted[i] = x[i] + h_x;
        let plus = snap.log_amplitude(&shifted)?.ratio(&center);
        shifted[i] = x[i] - h_x;
        let minus = snap.log_amplitude(&shifted)?.ratio(&center);
        shifted[i] = x[i];
        laplacian += (plus - 2.0 + minus) / (h_x * h_x);
    }
    let mut sq: Vec<f64> = x.iter().map(|xi| xi * xi).collect();
    let mut lin = x.to_vec();
    let potential = 0.5 * coefficients.mass * coefficients.frequency_sq * symmetric_sum(&mut sq)
        + model.potential(x)? / coefficients.mass
        - coefficients.force * symmetric_sum(&mut lin);
    Ok(-hbar * hbar / (2.0 * coefficients.mass) * laplacian + potential)
}

/// Refuses configurations whose spatial stencil reaches a singular hyperplane.
pub(crate) fn check_spatial_stencil(model: &ModelSpec, x: &[f64], h_x: f64) -> Result<f64> {
    if !(h_x > 0.0) {
        return Err(Error::InvalidParameter(format!("spatial step {h_x} must be positive")));
    }
    let distance = model.hyperplane_distance(x)?;
    if distance <= h_x {
        return Err(Error::Stencil(format!(
            "spatial stencil of width {h_x:e} crosses a singular hyperplane at distance {distance:e}"
        )));
    }
    Ok(distance)
}

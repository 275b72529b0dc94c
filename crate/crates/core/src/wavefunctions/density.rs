//! One-particle densities: the closed semicircle form and the pushforward
//! of a stationary density under the squeeze and displacement maps.

use std::f64::consts::PI;

use crate::classical::TrajectoryFrame;
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};

/// Half-width of the semicircle support, ρ √(2Nλħ/Ω).
pub fn semicircle_radius(model: &ModelSpec, frame: &TrajectoryFrame) -> f64 {
    frame.rho * (2.0 * model.n_particles as f64 * model.lambda * model.hbar / frame.omega).sqrt()
}

/// Large-N semicircle density of the Sutherland coherent state.
pub fn closed_form_density(
    model: &ModelSpec,
    frame: &TrajectoryFrame,
    u_f: f64,
    x: f64,
) -> Result<f64> {
    if model.kind != ModelKind::Sutherland {
        return Err(Error::UnsupportedState(format!(
            "the semicircle density is defined for the sutherland model, not {}",
            model.kind.name()
        )));
    }
    if !(frame.omega > 0.0 && frame.rho > 0.0) {
        return Err(Error::InvalidParameter("Omega and rho must be positive".into()));
    }
    let n = model.n_particles as f64;
    let peak = (2.0 * n * frame.omega).sqrt() / (PI * frame.rho * (model.lambda * model.hbar).sqrt());
    let r = semicircle_radius(model, frame);
    let z = (x - u_f) / r;
    if z.abs() >= 1.0 {
        return Ok(0.0);
    }
    Ok(peak * (1.0 - z * z).sqrt())
}

/// ∫ σ over the semicircle support by `nodes`-point Gauss–Chebyshev
/// quadrature of the second kind (exact for the semicircle profile).
pub fn semicircle_integral(
    model: &ModelSpec,
    frame: &TrajectoryFrame,
    u_f: f64,
    nodes: usize,
) -> Result<f64> {
    let r = semicircle_radius(model, frame);
    let mut sum = 0.0;
    for k in 1..=nodes {
        let angle = k as f64 * PI / (nodes + 1) as f64;
        let weight = PI / (nodes + 1) as f64 * angle.sin().powi(2);
        let t = angle.cos();
        let sigma = closed_form_density(model, frame, u_f, u_f + r * t)?;
        sum += weight * sigma * r / (1.0 - t * t).sqrt();
    }
    Ok(sum)
}

/// σ^f(x) = (√Ω/ρ) σ_s((√Ω/ρ)(x − u_f)).
pub fn transform_density<F>(sigma_s: F, frame: &TrajectoryFrame, u_f: f64) -> impl Fn(f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let scale = frame.squeeze_scale();
    move |x| scale * sigma_s(scale * (x - u_f))
}

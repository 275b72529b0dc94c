use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::hamiltonian::{check_spatial_stencil, local_energy, Coefficients};
use crate::error::{Error, Result};
use crate::schedule::ParameterSchedule;
use crate::wavefunctions::{LogAmplitude, StateEvaluator};

/// Central-difference steps for ∂_t and the Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StencilSteps {
    pub h_t: f64,
    pub h_x: f64,
}

impl StencilSteps {
    /// h_t = f_t · 2π/w̄ and h_x = f_x · √(ħ/(M̄ w̄)) for typical schedule values.
    pub fn relative(
        schedule: &ParameterSchedule,
        span: (f64, f64),
        hbar: f64,
        time_fraction: f64,
        length_fraction: f64,
    ) -> Self {
        let mut w = schedule.typical_frequency(span);
        if !(w > 0.0) {
            w = 1.0;
        }
        let m = schedule.typical_mass(span);
        Self {
            h_t: time_fraction * 2.0 * std::f64::consts::PI / w,
            h_x: length_fraction * (hbar / (m * w)).sqrt(),
        }
    }

    pub fn defaults(schedule: &ParameterSchedule, span: (f64, f64), hbar: f64) -> Self {
        Self::relative(schedule, span, hbar, 1e-5, 5e-4)
    }

    pub fn halved(self) -> Self {
        Self {
            h_t: 0.5 * self.h_t,
            h_x: 0.5 * self.h_x,
        }
    }
}

/// Default singularity buffer, 0.3 √ħ.
pub fn default_buffer(hbar: f64) -> f64 {
    0.3 * hbar.sqrt()
}

/// R/ψ at one point, together with ln ψ.
#[derive(Debug, Clone, Copy)]
pub struct ResidualRatio {
    pub ratio: Complex64,
    pub amplitude: LogAmplitude,
}

impl ResidualRatio {
    /// iħ∂_tψ − Hψ.
    pub fn value(&self) -> Complex64 {
        self.ratio * self.amplitude.to_complex()
    }
}

fn stencil_time<S: StateEvaluator + ?Sized>(state: &S, t: f64) -> Result<crate::wavefunctions::Snapshot<'_>> {
    state.snapshot(t).map_err(|e| match e {
        Error::OutOfRange { t, start, end } => Error::Stencil(format!(
            "time stencil point {t} leaves the span [{start}, {end}]"
        )),
        other => other,
    })
}

/// (iħ∂_tψ − Hψ)/ψ by second-order central differences, with
/// H = −ħ²/(2M)Σ∂² + ½Mw²Σx² + V/M − FΣx at time t.
pub fn residual_ratio<S: StateEvaluator + ?Sized>(
    state: &S,
    schedule: &ParameterSchedule,
    t: f64,
    x: &[f64],
    steps: StencilSteps,
) -> Result<ResidualRatio> {
    let model = state.model();
    check_spatial_stencil(model, x, steps.h_x)?;
    if !(steps.h_t > 0.0) {
        return Err(Error::InvalidParameter(format!("time step {} must be positive", steps.h_t)));
    }
    let now = state.snapshot(t)?;
    let center = now.log_amplitude(x)?;
    if center.is_zero() {
        return Err(Error::SingularConfiguration(format!(
            "amplitude vanishes at t = {t}, x = {x:?}"
        )));
    }
    let later = stencil_time(state, t + steps.h_t)?.log_amplitude(x)?.ratio(&center);
    let earlier = stencil_time(state, t - steps.h_t)?.log_amplitude(x)?.ratio(&center);
    let time_term = Complex64::new(0.0, model.hbar) * (later - earlier) / (2.0 * steps.h_t);
    let coefficients = Coefficients {
        mass: schedule.mass(t),
        frequency_sq: schedule.frequency_sq(t),
        force: schedule.force(t),
    };
    let space_term = local_energy(&now, model, coefficients, x, center, steps.h_x)?;
    Ok(ResidualRatio {
        ratio: time_term - space_term,
        amplitude: center,
    })
}

/// iħ∂_tψ − Hψ at (t, x).
pub fn schrodinger_residual<S: StateEvaluator + ?Sized>(
    state: &S,
    schedule: &ParameterSchedule,
    t: f64,
    x: &[f64],
    steps: StencilSteps,
) -> Result<Complex64> {
    Ok(residual_ratio(state, schedule, t, x, steps)?.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub t: f64,
    pub x: Vec<f64>,
    /// |R/ψ|
    pub residual_ratio: f64,
    pub log_modulus: f64,
    pub residual_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub points: Vec<ResidualPoint>,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub energy: f64,
    pub h_t: f64,
    pub h_x: f64,
    pub buffer: f64,
}

/// Residual at every point; relative values use max(|Eψ|, 1e-12·max|ψ|).
pub fn residual_scan<S: StateEvaluator + ?Sized>(
    state: &S,
    schedule: &ParameterSchedule,
    points: &[(f64, Vec<f64>)],
    steps: StencilSteps,
    buffer: f64,
) -> Result<ResidualReport> {
    if points.is_empty() {
        return Err(Error::InsufficientSamples("residual scan needs at least one point".into()));
    }
    if buffer <= steps.h_x {
        return Err(Error::Stencil(format!(
            "buffer {buffer:e} must exceed the spatial step {:e}",
            steps.h_x
        )));
    }
    let model = state.model();
    for (t, x) in points {
        let d = model.hyperplane_distance(x)?;
        if d < buffer {
            return Err(Error::Stencil(format!(
                "point at t = {t} lies {d:e} from a singular hyperplane, inside the buffer {buffer:e}"
            )));
        }
    }
    let ratios: Vec<ResidualRatio> = points
        .par_iter()
        .map(|(t, x)| residual_ratio(state, schedule, *t, x, steps))
        .collect::<Result<_>>()?;
    let peak = ratios
        .iter()
        .map(|r| r.amplitude.log_modulus)
        .fold(f64::NEG_INFINITY, f64::max);
    let energy = state.energy();
    let mut residual_abs: f64 = 0.0;
    let mut residual_rel: f64 = 0.0;
    let out = points
        .iter()
        .zip(&ratios)
        .map(|((t, x), r)| {
            let magnitude = r.ratio.norm();
            let relative_size = (r.amplitude.log_modulus - peak).exp();
            let rel = magnitude * relative_size / (energy.abs() * relative_size).max(1e-12);
            residual_abs = residual_abs.max(magnitude * r.amplitude.modulus());
            residual_rel = residual_rel.max(rel);
            ResidualPoint {
                t: *t,
                x: x.clone(),
                residual_ratio: magnitude,
                log_modulus: r.amplitude.log_modulus,
                residual_rel: rel,
            }
        })
        .collect();
    Ok(ResidualReport {
        points: out,
        residual_abs,
        residual_rel,
        energy,
        h_t: steps.h_t,
        h_x: steps.h_x,
        buffer,
    })
}

//! Stationary eigenstates and coherent states built from them by the
//! closed-form squeeze, displacement and forced-displacement maps.

mod amplitude;
mod coherent;
mod density;
mod laguerre;
mod state;
mod stationary;

pub use amplitude::LogAmplitude;
pub use coherent::{CoherentState, Fault, StateSpec};
pub use density::{closed_form_density, semicircle_integral, semicircle_radius, transform_density};
pub use laguerre::{laguerre, MAX_LAGUERRE_DEGREE};
pub use state::{ConstructionStep, Envelope, Snapshot, StateEvaluator};
pub use stationary::{EigenEvolution, StationaryState};

use std::io::{self, Write};

use crate::classical::ClassicalSolution;
use crate::error::Result;
use crate::util::fmt_f64;

/// Unwrapped phase θ(t) = arg(u + iv) used for the energy factor.
pub fn phase_angle(classical: &ClassicalSolution, t: f64) -> Result<f64> {
    classical.phase_angle(t)
}

/// Writes `t,x1..xD,re,im,log_modulus,phase` rows for the given points.
pub fn write_amplitude_csv<S, W>(state: &S, points: &[(f64, Vec<f64>)], out: &mut W) -> io::Result<()>
where
    S: StateEvaluator + ?Sized,
    W: Write,
{
    let dims = state.model().coordinate_count();
    let coords: Vec<String> = (1..=dims).map(|i| format!("x{i}")).collect();
    writeln!(out, "t,{},re,im,log_modulus,phase", coords.join(","))?;
    for (t, x) in points {
        let a = state
            .log_amplitude(*t, x)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
        let z = a.to_complex();
        let mut cells = vec![*t];
        cells.extend(x);
        cells.extend([z.re, z.im, a.log_modulus, a.phase]);
        let cells: Vec<String> = cells.into_iter().map(fmt_f64).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

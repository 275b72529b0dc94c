use serde::Serialize;

use super::hamiltonian::{check_spatial_stencil, local_energy, Coefficients};
use crate::error::{Error, Result};
use crate::wavefunctions::StateEvaluator;

/// Amplitudes below this modulus are skipped.
const SKIP_BELOW: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenEstimate {
    /// Median over samples of Re[(Hψ)/ψ].
    pub energy: f64,
    /// Largest deviation of a sample from the median.
    pub spread: f64,
    pub used: usize,
    pub skipped: usize,
    pub h_x: f64,
    /// Re[(Hψ)/ψ] per input sample; `None` where the sample was skipped.
    pub local_energies: Vec<Option<f64>>,
}

/// Local-energy eigenvalue estimate with the default step 1e-4 √ħ.
pub fn eigen_check<S: StateEvaluator + ?Sized>(state: &S, samples: &[Vec<f64>]) -> Result<EigenEstimate> {
    let h_x = 1e-4 * state.model().hbar.sqrt();
    eigen_check_with_step(state, samples, h_x)
}

pub fn eigen_check_with_step<S: StateEvaluator + ?Sized>(
    state: &S,
    samples: &[Vec<f64>],
    h_x: f64,
) -> Result<EigenEstimate> {
    if !state.is_stationary() {
        return Err(Error::UnsupportedState(
            "eigen_check needs a time-independent amplitude".into(),
        ));
    }
    let model = state.model();
    let snap = state.snapshot(0.0)?;
    let coefficients = Coefficients::reference(model);
    let mut values = Vec::with_capacity(samples.len());
    let mut local_energies = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for x in samples {
        check_spatial_stencil(model, x, h_x)?;
        let center = snap.log_amplitude(x)?;
        if center.is_zero() || center.modulus() < SKIP_BELOW {
            skipped += 1;
            local_energies.push(None);
            continue;
        }
        let e = local_energy(&snap, model, coefficients, x, center, h_x)?.re;
        values.push(e);
        local_energies.push(Some(e));
    }
    if values.is_empty() {
        return Err(Error::InsufficientSamples(format!(
            "all {skipped} samples had |psi| below {SKIP_BELOW:e}"
        )));
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    let spread = values.iter().map(|v| (v - median).abs()).fold(0.0, f64::max);
    Ok(EigenEstimate {
        energy: median,
        spread,
        used: m,
        skipped,
        h_x,
        local_energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelSpec;
    use crate::wavefunctions::{EigenEvolution, StationaryState};

    #[test]
    fn sutherland_pair_energy() {
        let m = ModelSpec::sutherland(2, 2.0).unwrap();
        let s = StationaryState::new(&m, 0).unwrap();
        let samples = vec![vec![-0.6, 0.5], vec![0.3, 1.4], vec![-1.2, 0.1]];
        let e = eigen_check(&s, &samples).unwrap();
        assert!((e.energy - 3.0).abs() < 1e-5 * 3.0);
        assert!(e.spread < 1e-5 * 3.0);
    }

    #[test]
    fn time_dependent_states_are_refused() {
        let m = ModelSpec::sutherland(2, 2.0).unwrap();
        let s = EigenEvolution::new(StationaryState::new(&m, 0).unwrap());
        assert!(eigen_check(&s, &[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn vanishing_samples_are_skipped() {
        let m = ModelSpec::sutherland(2, 2.0).unwrap();
        let s = StationaryState::new(&m, 0).unwrap();
        let err = eigen_check(&s, &[vec![40.0, 41.0]]).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples(_)));
    }
}

use serde::Serialize;

use super::amplitude::LogAmplitude;
use super::laguerre::laguerre;
use super::state::{ConstructionStep, Snapshot, StateEvaluator};
use crate::error::{Error, Result};
use crate::models::{three_body_pairs, ModelKind, ModelSpec};
use crate::util::symmetric_sum;

/// Unnormalised stationary eigenstate of the constant-parameter model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryState {
    model: ModelSpec,
    quantum_number: usize,
    energy: f64,
    laguerre_b: Option<f64>,
    boost: f64,
}

impl StationaryState {
    pub fn new(model: &ModelSpec, quantum_number: usize) -> Result<Self> {
        model.validate()?;
        let energy = model.energy(quantum_number)?;
        Ok(Self {
            model: model.clone(),
            quantum_number,
            energy: energy.value,
            laguerre_b: energy.laguerre_b,
            boost: 0.0,
        })
    }

    /// Galilei-boosted trigonometric ground state ψ_a = ∏ e^{i a x_i/ħ} ψ_0,
    /// with energy E_0 + N a²/2.
    pub fn boosted(model: &ModelSpec, a: f64) -> Result<Self> {
        if model.kind != ModelKind::Trigonometric {
            return Err(Error::UnsupportedConstruction(format!(
                "the boosted state is defined for the trigonometric model, not {}",
                model.kind.name()
            )));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("boost {a} must be finite")));
        }
        let mut state = Self::new(model, 0)?;
        state.boost = a;
        state.energy += 0.5 * model.n_particles as f64 * a * a;
        Ok(state)
    }

    pub fn quantum_number(&self) -> usize {
        self.quantum_number
    }

    pub fn boost(&self) -> f64 {
        self.boost
    }

    pub fn stationary_model(&self) -> &ModelSpec {
        &self.model
    }

    /// Amplitude at a native configuration, in log form.
    pub fn log_amplitude(&self, x: &[f64]) -> Result<LogAmplitude> {
        let model = &self.model;
        model.check_dimension(x)?;
        if x.iter().any(|xi| !xi.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        let hbar = model.hbar;
        let lambda = model.lambda;
        let positions = model.particle_positions(x)?;
        let n = positions.len();

        let mut logs = Vec::with_capacity(n * (n - 1) / 2 + 3);
        let mut phase = 0.0;
        let signed = model.kind == ModelKind::JacobiCalogero && lambda.fract() == 0.0;
        let odd_power = signed && (lambda as i64) % 2 != 0;
        for i in 0..n {
            for j in 0..i {
                let d = positions[i] - positions[j];
                let factor = match model.kind {
                    ModelKind::Trigonometric => model.circle_angle(d).sin(),
                    _ => d,
                };
                if factor == 0.0 {
                    return Ok(LogAmplitude::ZERO);
                }
                if odd_power && factor < 0.0 {
                    phase += std::f64::consts::PI;
                }
                logs.push(lambda * factor.abs().ln());
            }
        }
        if model.kind == ModelKind::ThreeBody {
            for (_, _, y) in three_body_pairs(&positions) {
                if y == 0.0 {
                    return Ok(LogAmplitude::ZERO);
                }
                logs.push(model.alpha * y.abs().ln());
            }
        }
        let mut log_modulus = symmetric_sum(&mut logs);

        if model.has_harmonic_trap() {
            let mut sq: Vec<f64> = x.iter().map(|xi| xi * xi).collect();
            let r2 = symmetric_sum(&mut sq);
            log_modulus -= r2 / (2.0 * hbar);
            if model.kind == ModelKind::JacobiCalogero && self.quantum_number > 0 {
                let b = self.laguerre_b.expect("Jacobi-Calogero energies carry b");
                let l = laguerre(self.quantum_number, b, r2 / hbar)?;
                if l == 0.0 {
                    return Ok(LogAmplitude::ZERO);
                }
                let lf = LogAmplitude::from_real(l);
                log_modulus += lf.log_modulus;
                phase += lf.phase;
            }
        }
        if self.boost != 0.0 {
            let mut lin = x.to_vec();
            phase += self.boost * symmetric_sum(&mut lin) / hbar;
        }
        Ok(LogAmplitude::new(log_modulus, phase))
    }
}

impl StateEvaluator for StationaryState {
    fn snapshot(&self, _t: f64) -> Result<Snapshot<'_>> {
        Ok(Snapshot::identity(self))
    }

    fn model(&self) -> &ModelSpec {
        &self.model
    }

    fn energy(&self) -> f64 {
        self.energy
    }

    fn construction(&self) -> Vec<ConstructionStep> {
        let mut chain = vec![ConstructionStep::Stationary {
            quantum_number: self.quantum_number,
        }];
        if self.boost != 0.0 {
            chain.push(ConstructionStep::Boost {
                momentum: self.boost,
            });
        }
        chain
    }

    fn is_stationary(&self) -> bool {
        true
    }
}

/// A stationary state carrying its energy phase e^{−iEt/ħ}.
#[derive(Debug, Clone)]
pub struct EigenEvolution {
    stationary: StationaryState,
}

impl EigenEvolution {
    pub fn new(stationary: StationaryState) -> Self {
        Self { stationary }
    }
}

impl StateEvaluator for EigenEvolution {
    fn snapshot(&self, t: f64) -> Result<Snapshot<'_>> {
        let mut snap = Snapshot::identity(&self.stationary);
        snap.phase = -self.stationary.energy * t / self.stationary.model.hbar;
        Ok(snap)
    }

    fn model(&self) -> &ModelSpec {
        &self.stationary.model
    }

    fn energy(&self) -> f64 {
        self.stationary.energy
    }

    fn construction(&self) -> Vec<ConstructionStep> {
        let mut chain = self.stationary.construction();
        chain.push(ConstructionStep::EigenPhase);
        chain
    }
}

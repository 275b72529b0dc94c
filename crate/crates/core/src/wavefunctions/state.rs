use num_complex::Complex64;
use serde::Serialize;

use super::amplitude::LogAmplitude;
use super::stationary::StationaryState;
use crate::error::Result;
use crate::models::{ModelKind, ModelSpec};
use crate::util::symmetric_sum;

/// One link of the construction chain recorded in evaluator metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ConstructionStep {
    Stationary { quantum_number: usize },
    Boost { momentum: f64 },
    EigenPhase,
    Squeeze,
    Displacement,
    ForcedDisplacement,
    Fault { fault: super::Fault },
}

/// Where |ψ(t, ·)|² lives: per-coordinate centre and length scale, or a period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub center: f64,
    pub width: f64,
    pub period: Option<f64>,
}

/// Time-frozen form of any state:
/// ψ(x) = e^{log_prefactor + i phase} · e^{i chirp Σ(x_i−c)² + i momentum Σx_i} · φ_s(scale·(x − c)).
#[derive(Debug, Clone)]
pub struct Snapshot<'a> {
    pub(crate) stationary: &'a StationaryState,
    pub(crate) log_prefactor: f64,
    pub(crate) phase: f64,
    pub(crate) chirp: f64,
    pub(crate) momentum: f64,
    pub(crate) center: f64,
    pub(crate) scale: f64,
}

impl<'a> Snapshot<'a> {
    pub(crate) fn identity(stationary: &'a StationaryState) -> Self {
        Self {
            stationary,
            log_prefactor: 0.0,
            phase: 0.0,
            chirp: 0.0,
            momentum: 0.0,
            center: 0.0,
            scale: 1.0,
        }
    }

    pub fn log_amplitude(&self, x: &[f64]) -> Result<LogAmplitude> {
        let inner = if self.scale == 1.0 && self.center == 0.0 {
            self.stationary.log_amplitude(x)?
        } else {
            let s: Vec<f64> = x.iter().map(|xi| self.scale * (xi - self.center)).collect();
            self.stationary.log_amplitude(&s)?
        };
        let mut phase = self.phase;
        if self.chirp != 0.0 {
            let mut sq: Vec<f64> = x.iter().map(|xi| (xi - self.center).powi(2)).collect();
            phase += self.chirp * symmetric_sum(&mut sq);
        }
        if self.momentum != 0.0 {
            let mut lin = x.to_vec();
            phase += self.momentum * symmetric_sum(&mut lin);
        }
        Ok(inner.times(LogAmplitude::new(self.log_prefactor, phase)))
    }

    /// Centre and width of the probability envelope at this time.
    pub fn envelope(&self) -> Envelope {
        let model = self.stationary.model();
        let length = model.hbar.sqrt() / self.scale;
        match model.kind {
            ModelKind::Trigonometric => Envelope {
                center: self.center,
                width: length,
                period: Some(model.circle_length * model.hbar.sqrt() / self.scale),
            },
            _ => Envelope {
                center: self.center,
                width: length,
                period: None,
            },
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn center(&self) -> f64 {
        self.center
    }
}

/// A pure map (t, configuration) → complex amplitude.
pub trait StateEvaluator: Send + Sync {
    /// Freezes every time-dependent factor at `t`.
    fn snapshot(&self, t: f64) -> Result<Snapshot<'_>>;

    fn model(&self) -> &ModelSpec;

    /// Energy of the underlying stationary state.
    fn energy(&self) -> f64;

    fn construction(&self) -> Vec<ConstructionStep>;

    /// True for amplitudes that do not depend on time.
    fn is_stationary(&self) -> bool {
        false
    }

    fn log_amplitude(&self, t: f64, x: &[f64]) -> Result<LogAmplitude> {
        self.snapshot(t)?.log_amplitude(x)
    }

    fn amplitude(&self, t: f64, x: &[f64]) -> Result<Complex64> {
        Ok(self.log_amplitude(t, x)?.to_complex())
    }
}

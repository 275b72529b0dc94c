use std::sync::Arc;

use serde::Serialize;

use super::state::{ConstructionStep, Snapshot, StateEvaluator};
use super::stationary::StationaryState;
use crate::classical::{ClassicalSolution, DisplacementFrame, DisplacementKind, DisplacementSolution};
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};

/// Deliberate defects used to show that the residual checks are sensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// e^{iNδ/ħ} replaced by 1.
    ZeroDelta,
    /// Quadratic chirp e^{(i/2ħ) M (ρ̇/ρ) Σ(x_i−u_f)²} replaced by 1.
    DropChirp,
    /// Energy phase evaluated with the principal arg(u+iv) instead of the unwrapped θ.
    PrincipalBranch,
}

/// Time-dependent state obtained from a stationary eigenstate by the squeeze
/// map and, when present, the displacement (or forced displacement) map.
#[derive(Debug, Clone)]
pub struct CoherentState {
    stationary: StationaryState,
    classical: Arc<ClassicalSolution>,
    displacement: Option<Arc<DisplacementSolution>>,
    fault: Fault,
}

impl CoherentState {
    pub fn new(
        stationary: StationaryState,
        classical: Arc<ClassicalSolution>,
        displacement: Option<Arc<DisplacementSolution>>,
    ) -> Result<Self> {
        let model = stationary.stationary_model();
        if model.kind == ModelKind::Trigonometric {
            return Err(Error::UnsupportedConstruction(
                "the squeeze map needs an interaction of homogeneous degree -2; \
                 the trigonometric model only admits the Galilei boost"
                    .into(),
            ));
        }
        if let Some(d) = &displacement {
            if !model.is_translation_invariant() {
                return Err(Error::UnsupportedConstruction(format!(
                    "only the squeeze-type map applies to {}: its interaction is not a function \
                     of coordinate differences",
                    model.kind.name()
                )));
            }
            if d.span() != classical.span() {
                return Err(Error::InvalidParameter(
                    "displacement and classical solutions must share a span".into(),
                ));
            }
        }
        Ok(Self {
            stationary,
            classical,
            displacement,
            fault: Fault::None,
        })
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    pub fn fault(&self) -> Fault {
        self.fault
    }

    pub fn classical(&self) -> &ClassicalSolution {
        &self.classical
    }

    pub fn displacement(&self) -> Option<&DisplacementSolution> {
        self.displacement.as_deref()
    }

    pub fn stationary(&self) -> &StationaryState {
        &self.stationary
    }

    pub fn displacement_at(&self, t: f64) -> Result<DisplacementFrame> {
        match &self.displacement {
            Some(d) => d.eval(t),
            None => Ok(DisplacementFrame::zero(t)),
        }
    }
}

impl StateEvaluator for CoherentState {
    fn snapshot(&self, t: f64) -> Result<Snapshot<'_>> {
        let frame = self.classical.frame_at(t)?;
        let shift = self.displacement_at(t)?;
        let model = self.stationary.stationary_model();
        let hbar = model.hbar;
        let dims = model.coordinate_count() as f64;
        let mass = self.classical.schedule().mass(t);
        let scale = frame.squeeze_scale();

        let angle = match self.fault {
            Fault::PrincipalBranch => frame.v.atan2(frame.u),
            _ => frame.theta,
        };
        let mut phase = -self.stationary.energy() / hbar * angle;
        if self.fault != Fault::ZeroDelta {
            phase += dims * shift.delta / hbar;
        }
        let chirp = match self.fault {
            Fault::DropChirp => 0.0,
            _ => mass * frame.rhodot / (2.0 * hbar * frame.rho),
        };
        let mut snap = Snapshot::identity(&self.stationary);
        snap.log_prefactor = 0.5 * dims * scale.ln();
        snap.phase = phase;
        snap.chirp = chirp;
        snap.momentum = mass * shift.derivative / hbar;
        snap.center = shift.value;
        snap.scale = scale;
        Ok(snap)
    }

    fn model(&self) -> &ModelSpec {
        self.stationary.stationary_model()
    }

    fn energy(&self) -> f64 {
        self.stationary.energy()
    }

    fn construction(&self) -> Vec<ConstructionStep> {
        let mut chain = self.stationary.construction();
        chain.push(ConstructionStep::Squeeze);
        if let Some(d) = &self.displacement {
            chain.push(match d.kind() {
                DisplacementKind::Homogeneous { .. } => ConstructionStep::Displacement,
                DisplacementKind::Forced { .. } => ConstructionStep::ForcedDisplacement,
            });
        }
        if self.fault != Fault::None {
            chain.push(ConstructionStep::Fault { fault: self.fault });
        }
        chain
    }
}

/// Inputs for building a stationary or coherent state.
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub model: ModelSpec,
    pub quantum_number: usize,
    pub classical: Option<Arc<ClassicalSolution>>,
    pub displacement: Option<Arc<DisplacementSolution>>,
    pub boost: f64,
}

impl StateSpec {
    pub fn new(model: ModelSpec) -> Self {
        Self {
            model,
            quantum_number: 0,
            classical: None,
            displacement: None,
            boost: 0.0,
        }
    }

    pub fn quantum_number(mut self, n: usize) -> Self {
        self.quantum_number = n;
        self
    }

    pub fn classical(mut self, classical: Arc<ClassicalSolution>) -> Self {
        self.classical = Some(classical);
        self
    }

    pub fn displacement(mut self, displacement: Arc<DisplacementSolution>) -> Self {
        self.displacement = Some(displacement);
        self
    }

    pub fn boost(mut self, a: f64) -> Self {
        self.boost = a;
        self
    }

    /// The stationary eigenstate (boosted for the trigonometric model when a ≠ 0).
    pub fn stationary_state(&self) -> Result<StationaryState> {
        if self.boost != 0.0 {
            if self.quantum_number != 0 {
                return Err(Error::UnsupportedState("boost applies to the ground state".into()));
            }
            return StationaryState::boosted(&self.model, self.boost);
        }
        StationaryState::new(&self.model, self.quantum_number)
    }

    pub fn coherent_state(&self) -> Result<CoherentState> {
        let classical = self.classical.clone().ok_or_else(|| {
            Error::UnsupportedConstruction("a coherent state needs a classical solution".into())
        })?;
        if self.boost != 0.0 {
            return Err(Error::UnsupportedConstruction(
                "boosted states are stationary; no squeeze map applies".into(),
            ));
        }
        CoherentState::new(self.stationary_state()?, classical, self.displacement.clone())
    }
}

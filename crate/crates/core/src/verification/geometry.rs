use crate::error::Result;
use crate::models::ModelKind;
use crate::wavefunctions::StateEvaluator;

/// Where |ψ(t,·)|² lives, per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Geometry {
    pub dims: usize,
    pub center: f64,
    /// Standard deviation of the product-Gaussian proposal.
    pub spread: f64,
    /// Half-width of the quadrature box.
    pub half_width: f64,
    /// Coordinate period on the circle.
    pub period: Option<f64>,
}

impl Geometry {
    pub fn of<S: StateEvaluator + ?Sized>(state: &S, t: f64) -> Result<Self> {
        let snap = state.snapshot(t)?;
        let envelope = snap.envelope();
        let model = state.model();
        let dims = model.coordinate_count();
        let hbar = model.hbar;
        if let Some(period) = envelope.period {
            return Ok(Self {
                dims,
                center: envelope.center,
                spread: period,
                half_width: 0.5 * period,
                period: Some(period),
            });
        }
        let quantum_number = state
            .construction()
            .iter()
            .find_map(|s| match s {
                crate::wavefunctions::ConstructionStep::Stationary { quantum_number } => {
                    Some(*quantum_number)
                }
                _ => None,
            })
            .unwrap_or(0);
        let degree = model.prefactor_degree() + 2.0 * quantum_number as f64;
        let reach = 6.0 + (2.0 * (0.5 * dims as f64 + degree)).sqrt();
        let spread = envelope.width * (state.energy() / (hbar * dims as f64)).sqrt();
        debug_assert!(model.kind != ModelKind::Trigonometric);
        Ok(Self {
            dims,
            center: envelope.center,
            spread,
            half_width: envelope.width * reach,
            period: None,
        })
    }
}

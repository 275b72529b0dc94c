//! The Hamiltonian family: interaction potentials, Jacobi coordinates and
//! closed-form energies of the Sutherland, three-body, Jacobi-Calogero and
//! trigonometric models.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::symmetric_sum;

/// Smallest denominator magnitude accepted by the potentials.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

/// Default exclusion radius around singular hyperplanes, in units of √ħ.
pub const DEFAULT_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sutherland,
    ThreeBody,
    JacobiCalogero,
    Trigonometric,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Sutherland => "sutherland",
            ModelKind::ThreeBody => "three_body",
            ModelKind::JacobiCalogero => "jacobi_calogero",
            ModelKind::Trigonometric => "trigonometric",
        }
    }
}

/// Model selection and coupling data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n_particles: usize,
    pub lambda: f64,
    /// Three-body coupling; ignored by the other models.
    pub alpha: f64,
    /// Circle length L; trigonometric model only.
    pub circle_length: f64,
    pub hbar: f64,
    /// Permits couplings in (0, 1), where λ(λ−1) < 0.
    pub allow_weak_coupling: bool,
    /// Exclusion radius around singular hyperplanes, in units of √ħ.
    pub exclusion: f64,
}

/// Closed-form energy, with the Laguerre index b for the Jacobi-Calogero states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    pub value: f64,
    pub laguerre_b: Option<f64>,
}

impl ModelSpec {
    fn base(kind: ModelKind, n: usize, lambda: f64) -> Self {
        Self {
            kind,
            n_particles: n,
            lambda,
            alpha: 1.0,
            circle_length: 2.0 * PI,
            hbar: 1.0,
            allow_weak_coupling: false,
            exclusion: DEFAULT_EXCLUSION,
        }
    }

    pub fn sutherland(n: usize, lambda: f64) -> Result<Self> {
        Self::base(ModelKind::Sutherland, n, lambda).validated()
    }

    pub fn three_body(lambda: f64, alpha: f64) -> Result<Self> {
        Self {
            alpha,
            ..Self::base(ModelKind::ThreeBody, 3, lambda)
        }
        .validated()
    }

    pub fn jacobi_calogero(n: usize, lambda: f64) -> Result<Self> {
        Self::base(ModelKind::JacobiCalogero, n, lambda).validated()
    }

    pub fn trigonometric(n: usize, lambda: f64, circle_length: f64) -> Result<Self> {
        Self {
            circle_length,
            ..Self::base(ModelKind::Trigonometric, n, lambda)
        }
        .validated()
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validated()
    }

    pub fn with_exclusion(mut self, exclusion: f64) -> Result<Self> {
        self.exclusion = exclusion;
        self.validated()
    }

    pub fn with_weak_coupling(mut self) -> Result<Self> {
        self.allow_weak_coupling = true;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let minimum = if self.kind == ModelKind::JacobiCalogero { 2 } else { 1 };
        if self.n_particles < minimum {
            return Err(Error::InvalidParameter(format!(
                "at least {minimum} particles required for {}, got {}",
                self.kind.name(),
                self.n_particles
            )));
        }
        if self.kind == ModelKind::ThreeBody && self.n_particles != 3 {
            return Err(Error::InvalidParameter(
                "the three-body model has exactly three particles".into(),
            ));
        }
        if !(self.exclusion >= 0.0) || !self.exclusion.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exclusion radius {} must be non-negative",
                self.exclusion
            )));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar = {} must be positive", self.hbar)));
        }
        let mut couplings = vec![("lambda", self.lambda)];
        if self.kind == ModelKind::ThreeBody {
            couplings.push(("alpha", self.alpha));
        }
        for (name, g) in couplings {
            if !g.is_finite() || !(g > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {g} must be positive")));
            }
            if g < 1.0 {
                if !self.allow_weak_coupling {
                    return Err(Error::InvalidParameter(format!(
                        "{name} = {g} is below 1; set the weak-coupling override to allow it"
                    )));
                }
                log::warn!("{name} = {g} < 1: attractive inverse-square regime, no correctness claim");
            }
        }
        if self.kind == ModelKind::Trigonometric && !(self.circle_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "circle length {} must be positive",
                self.circle_length
            )));
        }
        Ok(())
    }

    /// Number of configuration coordinates (N−1 Jacobi coordinates for jacobi_calogero).
    pub fn coordinate_count(&self) -> usize {
        match self.kind {
            ModelKind::JacobiCalogero => self.n_particles - 1,
            _ => self.n_particles,
        }
    }

    /// Models whose interaction depends only on particle differences in their
    /// native coordinates; the displacement maps apply to exactly these.
    pub fn is_translation_invariant(&self) -> bool {
        self.kind != ModelKind::JacobiCalogero
    }

    /// Models describing identical particles in their native coordinates.
    pub fn has_identical_particles(&self) -> bool {
        self.kind != ModelKind::JacobiCalogero
    }

    /// Whether the reference Hamiltonian carries the unit harmonic trap.
    pub fn has_harmonic_trap(&self) -> bool {
        self.kind != ModelKind::Trigonometric
    }

    /// Total homogeneity degree of the ground-state prefactor.
    pub fn prefactor_degree(&self) -> f64 {
        let n = self.n_particles as f64;
        let pairs = n * (n - 1.0) / 2.0;
        match self.kind {
            ModelKind::ThreeBody => 3.0 * (self.lambda + self.alpha),
            _ => self.lambda * pairs,
        }
    }

    pub(crate) fn check_dimension(&self, x: &[f64]) -> Result<()> {
        let expected = self.coordinate_count();
        if x.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Particle positions for a native configuration (Jacobi models append y_N = 0).
    pub fn particle_positions(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dimension(x)?;
        match self.kind {
            ModelKind::JacobiCalogero => {
                let mut y = x.to_vec();
                y.push(0.0);
                jacobi_inverse(&y)
            }
            _ => Ok(x.to_vec()),
        }
    }

    /// Argument of the trigonometric sine, π(x_i − x_j)/(L√ħ).
    pub(crate) fn circle_angle(&self, d: f64) -> f64 {
        PI * d / (self.circle_length * self.hbar.sqrt())
    }

    /// Mutual-interaction potential V in native coordinates.
    pub fn potential(&self, x: &[f64]) -> Result<f64> {
        let positions = self.particle_positions(x)?;
        let h2 = self.hbar * self.hbar;
        let pair_g = h2 * self.lambda * (self.lambda - 1.0);
        let mut terms = Vec::new();
        let n = positions.len();
        for i in 0..n {
            for j in 0..i {
                let d = positions[i] - positions[j];
                match self.kind {
                    ModelKind::Trigonometric => {
                        let s = self.circle_angle(d).sin();
                        if s.abs() < SINGULAR_THRESHOLD {
                            return Err(singular("sin", i, j, s));
                        }
                        let g = self.hbar * self.lambda * (self.lambda - 1.0) * PI * PI
                            / (self.circle_length * self.circle_length);
                        terms.push(g / (s * s));
                    }
                    _ => {
                        if d.abs() < SINGULAR_THRESHOLD {
                            return Err(singular("x_i - x_j", i, j, d));
                        }
                        terms.push(pair_g / (d * d));
                    }
                }
            }
        }
        if self.kind == ModelKind::ThreeBody {
            let g = 3.0 * h2 * self.alpha * (self.alpha - 1.0);
            for (i, j, y) in three_body_pairs(&positions) {
                if y.abs() < SINGULAR_THRESHOLD {
                    return Err(singular("y_ij", i, j, y));
                }
                terms.push(g / (y * y));
            }
        }
        Ok(symmetric_sum(&mut terms))
    }

    /// |V(a·x) − a⁻² V(x)|.
    pub fn homogeneity_defect(&self, x: &[f64], a: f64) -> Result<f64> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {a} must be nonzero")));
        }
        let scaled: Vec<f64> = x.iter().map(|xi| a * xi).collect();
        Ok((self.potential(&scaled)? - self.potential(x)? / (a * a)).abs())
    }

    /// |V(x + a·𝟙) − V(x)| in native coordinates.
    pub fn translation_defect(&self, x: &[f64], a: f64) -> Result<f64> {
        let shifted: Vec<f64> = x.iter().map(|xi| xi + a).collect();
        Ok((self.potential(&shifted)? - self.potential(x)?).abs())
    }

    /// Exclusion radius in configuration units, ε·√ħ.
    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion * self.hbar.sqrt()
    }

    /// Euclidean distance from the configuration to the nearest singular hyperplane.
    pub fn hyperplane_distance(&self, x: &[f64]) -> Result<f64> {
        let positions = self.particle_positions(x)?;
        let n = positions.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..i {
                let d = positions[i] - positions[j];
                let gap = match self.kind {
                    ModelKind::Trigonometric => {
                        let period = self.circle_length * self.hbar.sqrt();
                        (d - period * (d / period).round()).abs()
                    }
                    _ => d.abs(),
                };
                best = best.min(gap / 2f64.sqrt());
            }
        }
        if self.kind == ModelKind::ThreeBody {
            for (_, _, y) in three_body_pairs(&positions) {
                best = best.min(y.abs() / 6f64.sqrt());
            }
        }
        Ok(best)
    }

    /// Closed-form energy of quantum number `n` (only n = 0 outside jacobi_calogero).
    pub fn energy(&self, n: usize) -> Result<Energy> {
        let big_n = self.n_particles as f64;
        let h = self.hbar;
        if n > 0 && self.kind != ModelKind::JacobiCalogero {
            return Err(Error::UnsupportedState(format!(
                "only the ground state of the {} model is available (n = {n} requested)",
                self.kind.name()
            )));
        }
        let energy = match self.kind {
            ModelKind::Sutherland => Energy {
                value: h * big_n * (1.0 + self.lambda * (big_n - 1.0)) / 2.0,
                laguerre_b: None,
            },
            ModelKind::ThreeBody => Energy {
                value: 3.0 * h * (0.5 + self.lambda + self.alpha),
                laguerre_b: None,
            },
            ModelKind::JacobiCalogero => {
                let coupling = 0.5 * self.lambda * big_n * (big_n - 1.0);
                Energy {
                    value: h * (0.5 * (big_n - 1.0) + coupling + 2.0 * n as f64),
                    laguerre_b: Some(0.5 * (big_n - 3.0) + coupling),
                }
            }
            ModelKind::Trigonometric => Energy {
                value: h * PI * PI * self.lambda * self.lambda * big_n * (big_n * big_n - 1.0)
                    / (6.0 * self.circle_length * self.circle_length),
                laguerre_b: None,
            },
        };
        Ok(energy)
    }
}

fn singular(what: &str, i: usize, j: usize, value: f64) -> Error {
    Error::SingularConfiguration(format!("{what} = {value:e} for pair ({i}, {j})"))
}

/// (i, j, y_ij) with y_ij = x_i + x_j − 2x_k for the three pairs of a three-body configuration.
pub(crate) fn three_body_pairs(x: &[f64]) -> [(usize, usize, f64); 3] {
    let y = |i: usize, j: usize, k: usize| (x[i] + x[j]) - 2.0 * x[k];
    [(1, 0, y(1, 0, 2)), (2, 0, y(2, 0, 1)), (2, 1, y(2, 1, 0))]
}

/// Jacobi coordinates: y_i = (Σ_{l≤i} x_l − i x_{i+1})/√(i(i+1)), y_N = Σx/√N.
pub fn jacobi_forward(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: n });
    }
    let mut y = Vec::with_capacity(n);
    let mut partial = 0.0;
    for i in 1..n {
        partial += x[i - 1];
        let fi = i as f64;
        y.push((partial - fi * x[i]) / (fi * (fi + 1.0)).sqrt());
    }
    y.push((partial + x[n - 1]) / (n as f64).sqrt());
    Ok(y)
}

/// Inverse (transpose) of [`jacobi_forward`].
pub fn jacobi_inverse(y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    if n < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: n });
    }
    let com = y[n - 1] / (n as f64).sqrt();
    let mut x = vec![com; n];
    // Row i (1-based, i < N) has 1/√(i(i+1)) on columns 1..=i and −i/√(i(i+1)) on column i+1.
    let mut tail = 0.0;
    for i in (1..n).rev() {
        let fi = i as f64;
        let c = y[i - 1] / (fi * (fi + 1.0)).sqrt();
        x[i] += tail - fi * c;
        tail += c;
    }
    x[0] += tail;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sutherland_pair_potential() {
        let m = ModelSpec::sutherland(2, 2.0).unwrap();
        assert!((m.potential(&[0.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
        let free = ModelSpec::sutherland(3, 1.0).unwrap();
        assert_eq!(free.potential(&[0.3, -1.2, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn equally_spaced_three_body_hits_y_hyperplane() {
        let m = ModelSpec::three_body(2.0, 2.0).unwrap();
        assert!(matches!(
            m.potential(&[0.0, 1.0, 2.0]),
            Err(Error::SingularConfiguration(_))
        ));
        // (0, 1, 3): pair gaps 1, 3, 2; y_ij = -5, 1, 4.
        let v = m.potential(&[0.0, 1.0, 3.0]).unwrap();
        let pairs = 2.0 * (1.0 + 1.0 / 9.0 + 1.0 / 4.0);
        let ys = [1.0 + 0.0 - 6.0, 3.0 + 0.0 - 2.0, 3.0 + 1.0 - 0.0];
        let triples: f64 = ys.iter().map(|y: &f64| 6.0 / (y * y)).sum();
        assert!((v - pairs - triples).abs() < 1e-14);
    }

    #[test]
    fn coincident_points_are_singular() {
        let m = ModelSpec::sutherland(3, 2.0).unwrap();
        assert!(m.potential(&[0.5, 0.5, 1.0]).is_err());
        assert!(m.potential(&[0.5, 1.0]).is_err());
    }

    #[test]
    fn homogeneity_and_translation_examples() {
        let s = ModelSpec::sutherland(3, 2.0).unwrap();
        assert!(s.homogeneity_defect(&[0.0, 1.0, 3.0], 2.0).unwrap() < 1e-12);
        assert!(s.homogeneity_defect(&[0.0, 1.0, 3.0], 0.0).is_err());
        assert!(s.translation_defect(&[0.0, 1.0, 3.0], 5.0).unwrap() < 1e-12);
        let t = ModelSpec::three_body(2.0, 2.0).unwrap();
        assert!(t.homogeneity_defect(&[0.0, 1.0, 3.0], -1.0).unwrap() < 1e-12);
        assert!(t.translation_defect(&[0.0, 1.0, 3.0], -2.0).unwrap() < 1e-12);
        let trig = ModelSpec::trigonometric(2, 2.0, 2.0 * PI).unwrap();
        assert!(trig.homogeneity_defect(&[0.0, 1.0], 2.0).unwrap() > 1e-3);
        assert!(trig.translation_defect(&[0.0, 1.0], 0.7).unwrap() < 1e-12);
    }

    #[test]
    fn jacobi_examples() {
        let y = jacobi_forward(&[1.0, 1.0, 1.0]).unwrap();
        assert!(y[0].abs() < 1e-15 && y[1].abs() < 1e-15);
        assert!((y[2] - 3f64.sqrt()).abs() < 1e-15);
        let y = jacobi_forward(&[1.0, -1.0]).unwrap();
        assert!((y[0] - 2f64.sqrt()).abs() < 1e-15 && y[1].abs() < 1e-15);
        assert!(jacobi_forward(&[1.0]).is_err());
        let x = jacobi_inverse(&jacobi_forward(&[0.3, -1.1, 2.5, 0.7]).unwrap()).unwrap();
        for (a, b) in x.iter().zip([0.3, -1.1, 2.5, 0.7]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_energies() {
        let e = ModelSpec::sutherland(3, 2.0).unwrap().energy(0).unwrap();
        assert!((e.value - 7.5).abs() < 1e-15);
        let j = ModelSpec::jacobi_calogero(3, 2.0).unwrap().energy(1).unwrap();
        assert_eq!(j.laguerre_b, Some(6.0));
        assert!((j.value - 9.0).abs() < 1e-15);
        let t = ModelSpec::three_body(2.0, 2.0).unwrap().energy(0).unwrap();
        assert!((t.value - 13.5).abs() < 1e-15);
        assert!(matches!(
            ModelSpec::sutherland(2, 2.0).unwrap().energy(1),
            Err(Error::UnsupportedState(_))
        ));
    }

    #[test]
    fn coupling_domain_is_enforced() {
        assert!(ModelSpec::sutherland(2, 0.5).is_err());
        assert!(ModelSpec::base(ModelKind::Sutherland, 2, 0.5).with_weak_coupling().is_ok());
        assert!(ModelSpec::three_body(2.0, 0.5).is_err());
        assert!(ModelSpec::sutherland(0, 2.0).is_err());
        assert!(ModelSpec::jacobi_calogero(1, 2.0).is_err());
        let mut bad = ModelSpec::sutherland(3, 2.0).unwrap();
        bad.kind = ModelKind::ThreeBody;
        bad.n_particles = 4;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn jacobi_calogero_uses_n_minus_one_coordinates() {
        let m = ModelSpec::jacobi_calogero(3, 2.0).unwrap();
        assert_eq!(m.coordinate_count(), 2);
        assert!(m.potential(&[0.5, 0.5, 0.0]).is_err());
        let y = [0.4, -0.9];
        let x = m.particle_positions(&y).unwrap();
        let mut direct = 0.0;
        for i in 0..3 {
            for j in 0..i {
                direct += 2.0 / (x[i] - x[j]).powi(2);
            }
        }
        assert!((m.potential(&y).unwrap() - direct).abs() < 1e-13);
    }
}

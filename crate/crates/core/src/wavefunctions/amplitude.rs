use num_complex::Complex64;
use serde::Serialize;

/// A complex amplitude stored as (ln|ψ|, arg ψ). The phase is not reduced
/// modulo 2π, so differences of nearby amplitudes stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogAmplitude {
    pub log_modulus: f64,
    pub phase: f64,
}

impl LogAmplitude {
    pub const ONE: LogAmplitude = LogAmplitude {
        log_modulus: 0.0,
        phase: 0.0,
    };

    pub const ZERO: LogAmplitude = LogAmplitude {
        log_modulus: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub fn new(log_modulus: f64, phase: f64) -> Self {
        Self { log_modulus, phase }
    }

    /// Log-domain form of a real number; negative values carry phase π.
    pub fn from_real(x: f64) -> Self {
        let phase = if x < 0.0 { std::f64::consts::PI } else { 0.0 };
        Self::new(x.abs().ln(), phase)
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.modulus(), self.phase)
    }

    pub fn times(self, other: LogAmplitude) -> Self {
        Self::new(self.log_modulus + other.log_modulus, self.phase + other.phase)
    }

    /// ψ_self / ψ_other as an ordinary complex number.
    pub fn ratio(&self, other: &LogAmplitude) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(
            (self.log_modulus - other.log_modulus).exp(),
            self.phase - other.phase,
        )
    }
}

//! Time-dependent model data: mass M(t), squared frequency w²(t) and force F(t).
//!
//! Every profile exposes its value and its first time derivative. The
//! derivatives feed the second-derivative data of the dense classical output.

use serde::Serialize;

use crate::error::{Error, Result};

/// A real function of time with an analytic first derivative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `offset + amplitude * sin(angular * t + phase)`
    Sinusoid {
        offset: f64,
        amplitude: f64,
        angular: f64,
        phase: f64,
    },
    Piecewise(PiecewisePolynomial),
    Table(CubicSpline),
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn sinusoid(offset: f64, amplitude: f64, angular: f64, phase: f64) -> Self {
        Profile::Sinusoid {
            offset,
            amplitude,
            angular,
            phase,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Sinusoid {
                offset,
                amplitude,
                angular,
                phase,
            } => offset + amplitude * (angular * t + phase).sin(),
            Profile::Piecewise(p) => p.value(t),
            Profile::Table(s) => s.value(t),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Profile::Constant { .. } => 0.0,
            Profile::Sinusoid {
                amplitude,
                angular,
                phase,
                ..
            } => amplitude * angular * (angular * t + phase).cos(),
            Profile::Piecewise(p) => p.rate(t),
            Profile::Table(s) => s.rate(t),
        }
    }

    /// True when the profile is identically zero by construction.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            Profile::Constant { value } => *value == 0.0,
            Profile::Sinusoid {
                offset, amplitude, ..
            } => *offset == 0.0 && *amplitude == 0.0,
            Profile::Piecewise(p) => p.coefficients.iter().flatten().all(|c| *c == 0.0),
            Profile::Table(s) => s.values.iter().all(|v| *v == 0.0),
        }
    }

    /// Times at which the profile changes character (piece starts, table nodes).
    fn knots(&self) -> Vec<f64> {
        match self {
            Profile::Piecewise(p) => p.starts.clone(),
            Profile::Table(s) => s.times.clone(),
            _ => Vec::new(),
        }
    }
}

/// Polynomial pieces; piece `k` is `Σ c_j (t - start_k)^j` on `[start_k, start_{k+1})`.
/// Times before the first start use the first piece.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewisePolynomial {
    starts: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    pub fn new(starts: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if starts.is_empty() || starts.len() != coefficients.len() {
            return Err(Error::InvalidParameter(
                "piecewise polynomial needs one coefficient list per piece start".into(),
            ));
        }
        if starts.windows(2).any(|w| w[1] <= w[0]) || starts.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(
                "piece starts must be finite and strictly increasing".into(),
            ));
        }
        if coefficients.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidParameter("empty coefficient list".into()));
        }
        Ok(Self {
            starts,
            coefficients,
        })
    }

    fn piece(&self, t: f64) -> usize {
        self.starts.partition_point(|s| *s <= t).saturating_sub(1)
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = self.piece(t);
        let dt = t - self.starts[k];
        self.coefficients[k]
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * dt + c)
    }

    pub fn rate(&self, t: f64) -> f64 {
        let k = self.piece(t);
        let dt = t - self.starts[k];
        let c = &self.coefficients[k];
        (1..c.len())
            .rev()
            .fold(0.0, |acc, j| acc * dt + j as f64 * c[j])
    }
}

/// Natural cubic spline through tabulated samples. Outside the table the end
/// cubic pieces are extended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicSpline {
    times: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = times.len();
        if n < 2 || values.len() != n {
            return Err(Error::InvalidParameter(
                "a table needs at least two (time, value) samples".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "table times must be strictly increasing".into(),
            ));
        }
        // Tridiagonal system for the interior second derivatives.
        let mut second = vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let h0 = times[i + 1] - times[i];
                let h1 = times[i + 2] - times[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0
                    * ((values[i + 2] - values[i + 1]) / h1 - (values[i + 1] - values[i]) / h0);
            }
            for i in 1..m {
                let lower = times[i + 1] - times[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
            }
        }
        Ok(Self {
            times,
            values,
            second,
        })
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.times.len();
        self.times
            .partition_point(|s| *s <= t)
            .saturating_sub(1)
            .min(n - 2)
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = self.interval(t);
        let h = self.times[k + 1] - self.times[k];
        let a = (self.times[k + 1] - t) / h;
        let b = (t - self.times[k]) / h;
        a * self.values[k]
            + b * self.values[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / 6.0
    }

    pub fn rate(&self, t: f64) -> f64 {
        let k = self.interval(t);
        let h = self.times[k + 1] - self.times[k];
        let a = (self.times[k + 1] - t) / h;
        let b = (t - self.times[k]) / h;
        (self.values[k + 1] - self.values[k]) / h
            + ((1.0 - 3.0 * a * a) * self.second[k] + (3.0 * b * b - 1.0) * self.second[k + 1]) * h
                / 6.0
    }
}

/// The time-dependent parameters of the N-body oscillator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSchedule {
    pub mass: Profile,
    pub frequency_sq: Profile,
    pub force: Profile,
}

impl ParameterSchedule {
    pub fn new(mass: Profile, frequency_sq: Profile) -> Self {
        Self {
            mass,
            frequency_sq,
            force: Profile::constant(0.0),
        }
    }

    /// Constant mass `m` and constant angular frequency `w`.
    pub fn constant(m: f64, w: f64) -> Self {
        Self::new(Profile::constant(m), Profile::constant(w * w))
    }

    pub fn with_force(mut self, force: Profile) -> Self {
        self.force = force;
        self
    }

    pub fn mass(&self, t: f64) -> f64 {
        self.mass.value(t)
    }

    pub fn mass_rate(&self, t: f64) -> f64 {
        self.mass.rate(t)
    }

    pub fn frequency_sq(&self, t: f64) -> f64 {
        self.frequency_sq.value(t)
    }

    pub fn force(&self, t: f64) -> f64 {
        self.force.value(t)
    }

    pub fn force_rate(&self, t: f64) -> f64 {
        self.force.rate(t)
    }

    /// Spring constant M(t) w²(t).
    pub fn stiffness(&self, t: f64) -> f64 {
        self.mass(t) * self.frequency_sq(t)
    }

    pub fn stiffness_rate(&self, t: f64) -> f64 {
        self.mass.rate(t) * self.frequency_sq.value(t)
            + self.mass.value(t) * self.frequency_sq.rate(t)
    }

    /// Checks M(t) > 0 on a dense sample of the span plus every profile knot inside it.
    pub fn check_positive_mass(&self, span: (f64, f64)) -> Result<()> {
        const SAMPLES: usize = 20_000;
        let (t0, t1) = span;
        let knots = self.mass.knots().into_iter().filter(|k| *k >= t0 && *k <= t1);
        let grid = (0..=SAMPLES).map(|i| t0 + (t1 - t0) * i as f64 / SAMPLES as f64);
        for t in grid.chain(knots) {
            let m = self.mass(t);
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::ScheduleDomain(format!(
                    "mass M({t}) = {m} is not positive"
                )));
            }
        }
        Ok(())
    }

    /// Typical angular frequency on the span: sqrt of the largest sampled |w²|.
    pub fn typical_frequency(&self, span: (f64, f64)) -> f64 {
        const SAMPLES: usize = 2_000;
        let (t0, t1) = span;
        let peak = (0..=SAMPLES)
            .map(|i| self.frequency_sq(t0 + (t1 - t0) * i as f64 / SAMPLES as f64).abs())
            .fold(0.0, f64::max);
        peak.sqrt()
    }

    /// Typical mass on the span (sample mean).
    pub fn typical_mass(&self, span: (f64, f64)) -> f64 {
        const SAMPLES: usize = 2_000;
        let (t0, t1) = span;
        (0..=SAMPLES)
            .map(|i| self.mass(t0 + (t1 - t0) * i as f64 / SAMPLES as f64))
            .sum::<f64>()
            / (SAMPLES + 1) as f64
    }
}

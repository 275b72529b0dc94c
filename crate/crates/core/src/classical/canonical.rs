use std::f64::consts::PI;

use serde::Serialize;

use super::displacement::DisplacementKind;
use super::solution::{wrap_angle, InitialConditions, TrajectoryFrame};
use crate::error::{Error, Result};

/// Unit-mass, unit-frequency parametrisation u = cos(t+t0), v = A sin(t+α+t0),
/// u_f = B cos(t+β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalParameters {
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
    pub t0: f64,
}

impl CanonicalParameters {
    pub fn new(a: f64, alpha: f64, b: f64, beta: f64, t0: f64) -> Result<Self> {
        let p = Self { a, alpha, b, beta, t0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!("A = {} must be positive", self.a)));
        }
        if !(self.alpha.abs() < PI) {
            return Err(Error::InvalidParameter(format!(
                "|alpha| = {} must be below pi",
                self.alpha.abs()
            )));
        }
        if !(self.b >= 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidParameter(format!("B = {} must be non-negative", self.b)));
        }
        if !(self.beta.is_finite() && self.t0.is_finite()) {
            return Err(Error::InvalidParameter("beta and t0 must be finite".into()));
        }
        let omega = self.omega();
        if !(omega > 1e-12 * self.a) {
            return Err(Error::DegenerateInitialConditions {
                omega,
                threshold: 1e-12 * self.a,
            });
        }
        Ok(())
    }

    /// Ω = A cos α.
    pub fn omega(&self) -> f64 {
        self.a * self.alpha.cos()
    }

    /// Initial data at t = 0 reproducing the canonical pair.
    pub fn initial_conditions(&self) -> InitialConditions {
        InitialConditions::new(
            self.t0.cos(),
            -self.t0.sin(),
            self.a * (self.alpha + self.t0).sin(),
            self.a * (self.alpha + self.t0).cos(),
        )
    }

    /// Coefficients (c_u, c_v) with B cos(t+β) = c_u u(t) + c_v v(t).
    pub fn displacement(&self) -> DisplacementKind {
        let ic = self.initial_conditions();
        let (f, fdot) = (self.b * self.beta.cos(), -self.b * self.beta.sin());
        let w = ic.u0 * ic.vdot0 - ic.udot0 * ic.v0;
        DisplacementKind::Homogeneous {
            c_u: (f * ic.vdot0 - fdot * ic.v0) / w,
            c_v: (ic.u0 * fdot - ic.udot0 * f) / w,
        }
    }
}

/// Closed-form frame and displacement value u_f(t) of the canonical family.
pub fn canonical_frame(params: &CanonicalParameters, t: f64) -> Result<(TrajectoryFrame, f64)> {
    params.validate()?;
    let s = t + params.t0;
    let phase = t + params.alpha + params.t0;
    let u = s.cos();
    let v = params.a * phase.sin();
    let udot = -s.sin();
    let vdot = params.a * phase.cos();
    let rho = u.hypot(v);
    // |arg(u + iv) − (t + t0)| < π holds along the whole orbit when A cos α > 0.
    let theta = s + wrap_angle(v.atan2(u) - s);
    let theta_start = params.t0 + wrap_angle((params.a * (params.alpha + params.t0).sin()).atan2(params.t0.cos()) - params.t0);
    let frame = TrajectoryFrame {
        t,
        u,
        v,
        udot,
        vdot,
        rho,
        rhodot: (u * udot + v * vdot) / rho,
        tau: theta - theta_start,
        theta,
        omega: params.omega(),
    };
    Ok((frame, params.b * (t + params.beta).cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_family() {
        let p = CanonicalParameters::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(p.omega(), 1.0);
        for t in [0.0, 1.0, 4.0, 9.0] {
            let (f, u_f) = canonical_frame(&p, t).unwrap();
            assert!((f.rho - 1.0).abs() < 1e-15);
            assert!((f.tau - t).abs() < 1e-12 && (f.theta - t).abs() < 1e-12);
            assert_eq!(u_f, 0.0);
        }
    }

    #[test]
    fn closed_form_values() {
        let p = CanonicalParameters::new(2.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let (f, _) = canonical_frame(&p, PI / 2.0).unwrap();
        assert!((f.rho - 2.0).abs() < 1e-15);
        let p = CanonicalParameters::new(1.0, PI / 3.0, 0.0, 0.0, 0.0).unwrap();
        assert!((p.omega() - 0.5).abs() < 1e-15);
        let (f, _) = canonical_frame(&p, 0.7).unwrap();
        assert!((f.vdot * f.u - f.udot * f.v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn parameter_domain() {
        assert!(CanonicalParameters::new(1.0, PI, 0.0, 0.0, 0.0).is_err());
        assert!(CanonicalParameters::new(1.0, -3.5, 0.0, 0.0, 0.0).is_err());
        assert!(CanonicalParameters::new(0.0, 0.1, 0.0, 0.0, 0.0).is_err());
        assert!(CanonicalParameters::new(1.0, 2.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn displacement_coefficients_reproduce_cosine() {
        let p = CanonicalParameters::new(1.4, 0.6, 0.8, 0.3, 0.2).unwrap();
        let DisplacementKind::Homogeneous { c_u, c_v } = p.displacement() else {
            panic!("homogeneous expected")
        };
        for t in [0.0, 1.3, 5.0] {
            let (f, u_f) = canonical_frame(&p, t).unwrap();
            assert!((c_u * f.u + c_v * f.v - u_f).abs() < 1e-12);
        }
    }
}

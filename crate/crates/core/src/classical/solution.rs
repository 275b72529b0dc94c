use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use super::integrator::{integrate, DenseTrajectory, OdeSystem, StepControl};
use crate::error::{Error, Result};
use crate::schedule::ParameterSchedule;
use crate::util::fmt_f64;

/// Initial data for the two homogeneous solutions u and v.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialConditions {
    pub u0: f64,
    pub udot0: f64,
    pub v0: f64,
    pub vdot0: f64,
}

impl InitialConditions {
    pub fn new(u0: f64, udot0: f64, v0: f64, vdot0: f64) -> Self {
        Self {
            u0,
            udot0,
            v0,
            vdot0,
        }
    }
}

/// Classical quantities at a single time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryFrame {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub udot: f64,
    pub vdot: f64,
    pub rho: f64,
    pub rhodot: f64,
    pub tau: f64,
    pub theta: f64,
    pub omega: f64,
}

impl TrajectoryFrame {
    /// √Ω/ρ, the coordinate rescaling of the squeeze map.
    pub fn squeeze_scale(&self) -> f64 {
        self.omega.sqrt() / self.rho
    }
}

/// Wraps an angle into (−π, π].
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a - 2.0 * PI * (a / (2.0 * PI)).round();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

// State layout: [u, M u̇, v, M v̇, τ].
struct Homogeneous<'a> {
    schedule: &'a ParameterSchedule,
    omega: f64,
}

impl OdeSystem for Homogeneous<'_> {
    fn dim(&self) -> usize {
        5
    }

    fn rate(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let m = self.schedule.mass(t);
        let k = self.schedule.stiffness(t);
        dy[0] = y[1] / m;
        dy[1] = -k * y[0];
        dy[2] = y[3] / m;
        dy[3] = -k * y[2];
        dy[4] = self.omega / (m * (y[0] * y[0] + y[2] * y[2]));
    }

    fn second_rate(&self, t: f64, y: &[f64], dy: &[f64], ddy: &mut [f64]) {
        let m = self.schedule.mass(t);
        let mdot = self.schedule.mass_rate(t);
        let k = self.schedule.stiffness(t);
        let kdot = self.schedule.stiffness_rate(t);
        ddy[0] = dy[1] / m - y[1] * mdot / (m * m);
        ddy[1] = -kdot * y[0] - k * dy[0];
        ddy[2] = dy[3] / m - y[3] * mdot / (m * m);
        ddy[3] = -kdot * y[2] - k * dy[2];
        let rho2 = y[0] * y[0] + y[2] * y[2];
        let denom = m * rho2;
        ddy[4] = -self.omega * (mdot * rho2 + 2.0 * m * (y[0] * dy[0] + y[2] * dy[2]))
            / (denom * denom);
    }
}

/// Dense solution of d/dt(M ẋ) + M w² x = 0 for two independent solutions,
/// with the Wronskian Ω, rescaled time τ and unwrapped phase θ = arg(u + iv).
#[derive(Debug, Clone)]
pub struct ClassicalSolution {
    schedule: ParameterSchedule,
    span: (f64, f64),
    omega: f64,
    swapped: bool,
    tolerance: f64,
    trajectory: DenseTrajectory,
    theta_nodes: Vec<f64>,
}

/// Solves the classical equation of motion on `span` and builds the dense solution.
///
/// If the initial Wronskian is negative, u and v are exchanged so that Ω > 0.
pub fn solve_classical(
    schedule: &ParameterSchedule,
    init: InitialConditions,
    span: (f64, f64),
    tolerance: f64,
) -> Result<ClassicalSolution> {
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidParameter(format!("invalid span [{t0}, {t1}]")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    schedule.check_positive_mass(span)?;

    let m0 = schedule.mass(t0);
    let mut init = init;
    let mut omega = m0 * (init.vdot0 * init.u0 - init.udot0 * init.v0);
    let natural = m0
        * ((init.u0.powi(2) + init.v0.powi(2)) * (init.udot0.powi(2) + init.vdot0.powi(2))).sqrt();
    let threshold = 1e-12 * natural;
    if !(omega.abs() > threshold) || !omega.is_finite() {
        return Err(Error::DegenerateInitialConditions { omega, threshold });
    }
    let swapped = omega < 0.0;
    if swapped {
        init = InitialConditions::new(init.v0, init.vdot0, init.u0, init.udot0);
        omega = -omega;
    }

    let w_bar = schedule.typical_frequency(span).max(1.0 / (t1 - t0));
    let control = StepControl {
        rtol: tolerance,
        atol: tolerance * (init.u0.hypot(init.v0)).max(m0 * init.udot0.hypot(init.vdot0)),
        max_step: (0.1 / w_bar).min((t1 - t0) / 8.0),
        max_steps: 5_000_000,
    };
    let system = Homogeneous { schedule, omega };
    let y0 = [init.u0, m0 * init.udot0, init.v0, m0 * init.vdot0, 0.0];
    let phase_rate = |t: f64, y: &[f64]| {
        omega / (schedule.mass(t) * (y[0] * y[0] + y[2] * y[2]))
    };
    let trajectory = integrate(&system, t0, t1, &y0, control, |ta, ya, tb, yb| {
        let turn = wrap_angle(yb[2].atan2(yb[0]) - ya[2].atan2(ya[0]));
        let bound = (tb - ta) * phase_rate(ta, ya).max(phase_rate(tb, yb));
        turn.abs() < PI / 2.0 && bound < PI / 2.0
    })?;

    let mut theta_nodes = Vec::with_capacity(trajectory.times().len());
    let mut theta = y0[2].atan2(y0[0]);
    for k in 0..trajectory.times().len() {
        let y = trajectory.node(k);
        let rho = y[0].hypot(y[2]);
        if !(rho > 1e-12) {
            return Err(Error::LinearDependence {
                t: trajectory.times()[k],
                rho,
            });
        }
        if k > 0 {
            theta += wrap_angle(y[2].atan2(y[0]) - theta);
        }
        theta_nodes.push(theta);
    }

    Ok(ClassicalSolution {
        schedule: schedule.clone(),
        span,
        omega,
        swapped,
        tolerance,
        trajectory,
        theta_nodes,
    })
}

impl ClassicalSolution {
    pub fn schedule(&self) -> &ParameterSchedule {
        &self.schedule
    }

    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    /// The (positive) Wronskian constant Ω = M(v̇u − u̇v).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// True when the supplied u and v were exchanged to make Ω positive.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Accepted integrator node times.
    pub fn node_times(&self) -> &[f64] {
        self.trajectory.times()
    }

    pub(crate) fn trajectory(&self) -> &DenseTrajectory {
        &self.trajectory
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        let (t0, t1) = self.span;
        let slack = 1e-12 * (1.0 + t0.abs().max(t1.abs()));
        if t.is_nan() || t < t0 - slack || t > t1 + slack {
            return Err(Error::OutOfRange {
                t,
                start: t0,
                end: t1,
            });
        }
        Ok(())
    }

    /// Interpolated state [u, Mu̇, v, Mv̇, τ] and its time derivative.
    pub(crate) fn state(&self, t: f64) -> Result<([f64; 5], [f64; 5])> {
        self.check_time(t)?;
        let mut y = [0.0; 5];
        let mut dy = [0.0; 5];
        self.trajectory.eval(t, &mut y, &mut dy);
        Ok((y, dy))
    }

    /// All classical quantities at `t`.
    pub fn frame_at(&self, t: f64) -> Result<TrajectoryFrame> {
        let (y, _) = self.state(t)?;
        let m = self.schedule.mass(t);
        let (u, v) = (y[0], y[2]);
        let (udot, vdot) = (y[1] / m, y[3] / m);
        let rho = u.hypot(v);
        let k = self.trajectory.interval(t);
        let theta_k = self.theta_nodes[k];
        let theta = theta_k + wrap_angle(v.atan2(u) - theta_k);
        Ok(TrajectoryFrame {
            t,
            u,
            v,
            udot,
            vdot,
            rho,
            rhodot: (u * udot + v * vdot) / rho,
            tau: y[4],
            theta,
            omega: self.omega,
        })
    }

    /// Unwrapped θ(t) = arg(u + iv).
    pub fn phase_angle(&self, t: f64) -> Result<f64> {
        Ok(self.frame_at(t)?.theta)
    }

    /// Wronskian M(v̇u − u̇v) evaluated from the interpolated state.
    pub fn wronskian_at(&self, t: f64) -> Result<f64> {
        let (y, _) = self.state(t)?;
        Ok(y[0] * y[3] - y[2] * y[1])
    }

    /// Largest relative deviation of the Wronskian from Ω over nodes and interval midpoints.
    pub fn wronskian_drift(&self) -> f64 {
        let times = self.trajectory.times();
        let mut worst: f64 = 0.0;
        for k in 0..times.len() {
            let y = self.trajectory.node(k);
            worst = worst.max(((y[0] * y[3] - y[2] * y[1]) - self.omega).abs());
            if k + 1 < times.len() {
                let mid = 0.5 * (times[k] + times[k + 1]);
                if let Ok(w) = self.wronskian_at(mid) {
                    worst = worst.max((w - self.omega).abs());
                }
            }
        }
        worst / self.omega
    }

    /// |d/dt(Mρ̇) − Ω²/(Mρ³) + Mw²ρ| with a central difference of step `step`.
    pub fn ermakov_residual(&self, t: f64, step: f64) -> Result<f64> {
        ermakov_defect(
            &self.schedule,
            self.omega,
            |s| {
                let f = self.frame_at(s)?;
                Ok((f.rho, f.rhodot))
            },
            t,
            step,
            self.span,
        )
    }

    /// Writes `t,u,v,udot,vdot,rho,rhodot,tau,theta` rows at the given times.
    pub fn write_csv<W: Write>(&self, out: &mut W, times: &[f64]) -> io::Result<()> {
        writeln!(out, "t,u,v,udot,vdot,rho,rhodot,tau,theta")?;
        for &t in times {
            let f = self
                .frame_at(t)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
            let row = [f.t, f.u, f.v, f.udot, f.vdot, f.rho, f.rhodot, f.tau, f.theta];
            let cells: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Residual of the Ermakov–Pinney equation for an arbitrary ρ(t), ρ̇(t) source.
///
/// Used both on solved trajectories and on deliberately corrupted ones.
pub fn ermakov_defect<F>(
    schedule: &ParameterSchedule,
    omega: f64,
    rho_and_rate: F,
    t: f64,
    step: f64,
    span: (f64, f64),
) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("stencil step {step} must be positive")));
    }
    if t - step < span.0 || t + step > span.1 {
        return Err(Error::OutOfRange {
            t: if t - step < span.0 { t - step } else { t + step },
            start: span.0,
            end: span.1,
        });
    }
    let momentum = |s: f64| -> Result<f64> { Ok(schedule.mass(s) * rho_and_rate(s)?.1) };
    let derivative = (momentum(t + step)? - momentum(t - step)?) / (2.0 * step);
    let (rho, _) = rho_and_rate(t)?;
    let m = schedule.mass(t);
    Ok((derivative - omega * omega / (m * rho.powi(3)) + schedule.stiffness(t) * rho).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Profile;
    use std::f64::consts::PI;

    fn unit() -> ClassicalSolution {
        let s = ParameterSchedule::constant(1.0, 1.0);
        solve_classical(&s, InitialConditions::new(1.0, 0.0, 0.0, 1.0), (0.0, 2.0 * PI), 1e-12).unwrap()
    }

    fn modulated() -> ClassicalSolution {
        let s = ParameterSchedule::new(Profile::constant(1.0), Profile::sinusoid(1.0, 0.5, 0.7, 0.0));
        solve_classical(&s, InitialConditions::new(1.0, 0.0, 0.0, 1.0), (0.0, 10.0), 1e-12).unwrap()
    }

    #[test]
    fn harmonic_identity() {
        let sol = unit();
        assert!((sol.omega() - 1.0).abs() < 1e-12);
        for k in 0..=40 {
            let t = 2.0 * PI * k as f64 / 40.0;
            let f = sol.frame_at(t).unwrap();
            assert!((f.u - t.cos()).abs() < 1e-9 && (f.v - t.sin()).abs() < 1e-9);
            assert!((f.rho - 1.0).abs() < 1e-9);
            assert!((f.tau - t).abs() < 1e-9 && (f.theta - t).abs() < 1e-9);
        }
        let f = sol.frame_at(PI / 2.0).unwrap();
        assert!(f.u.abs() < 1e-9 && (f.v - 1.0).abs() < 1e-9);
        assert!((f.tau - PI / 2.0).abs() < 1e-9);
        let f = sol.frame_at(1.5 * PI).unwrap();
        assert!((f.theta - 1.5 * PI).abs() < 1e-9);
    }

    #[test]
    fn negative_wronskian_is_swapped() {
        let s = ParameterSchedule::constant(1.0, 1.0);
        let sol = solve_classical(&s, InitialConditions::new(0.0, 1.0, 1.0, 0.0), (0.0, 1.0), 1e-12).unwrap();
        assert!(sol.swapped());
        assert!((sol.omega() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let s = ParameterSchedule::constant(1.0, 1.0);
        let err = solve_classical(&s, InitialConditions::new(1.0, 0.0, 2.0, 0.0), (0.0, 1.0), 1e-12);
        assert!(matches!(err, Err(Error::DegenerateInitialConditions { .. })));
        let bad = ParameterSchedule::new(Profile::sinusoid(0.5, 1.0, 1.0, 0.0), Profile::constant(1.0));
        let err = solve_classical(&bad, InitialConditions::new(1.0, 0.0, 0.0, 1.0), (0.0, 10.0), 1e-12);
        assert!(matches!(err, Err(Error::ScheduleDomain(_))));
        let sol = unit();
        assert!(matches!(sol.frame_at(7.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn modulated_frame_identities() {
        let sol = modulated();
        let f = sol.frame_at(5.0).unwrap();
        assert!((f.rho * f.rho - (f.u * f.u + f.v * f.v)).abs() < 1e-9);
        assert!((f.rho * f.rhodot - (f.u * f.udot + f.v * f.vdot)).abs() < 1e-9);
        assert!(sol.wronskian_drift() < 1e-8);
        assert!(sol.ermakov_residual(3.0, 1e-4).unwrap() < 1e-6);
        assert!(matches!(sol.ermakov_residual(1e-5, 1e-4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn ermakov_detects_corrupted_rho() {
        let sol = unit();
        assert!(sol.ermakov_residual(1.0, 1e-4).unwrap() < 1e-8);
        let corrupted = ermakov_defect(
            sol.schedule(),
            sol.omega(),
            |s| {
                let f = sol.frame_at(s)?;
                Ok((1.1 * f.rho, 1.1 * f.rhodot))
            },
            1.0,
            1e-4,
            sol.span(),
        )
        .unwrap();
        assert!(corrupted > 0.1);
    }

    #[test]
    fn csv_header_and_rows() {
        let mut buf = Vec::new();
        unit().write_csv(&mut buf, &[0.0, 1.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,u,v,udot,vdot,rho,rhodot,tau,theta");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 9);
    }
}

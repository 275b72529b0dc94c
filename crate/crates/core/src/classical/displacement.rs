use serde::Serialize;

use super::integrator::{integrate, DenseTrajectory, OdeSystem, StepControl};
use super::solution::ClassicalSolution;
use crate::error::{Error, Result};
use crate::schedule::ParameterSchedule;

/// How the displacement trajectory is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisplacementKind {
    /// u_f = c_u·u + c_v·v, taken from the stored homogeneous solutions
    /// (after the exchange applied when the initial Wronskian was negative).
    Homogeneous { c_u: f64, c_v: f64 },
    /// x_p solving d/dt(M ẋ_p) + M w² x_p = F(t) with the schedule's force.
    Forced { x0: f64, xdot0: f64 },
}

/// Displacement value, its time derivative and the accumulated phase δ at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementFrame {
    pub t: f64,
    pub value: f64,
    pub derivative: f64,
    pub delta: f64,
}

impl DisplacementFrame {
    pub fn zero(t: f64) -> Self {
        Self {
            t,
            value: 0.0,
            derivative: 0.0,
            delta: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Homogeneous {
        classical: ClassicalSolution,
        c_u: f64,
        c_v: f64,
        delta: DenseTrajectory,
    },
    Forced {
        trajectory: DenseTrajectory,
    },
}

/// The displacement trajectory (u_f or x_p) with its phase δ, δ(t_start) = 0.
#[derive(Debug, Clone)]
pub struct DisplacementSolution {
    kind: DisplacementKind,
    schedule: ParameterSchedule,
    span: (f64, f64),
    repr: Repr,
}

// δ' = ½(M w² x² − P²/M) with P = M ẋ.
fn action_rate(m: f64, k: f64, x: f64, p: f64) -> f64 {
    0.5 * (k * x * x - p * p / m)
}

fn action_second_rate(m: f64, mdot: f64, k: f64, kdot: f64, x: f64, p: f64, xdot: f64, pdot: f64) -> f64 {
    0.5 * (kdot * x * x + 2.0 * k * x * xdot - 2.0 * p * pdot / m + p * p * mdot / (m * m))
}

// State layout: [x_p, M ẋ_p, δ_F].
struct Driven<'a> {
    schedule: &'a ParameterSchedule,
}

impl OdeSystem for Driven<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn rate(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let m = self.schedule.mass(t);
        let k = self.schedule.stiffness(t);
        dy[0] = y[1] / m;
        dy[1] = -k * y[0] + self.schedule.force(t);
        dy[2] = action_rate(m, k, y[0], y[1]);
    }

    fn second_rate(&self, t: f64, y: &[f64], dy: &[f64], ddy: &mut [f64]) {
        let s = self.schedule;
        let (m, mdot, k, kdot) = (s.mass(t), s.mass_rate(t), s.stiffness(t), s.stiffness_rate(t));
        ddy[0] = dy[1] / m - y[1] * mdot / (m * m);
        ddy[1] = -kdot * y[0] - k * dy[0] + s.force_rate(t);
        ddy[2] = action_second_rate(m, mdot, k, kdot, y[0], y[1], dy[0], dy[1]);
    }
}

// 8-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Builds the displacement trajectory and its phase on the classical solution's span.
pub fn solve_displacement(
    solution: &ClassicalSolution,
    kind: DisplacementKind,
) -> Result<DisplacementSolution> {
    let schedule = solution.schedule().clone();
    let span = solution.span();
    schedule.check_positive_mass(span)?;
    let repr = match kind {
        DisplacementKind::Homogeneous { c_u, c_v } => {
            if !(c_u.is_finite() && c_v.is_finite()) {
                return Err(Error::InvalidParameter("displacement coefficients must be finite".into()));
            }
            homogeneous(solution, &schedule, c_u, c_v)?
        }
        DisplacementKind::Forced { x0, xdot0 } => {
            if !(x0.is_finite() && xdot0.is_finite()) {
                return Err(Error::InvalidParameter("forced initial data must be finite".into()));
            }
            let m0 = schedule.mass(span.0);
            let scale = x0.abs().max((m0 * xdot0).abs()).max(1.0);
            let w_bar = schedule.typical_frequency(span).max(1.0 / (span.1 - span.0));
            let control = StepControl {
                rtol: solution.tolerance(),
                atol: solution.tolerance() * scale,
                max_step: (0.1 / w_bar).min((span.1 - span.0) / 8.0),
                max_steps: 5_000_000,
            };
            let trajectory = integrate(
                &Driven { schedule: &schedule },
                span.0,
                span.1,
                &[x0, m0 * xdot0, 0.0],
                control,
                |_, _, _, _| true,
            )?;
            Repr::Forced { trajectory }
        }
    };
    Ok(DisplacementSolution {
        kind,
        schedule,
        span,
        repr,
    })
}

fn homogeneous(
    solution: &ClassicalSolution,
    schedule: &ParameterSchedule,
    c_u: f64,
    c_v: f64,
) -> Result<Repr> {
    let combine = |y: &[f64]| (c_u * y[0] + c_v * y[2], c_u * y[1] + c_v * y[3]);
    let rate_at = |t: f64| -> Result<f64> {
        let (y, _) = solution.state(t)?;
        let (x, p) = combine(&y);
        Ok(action_rate(schedule.mass(t), schedule.stiffness(t), x, p))
    };

    let traj = solution.trajectory();
    let times = traj.times();
    let mut delta = DenseTrajectory::new(1);
    let mut acc = 0.0;
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            let (a, b) = (times[k - 1], t);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let mut piece = 0.0;
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
                piece += w * rate_at(mid + half * x)?;
            }
            acc += half * piece;
        }
        let y = traj.node(k);
        let dy = traj.node_rate(k);
        let (x, p) = combine(y);
        let (xdot, pdot) = combine(dy);
        let m = schedule.mass(t);
        let k_t = schedule.stiffness(t);
        let rate = action_rate(m, k_t, x, p);
        let second = action_second_rate(
            m,
            schedule.mass_rate(t),
            k_t,
            schedule.stiffness_rate(t),
            x,
            p,
            xdot,
            pdot,
        );
        delta.push(t, &[acc], &[rate], &[second]);
    }
    Ok(Repr::Homogeneous {
        classical: solution.clone(),
        c_u,
        c_v,
        delta,
    })
}

impl DisplacementSolution {
    pub fn kind(&self) -> DisplacementKind {
        self.kind
    }

    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    pub fn eval(&self, t: f64) -> Result<DisplacementFrame> {
        let m = self.schedule.mass(t);
        match &self.repr {
            Repr::Homogeneous {
                classical,
                c_u,
                c_v,
                delta,
            } => {
                let (y, _) = classical.state(t)?;
                let mut d = [0.0];
                let mut dd = [0.0];
                delta.eval(t, &mut d, &mut dd);
                Ok(DisplacementFrame {
                    t,
                    value: c_u * y[0] + c_v * y[2],
                    derivative: (c_u * y[1] + c_v * y[3]) / m,
                    delta: d[0],
                })
            }
            Repr::Forced { trajectory } => {
                let (t0, t1) = self.span;
                let slack = 1e-12 * (1.0 + t0.abs().max(t1.abs()));
                if t.is_nan() || t < t0 - slack || t > t1 + slack {
                    return Err(Error::OutOfRange { t, start: t0, end: t1 });
                }
                let mut y = [0.0; 3];
                let mut dy = [0.0; 3];
                trajectory.eval(t, &mut y, &mut dy);
                Ok(DisplacementFrame {
                    t,
                    value: y[0],
                    derivative: y[1] / m,
                    delta: y[2],
                })
            }
        }
    }

    /// Residual of d/dt(M ẋ) + M w² x − F at `t` by central differences.
    pub fn equation_residual(&self, t: f64, step: f64) -> Result<f64> {
        let force = match self.kind {
            DisplacementKind::Homogeneous { .. } => 0.0,
            DisplacementKind::Forced { .. } => self.schedule.force(t),
        };
        let momentum = |s: f64| -> Result<f64> { Ok(self.schedule.mass(s) * self.eval(s)?.derivative) };
        let dp = (momentum(t + step)? - momentum(t - step)?) / (2.0 * step);
        Ok((dp + self.schedule.stiffness(t) * self.eval(t)?.value - force).abs())
    }
}

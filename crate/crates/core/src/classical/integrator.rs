//! Adaptive Dormand–Prince 5(4) integration with quintic Hermite dense output.
//!
//! The dense output stores value, first and second derivative at every
//! accepted node, so the interpolant is C² across nodes.

use crate::error::{Error, Result};

/// A first-order system `y' = f(t, y)` that can also report `y''`.
pub(crate) trait OdeSystem {
    fn dim(&self) -> usize;
    fn rate(&self, t: f64, y: &[f64], dy: &mut [f64]);
    /// Second derivative along the flow, given `y` and `dy = f(t, y)`.
    fn second_rate(&self, t: f64, y: &[f64], dy: &[f64], ddy: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

/// Piecewise quintic Hermite trajectory through accepted integrator nodes.
#[derive(Debug, Clone)]
pub(crate) struct DenseTrajectory {
    dim: usize,
    times: Vec<f64>,
    values: Vec<f64>,
    rates: Vec<f64>,
    second: Vec<f64>,
}

impl DenseTrajectory {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            times: Vec::new(),
            values: Vec::new(),
            rates: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, y: &[f64], dy: &[f64], ddy: &[f64]) {
        debug_assert_eq!(y.len(), self.dim);
        self.times.push(t);
        self.values.extend_from_slice(y);
        self.rates.extend_from_slice(dy);
        self.second.extend_from_slice(ddy);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn node_rate(&self, k: usize) -> &[f64] {
        &self.rates[k * self.dim..(k + 1) * self.dim]
    }

    pub fn node_second(&self, k: usize) -> &[f64] {
        &self.second[k * self.dim..(k + 1) * self.dim]
    }

    /// Index `k` of the interval `[t_k, t_{k+1}]` containing `t` (clamped).
    pub fn interval(&self, t: f64) -> usize {
        let n = self.times.len();
        if n < 2 {
            return 0;
        }
        self.times
            .partition_point(|s| *s <= t)
            .saturating_sub(1)
            .min(n - 2)
    }

    /// Interpolated value and first derivative at `t`.
    pub fn eval(&self, t: f64, y: &mut [f64], dy: &mut [f64]) {
        let k = self.interval(t);
        if self.times.len() == 1 {
            y.copy_from_slice(self.node(0));
            dy.copy_from_slice(self.node_rate(0));
            return;
        }
        let t0 = self.times[k];
        let h = self.times[k + 1] - t0;
        let s = (t - t0) / h;
        let (basis, dbasis) = quintic_basis(s);
        let (y0, y1) = (self.node(k), self.node(k + 1));
        let (d0, d1) = (self.node_rate(k), self.node_rate(k + 1));
        let (a0, a1) = (self.node_second(k), self.node_second(k + 1));
        let h2 = h * h;
        for i in 0..self.dim {
            let c = [
                y0[i],
                h * d0[i],
                h2 * a0[i],
                h2 * a1[i],
                h * d1[i],
                y1[i],
            ];
            y[i] = c.iter().zip(basis.iter()).map(|(c, b)| c * b).sum();
            dy[i] = c.iter().zip(dbasis.iter()).map(|(c, b)| c * b).sum::<f64>() / h;
        }
    }
}

/// Quintic Hermite basis on `s ∈ [0, 1]` and its `s`-derivative, ordered as
/// (p0, h·d0, h²·a0, h²·a1, h·d1, p1).
fn quintic_basis(s: f64) -> ([f64; 6], [f64; 6]) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let b = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
    ];
    let d = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
        1.5 * s2 - 4.0 * s3 + 2.5 * s4,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
    ];
    (b, d)
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `system` from `t0` to `t1` (t1 > t0). `guard(t_a, y_a, t_b, y_b)`
/// may veto an otherwise accepted step, which is then retried at half size.
pub(crate) fn integrate<S, G>(
    system: &S,
    t0: f64,
    t1: f64,
    y0: &[f64],
    control: StepControl,
    guard: G,
) -> Result<DenseTrajectory>
where
    S: OdeSystem,
    G: Fn(f64, &[f64], f64, &[f64]) -> bool,
{
    let n = system.dim();
    if y0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y0.len(),
        });
    }
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!(
            "integration span [{t0}, {t1}] is empty"
        )));
    }

    let mut out = DenseTrajectory::new(n);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut ddy = vec![0.0; n];
    system.rate(t, &y, &mut k[0]);
    system.second_rate(t, &y, &k[0], &mut ddy);
    out.push(t, &y, &k[0], &ddy);

    let mut h = control.max_step.min((t1 - t0) / 16.0).min(1e-3);
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut steps = 0usize;

    while t < t1 {
        steps += 1;
        if steps > control.max_steps {
            return Err(Error::Integration(format!(
                "exceeded {} steps before reaching t = {t1} (stalled at t = {t})",
                control.max_steps
            )));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            system.rate(t + C[s] * h, &stage, &mut k[s]);
        }
        // Stage 7 is evaluated at the 5th-order solution (FSAL).
        y_new.copy_from_slice(&stage);
        for i in 0..n {
            err[i] = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        }
        let norm = (err
            .iter()
            .zip(y.iter().zip(y_new.iter()))
            .map(|(e, (a, b))| {
                let sc = control.atol + control.rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / n as f64)
            .sqrt();
        if !norm.is_finite() {
            return Err(Error::Integration(format!("non-finite state near t = {t}")));
        }
        let t_next = if last { t1 } else { t + h };
        if norm <= 1.0 {
            if !guard(t, &y, t_next, &y_new) {
                h *= 0.5;
                if h < 1e-14 * (t1 - t0) {
                    return Err(Error::Integration(format!("step guard stalled at t = {t}")));
                }
                continue;
            }
            t = t_next;
            y.copy_from_slice(&y_new);
            let fsal = k[6].clone();
            k[0].copy_from_slice(&fsal);
            system.second_rate(t, &y, &k[0], &mut ddy);
            out.push(t, &y, &k[0], &ddy);
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(control.max_step);
        } else {
            h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
            if h < 1e-14 * (t1 - t0) {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
        }
    }
    Ok(out)
}

//! Cross-check of the classical solver against an independently coded
//! Cash–Karp 4(5) integrator run at a much tighter tolerance.

use calogero_coherent::classical::{solve_classical, InitialConditions};
use calogero_coherent::schedule::{ParameterSchedule, Profile};

/// State [u, M u̇, v, M v̇, τ].
fn rhs(s: &ParameterSchedule, omega: f64, t: f64, y: &[f64; 5]) -> [f64; 5] {
    let m = s.mass(t);
    let k = m * s.frequency_sq(t);
    let rho2 = y[0] * y[0] + y[2] * y[2];
    [y[1] / m, -k * y[0], y[3] / m, -k * y[2], omega / (m * rho2)]
}

fn cash_karp_step(s: &ParameterSchedule, omega: f64, t: f64, y: &[f64; 5], h: f64) -> ([f64; 5], f64) {
    const A: [[f64; 5]; 5] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0],
    ];
    const C: [f64; 6] = [0.0, 0.2, 0.3, 0.6, 1.0, 7.0 / 8.0];
    const B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
    const B4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ];
    let mut k = [[0.0; 5]; 6];
    k[0] = rhs(s, omega, t, y);
    for stage in 1..6 {
        let mut tmp = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            for i in 0..5 {
                tmp[i] += h * A[stage - 1][j] * kj[i];
            }
        }
        k[stage] = rhs(s, omega, t + C[stage] * h, &tmp);
    }
    let mut high = *y;
    let mut err: f64 = 0.0;
    for i in 0..5 {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for st in 0..6 {
            d5 += B5[st] * k[st][i];
            d4 += B4[st] * k[st][i];
        }
        high[i] += h * d5;
        err = err.max((h * (d5 - d4)).abs() / (1.0 + high[i].abs()));
    }
    (high, err)
}

/// Integrates from t0 to each target in turn, landing exactly on every target.
fn oracle(s: &ParameterSchedule, init: InitialConditions, t0: f64, targets: &[f64], tol: f64) -> Vec<[f64; 5]> {
    let m0 = s.mass(t0);
    let omega = m0 * (init.vdot0 * init.u0 - init.udot0 * init.v0);
    let mut y = [init.u0, m0 * init.udot0, init.v0, m0 * init.vdot0, 0.0];
    let mut t = t0;
    let mut h: f64 = 1e-3;
    let mut out = Vec::new();
    for &target in targets {
        while t < target {
            let step = h.min(target - t);
            let (next, err) = cash_karp_step(s, omega, t, &y, step);
            if err <= tol {
                t = if step == target - t { target } else { t + step };
                y = next;
            }
            let factor = if err == 0.0 { 4.0 } else { 0.9 * (tol / err).powf(0.2) };
            h = step * factor.clamp(0.2, 4.0);
        }
        out.push(y);
    }
    out
}

fn compare(schedule: ParameterSchedule, span: (f64, f64)) {
    let init = InitialConditions::new(1.0, 0.0, 0.0, 1.0);
    let solution = solve_classical(&schedule, init, span, 1e-12).unwrap();
    let targets: Vec<f64> = (1..=40).map(|k| span.0 + (span.1 - span.0) * k as f64 / 40.0).collect();
    let reference = oracle(&schedule, init, span.0, &targets, 1e-13);
    let m0 = schedule.mass(span.0);
    assert!((solution.omega() - m0).abs() < 1e-12);
    for (t, y) in targets.iter().zip(&reference) {
        let f = solution.frame_at(*t).unwrap();
        let m = schedule.mass(*t);
        assert!((f.u - y[0]).abs() < 1e-9, "u at {t}: {} vs {}", f.u, y[0]);
        assert!((f.v - y[2]).abs() < 1e-9, "v at {t}: {} vs {}", f.v, y[2]);
        assert!((f.udot - y[1] / m).abs() < 1e-9, "udot at {t}");
        assert!((f.vdot - y[3] / m).abs() < 1e-9, "vdot at {t}");
        assert!((f.tau - y[4]).abs() < 1e-9, "tau at {t}: {} vs {}", f.tau, y[4]);
    }
}

#[test]
fn modulated_frequency_matches_oracle() {
    compare(
        ParameterSchedule::new(Profile::constant(1.0), Profile::sinusoid(1.0, 0.5, 0.7, 0.0)),
        (0.0, 10.0),
    );
}

#[test]
fn varying_mass_matches_oracle() {
    compare(
        ParameterSchedule::new(Profile::sinusoid(1.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2), Profile::constant(1.0)),
        (0.0, 20.0),
    );
}

#[test]
fn oracle_reproduces_closed_form() {
    let s = ParameterSchedule::constant(1.0, 1.0);
    let y = oracle(&s, InitialConditions::new(1.0, 0.0, 0.0, 1.0), 0.0, &[3.0], 1e-13)[0];
    assert!((y[0] - 3f64.cos()).abs() < 1e-11);
    assert!((y[2] - 3f64.sin()).abs() < 1e-11);
    assert!((y[4] - 3.0).abs() < 1e-11);
}

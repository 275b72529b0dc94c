use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use super::scenario::{ClassicalSpec, ConstructionKind, MethodSpec, Scenario, TaskKind, TaskSpec};
use crate::classical::{
    solve_classical, solve_displacement, ClassicalSolution, DisplacementKind, DisplacementSolution,
    TrajectoryFrame,
};
use crate::error::Result;
use crate::models::ModelKind;
use crate::util::{derive_seed, fmt_f64};
use crate::verification::{
    buffered_configurations, buffered_points, default_buffer, density_scan, eigen_check,
    norm_estimate, residual_scan, QuadratureMethod, StencilSteps,
};
use crate::wavefunctions::{
    closed_form_density, semicircle_radius, CoherentState, ConstructionStep, EigenEvolution,
    StateEvaluator, StationaryState,
};

/// Environment variable selecting the default tolerance profile.
pub const TOLERANCE_PROFILE_VAR: &str = "COHERENT_CALOGERO_TOLERANCE_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    Strict,
    Relaxed,
}

impl ToleranceProfile {
    pub fn parse(value: &str) -> std::result::Result<Self, RunError> {
        match value {
            "strict" => Ok(Self::Strict),
            "relaxed" => Ok(Self::Relaxed),
            other => Err(RunError::Setup(format!(
                "{TOLERANCE_PROFILE_VAR} = `{other}`; expected strict or relaxed"
            ))),
        }
    }

    /// Reads the profile from the environment (strict when unset).
    pub fn from_env() -> std::result::Result<Self, RunError> {
        match std::env::var(TOLERANCE_PROFILE_VAR) {
            Ok(v) => Self::parse(v.trim()),
            Err(_) => Ok(Self::Strict),
        }
    }

    fn factor(self) -> f64 {
        match self {
            Self::Strict => 1.0,
            Self::Relaxed => 10.0,
        }
    }

    /// Default tolerance of a task kind.
    pub fn default_tolerance(self, kind: &TaskKind, model: ModelKind) -> f64 {
        let base = match kind {
            TaskKind::ResidualScan { .. } => 1e-5,
            TaskKind::NormDrift { .. } => 1e-3,
            TaskKind::Density { .. } if model == ModelKind::Sutherland => 0.1,
            TaskKind::Density { .. } => 1e-3,
            TaskKind::Trajectory { .. } => 1e-6,
            TaskKind::EigenCheck { .. } => 1e-5,
        };
        base * self.factor()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("setup failed: {0}")]
    Setup(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskSummary {
    pub name: String,
    pub kind: &'static str,
    pub passed: bool,
    pub tolerance: f64,
    pub seed: u64,
    pub metrics: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub tolerance_profile: ToleranceProfile,
    pub model: &'static str,
    pub construction: Vec<ConstructionStep>,
    pub all_passed: bool,
    pub tasks: Vec<TaskSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Summary,
    pub exit_code: i32,
}

struct Setup {
    classical: Option<Arc<ClassicalSolution>>,
    displacement: Option<Arc<DisplacementSolution>>,
    stationary: StationaryState,
    coherent: Option<CoherentState>,
}

fn setup(s: &Scenario) -> Result<Setup> {
    let c = &s.construction;
    let stationary = if c.boost != 0.0 {
        StationaryState::boosted(&s.model, c.boost)?
    } else {
        StationaryState::new(&s.model, c.quantum_number)?
    };
    let classical = match s.initial_conditions() {
        Some(init) => Some(Arc::new(solve_classical(
            &s.schedule,
            init,
            s.span,
            s.classical_tolerance,
        )?)),
        None => None,
    };
    let displacement = match (c.kind, &classical) {
        (ConstructionKind::SqueezeDisplacement, Some(cl)) => {
            let kind = match (c.displacement, &s.classical) {
                (Some((c_u, c_v)), _) if cl.swapped() => DisplacementKind::Homogeneous { c_u: c_v, c_v: c_u },
                (Some((c_u, c_v)), _) => DisplacementKind::Homogeneous { c_u, c_v },
                (None, Some(ClassicalSpec::Canonical(p))) => p.displacement(),
                _ => DisplacementKind::Homogeneous { c_u: 0.0, c_v: 0.0 },
            };
            Some(Arc::new(solve_displacement(cl, kind)?))
        }
        (ConstructionKind::Forced, Some(cl)) => {
            let (x0, xdot0) = c.forced_initial;
            Some(Arc::new(solve_displacement(cl, DisplacementKind::Forced { x0, xdot0 })?))
        }
        _ => None,
    };
    let coherent = match (c.kind, &classical) {
        (ConstructionKind::Stationary, _) | (_, None) => None,
        (_, Some(cl)) => Some(
            CoherentState::new(stationary.clone(), cl.clone(), displacement.clone())?
                .with_fault(c.fault),
        ),
    };
    Ok(Setup {
        classical,
        displacement,
        stationary,
        coherent,
    })
}

/// Result of one task before anything is written.
struct TaskResult {
    passed: bool,
    metrics: BTreeMap<&'static str, f64>,
    csv: Option<String>,
}

fn quadrature(method: MethodSpec, seed: u64) -> QuadratureMethod {
    match method {
        MethodSpec::Grid { points } => QuadratureMethod::Grid { points },
        MethodSpec::MonteCarlo { samples } => QuadratureMethod::MonteCarlo { samples, seed },
    }
}

fn row(cells: &[f64]) -> String {
    cells.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

fn coordinate_header(dims: usize) -> String {
    (1..=dims).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

fn identity_frame() -> TrajectoryFrame {
    TrajectoryFrame {
        t: 0.0,
        u: 1.0,
        v: 0.0,
        udot: 0.0,
        vdot: 1.0,
        rho: 1.0,
        rhodot: 0.0,
        tau: 0.0,
        theta: 0.0,
        omega: 1.0,
    }
}

fn run_task(s: &Scenario, env: &Setup, task: &TaskSpec, tolerance: f64, seed: u64) -> Result<TaskResult> {
    let evolving: Box<dyn StateEvaluator + '_> = match &env.coherent {
        Some(c) => Box::new(c.clone()),
        None => Box::new(EigenEvolution::new(env.stationary.clone())),
    };
    let frozen: &dyn StateEvaluator = match &env.coherent {
        Some(c) => c,
        None => &env.stationary,
    };
    let hbar = s.model.hbar;
    let dims = s.model.coordinate_count();
    let mut metrics = BTreeMap::new();
    match &task.kind {
        TaskKind::ResidualScan {
            points,
            times,
            buffer,
            time_step,
            space_step,
            halving,
        } => {
            let mut steps = StencilSteps::defaults(&s.schedule, s.span, hbar);
            if let Some(h) = time_step {
                steps.h_t = *h;
            }
            if let Some(h) = space_step {
                steps.h_x = *h;
            }
            let coarse = StencilSteps::relative(&s.schedule, s.span, hbar, 2e-3, 2e-3);
            let margin = if *halving { coarse.h_t.max(steps.h_t) } else { steps.h_t };
            let (mut a, mut b) = *times;
            if env.coherent.is_some() {
                a = a.max(s.span.0 + 1.01 * margin);
                b = b.min(s.span.1 - 1.01 * margin);
            }
            let buffer = buffer.unwrap_or(default_buffer(hbar));
            let pts = buffered_points(evolving.as_ref(), (a, b.max(a)), *points, buffer, seed)?;
            let report = residual_scan(evolving.as_ref(), &s.schedule, &pts, steps, buffer)?;
            let mut passed = report.residual_rel < tolerance;
            metrics.insert("residual_rel", report.residual_rel);
            metrics.insert("residual_abs", report.residual_abs);
            metrics.insert("h_t", report.h_t);
            metrics.insert("h_x", report.h_x);
            metrics.insert("buffer", report.buffer);
            if *halving {
                let r1 = residual_scan(evolving.as_ref(), &s.schedule, &pts, coarse, buffer)?;
                let r2 = residual_scan(evolving.as_ref(), &s.schedule, &pts, coarse.halved(), buffer)?;
                let ratio = r1.residual_abs / r2.residual_abs;
                metrics.insert("halving_ratio", ratio);
                passed &= (3.5..=4.5).contains(&ratio);
            }
            let mut csv = format!("t,{},residual_ratio,log_modulus,residual_rel\n", coordinate_header(dims));
            for p in &report.points {
                let mut cells = vec![p.t];
                cells.extend(&p.x);
                cells.extend([p.residual_ratio, p.log_modulus, p.residual_rel]);
                writeln!(csv, "{}", row(&cells)).unwrap();
            }
            Ok(TaskResult {
                passed,
                metrics,
                csv: Some(csv),
            })
        }
        TaskKind::NormDrift { times, method } => {
            let method = quadrature(*method, seed);
            let mut csv = String::from("t,norm,std_error\n");
            let mut values = Vec::new();
            for &t in times {
                let n = norm_estimate(frozen, t, method)?;
                writeln!(csv, "{}", row(&[t, n.value, n.std_error])).unwrap();
                values.push(n.value);
            }
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let drift = (max - min) / mean;
            metrics.insert("relative_drift", drift);
            metrics.insert("mean_norm", mean);
            Ok(TaskResult {
                passed: drift < tolerance,
                metrics,
                csv: Some(csv),
            })
        }
        TaskKind::Density {
            time,
            range,
            points,
            method,
        } => {
            let t = if env.coherent.is_some() { *time } else { 0.0 };
            let (frame, u_f) = match (&env.classical, &env.coherent) {
                (Some(cl), Some(_)) => {
                    let u_f = match &env.displacement {
                        Some(d) => d.eval(t)?.value,
                        None => 0.0,
                    };
                    (cl.frame_at(t)?, u_f)
                }
                _ => (identity_frame(), 0.0),
            };
            let closed = s.model.kind == ModelKind::Sutherland;
            let (lo, hi) = match range {
                Some(r) => *r,
                None => {
                    let g = crate::verification::geometry_of(frozen, t)?;
                    let reach = if closed {
                        g.1.max(1.2 * semicircle_radius(&s.model, &frame))
                    } else {
                        g.1
                    };
                    (g.0 - reach, g.0 + reach)
                }
            };
            let step = (hi - lo) / (*points - 1) as f64;
            let xs: Vec<f64> = (0..*points).map(|k| lo + k as f64 * step).collect();
            let scan = density_scan(frozen, t, &xs, quadrature(*method, seed))?;
            let integral = trapezoid(&scan.sigma, step);
            metrics.insert("integral", integral);
            metrics.insert("norm", scan.norm.value);
            if closed {
                let mut csv = String::from("x,sigma_closed,sigma_numeric,abs_diff\n");
                let mut diffs = Vec::with_capacity(xs.len());
                for (x, numeric) in xs.iter().zip(&scan.sigma) {
                    let c = closed_form_density(&s.model, &frame, u_f, *x)?;
                    let d = (c - numeric).abs();
                    diffs.push(d);
                    writeln!(csv, "{}", row(&[*x, c, *numeric, d])).unwrap();
                }
                let l1 = trapezoid(&diffs, step);
                metrics.insert("l1_distance", l1);
                metrics.insert("max_abs_diff", diffs.iter().cloned().fold(0.0, f64::max));
                Ok(TaskResult {
                    passed: l1 < tolerance,
                    metrics,
                    csv: Some(csv),
                })
            } else {
                let mut csv = String::from("x,sigma,err\n");
                for k in 0..xs.len() {
                    writeln!(csv, "{}", row(&[xs[k], scan.sigma[k], scan.err[k]])).unwrap();
                }
                let n = s.model.n_particles as f64;
                let mass_error = (integral - n).abs() / n;
                metrics.insert("mass_error", mass_error);
                Ok(TaskResult {
                    passed: mass_error < tolerance,
                    metrics,
                    csv: Some(csv),
                })
            }
        }
        TaskKind::Trajectory { times, points } => {
            let cl = env
                .classical
                .as_ref()
                .ok_or_else(|| crate::Error::InvalidParameter("no classical solution".into()))?;
            let (a, b) = *times;
            let ts: Vec<f64> = (0..*points)
                .map(|k| a + (b - a) * k as f64 / (*points - 1) as f64)
                .collect();
            let mut buf = Vec::new();
            cl.write_csv(&mut buf, &ts)
                .map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
            let step = 1e-5 / s.schedule.typical_frequency(s.span).max(1.0);
            let mut ermakov: f64 = 0.0;
            let mut increasing = true;
            let mut last_tau = f64::NEG_INFINITY;
            for &t in &ts {
                let tc = t.clamp(s.span.0 + step, s.span.1 - step);
                ermakov = ermakov.max(cl.ermakov_residual(tc, step)?);
                let tau = cl.frame_at(t)?.tau;
                increasing &= tau > last_tau;
                last_tau = tau;
            }
            let drift = cl.wronskian_drift();
            metrics.insert("wronskian_drift", drift);
            metrics.insert("ermakov_residual", ermakov);
            metrics.insert("tau_increasing", if increasing { 1.0 } else { 0.0 });
            Ok(TaskResult {
                passed: ermakov < tolerance && drift < 1e-2 * tolerance && increasing,
                metrics,
                csv: Some(String::from_utf8(buf).expect("CSV is ASCII")),
            })
        }
        TaskKind::EigenCheck {
            points,
            buffer,
            expected,
        } => {
            let buffer = buffer.unwrap_or(default_buffer(hbar));
            let samples = buffered_configurations(&env.stationary, 0.0, *points, buffer, seed)?;
            let estimate = eigen_check(&env.stationary, &samples)?;
            let target = expected.unwrap_or(env.stationary.energy());
            let scale = target.abs().max(f64::MIN_POSITIVE);
            let error = (estimate.energy - target).abs() / scale;
            metrics.insert("energy", estimate.energy);
            metrics.insert("expected", target);
            metrics.insert("relative_error", error);
            metrics.insert("relative_spread", estimate.spread / scale);
            metrics.insert("skipped", estimate.skipped as f64);
            let mut csv = format!("{},local_energy\n", coordinate_header(dims));
            for (x, e) in samples.iter().zip(&estimate.local_energies) {
                let mut cells = x.clone();
                cells.push(e.unwrap_or(f64::NAN));
                writeln!(csv, "{}", row(&cells)).unwrap();
            }
            Ok(TaskResult {
                passed: error < tolerance && estimate.spread < tolerance * scale,
                metrics,
                csv: Some(csv),
            })
        }
    }
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    step * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

/// Runs every task, then writes `summary.json` and one CSV per task into `out`.
/// Nothing is written when setup fails.
pub fn run_scenario(
    scenario: &Scenario,
    out: &Path,
    seed: u64,
    profile: ToleranceProfile,
) -> std::result::Result<RunOutcome, RunError> {
    let env = setup(scenario).map_err(|e| RunError::Setup(e.to_string()))?;
    let construction = match &env.coherent {
        Some(c) => c.construction(),
        None => env.stationary.construction(),
    };
    let mut files = Vec::new();
    let mut tasks = Vec::new();
    for (index, task) in scenario.tasks.iter().enumerate() {
        let tolerance = task
            .tolerance
            .unwrap_or_else(|| profile.default_tolerance(&task.kind, scenario.model.kind));
        let task_seed = task.seed.unwrap_or_else(|| derive_seed(seed, index as u64));
        log::info!("running task {} ({})", task.name, task.kind.name());
        let mut summary = TaskSummary {
            name: task.name.clone(),
            kind: task.kind.name(),
            passed: false,
            tolerance,
            seed: task_seed,
            metrics: BTreeMap::new(),
            csv: None,
            error: None,
        };
        match run_task(scenario, &env, task, tolerance, task_seed) {
            Ok(result) => {
                summary.passed = result.passed;
                summary.metrics = result.metrics;
                if let Some(csv) = result.csv {
                    let name = format!("{}.csv", task.name);
                    summary.csv = Some(name.clone());
                    files.push((name, csv));
                }
            }
            Err(e) => {
                log::warn!("task {} failed: {e}", task.name);
                summary.error = Some(e.to_string());
            }
        }
        log::info!("task {}: {}", task.name, if summary.passed { "pass" } else { "FAIL" });
        tasks.push(summary);
    }
    let all_passed = tasks.iter().all(|t| t.passed);
    let summary = Summary {
        seed,
        tolerance_profile: profile,
        model: scenario.model.kind.name(),
        construction,
        all_passed,
        tasks,
    };
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io(out))?;
    for (name, csv) in &files {
        let path = out.join(name);
        std::fs::write(&path, csv).map_err(io(&path))?;
    }
    let json = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";
    let path = out.join("summary.json");
    std::fs::write(&path, json).map_err(io(&path))?;
    Ok(RunOutcome {
        exit_code: if all_passed { 0 } else { 1 },
        summary,
    })
}

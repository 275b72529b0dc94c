use std::path::Path;

use super::ini::{parse_ini, Diagnostic, Entry, Section};
use crate::classical::{canonical_frame, CanonicalParameters, InitialConditions};
use crate::models::{ModelKind, ModelSpec};
use crate::schedule::{CubicSpline, ParameterSchedule, PiecewisePolynomial, Profile};
use crate::wavefunctions::Fault;

#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalSpec {
    Initial(InitialConditions),
    Canonical(CanonicalParameters),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    Stationary,
    Squeeze,
    SqueezeDisplacement,
    Forced,
}

impl ConstructionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::Stationary => "stationary",
            ConstructionKind::Squeeze => "squeeze",
            ConstructionKind::SqueezeDisplacement => "squeeze+displacement",
            ConstructionKind::Forced => "forced",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub quantum_number: usize,
    pub boost: f64,
    /// (c_u, c_v) for squeeze+displacement; taken from B, β in canonical mode when absent.
    pub displacement: Option<(f64, f64)>,
    /// (x_p(t_0), ẋ_p(t_0)) for the forced construction.
    pub forced_initial: (f64, f64),
    pub fault: Fault,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Grid { points: usize },
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskKind {
    ResidualScan {
        points: usize,
        times: (f64, f64),
        buffer: Option<f64>,
        time_step: Option<f64>,
        space_step: Option<f64>,
        halving: bool,
    },
    NormDrift {
        times: Vec<f64>,
        method: MethodSpec,
    },
    Density {
        time: f64,
        range: Option<(f64, f64)>,
        points: usize,
        method: MethodSpec,
    },
    Trajectory {
        times: (f64, f64),
        points: usize,
    },
    EigenCheck {
        points: usize,
        buffer: Option<f64>,
        expected: Option<f64>,
    },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::ResidualScan { .. } => "residual-scan",
            TaskKind::NormDrift { .. } => "norm-drift",
            TaskKind::Density { .. } => "density",
            TaskKind::Trajectory { .. } => "trajectory",
            TaskKind::EigenCheck { .. } => "eigen-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub name: String,
    pub kind: TaskKind,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub span: (f64, f64),
    pub schedule: ParameterSchedule,
    pub model: ModelSpec,
    pub classical: Option<ClassicalSpec>,
    pub classical_tolerance: f64,
    pub construction: ConstructionSpec,
    pub tasks: Vec<TaskSpec>,
}

impl Scenario {
    /// Initial data at the start of the span.
    pub fn initial_conditions(&self) -> Option<InitialConditions> {
        match &self.classical {
            Some(ClassicalSpec::Initial(init)) => Some(*init),
            Some(ClassicalSpec::Canonical(p)) => {
                let (frame, _) = canonical_frame(p, self.span.0).ok()?;
                Some(InitialConditions::new(frame.u, frame.udot, frame.v, frame.vdot))
            }
            None => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{}", render(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let sections = parse_ini(text).map_err(ScenarioError::Invalid)?;
    let mut errors = Vec::new();
    let scenario = build(sections, &mut errors);
    match scenario {
        Some(s) if errors.is_empty() => Ok(s),
        _ => {
            if errors.is_empty() {
                errors.push(Diagnostic::general("invalid scenario"));
            }
            Err(ScenarioError::Invalid(errors))
        }
    }
}

/// Typed access to one section; every problem is recorded, not returned.
struct Reader<'a> {
    section: Section,
    errors: &'a mut Vec<Diagnostic>,
}

impl<'a> Reader<'a> {
    fn new(section: Section, errors: &'a mut Vec<Diagnostic>) -> Self {
        Self { section, errors }
    }

    fn line(&self) -> usize {
        self.section.line
    }

    fn raw(&mut self, key: &str, required: bool) -> Option<Entry> {
        let entry = self.section.take(key);
        if entry.is_none() && required {
            self.errors.push(Diagnostic::at(
                self.section.line,
                format!("[{}] is missing required key `{key}`", self.section.name),
            ));
        }
        entry
    }

    fn fail(&mut self, line: usize, message: String) {
        self.errors.push(Diagnostic::at(line, message));
    }

    fn parsed<T>(&mut self, key: &str, required: bool, parse: impl Fn(&str) -> Result<T, String>) -> Option<(T, usize)> {
        let entry = self.raw(key, required)?;
        match parse(&entry.value) {
            Ok(v) => Some((v, entry.line)),
            Err(message) => {
                self.fail(entry.line, format!("`{key}`: {message}"));
                None
            }
        }
    }

    fn f64(&mut self, key: &str, required: bool) -> Option<f64> {
        self.parsed(key, required, parse_f64).map(|(v, _)| v)
    }

    fn usize(&mut self, key: &str, required: bool) -> Option<usize> {
        self.parsed(key, required, |s| {
            s.parse::<usize>().map_err(|_| format!("expected a non-negative integer, found `{s}`"))
        })
        .map(|(v, _)| v)
    }

    fn u64(&mut self, key: &str) -> Option<u64> {
        self.parsed(key, false, |s| {
            s.parse::<u64>().map_err(|_| format!("expected an unsigned integer, found `{s}`"))
        })
        .map(|(v, _)| v)
    }

    fn bool(&mut self, key: &str) -> Option<bool> {
        self.parsed(key, false, |s| match s {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(format!("expected true or false, found `{s}`")),
        })
        .map(|(v, _)| v)
    }

    fn pair(&mut self, key: &str, required: bool) -> Option<(f64, f64)> {
        self.parsed(key, required, |s| {
            let v = parse_list(s)?;
            match v.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(format!("expected two numbers, found {}", v.len())),
            }
        })
        .map(|(v, _)| v)
    }

    fn list(&mut self, key: &str, required: bool) -> Option<Vec<f64>> {
        self.parsed(key, required, parse_list).map(|(v, _)| v)
    }

    fn word(&mut self, key: &str, required: bool) -> Option<(String, usize)> {
        self.parsed(key, required, |s| Ok(s.to_string()))
    }

    fn profile(&mut self, key: &str, required: bool) -> Option<Profile> {
        self.parsed(key, required, parse_profile).map(|(v, _)| v)
    }

    /// Reports every key that was not consumed.
    fn finish(self) {
        let name = self.section.name.clone();
        for (key, line) in self.section.leftovers() {
            self.errors
                .push(Diagnostic::at(line, format!("unknown key `{key}` in [{name}]")));
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, found `{s}`")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace().map(parse_f64).collect()
}

/// `constant V`, `sinusoid OFFSET AMP ANGULAR PHASE`,
/// `polynomial START:c0,c1,...; START:c0,...` or `table t:v t:v ...`.
fn parse_profile(s: &str) -> Result<Profile, String> {
    let (kind, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    let rest = rest.trim();
    match kind {
        "constant" => Ok(Profile::constant(parse_f64(rest)?)),
        "sinusoid" => match parse_list(rest)?.as_slice() {
            [o, a, w, p] => Ok(Profile::sinusoid(*o, *a, *w, *p)),
            v => Err(format!("sinusoid takes 4 numbers, found {}", v.len())),
        },
        "polynomial" => {
            let mut starts = Vec::new();
            let mut coefficients = Vec::new();
            for piece in rest.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (start, coeffs) = piece
                    .split_once(':')
                    .ok_or_else(|| format!("polynomial piece `{piece}` needs START:c0,c1,..."))?;
                starts.push(parse_f64(start.trim())?);
                coefficients.push(
                    coeffs
                        .split(',')
                        .map(|c| parse_f64(c.trim()))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            PiecewisePolynomial::new(starts, coefficients)
                .map(Profile::Piecewise)
                .map_err(|e| e.to_string())
        }
        "table" => {
            let mut times = Vec::new();
            let mut values = Vec::new();
            for item in rest.split_whitespace() {
                let (t, v) = item
                    .split_once(':')
                    .ok_or_else(|| format!("table entry `{item}` needs t:v"))?;
                times.push(parse_f64(t)?);
                values.push(parse_f64(v)?);
            }
            CubicSpline::new(times, values)
                .map(Profile::Table)
                .map_err(|e| e.to_string())
        }
        other => Err(format!(
            "unknown profile `{other}` (expected constant, sinusoid, polynomial or table)"
        )),
    }
}

fn build(sections: Vec<Section>, errors: &mut Vec<Diagnostic>) -> Option<Scenario> {
    let mut schedule_s = None;
    let mut model_s = None;
    let mut classical_s = None;
    let mut construction_s = None;
    let mut task_sections = Vec::new();
    for section in sections {
        match section.name.as_str() {
            "schedule" => schedule_s = Some(section),
            "model" => model_s = Some(section),
            "classical" => classical_s = Some(section),
            "construction" => construction_s = Some(section),
            name if name.starts_with("task.") && name.len() > 5 => task_sections.push(section),
            name => errors.push(Diagnostic::at(
                section.line,
                format!(
                    "unknown section [{name}] (expected schedule, model, classical, construction or task.NAME)"
                ),
            )),
        }
    }
    for (name, present) in [
        ("schedule", schedule_s.is_some()),
        ("model", model_s.is_some()),
        ("construction", construction_s.is_some()),
    ] {
        if !present {
            errors.push(Diagnostic::general(format!("missing section [{name}]")));
        }
    }
    if task_sections.is_empty() {
        errors.push(Diagnostic::general("no [task.NAME] sections"));
    }

    let schedule = schedule_s.map(|s| read_schedule(s, errors));
    let model = model_s.and_then(|s| read_model(s, errors));
    let classical = classical_s.map(|s| read_classical(s, errors));
    let construction = construction_s.and_then(|s| read_construction(s, errors));
    let tasks: Vec<Option<TaskSpec>> = task_sections
        .into_iter()
        .map(|s| read_task(s, errors))
        .collect();

    let (span, schedule, schedule_line) = schedule??;
    let model = model?;
    let (construction, construction_line) = construction?;
    let (classical, classical_tolerance, classical_line) = match classical {
        Some(c) => {
            let (spec, tol, line) = c?;
            (Some(spec), tol, Some(line))
        }
        None => (None, 1e-12, None),
    };
    let tasks: Vec<TaskSpec> = tasks.into_iter().collect::<Option<_>>()?;

    let scenario = Scenario {
        span,
        schedule,
        model,
        classical,
        classical_tolerance,
        construction,
        tasks,
    };
    validate(&scenario, schedule_line, construction_line, classical_line, errors);
    Some(scenario)
}

type ScheduleBlock = Option<((f64, f64), ParameterSchedule, usize)>;

fn read_schedule(section: Section, errors: &mut Vec<Diagnostic>) -> ScheduleBlock {
    let mut r = Reader::new(section, errors);
    let line = r.line();
    let span = r.pair("span", true);
    let mass = r.profile("mass", false).unwrap_or(Profile::constant(1.0));
    let frequency_sq = r.profile("frequency_sq", true);
    let force = r.profile("force", false);
    r.finish();
    let span = span?;
    if !(span.1 > span.0) {
        errors.push(Diagnostic::at(line, format!("span [{}, {}] is empty", span.0, span.1)));
        return None;
    }
    let mut schedule = ParameterSchedule::new(mass, frequency_sq?);
    if let Some(force) = force {
        schedule = schedule.with_force(force);
    }
    Some((span, schedule, line))
}

fn read_model(section: Section, errors: &mut Vec<Diagnostic>) -> Option<ModelSpec> {
    let mut r = Reader::new(section, errors);
    let line = r.line();
    let kind = r.word("kind", true);
    let n = r.usize("n", false);
    let lambda = r.f64("lambda", true);
    let alpha = r.f64("alpha", false);
    let length = r.f64("length", false);
    let hbar = r.f64("hbar", false).unwrap_or(1.0);
    let weak = r.bool("allow_weak_coupling").unwrap_or(false);
    let exclusion = r.f64("exclusion", false).unwrap_or(crate::models::DEFAULT_EXCLUSION);
    let (kind, kind_line) = kind?;
    let lambda = lambda?;
    let kind = match kind.as_str() {
        "sutherland" => ModelKind::Sutherland,
        "three_body" => ModelKind::ThreeBody,
        "jacobi_calogero" => ModelKind::JacobiCalogero,
        "trigonometric" => ModelKind::Trigonometric,
        other => {
            r.fail(
                kind_line,
                format!("unknown model `{other}` (sutherland, three_body, jacobi_calogero, trigonometric)"),
            );
            r.finish();
            return None;
        }
    };
    if kind != ModelKind::ThreeBody && alpha.is_some() {
        r.fail(line, "`alpha` applies only to three_body".into());
    }
    if kind != ModelKind::Trigonometric && length.is_some() {
        r.fail(line, "`length` applies only to trigonometric".into());
    }
    let n = match (kind, n) {
        (ModelKind::ThreeBody, None) => 3,
        (_, Some(n)) => n,
        (_, None) => {
            r.fail(line, "[model] is missing required key `n`".into());
            r.finish();
            return None;
        }
    };
    let spec = ModelSpec {
        kind,
        n_particles: n,
        lambda,
        alpha: alpha.unwrap_or(if kind == ModelKind::ThreeBody { f64::NAN } else { 1.0 }),
        circle_length: length.unwrap_or(2.0 * std::f64::consts::PI),
        hbar,
        allow_weak_coupling: weak,
        exclusion,
    };
    if kind == ModelKind::ThreeBody && alpha.is_none() {
        r.fail(line, "three_body needs `alpha`".into());
        r.finish();
        return None;
    }
    r.finish();
    match spec.validate() {
        Ok(()) => Some(spec),
        Err(e) => {
            errors.push(Diagnostic::at(line, e.to_string()));
            None
        }
    }
}

fn read_classical(section: Section, errors: &mut Vec<Diagnostic>) -> Option<(ClassicalSpec, f64, usize)> {
    let mut r = Reader::new(section, errors);
    let line = r.line();
    let mode = r.word("mode", false).unwrap_or(("initial".into(), line));
    let tolerance = r.f64("tolerance", false).unwrap_or(1e-12);
    if !(tolerance > 0.0) {
        r.fail(line, format!("tolerance {tolerance} must be positive"));
    }
    let spec = match mode.0.as_str() {
        "initial" => {
            let u0 = r.f64("u0", true);
            let udot0 = r.f64("udot0", true);
            let v0 = r.f64("v0", true);
            let vdot0 = r.f64("vdot0", true);
            match (u0, udot0, v0, vdot0) {
                (Some(a), Some(b), Some(c), Some(d)) => {
                    Some(ClassicalSpec::Initial(InitialConditions::new(a, b, c, d)))
                }
                _ => None,
            }
        }
        "canonical" => {
            let a = r.f64("A", true);
            let alpha = r.f64("alpha", true);
            let b = r.f64("B", false).unwrap_or(0.0);
            let beta = r.f64("beta", false).unwrap_or(0.0);
            let t0 = r.f64("t0", false).unwrap_or(0.0);
            match CanonicalParameters::new(a?, alpha?, b, beta, t0) {
                Ok(p) => Some(ClassicalSpec::Canonical(p)),
                Err(e) => {
                    r.fail(line, e.to_string());
                    None
                }
            }
        }
        other => {
            r.fail(mode.1, format!("unknown classical mode `{other}` (initial or canonical)"));
            None
        }
    };
    r.finish();
    Some((spec?, tolerance, line))
}

fn read_construction(section: Section, errors: &mut Vec<Diagnostic>) -> Option<(ConstructionSpec, usize)> {
    let mut r = Reader::new(section, errors);
    let line = r.line();
    let kind = r.word("kind", true);
    let quantum_number = r.usize("quantum_number", false).unwrap_or(0);
    let boost = r.f64("boost", false).unwrap_or(0.0);
    let displacement = r.pair("displacement", false);
    let forced_initial = r.pair("forced_initial", false);
    let fault = r.word("fault", false);
    let (kind, kind_line) = kind?;
    let kind = match kind.as_str() {
        "stationary" => ConstructionKind::Stationary,
        "squeeze" => ConstructionKind::Squeeze,
        "squeeze+displacement" => ConstructionKind::SqueezeDisplacement,
        "forced" => ConstructionKind::Forced,
        other => {
            r.fail(
                kind_line,
                format!("unknown construction `{other}` (stationary, squeeze, squeeze+displacement, forced)"),
            );
            r.finish();
            return None;
        }
    };
    let fault = match fault {
        None => Fault::None,
        Some((f, l)) => match f.as_str() {
            "none" => Fault::None,
            "zero-delta" => Fault::ZeroDelta,
            "drop-chirp" => Fault::DropChirp,
            "principal-branch" => Fault::PrincipalBranch,
            other => {
                r.fail(
                    l,
                    format!("unknown fault `{other}` (none, zero-delta, drop-chirp, principal-branch)"),
                );
                Fault::None
            }
        },
    };
    if displacement.is_some() && kind != ConstructionKind::SqueezeDisplacement {
        r.fail(line, "`displacement` applies only to squeeze+displacement".into());
    }
    if forced_initial.is_some() && kind != ConstructionKind::Forced {
        r.fail(line, "`forced_initial` applies only to forced".into());
    }
    r.finish();
    Some((
        ConstructionSpec {
            kind,
            quantum_number,
            boost,
            displacement,
            forced_initial: forced_initial.unwrap_or((0.0, 0.0)),
            fault,
        },
        line,
    ))
}

fn read_method(r: &mut Reader<'_>) -> Option<MethodSpec> {
    let method = r.word("method", false).unwrap_or(("grid".into(), r.line()));
    let resolution = r.usize("resolution", false);
    let samples = r.usize("samples", false);
    match method.0.as_str() {
        "grid" => {
            if samples.is_some() {
                r.fail(method.1, "`samples` applies to method = monte_carlo".into());
            }
            Some(MethodSpec::Grid {
                points: resolution.unwrap_or(200),
            })
        }
        "monte_carlo" => {
            if resolution.is_some() {
                r.fail(method.1, "`resolution` applies to method = grid".into());
            }
            Some(MethodSpec::MonteCarlo {
                samples: samples.unwrap_or(200_000),
            })
        }
        other => {
            r.fail(method.1, format!("unknown method `{other}` (grid or monte_carlo)"));
            None
        }
    }
}

fn read_task(section: Section, errors: &mut Vec<Diagnostic>) -> Option<TaskSpec> {
    let name = section.name["task.".len()..].to_string();
    let mut r = Reader::new(section, errors);
    let line = r.line();
    if !name
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        r.fail(line, format!("task name `{name}` may only use letters, digits, '-' and '_'"));
    }
    let kind = r.word("kind", true);
    let tolerance = r.f64("tolerance", false);
    let seed = r.u64("seed");
    let Some((kind, kind_line)) = kind else {
        r.finish();
        return None;
    };
    let kind = match kind.as_str() {
        "residual-scan" => TaskKind::ResidualScan {
            points: r.usize("points", false).unwrap_or(50),
            times: r.pair("times", true)?,
            buffer: r.f64("buffer", false),
            time_step: r.f64("time_step", false),
            space_step: r.f64("space_step", false),
            halving: r.bool("halving").unwrap_or(false),
        },
        "norm-drift" => TaskKind::NormDrift {
            times: r.list("times", true)?,
            method: read_method(&mut r)?,
        },
        "density" => TaskKind::Density {
            time: r.f64("time", false).unwrap_or(0.0),
            range: r.pair("range", false),
            points: r.usize("points", false).unwrap_or(101),
            method: read_method(&mut r)?,
        },
        "trajectory" => TaskKind::Trajectory {
            times: r.pair("times", true)?,
            points: r.usize("points", false).unwrap_or(201),
        },
        "eigen-check" => TaskKind::EigenCheck {
            points: r.usize("points", false).unwrap_or(50),
            buffer: r.f64("buffer", false),
            expected: r.f64("expected", false),
        },
        other => {
            r.fail(
                kind_line,
                format!(
                    "unknown task kind `{other}` (residual-scan, norm-drift, density, trajectory, eigen-check)"
                ),
            );
            r.finish();
            return None;
        }
    };
    if let Some(t) = tolerance {
        if !(t > 0.0) {
            r.fail(line, format!("tolerance {t} must be positive"));
        }
    }
    r.finish();
    Some(TaskSpec {
        name,
        kind,
        tolerance,
        seed,
    })
}

fn validate(
    s: &Scenario,
    schedule_line: usize,
    construction_line: usize,
    classical_line: Option<usize>,
    errors: &mut Vec<Diagnostic>,
) {
    let at = |line: usize, m: String| Diagnostic::at(line, m);
    if let Err(e) = s.schedule.check_positive_mass(s.span) {
        errors.push(at(schedule_line, e.to_string()));
    }
    let c = &s.construction;
    let model = &s.model;
    let kind = c.kind;
    let needs_classical = kind != ConstructionKind::Stationary;
    if needs_classical && s.classical.is_none() {
        errors.push(at(
            construction_line,
            format!("construction `{}` needs a [classical] section", kind.name()),
        ));
    }
    if model.kind == ModelKind::JacobiCalogero
        && matches!(kind, ConstructionKind::SqueezeDisplacement | ConstructionKind::Forced)
    {
        errors.push(at(
            construction_line,
            format!(
                "construction `{}` is not available for jacobi_calogero: only the squeeze-type \
                 map applies, because the Jacobi-coordinate interaction does not describe \
                 identical particles and is not a function of coordinate differences",
                kind.name()
            ),
        ));
    }
    if model.kind == ModelKind::Trigonometric && needs_classical {
        errors.push(at(
            construction_line,
            format!(
                "construction `{}` is not available for trigonometric: its interaction is not \
                 homogeneous of degree -2, so only the stationary state and the Galilei boost apply",
                kind.name()
            ),
        ));
    }
    if c.boost != 0.0 && (model.kind != ModelKind::Trigonometric || needs_classical) {
        errors.push(at(
            construction_line,
            "`boost` applies only to stationary trigonometric states".into(),
        ));
    }
    if c.boost != 0.0 && c.quantum_number != 0 {
        errors.push(at(construction_line, "`boost` applies to the ground state only".into()));
    }
    if let Err(e) = model.energy(c.quantum_number) {
        errors.push(at(construction_line, e.to_string()));
    }
    if kind == ConstructionKind::SqueezeDisplacement
        && c.displacement.is_none()
        && !matches!(s.classical, Some(ClassicalSpec::Canonical(_)))
    {
        errors.push(at(
            construction_line,
            "squeeze+displacement needs `displacement = c_u c_v` (or canonical B, beta)".into(),
        ));
    }
    if c.fault != Fault::None {
        if !needs_classical {
            errors.push(at(construction_line, "faults apply to coherent constructions only".into()));
        }
        if c.fault == Fault::ZeroDelta && kind == ConstructionKind::Squeeze {
            errors.push(at(
                construction_line,
                "fault `zero-delta` needs a displacement or forced construction".into(),
            ));
        }
    }
    if kind != ConstructionKind::Forced && !s.schedule.force.is_identically_zero() {
        errors.push(at(
            schedule_line,
            "a nonzero force needs the `forced` construction".into(),
        ));
    }
    if let Some(ClassicalSpec::Canonical(_)) = &s.classical {
        let unit = |p: &Profile| matches!(p, Profile::Constant { value } if *value == 1.0);
        if !unit(&s.schedule.mass) || !unit(&s.schedule.frequency_sq) {
            errors.push(at(
                classical_line.unwrap_or(schedule_line),
                "canonical mode describes M = 1, w² = 1; set mass and frequency_sq to `constant 1`".into(),
            ));
        }
        if kind == ConstructionKind::SqueezeDisplacement && c.displacement.is_some() {
            errors.push(at(
                construction_line,
                "canonical mode fixes the displacement through B and beta; remove `displacement`".into(),
            ));
        }
    }
    let (t0, t1) = s.span;
    let inside = |t: f64| t >= t0 && t <= t1;
    let mut names = std::collections::BTreeSet::new();
    for task in &s.tasks {
        let m = |msg: String| Diagnostic::general(format!("[task.{}]: {msg}", task.name));
        if !names.insert(task.name.as_str()) {
            errors.push(m("duplicate task name".into()));
        }
        match &task.kind {
            TaskKind::ResidualScan {
                points,
                times,
                buffer,
                time_step,
                space_step,
                ..
            } => {
                if *points == 0 {
                    errors.push(m("points must be positive".into()));
                }
                if !(inside(times.0) && inside(times.1) && times.1 >= times.0) {
                    errors.push(m(format!("times [{}, {}] must lie inside the span", times.0, times.1)));
                }
                for (label, v) in [("buffer", buffer), ("time_step", time_step), ("space_step", space_step)] {
                    if let Some(v) = v {
                        if !(*v > 0.0) {
                            errors.push(m(format!("{label} must be positive")));
                        }
                    }
                }
                if let (Some(b), Some(h)) = (buffer, space_step) {
                    if b <= h {
                        errors.push(m("buffer must exceed space_step".into()));
                    }
                }
                if let Some(h) = time_step {
                    if needs_classical && (times.0 - h < t0 || times.1 + h > t1) {
                        errors.push(m("the time stencil leaves the span".into()));
                    }
                }
                if model.kind == ModelKind::Trigonometric && !s.schedule.frequency_sq.is_identically_zero() {
                    errors.push(m("the trigonometric model evolves without a trap; set frequency_sq = constant 0".into()));
                }
            }
            TaskKind::NormDrift { times, method } => {
                if times.len() < 2 {
                    errors.push(m("norm-drift needs at least two times".into()));
                }
                if needs_classical && times.iter().any(|t| !inside(*t)) {
                    errors.push(m("every time must lie inside the span".into()));
                }
                check_method(method, model, &m, errors);
            }
            TaskKind::Density {
                time,
                range,
                points,
                method,
            } => {
                if needs_classical && !inside(*time) {
                    errors.push(m(format!("time {time} lies outside the span")));
                }
                if *points < 2 {
                    errors.push(m("density needs at least two points".into()));
                }
                if let Some((a, b)) = range {
                    if !(b > a) {
                        errors.push(m("range must be increasing".into()));
                    }
                }
                if model.kind == ModelKind::JacobiCalogero && matches!(method, MethodSpec::Grid { .. }) {
                    errors.push(m("jacobi_calogero densities need method = monte_carlo".into()));
                }
                check_method(method, model, &m, errors);
            }
            TaskKind::Trajectory { times, points } => {
                if s.classical.is_none() {
                    errors.push(m("trajectory needs a [classical] section".into()));
                }
                if !(inside(times.0) && inside(times.1) && times.1 > times.0) {
                    errors.push(m("times must be an increasing pair inside the span".into()));
                }
                if *points < 3 {
                    errors.push(m("trajectory needs at least three points".into()));
                }
            }
            TaskKind::EigenCheck { points, buffer, .. } => {
                if needs_classical {
                    errors.push(m("eigen-check needs the stationary construction".into()));
                }
                if *points == 0 {
                    errors.push(m("points must be positive".into()));
                }
                if let Some(b) = buffer {
                    if !(*b > 0.0) {
                        errors.push(m("buffer must be positive".into()));
                    }
                }
            }
        }
    }
}

fn check_method(
    method: &MethodSpec,
    model: &ModelSpec,
    m: &dyn Fn(String) -> Diagnostic,
    errors: &mut Vec<Diagnostic>,
) {
    match method {
        MethodSpec::Grid { points } => {
            if model.coordinate_count() > crate::verification::GRID_MAX_DIMS {
                errors.push(m(format!(
                    "grid quadrature supports at most {} coordinates; use method = monte_carlo",
                    crate::verification::GRID_MAX_DIMS
                )));
            }
            if *points < 8 {
                errors.push(m("resolution must be at least 8".into()));
            }
        }
        MethodSpec::MonteCarlo { samples } => {
            if *samples < 2 {
                errors.push(m("samples must be at least 2".into()));
            }
        }
    }
}

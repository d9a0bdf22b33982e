use std::f64::consts::PI;
use std::path::PathBuf;

use serde::Serialize;
use toml::{Table, Value};

use crate::frackernel::{default_grading, TimeGrid};
use crate::solver::{HistoryBackend, Mode, ProblemSpec, SolverOptions, Source};
use crate::spatial::{build_grid, DiffusionLaw};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Eigenmode,
    Porous,
    Quasilinear,
    Zero,
    InvalidLaw,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 6] =
        [Self::Eigenmode, Self::Porous, Self::Quasilinear, Self::Zero, Self::InvalidLaw, Self::Custom];

    pub fn name(self) -> &'static str {
        match self {
            Self::Eigenmode => "eigenmode",
            Self::Porous => "porous",
            Self::Quasilinear => "quasilinear",
            Self::Zero => "zero",
            Self::InvalidLaw => "invalid-law",
            Self::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LawConfig {
    Constant { value: f64 },
    Porous { strength: f64 },
    Identity { floor: f64, ceiling: f64 },
}

impl LawConfig {
    pub fn build(&self) -> DiffusionLaw {
        match *self {
            Self::Constant { value } => DiffusionLaw::constant(value),
            Self::Porous { strength } => DiffusionLaw::porous(strength),
            Self::Identity { floor, ceiling } => DiffusionLaw::identity(floor, ceiling),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Porous { .. } => "porous",
            Self::Identity { .. } => "identity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialShape {
    /// Product of `sin(kπ(x_i − a_i)/L_i)`; `k = 1` is the first Dirichlet eigenfunction.
    Sine,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemConfig {
    pub preset: Preset,
    pub alpha: f64,
    pub law: LawConfig,
    pub domain: Vec<[f64; 2]>,
    pub initial: InitialShape,
    pub amplitude: f64,
    /// Wavenumber k of the sine shape.
    pub harmonic: usize,
    /// Constant source value f.
    pub source: f64,
    /// Constant Dirichlet value g. The initial datum is `g + amplitude · shape`.
    pub boundary: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridChoice {
    Uniform,
    Graded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeConfig {
    pub horizon: f64,
    pub steps: usize,
    pub grid: GridChoice,
    /// Grading exponent; `None` means `min((2−α)/α, 4)`.
    pub grading: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceConfig {
    /// Nodes per axis, boundary included.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HistoryChoice {
    Direct,
    Compressed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub mode: Mode,
    pub tol: f64,
    pub max_iter: usize,
    pub history: HistoryChoice,
    pub compression_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsConfig {
    pub decay: bool,
    pub boundedness: bool,
    pub convexity: bool,
    pub weakform: bool,
    pub hoelder: bool,
    pub memory_benchmark: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyAxis {
    Space,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    Analytic,
    #[serde(rename = "self")]
    SelfReference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub axis: StudyAxis,
    pub oracle: Oracle,
    pub levels: usize,
    /// Allow falling back to the finest level as reference when no analytic oracle exists.
    pub allow_self: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub problem: ProblemConfig,
    pub time: TimeConfig,
    pub space: SpaceConfig,
    pub solver: SolverConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
    pub study: StudyConfig,
}

impl RunConfig {
    /// Fully defaulted configuration of a preset.
    pub fn preset(preset: Preset) -> Self {
        let pi_line = vec![[0.0, PI]];
        let (alpha, law, domain, initial, points, horizon, steps) = match preset {
            Preset::Eigenmode | Preset::Custom => {
                (0.5, LawConfig::Constant { value: 1.0 }, pi_line, InitialShape::Sine, 128, 1.0, 256)
            }
            Preset::Porous => (0.5, LawConfig::Porous { strength: 0.5 }, pi_line, InitialShape::Sine, 64, 1.0, 256),
            Preset::Quasilinear => {
                (0.5, LawConfig::Porous { strength: 0.5 }, pi_line, InitialShape::Sine, 64, 50.0, 1024)
            }
            Preset::Zero => (0.5, LawConfig::Constant { value: 1.0 }, pi_line, InitialShape::Zero, 32, 1.0, 64),
            Preset::InvalidLaw => (
                0.5,
                LawConfig::Identity { floor: 0.1, ceiling: 1.0 },
                vec![[0.0, 2.0 * PI]],
                InitialShape::Sine,
                33,
                1.0,
                32,
            ),
        };
        Self {
            seed: 0,
            problem: ProblemConfig {
                preset,
                alpha,
                law,
                domain,
                initial,
                amplitude: 1.0,
                harmonic: if preset == Preset::InvalidLaw { 2 } else { 1 },
                source: 0.0,
                boundary: 0.0,
            },
            time: TimeConfig { horizon, steps, grid: GridChoice::Graded, grading: None },
            space: SpaceConfig { points: vec![points] },
            solver: SolverConfig {
                mode: Mode::Picard,
                tol: 1e-10,
                max_iter: 50,
                history: HistoryChoice::Direct,
                compression_tol: 1e-8,
            },
            diagnostics: DiagnosticsConfig {
                decay: true,
                boundedness: true,
                convexity: true,
                weakform: false,
                hoelder: false,
                memory_benchmark: false,
                slack: crate::fode::DEFAULT_SLACK,
            },
            output: OutputConfig { dir: PathBuf::from("out"), snapshots: Vec::new() },
            study: StudyConfig { axis: StudyAxis::Space, oracle: Oracle::Analytic, levels: 3, allow_self: true },
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        let t = &self.time;
        match t.grid {
            GridChoice::Uniform => TimeGrid::uniform(t.horizon, t.steps),
            GridChoice::Graded => {
                TimeGrid::graded(t.horizon, t.steps, t.grading.unwrap_or_else(|| default_grading(self.problem.alpha)))
            }
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.solver;
        SolverOptions {
            mode: s.mode,
            tol: s.tol,
            max_iter: s.max_iter,
            history: match s.history {
                HistoryChoice::Direct => HistoryBackend::Direct,
                HistoryChoice::Compressed => HistoryBackend::Compressed { tolerance: s.compression_tol },
            },
        }
    }

    /// Shape factor of the initial datum evaluated at `p`.
    pub fn initial_shape(&self, p: [f64; 2]) -> f64 {
        match self.problem.initial {
            InitialShape::Zero => 0.0,
            InitialShape::Sine => self
                .problem
                .domain
                .iter()
                .enumerate()
                .map(|(ax, [a, b])| (self.problem.harmonic as f64 * PI * (p[ax] - a) / (b - a)).sin())
                .product(),
        }
    }

    pub fn build_spec(&self) -> Result<ProblemSpec> {
        let p = &self.problem;
        let extents: Vec<(f64, f64)> = p.domain.iter().map(|[a, b]| (*a, *b)).collect();
        let space = build_grid(&extents, &self.space.points)?;
        let time = self.time_grid()?;
        let boundary = vec![p.boundary; space.len()];
        let mut initial = space.sample(|x| p.boundary + p.amplitude * self.initial_shape(x));
        for (i, v) in initial.iter_mut().enumerate() {
            if space.is_boundary(i) {
                *v = p.boundary;
            }
        }
        let source = if p.source == 0.0 { Source::Zero } else { Source::Constant(p.source) };
        ProblemSpec::new(p.alpha, time, space, p.law.build(), source, boundary, initial)
    }

    /// Canonical document with every key spelled out.
    pub fn render(&self) -> String {
        let mut root = Table::new();
        root.insert("seed".into(), Value::Integer(self.seed as i64));

        let p = &self.problem;
        let mut problem = Table::new();
        problem.insert("preset".into(), p.preset.name().into());
        problem.insert("alpha".into(), p.alpha.into());
        let mut law = Table::new();
        law.insert("kind".into(), p.law.kind().into());
        match p.law {
            LawConfig::Constant { value } => {
                law.insert("value".into(), value.into());
            }
            LawConfig::Porous { strength } => {
                law.insert("strength".into(), strength.into());
            }
            LawConfig::Identity { floor, ceiling } => {
                law.insert("floor".into(), floor.into());
                law.insert("ceiling".into(), ceiling.into());
            }
        }
        problem.insert("law".into(), Value::Table(law));
        problem.insert(
            "domain".into(),
            Value::Array(p.domain.iter().map(|[a, b]| Value::Array(vec![(*a).into(), (*b).into()])).collect()),
        );
        problem.insert("initial".into(), (if p.initial == InitialShape::Sine { "sine" } else { "zero" }).into());
        problem.insert("amplitude".into(), p.amplitude.into());
        problem.insert("harmonic".into(), Value::Integer(p.harmonic as i64));
        problem.insert("source".into(), p.source.into());
        problem.insert("boundary".into(), p.boundary.into());
        root.insert("problem".into(), Value::Table(problem));

        let mut time = Table::new();
        time.insert("horizon".into(), self.time.horizon.into());
        time.insert("steps".into(), Value::Integer(self.time.steps as i64));
        time.insert("grid".into(), (if self.time.grid == GridChoice::Uniform { "uniform" } else { "graded" }).into());
        if let Some(g) = self.time.grading {
            time.insert("grading".into(), g.into());
        }
        root.insert("time".into(), Value::Table(time));

        let mut space = Table::new();
        space.insert(
            "points".into(),
            Value::Array(self.space.points.iter().map(|&n| Value::Integer(n as i64)).collect()),
        );
        root.insert("space".into(), Value::Table(space));

        let s = &self.solver;
        let mut solver = Table::new();
        solver.insert("mode".into(), (if s.mode == Mode::Picard { "picard" } else { "newton" }).into());
        solver.insert("tol".into(), s.tol.into());
        solver.insert("max_iter".into(), Value::Integer(s.max_iter as i64));
        solver.insert(
            "history".into(),
            (if s.history == HistoryChoice::Direct { "direct" } else { "compressed" }).into(),
        );
        solver.insert("compression_tol".into(), s.compression_tol.into());
        root.insert("solver".into(), Value::Table(solver));

        let d = &self.diagnostics;
        let mut diag = Table::new();
        for (k, v) in [
            ("decay", d.decay),
            ("boundedness", d.boundedness),
            ("convexity", d.convexity),
            ("weakform", d.weakform),
            ("hoelder", d.hoelder),
            ("memory_benchmark", d.memory_benchmark),
        ] {
            diag.insert(k.into(), v.into());
        }
        diag.insert("slack".into(), d.slack.into());
        root.insert("diagnostics".into(), Value::Table(diag));

        let mut output = Table::new();
        output.insert("dir".into(), self.output.dir.to_string_lossy().into_owned().into());
        output.insert("snapshots".into(), Value::Array(self.output.snapshots.iter().map(|&t| t.into()).collect()));
        root.insert("output".into(), Value::Table(output));

        let st = &self.study;
        let mut study = Table::new();
        study.insert("axis".into(), (if st.axis == StudyAxis::Space { "space" } else { "time" }).into());
        study.insert("oracle".into(), (if st.oracle == Oracle::Analytic { "analytic" } else { "self" }).into());
        study.insert("levels".into(), Value::Integer(st.levels as i64));
        study.insert("allow_self".into(), st.allow_self.into());
        root.insert("study".into(), Value::Table(study));

        toml::to_string(&root).expect("plain tables always serialize")
    }
}

// Known keys. Tables end with '.', leaves do not.
const SCHEMA: &[&str] = &[
    "seed",
    "alpha",
    "problem",
    "problem.",
    "problem.preset",
    "problem.alpha",
    "problem.law.",
    "problem.law.kind",
    "problem.law.value",
    "problem.law.strength",
    "problem.law.floor",
    "problem.law.ceiling",
    "problem.domain",
    "problem.initial",
    "problem.amplitude",
    "problem.harmonic",
    "problem.source",
    "problem.boundary",
    "time.",
    "time.horizon",
    "time.steps",
    "time.grid",
    "time.grading",
    "space.",
    "space.points",
    "solver.",
    "solver.mode",
    "solver.tol",
    "solver.max_iter",
    "solver.history",
    "solver.compression_tol",
    "diagnostics.",
    "diagnostics.decay",
    "diagnostics.boundedness",
    "diagnostics.convexity",
    "diagnostics.weakform",
    "diagnostics.hoelder",
    "diagnostics.memory_benchmark",
    "diagnostics.slack",
    "output.",
    "output.dir",
    "output.snapshots",
    "study.",
    "study.axis",
    "study.oracle",
    "study.levels",
    "study.allow_self",
];

fn unknown_keys(table: &Table, prefix: &str, errs: &mut Vec<String>) {
    for (k, v) in table {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => {
                let tpath = format!("{path}.");
                if SCHEMA.contains(&tpath.as_str()) {
                    unknown_keys(t, &path, errs);
                } else {
                    errs.push(format!("unknown key `{path}`"));
                }
            }
            _ => {
                if !SCHEMA.contains(&path.as_str()) {
                    errs.push(format!("unknown key `{path}`"));
                }
            }
        }
    }
}

struct Reader<'a> {
    root: &'a Table,
    errs: Vec<String>,
}

impl<'a> Reader<'a> {
    fn lookup(&self, path: &str) -> Option<&'a Value> {
        let mut parts = path.split('.').peekable();
        let mut table = self.root;
        while let Some(part) = parts.next() {
            let v = table.get(part)?;
            if parts.peek().is_none() {
                return Some(v);
            }
            table = v.as_table()?;
        }
        None
    }

    fn type_error(&mut self, path: &str, want: &str, got: &Value) {
        self.errs.push(format!("`{path}` must be {want}, got {}", got.type_str()));
    }

    fn f64(&mut self, path: &str, slot: &mut f64) {
        match self.lookup(path) {
            None => {}
            Some(Value::Float(x)) => *slot = *x,
            Some(Value::Integer(i)) => *slot = *i as f64,
            Some(v) => self.type_error(path, "a number", v),
        }
    }

    fn usize(&mut self, path: &str, slot: &mut usize) {
        match self.lookup(path) {
            None => {}
            Some(Value::Integer(i)) if *i >= 0 => *slot = *i as usize,
            Some(v) => self.type_error(path, "a nonnegative integer", v),
        }
    }

    fn bool(&mut self, path: &str, slot: &mut bool) {
        match self.lookup(path) {
            None => {}
            Some(Value::Boolean(b)) => *slot = *b,
            Some(v) => self.type_error(path, "a boolean", v),
        }
    }

    fn string(&mut self, path: &str) -> Option<&'a str> {
        match self.lookup(path)? {
            Value::String(s) => Some(s.as_str()),
            v => {
                self.type_error(path, "a string", v);
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, path: &str, options: &[(&str, T)], slot: &mut T) {
        if let Some(s) = self.string(path) {
            match options.iter().find(|(n, _)| *n == s) {
                Some((_, v)) => *slot = *v,
                None => {
                    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                    self.errs.push(format!("`{path}` = \"{s}\" is not one of {}", names.join(", ")));
                }
            }
        }
    }

    fn f64_list(&mut self, path: &str) -> Option<Vec<f64>> {
        let v = self.lookup(path)?;
        let Some(arr) = v.as_array() else {
            self.type_error(path, "an array of numbers", v);
            return None;
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, x) in arr.iter().enumerate() {
            match x {
                Value::Float(f) => out.push(*f),
                Value::Integer(n) => out.push(*n as f64),
                other => {
                    self.type_error(&format!("{path}[{i}]"), "a number", other);
                    return None;
                }
            }
        }
        Some(out)
    }
}

/// Parses and validates a TOML run configuration. All violations are reported together.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))?;
    let mut errs = Vec::new();
    unknown_keys(&root, "", &mut errs);
    let mut r = Reader { root: &root, errs };

    // preset: `problem = "name"` or `[problem] preset = "name"`
    let preset_name = match root.get("problem") {
        Some(Value::String(s)) => Some(s.as_str()),
        Some(Value::Table(_)) => r.string("problem.preset"),
        Some(v) => {
            r.type_error("problem", "a preset name or a table", v);
            None
        }
        None => None,
    };
    let preset = match preset_name {
        Some(name) => match Preset::from_name(name) {
            Some(p) => p,
            None => {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                r.errs.push(format!("unknown preset \"{name}\"; expected one of {}", names.join(", ")));
                Preset::Custom
            }
        },
        None => {
            r.errs.push("missing required key `problem` (preset name) or `problem.preset`".into());
            Preset::Custom
        }
    };
    let mut c = RunConfig::preset(preset);
    if preset == Preset::Custom {
        for key in ["problem.alpha", "problem.law.kind", "problem.domain"] {
            if r.lookup(key).is_none() {
                r.errs.push(format!("missing required key `{key}` for a custom problem"));
            }
        }
    }

    let mut seed = c.seed as usize;
    r.usize("seed", &mut seed);
    c.seed = seed as u64;

    let p = &mut c.problem;
    r.f64("alpha", &mut p.alpha);
    r.f64("problem.alpha", &mut p.alpha);
    if let Some(kind) = r.string("problem.law.kind") {
        p.law = match kind {
            "constant" => LawConfig::Constant { value: 1.0 },
            "porous" => LawConfig::Porous { strength: 0.5 },
            "identity" => LawConfig::Identity { floor: 0.1, ceiling: 1.0 },
            other => {
                r.errs.push(format!("`problem.law.kind` = \"{other}\" is not one of constant, porous, identity"));
                p.law.clone()
            }
        };
    }
    let allowed: &[&str] = match p.law {
        LawConfig::Constant { ref mut value } => {
            r.f64("problem.law.value", value);
            &["value"]
        }
        LawConfig::Porous { ref mut strength } => {
            r.f64("problem.law.strength", strength);
            &["strength"]
        }
        LawConfig::Identity { ref mut floor, ref mut ceiling } => {
            r.f64("problem.law.floor", floor);
            r.f64("problem.law.ceiling", ceiling);
            &["floor", "ceiling"]
        }
    };
    for key in ["value", "strength", "floor", "ceiling"] {
        let path = format!("problem.law.{key}");
        if !allowed.contains(&key) && r.lookup(&path).is_some() {
            r.errs.push(format!("`{path}` does not apply to a {} law", p.law.kind()));
        }
    }
    if let Some(v) = r.lookup("problem.domain") {
        match v.as_array() {
            Some(axes) => {
                let mut domain = Vec::new();
                for (i, axis) in axes.iter().enumerate() {
                    let pair = axis.as_array().map(|a| a.iter().filter_map(value_f64).collect::<Vec<_>>());
                    match pair {
                        Some(ab) if ab.len() == 2 => domain.push([ab[0], ab[1]]),
                        _ => r.errs.push(format!("`problem.domain[{i}]` must be a pair [a, b] of numbers")),
                    }
                }
                p.domain = domain;
            }
            None => r.type_error("problem.domain", "an array of [a, b] pairs", v),
        }
    }
    r.choice("problem.initial", &[("sine", InitialShape::Sine), ("zero", InitialShape::Zero)], &mut p.initial);
    r.f64("problem.amplitude", &mut p.amplitude);
    r.usize("problem.harmonic", &mut p.harmonic);
    r.f64("problem.source", &mut p.source);
    r.f64("problem.boundary", &mut p.boundary);

    let t = &mut c.time;
    r.f64("time.horizon", &mut t.horizon);
    r.usize("time.steps", &mut t.steps);
    r.choice("time.grid", &[("uniform", GridChoice::Uniform), ("graded", GridChoice::Graded)], &mut t.grid);
    if r.lookup("time.grading").is_some() {
        let mut g = 1.0;
        r.f64("time.grading", &mut g);
        t.grading = Some(g);
    }

    if let Some(v) = r.lookup("space.points") {
        match v.as_array().map(|a| a.iter().map(|x| x.as_integer()).collect::<Option<Vec<i64>>>()) {
            Some(Some(n)) if n.iter().all(|&k| k >= 0) => c.space.points = n.into_iter().map(|k| k as usize).collect(),
            _ => r.type_error("space.points", "an array of nonnegative integers", v),
        }
    }

    let s = &mut c.solver;
    r.choice("solver.mode", &[("picard", Mode::Picard), ("newton", Mode::Newton)], &mut s.mode);
    r.f64("solver.tol", &mut s.tol);
    r.usize("solver.max_iter", &mut s.max_iter);
    r.choice(
        "solver.history",
        &[("direct", HistoryChoice::Direct), ("compressed", HistoryChoice::Compressed)],
        &mut s.history,
    );
    r.f64("solver.compression_tol", &mut s.compression_tol);

    let d = &mut c.diagnostics;
    r.bool("diagnostics.decay", &mut d.decay);
    r.bool("diagnostics.boundedness", &mut d.boundedness);
    r.bool("diagnostics.convexity", &mut d.convexity);
    r.bool("diagnostics.weakform", &mut d.weakform);
    r.bool("diagnostics.hoelder", &mut d.hoelder);
    r.bool("diagnostics.memory_benchmark", &mut d.memory_benchmark);
    r.f64("diagnostics.slack", &mut d.slack);

    if let Some(dir) = r.string("output.dir") {
        c.output.dir = PathBuf::from(dir);
    }
    if let Some(s) = r.f64_list("output.snapshots") {
        c.output.snapshots = s;
    }

    let st = &mut c.study;
    r.choice("study.axis", &[("space", StudyAxis::Space), ("time", StudyAxis::Time)], &mut st.axis);
    r.choice("study.oracle", &[("analytic", Oracle::Analytic), ("self", Oracle::SelfReference)], &mut st.oracle);
    r.usize("study.levels", &mut st.levels);
    r.bool("study.allow_self", &mut st.allow_self);

    let mut errs = r.errs;
    errs.extend(validate(&c));
    if errs.is_empty() {
        Ok(c)
    } else {
        Err(Error::Config(errs))
    }
}

fn value_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

/// Range and consistency checks on a resolved configuration.
pub fn validate(c: &RunConfig) -> Vec<String> {
    let mut errs = Vec::new();
    let p = &c.problem;
    if !(p.alpha > 0.0 && p.alpha < 1.0) {
        errs.push(format!("alpha = {} is outside the admissible interval (0,1)", p.alpha));
    }
    match p.law {
        LawConfig::Constant { value } if !(value > 0.0) => {
            errs.push(format!("ellipticity floor nu = {value} must be > 0 (`problem.law.value`)"))
        }
        LawConfig::Identity { floor, .. } if !(floor > 0.0) => {
            errs.push(format!("ellipticity floor nu = {floor} must be > 0 (`problem.law.floor`)"))
        }
        LawConfig::Identity { floor, ceiling } if ceiling < floor => {
            errs.push(format!("`problem.law.ceiling` = {ceiling} is below the floor {floor}"))
        }
        LawConfig::Porous { strength } if !(strength >= 0.0) => {
            errs.push(format!("`problem.law.strength` = {strength} must be >= 0"))
        }
        _ => {}
    }
    if p.domain.is_empty() || p.domain.len() > 2 {
        errs.push(format!("`problem.domain` must have 1 or 2 axes, got {}", p.domain.len()));
    }
    for (i, [a, b]) in p.domain.iter().enumerate() {
        if !(a.is_finite() && b.is_finite() && b > a) {
            errs.push(format!("`problem.domain[{i}]` = [{a}, {b}] is not a proper interval"));
        }
    }
    if c.space.points.len() != p.domain.len() {
        errs.push(format!(
            "`space.points` has {} entries but the domain has {} axes",
            c.space.points.len(),
            p.domain.len()
        ));
    }
    for (i, &n) in c.space.points.iter().enumerate() {
        if n < crate::spatial::MIN_POINTS {
            errs.push(format!("`space.points[{i}]` = {n} is below the minimum {}", crate::spatial::MIN_POINTS));
        }
    }
    for (name, v) in [("problem.amplitude", p.amplitude), ("problem.source", p.source), ("problem.boundary", p.boundary)]
    {
        if !v.is_finite() {
            errs.push(format!("`{name}` must be finite"));
        }
    }
    if p.harmonic == 0 {
        errs.push("`problem.harmonic` must be >= 1".into());
    }
    let t = &c.time;
    if !(t.horizon > 0.0 && t.horizon.is_finite()) {
        errs.push(format!("`time.horizon` = {} must be positive", t.horizon));
    }
    if t.steps == 0 {
        errs.push("`time.steps` must be >= 1".into());
    }
    if let Some(g) = t.grading {
        if !(g >= 1.0) {
            errs.push(format!("`time.grading` = {g} must be >= 1"));
        }
    }
    let s = &c.solver;
    if !(s.tol > 0.0) {
        errs.push(format!("`solver.tol` = {} must be positive", s.tol));
    }
    if s.max_iter == 0 {
        errs.push("`solver.max_iter` must be >= 1".into());
    }
    if s.history == HistoryChoice::Compressed {
        if t.grid != GridChoice::Uniform {
            errs.push("compressed history requires `time.grid` = \"uniform\"".into());
        }
        if !(s.compression_tol > 0.0) {
            errs.push(format!("`solver.compression_tol` = {} must be positive", s.compression_tol));
        }
    }
    let d = &c.diagnostics;
    if !(d.slack >= 1.0) {
        errs.push(format!("`diagnostics.slack` = {} must be >= 1", d.slack));
    }
    if d.decay && (p.source != 0.0 || p.boundary != 0.0) {
        errs.push("the decay certificate needs f = 0 and g = 0; set `diagnostics.decay` = false".into());
    }
    if d.boundedness && p.source != 0.0 {
        errs.push("the boundedness certificate needs f = 0; set `diagnostics.boundedness` = false".into());
    }
    if d.memory_benchmark && t.grid != GridChoice::Uniform {
        errs.push("`diagnostics.memory_benchmark` requires `time.grid` = \"uniform\"".into());
    }
    if d.weakform && t.steps < 8 {
        errs.push("`diagnostics.weakform` needs at least 8 time steps".into());
    }
    for (i, &s) in c.output.snapshots.iter().enumerate() {
        if !(s >= 0.0 && s <= t.horizon) {
            errs.push(format!("`output.snapshots[{i}]` = {s} lies outside [0, {}]", t.horizon));
        }
    }
    if c.study.levels < 3 {
        errs.push(format!("`study.levels` = {} must be >= 3", c.study.levels));
    }
    errs
}

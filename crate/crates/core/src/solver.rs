//! Time marching for the quasilinear subdiffusion problem.
//!
//! At node `t_n` the L1 scheme gives the nonlinear spatial system
//!
//! ```text
//! w_{n,n}(u_n − u_{n−1}) + H_n + A(u_n) u_n = f(t_n)   (interior)
//!                                       u_n = g        (boundary)
//! ```
//!
//! with memory `H_n = Σ_{k<n} w_{n,k}(u_k − u_{k−1})`. Picard iterates freeze
//! `a(·)` at the previous iterate and solve the resulting linear system;
//! Newton uses the full Jacobian including the `a′(u)` terms.

use std::sync::Arc;
use std::time::Instant;

use crate::banded::BandedMatrix;
use crate::frackernel::{CompressedHistory, L1Weights, TimeGrid};
use crate::spatial::{
    assemble_jacobian, assemble_quasilinear_operator, ellipticity_check, DiffusionLaw, Field, SpatialGrid,
};
use crate::{Error, Result};

type SourceFn = Arc<dyn Fn(f64, [f64; 2]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Source {
    Zero,
    Constant(f64),
    Function(SourceFn),
    /// One field per time node `t_0..t_M`.
    Sampled(Vec<Field>),
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Function(_) => write!(f, "Function"),
            Self::Sampled(s) => write!(f, "Sampled({} steps)", s.len()),
        }
    }
}

impl Source {
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant(c) => *c == 0.0,
            Self::Function(_) => false,
            Self::Sampled(s) => s.iter().all(|f| f.iter().all(|&v| v == 0.0)),
        }
    }

    pub(crate) fn sample(&self, n: usize, t: f64, grid: &SpatialGrid, out: &mut [f64]) {
        match self {
            Self::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            Self::Constant(c) => out.iter_mut().for_each(|v| *v = *c),
            Self::Function(f) => {
                for (i, v) in out.iter_mut().enumerate() {
                    *v = f(t, grid.coordinate(i));
                }
            }
            Self::Sampled(s) => out.copy_from_slice(&s[n]),
        }
    }
}

/// Data of one initial-boundary value problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub time: TimeGrid,
    pub space: SpatialGrid,
    pub law: DiffusionLaw,
    pub source: Source,
    /// Dirichlet data; only boundary entries are read.
    pub boundary: Field,
    pub initial: Field,
}

impl ProblemSpec {
    /// Validates the order, field sizes and the compatibility `u0 = g` on the boundary.
    pub fn new(
        alpha: f64,
        time: TimeGrid,
        space: SpatialGrid,
        law: DiffusionLaw,
        source: Source,
        boundary: Field,
        initial: Field,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("fractional order must lie in (0,1), got {alpha}")));
        }
        let n = space.len();
        if boundary.len() != n || initial.len() != n {
            return Err(Error::Contract("boundary and initial fields must match the grid".into()));
        }
        if let Source::Sampled(s) = &source {
            if s.len() != time.steps() + 1 || s.iter().any(|f| f.len() != n) {
                return Err(Error::Contract("sampled source must hold one field per time node".into()));
            }
        }
        for idx in 0..n {
            if space.is_boundary(idx) && (initial[idx] - boundary[idx]).abs() > 1e-12 {
                return Err(Error::Contract(format!(
                    "compatibility u0 = g violated at boundary node {idx}: {} vs {}",
                    initial[idx], boundary[idx]
                )));
            }
        }
        Ok(Self { alpha, time, space, law, source, boundary, initial })
    }

    /// `f = 0` and `g = 0`.
    pub fn is_homogeneous(&self) -> bool {
        self.source.is_zero()
            && (0..self.space.len()).all(|i| !self.space.is_boundary(i) || self.boundary[i] == 0.0)
    }

    /// Range containing `u0` and `g`. For `f = 0` the discrete solution stays in it.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.space.len() {
            lo = lo.min(self.initial[i]);
            hi = hi.max(self.initial[i]);
            if self.space.is_boundary(i) {
                lo = lo.min(self.boundary[i]);
                hi = hi.max(self.boundary[i]);
            }
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Picard,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum HistoryBackend {
    Direct,
    Compressed { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SolverOptions {
    pub mode: Mode,
    /// Absolute sup-norm residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub history: HistoryBackend,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { mode: Mode::Picard, tol: 1e-10, max_iter: 50, history: HistoryBackend::Direct }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct StepStats {
    pub iterations: usize,
    pub residual: f64,
    pub damping_halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct Timings {
    pub assembly_secs: f64,
    pub memory_secs: f64,
    pub linear_secs: f64,
    pub compression_build_secs: f64,
    pub total_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    /// Entry `n − 1` describes step `n`.
    pub stats: Vec<StepStats>,
    pub timings: Timings,
    pub history_modes: Option<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.fields.len() == self.times.len()
    }

    pub fn final_field(&self) -> &Field {
        self.fields.last().expect("trajectory holds u0")
    }
}

/// Computes `u_n` from the direct memory sum of `history = [u_0, …, u_{n−1}]`.
pub fn nonlinear_step(
    spec: &ProblemSpec,
    weights: &L1Weights,
    history: &[Field],
    n: usize,
    options: &SolverOptions,
) -> Result<(Field, StepStats)> {
    if history.len() != n || n == 0 || n > spec.time.steps() {
        return Err(Error::Contract(format!("step {n} needs exactly {n} history fields, got {}", history.len())));
    }
    let len = spec.space.len();
    let mut memory = vec![0.0; len];
    for k in 1..n {
        let w = weights.weight(n, k);
        for ((m, a), b) in memory.iter_mut().zip(&history[k]).zip(&history[k - 1]) {
            *m += w * (a - b);
        }
    }
    let mut source = vec![0.0; len];
    spec.source.sample(n, spec.time.nodes()[n], &spec.space, &mut source);
    let mut timings = Timings::default();
    step_with_memory(spec, weights.weight(n, n), &history[n - 1], &memory, &source, n, options, &mut timings)
}

struct StepSystem<'a> {
    spec: &'a ProblemSpec,
    boundary: Vec<bool>,
    local: f64,
    prev: &'a [f64],
    memory: &'a [f64],
    source: &'a [f64],
}

impl StepSystem<'_> {
    fn residual(&self, u: &[f64]) -> Result<(Vec<f64>, f64)> {
        let au = assemble_quasilinear_operator(&self.spec.space, &self.spec.law, u)?.matvec(u);
        let mut r = vec![0.0; u.len()];
        let mut norm: f64 = 0.0;
        for i in 0..u.len() {
            r[i] = if self.boundary[i] {
                u[i] - self.spec.boundary[i]
            } else {
                self.local * (u[i] - self.prev[i]) + self.memory[i] + au[i] - self.source[i]
            };
            norm = norm.max(r[i].abs());
        }
        if !norm.is_finite() {
            norm = f64::INFINITY;
        }
        Ok((r, norm))
    }

    fn shift_interior(&self, m: &mut BandedMatrix) {
        for (i, &b) in self.boundary.iter().enumerate() {
            if !b {
                m.add(i, i, self.local);
            }
        }
    }

    fn picard_update(&self, v: &[f64], timings: &mut Timings) -> Result<Vec<f64>> {
        let t0 = Instant::now();
        let mut sys = assemble_quasilinear_operator(&self.spec.space, &self.spec.law, v)?;
        self.shift_interior(&mut sys);
        let rhs: Vec<f64> = (0..v.len())
            .map(|i| {
                if self.boundary[i] {
                    self.spec.boundary[i]
                } else {
                    self.source[i] + self.local * self.prev[i] - self.memory[i]
                }
            })
            .collect();
        timings.assembly_secs += t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let out = sys.solve(&rhs);
        timings.linear_secs += t1.elapsed().as_secs_f64();
        out
    }

    fn newton_update(&self, v: &[f64], r: &[f64], timings: &mut Timings) -> Result<Vec<f64>> {
        let t0 = Instant::now();
        let mut jac = assemble_jacobian(&self.spec.space, &self.spec.law, v)?;
        self.shift_interior(&mut jac);
        timings.assembly_secs += t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let delta = jac.solve(r)?;
        timings.linear_secs += t1.elapsed().as_secs_f64();
        Ok(v.iter().zip(&delta).map(|(a, d)| a - d).collect())
    }
}

#[allow(clippy::too_many_arguments)]
fn step_with_memory(
    spec: &ProblemSpec,
    local: f64,
    prev: &[f64],
    memory: &[f64],
    source: &[f64],
    n: usize,
    options: &SolverOptions,
    timings: &mut Timings,
) -> Result<(Field, StepStats)> {
    let system = StepSystem { spec, boundary: spec.space.boundary_mask(), local, prev, memory, source };
    let mut v = prev.to_vec();
    let (mut r, mut norm) = system.residual(&v)?;
    let mut stats = StepStats { iterations: 0, residual: norm, damping_halvings: 0 };
    if norm <= options.tol {
        return Ok((v, stats));
    }
    let mut damping = 1.0;
    while stats.iterations < options.max_iter {
        stats.iterations += 1;
        let target = match options.mode {
            Mode::Picard => system.picard_update(&v, timings)?,
            Mode::Newton => system.newton_update(&v, &r, timings)?,
        };
        let candidate: Vec<f64> = v.iter().zip(&target).map(|(a, b)| a + damping * (b - a)).collect();
        let (r_new, norm_new) = system.residual(&candidate)?;
        if norm_new > norm && stats.iterations > 1 {
            if stats.damping_halvings < 3 {
                damping *= 0.5;
                stats.damping_halvings += 1;
                continue;
            }
            break;
        }
        v = candidate;
        r = r_new;
        norm = norm_new;
        stats.residual = norm;
        if norm <= options.tol {
            return Ok((v, stats));
        }
    }
    Err(Error::StepFailure { step: n, residual: norm, iterations: stats.iterations })
}

/// Marches the whole time grid. On failure the trajectory computed so far is
/// returned together with the error.
pub fn run_trajectory_partial(spec: &ProblemSpec, options: &SolverOptions) -> (Trajectory, Option<Error>) {
    let mut traj = Trajectory {
        times: spec.time.nodes().to_vec(),
        fields: vec![spec.initial.clone()],
        stats: Vec::new(),
        timings: Timings::default(),
        history_modes: None,
    };
    let err = march(spec, options, &mut traj).err();
    (traj, err)
}

/// Marches the whole time grid.
pub fn run_trajectory(spec: &ProblemSpec, options: &SolverOptions) -> Result<Trajectory> {
    match run_trajectory_partial(spec, options) {
        (t, None) => Ok(t),
        (_, Some(e)) => Err(e),
    }
}

fn march(spec: &ProblemSpec, options: &SolverOptions, traj: &mut Trajectory) -> Result<()> {
    let start = Instant::now();
    if !(options.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", options.tol)));
    }
    let range = spec.value_range();
    let report = ellipticity_check(&spec.law, range, 1001);
    if !report.pass {
        return Err(Error::Ellipticity(format!(
            "law {} on [{}, {}]: sampled a in [{}, {}], declared [{}, {}]",
            spec.law.tag(),
            range.0,
            range.1,
            report.min,
            report.max,
            spec.law.floor,
            spec.law.ceiling
        )));
    }
    let weights = L1Weights::new(spec.alpha, &spec.time)?;
    let len = spec.space.len();
    let steps = spec.time.steps();

    let mut compressed = match options.history {
        HistoryBackend::Direct => None,
        HistoryBackend::Compressed { tolerance } => {
            let t0 = Instant::now();
            let h = CompressedHistory::build(&weights, tolerance, len)?;
            traj.timings.compression_build_secs = t0.elapsed().as_secs_f64();
            traj.history_modes = Some(h.modes());
            Some(h)
        }
    };

    let mut increments: Vec<Field> = Vec::new();
    let mut memory = vec![0.0; len];
    let mut source = vec![0.0; len];
    for n in 1..=steps {
        let t0 = Instant::now();
        match &compressed {
            Some(h) => h.memory(&mut memory),
            None => {
                memory.iter_mut().for_each(|m| *m = 0.0);
                for k in 1..n {
                    let w = weights.weight(n, k);
                    for (m, d) in memory.iter_mut().zip(&increments[k - 1]) {
                        *m += w * d;
                    }
                }
            }
        }
        traj.timings.memory_secs += t0.elapsed().as_secs_f64();
        spec.source.sample(n, spec.time.nodes()[n], &spec.space, &mut source);
        let prev = traj.fields.last().expect("u0 present");
        let result = step_with_memory(
            spec,
            weights.weight(n, n),
            prev,
            &memory,
            &source,
            n,
            options,
            &mut traj.timings,
        );
        let (u, stats) = match result {
            Ok(x) => x,
            Err(e) => {
                traj.timings.total_secs = start.elapsed().as_secs_f64();
                return Err(e);
            }
        };
        let inc: Field = u.iter().zip(prev).map(|(a, b)| a - b).collect();
        let t1 = Instant::now();
        if let Some(h) = compressed.as_mut() {
            h.push(&inc);
        } else {
            increments.push(inc);
        }
        traj.timings.memory_secs += t1.elapsed().as_secs_f64();
        traj.fields.push(u);
        traj.stats.push(stats);
    }
    traj.timings.total_secs = start.elapsed().as_secs_f64();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::build_grid;
    use std::f64::consts::PI;

    fn sine_spec(law: DiffusionLaw, alpha: f64, steps: usize) -> ProblemSpec {
        let space = build_grid(&[(0.0, PI)], &[33]).unwrap();
        let time = TimeGrid::graded_for_order(1.0, steps, alpha).unwrap();
        let mut u0 = space.sample(|p| p[0].sin());
        u0[0] = 0.0;
        u0[32] = 0.0;
        ProblemSpec::new(alpha, time, space.clone(), law, Source::Zero, vec![0.0; space.len()], u0).unwrap()
    }

    #[test]
    fn linear_problem_needs_one_picard_iteration() {
        let spec = sine_spec(DiffusionLaw::constant(1.0), 0.5, 16);
        let traj = run_trajectory(&spec, &SolverOptions::default()).unwrap();
        assert!(traj.stats.iter().all(|s| s.iterations == 1));
    }

    #[test]
    fn zero_data_stays_zero() {
        let space = build_grid(&[(0.0, 1.0)], &[9]).unwrap();
        let time = TimeGrid::uniform(1.0, 8).unwrap();
        let spec = ProblemSpec::new(0.5, time, space, DiffusionLaw::porous(0.5), Source::Zero, vec![0.0; 9], vec![0.0; 9])
            .unwrap();
        let traj = run_trajectory(&spec, &SolverOptions::default()).unwrap();
        assert!(traj.fields.iter().flatten().all(|&v| v == 0.0));
        assert!(traj.stats.iter().all(|s| s.residual == 0.0 && s.iterations == 0));
    }

    #[test]
    fn picard_and_newton_agree() {
        let spec = sine_spec(DiffusionLaw::porous(0.5), 0.5, 24);
        let tol = 1e-10;
        let p = run_trajectory(&spec, &SolverOptions { mode: Mode::Picard, tol, ..Default::default() }).unwrap();
        let n = run_trajectory(&spec, &SolverOptions { mode: Mode::Newton, tol, ..Default::default() }).unwrap();
        for (a, b) in p.fields.iter().zip(&n.fields) {
            let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d <= 10.0 * tol, "gap {d}");
        }
    }

    #[test]
    fn incompatible_data_rejected() {
        let space = build_grid(&[(0.0, 1.0)], &[9]).unwrap();
        let time = TimeGrid::uniform(1.0, 8).unwrap();
        let r = ProblemSpec::new(0.5, time, space, DiffusionLaw::constant(1.0), Source::Zero, vec![0.0; 9], vec![1.0; 9]);
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn invalid_law_refused_before_stepping() {
        let space = build_grid(&[(0.0, 1.0)], &[9]).unwrap();
        let time = TimeGrid::uniform(1.0, 8).unwrap();
        let mut u0 = space.sample(|p| (2.0 * PI * p[0]).sin());
        u0[0] = 0.0;
        u0[8] = 0.0;
        let spec =
            ProblemSpec::new(0.5, time, space, DiffusionLaw::identity(0.1, 1.0), Source::Zero, vec![0.0; 9], u0).unwrap();
        let (traj, err) = run_trajectory_partial(&spec, &SolverOptions::default());
        assert!(matches!(err, Some(Error::Ellipticity(_))));
        assert_eq!(traj.fields.len(), 1);
    }

    #[test]
    fn iteration_cap_gives_step_failure() {
        let spec = sine_spec(DiffusionLaw::porous(5.0), 0.5, 4);
        let opts = SolverOptions { max_iter: 1, tol: 1e-14, ..Default::default() };
        let (traj, err) = run_trajectory_partial(&spec, &opts);
        match err {
            Some(Error::StepFailure { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected step failure, got {other:?}"),
        }
        assert_eq!(traj.fields.len(), 1);
    }

    #[test]
    fn public_step_matches_march() {
        let spec = sine_spec(DiffusionLaw::porous(0.5), 0.4, 6);
        let opts = SolverOptions::default();
        let traj = run_trajectory(&spec, &opts).unwrap();
        let weights = L1Weights::new(spec.alpha, &spec.time).unwrap();
        let (u3, _) = nonlinear_step(&spec, &weights, &traj.fields[..3], 3, &opts).unwrap();
        assert_eq!(u3, traj.fields[3]);
    }
}

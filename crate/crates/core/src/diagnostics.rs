//! Diagnostics over trajectories: norms, Hölder seminorms, decay
//! certificates, boundedness and weak-form residuals.

use crate::fode::{comparison_check, log_log_slope, DecayCertificate};
use crate::frackernel::{check_discrete_convexity_fields, rl_kernel_or_zero, ConvexityReport, L1Weights};
use crate::solver::{ProblemSpec, Trajectory};
use crate::spatial::{dirichlet_form, SpatialGrid};
use crate::{Error, Result};

/// Upper bound on sampled nodes in a Hölder scan (the scan is quadratic in it).
pub const MAX_HOELDER_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StepNorms {
    pub l2: f64,
    pub sup: f64,
}

/// Trapezoidal L2 norm and nodal sup norm of every field.
pub fn norms(trajectory: &Trajectory, grid: &SpatialGrid) -> Vec<StepNorms> {
    let q = grid.quadrature_weights();
    trajectory
        .fields
        .iter()
        .map(|u| StepNorms {
            l2: u.iter().zip(&q).map(|(v, w)| w * v * v).sum::<f64>().sqrt(),
            sup: u.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        })
        .collect()
}

pub fn l2_norm(u: &[f64], grid: &SpatialGrid) -> f64 {
    u.iter()
        .zip(grid.quadrature_weights())
        .map(|(v, w)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Region {
    Full,
    /// Nodes at distance `>= space_margin` from the boundary and with `t >= time_start`.
    Interior { space_margin: f64, time_start: f64 },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HoelderEstimate {
    pub time_exponent: f64,
    pub space_exponent: f64,
    pub value: f64,
    /// Stride actually used (raised if needed to respect [`MAX_HOELDER_SAMPLES`]).
    pub stride: usize,
    pub samples: usize,
    pub region: Region,
}

/// `sup |u(t,x) − u(s,y)| / (|t−s|^{β1} + |x−y|^{β2})` over sampled node pairs.
pub fn hoelder_seminorm(
    trajectory: &Trajectory,
    grid: &SpatialGrid,
    time_exponent: f64,
    space_exponent: f64,
    stride: usize,
    region: Region,
) -> Result<HoelderEstimate> {
    for (name, e) in [("time", time_exponent), ("space", space_exponent)] {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Domain(format!("{name} exponent must lie in (0,1), got {e}")));
        }
    }
    if stride == 0 {
        return Err(Error::Domain("stride must be >= 1".into()));
    }
    let inside = |idx: usize, t: f64| -> bool {
        match region {
            Region::Full => true,
            Region::Interior { space_margin, time_start } => {
                let p = grid.coordinate(idx);
                t >= time_start
                    && grid.extents().iter().enumerate().all(|(ax, (a, b))| p[ax] - a >= space_margin && b - p[ax] >= space_margin)
            }
        }
    };
    let candidates = |s: usize| -> Vec<(f64, [f64; 2], f64)> {
        let mut out = Vec::new();
        for (n, u) in trajectory.fields.iter().enumerate().step_by(s) {
            let t = trajectory.times[n];
            for idx in (0..grid.len()).step_by(s) {
                if inside(idx, t) {
                    out.push((t, grid.coordinate(idx), u[idx]));
                }
            }
        }
        out
    };
    let mut stride = stride;
    let mut pts = candidates(stride);
    while pts.len() > MAX_HOELDER_SAMPLES {
        stride += 1;
        pts = candidates(stride);
    }
    if pts.len() < 2 {
        return Err(Error::Contract("fewer than two sampled nodes in the region".into()));
    }
    let mut value: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let du = (a.2 - b.2).abs();
            if du == 0.0 {
                continue;
            }
            let dx = ((a.1[0] - b.1[0]).powi(2) + (a.1[1] - b.1[1]).powi(2)).sqrt();
            let dt = (a.0 - b.0).abs();
            let denom = dt.powf(time_exponent) + dx.powf(space_exponent);
            if denom > 0.0 {
                value = value.max(du / denom);
            }
        }
    }
    Ok(HoelderEstimate {
        time_exponent,
        space_exponent,
        value,
        stride,
        samples: pts.len(),
        region,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayReport {
    pub certificate: DecayCertificate,
    /// `2 ν λ_1`.
    pub rate: f64,
    /// Slope of `log W` against `log t` on `[T/10, T]`.
    pub tail_exponent: Option<f64>,
}

/// Builds `W(t_n) = |u_n|²_{L2}` and compares it with `W_0 E_α(−2νλ_1 t^α)`.
pub fn decay_report(
    trajectory: &Trajectory,
    spec: &ProblemSpec,
    floor: f64,
    lambda1: f64,
    slack: f64,
) -> Result<DecayReport> {
    if !spec.is_homogeneous() {
        return Err(Error::Hypotheses("decay estimate needs f = 0 and g = 0".into()));
    }
    if !trajectory.is_complete() {
        return Err(Error::Contract("trajectory is incomplete".into()));
    }
    let w: Vec<f64> = norms(trajectory, &spec.space).iter().map(|n| n.l2 * n.l2).collect();
    let rate = 2.0 * floor * lambda1;
    let certificate = comparison_check(&w, &spec.time, spec.alpha, rate, w[0], slack)?;
    let horizon = spec.time.horizon();
    let tail_exponent = log_log_slope(&trajectory.times, &w, horizon / 10.0, horizon);
    Ok(DecayReport { certificate, rate, tail_exponent })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundednessReport {
    pub initial_sup: f64,
    pub max_sup: f64,
    pub pass: bool,
}

/// `max_n |u_n|_∞ <= max(|u0|_∞, |g|_∞) + 1e−12`.
pub fn boundedness_report(trajectory: &Trajectory, spec: &ProblemSpec) -> BoundednessReport {
    let g_sup = (0..spec.space.len())
        .filter(|&i| spec.space.is_boundary(i))
        .fold(0.0, |m: f64, i| m.max(spec.boundary[i].abs()));
    let initial_sup = spec.initial.iter().fold(g_sup, |m, v| m.max(v.abs()));
    let max_sup = trajectory.fields.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()));
    BoundednessReport { initial_sup, max_sup, pass: max_sup <= initial_sup + 1e-12 }
}

/// L2-valued convexity inequality along the trajectory.
pub fn convexity_report(trajectory: &Trajectory, spec: &ProblemSpec) -> Result<ConvexityReport> {
    let weights = L1Weights::new(spec.alpha, &spec.time)?;
    check_discrete_convexity_fields(&weights, &trajectory.fields, &spec.space.quadrature_weights())
}

/// Tensor-product hat test functions: `space_hats` per axis on a uniform
/// coarse partition of the box, and `time_hats` centred on every
/// `time_stride`-th node (all vanishing at `t = T`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TestFunctionSet {
    pub space_hats: usize,
    pub time_hats: usize,
}

impl Default for TestFunctionSet {
    fn default() -> Self {
        Self { space_hats: 3, time_hats: 3 }
    }
}

/// Maximum over the test set of
/// `|∫∫ −η_t [g_{1−α} ∗ (u − u0)] + a(u)∇u·∇η − f η| / (sum of the magnitudes of the three terms)`.
pub fn weakform_residual(trajectory: &Trajectory, spec: &ProblemSpec, set: TestFunctionSet) -> Result<f64> {
    if !trajectory.is_complete() {
        return Err(Error::Contract("trajectory is incomplete".into()));
    }
    if set.space_hats == 0 || set.time_hats == 0 {
        return Err(Error::Domain("test set must be nonempty".into()));
    }
    let grid = &spec.space;
    let t = &trajectory.times;
    let steps = t.len() - 1;
    if steps < 2 * (set.time_hats + 1) {
        return Err(Error::Contract("too few time steps for the requested time hats".into()));
    }
    let alpha = spec.alpha;
    let u0 = &trajectory.fields[0];
    let len = grid.len();
    let vol: f64 = grid.spacing().iter().product();

    // I_n = (g_{1−α} ∗ (u − u0))(t_n) with u piecewise linear in time
    let mut conv = vec![vec![0.0; len]; steps + 1];
    for n in 1..=steps {
        let out = &mut conv[n];
        for k in 1..=n {
            let a = t[n] - t[k - 1];
            let b = t[n] - t[k];
            let tau = t[k] - t[k - 1];
            let g2 = rl_kernel_or_zero(2.0 - alpha, a) - rl_kernel_or_zero(2.0 - alpha, b);
            let g3 = rl_kernel_or_zero(3.0 - alpha, a) - rl_kernel_or_zero(3.0 - alpha, b);
            let lin = (a * g2 - (1.0 - alpha) * g3) / tau;
            let (cur, prev) = (&trajectory.fields[k], &trajectory.fields[k - 1]);
            for i in 0..len {
                let base = prev[i] - u0[i];
                out[i] += base * g2 + (cur[i] - prev[i]) * lin;
            }
        }
    }

    // spatial hats
    let hats_1d = |axis: usize, c: usize| -> Vec<f64> {
        let (a, b) = grid.extents()[axis];
        let width = (b - a) / (set.space_hats + 1) as f64;
        let centre = a + width * (c + 1) as f64;
        grid.axis_nodes(axis).iter().map(|x| (1.0 - (x - centre).abs() / width).max(0.0)).collect()
    };
    let mut space_tests: Vec<Vec<f64>> = Vec::new();
    let combos: Vec<[usize; 2]> = if grid.dim() == 1 {
        (0..set.space_hats).map(|c| [c, 0]).collect()
    } else {
        (0..set.space_hats).flat_map(|c| (0..set.space_hats).map(move |d| [c, d])).collect()
    };
    let boundary = grid.boundary_mask();
    for c in combos {
        let hx = hats_1d(0, c[0]);
        let hy = if grid.dim() == 2 { hats_1d(1, c[1]) } else { vec![1.0] };
        let phi: Vec<f64> = (0..len)
            .map(|idx| {
                if boundary[idx] {
                    return 0.0;
                }
                let [i, j] = grid.multi_index(idx);
                hx[i] * hy[if grid.dim() == 2 { j } else { 0 }]
            })
            .collect();
        space_tests.push(phi);
    }

    // per node: Dirichlet form, source pairing and memory pairing for each spatial test
    let mut src = vec![0.0; len];
    let ns = space_tests.len();
    let mut form = vec![vec![0.0; ns]; steps + 1];
    let mut fpair = vec![vec![0.0; ns]; steps + 1];
    let mut ipair = vec![vec![0.0; ns]; steps + 1];
    for n in 0..=steps {
        let u = &trajectory.fields[n];
        spec.source.sample(n, t[n], grid, &mut src);
        for (s, phi) in space_tests.iter().enumerate() {
            form[n][s] = dirichlet_form(grid, &spec.law, u, phi);
            fpair[n][s] = vol * phi.iter().zip(&src).map(|(p, f)| p * f).sum::<f64>();
            ipair[n][s] = vol * phi.iter().zip(&conv[n]).map(|(p, c)| p * c).sum::<f64>();
        }
    }

    let gap = steps / (set.time_hats + 1);
    let mut worst: f64 = 0.0;
    for c in 1..=set.time_hats {
        let (lo, mid, hi) = ((c - 1) * gap, c * gap, (c + 1) * gap);
        let hi = if c == set.time_hats { steps } else { hi };
        let psi = |n: usize| -> f64 {
            if n <= lo || n >= hi {
                0.0
            } else if n <= mid {
                (t[n] - t[lo]) / (t[mid] - t[lo])
            } else {
                (t[hi] - t[n]) / (t[hi] - t[mid])
            }
        };
        for s in 0..ns {
            let (mut time_term, mut space_term, mut rhs) = (0.0, 0.0, 0.0);
            for k in lo + 1..=hi {
                let tau = t[k] - t[k - 1];
                let dpsi = (psi(k) - psi(k - 1)) / tau;
                time_term -= dpsi * 0.5 * (ipair[k][s] + ipair[k - 1][s]) * tau;
                space_term += 0.5 * (psi(k) * form[k][s] + psi(k - 1) * form[k - 1][s]) * tau;
                rhs += 0.5 * (psi(k) * fpair[k][s] + psi(k - 1) * fpair[k - 1][s]) * tau;
            }
            let scale = time_term.abs() + space_term.abs() + rhs.abs();
            if scale > 0.0 {
                worst = worst.max((time_term + space_term - rhs).abs() / scale);
            }
        }
    }
    Ok(worst)
}

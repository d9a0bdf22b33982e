//! Riemann–Liouville kernels and the L1 discretization of the fractional
//! derivative `∂_t^α (v − v_0)`.
//!
//! On a mesh `0 = t_0 < t_1 < … < t_M = T` the L1 operator reads
//!
//! ```text
//! (D^α v)_n = Σ_{k=1..n} w_{n,k} (v_k − v_{k−1}),
//! w_{n,k}   = [(t_n − t_{k−1})^{1−α} − (t_n − t_k)^{1−α}] / (Γ(2−α) (t_k − t_{k−1}))
//! ```
//!
//! which is exact whenever `v` is piecewise linear on the mesh.

mod compress;

pub use compress::{benchmark_memory, CompressedHistory, MemoryTiming};

use statrs::function::gamma::gamma;

use crate::{Error, Result};

/// Riemann–Liouville kernel `g_β(t) = t^{β−1} / Γ(β)`.
pub fn rl_kernel(beta: f64, t: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("kernel order must be positive, got {beta}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("kernel argument must be positive, got {t}")));
    }
    Ok(t.powf(beta - 1.0) / gamma(beta))
}

/// `g_β(t)` extended by zero at `t = 0` for `β > 1`; used by the quadratures.
pub(crate) fn rl_kernel_or_zero(beta: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t.powf(beta - 1.0) / gamma(beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    Uniform,
    /// `t_n = T (n/M)^r`.
    Graded { exponent: f64 },
}

/// Time mesh on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    kind: GridKind,
}

impl TimeGrid {
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        Self::build(horizon, steps, GridKind::Uniform)
    }

    pub fn graded(horizon: f64, steps: usize, exponent: f64) -> Result<Self> {
        if !(exponent >= 1.0) || !exponent.is_finite() {
            return Err(Error::Grid(format!("grading exponent must be >= 1, got {exponent}")));
        }
        Self::build(horizon, steps, GridKind::Graded { exponent })
    }

    /// Graded mesh with exponent `(2−α)/α` capped at 4.
    pub fn graded_for_order(horizon: f64, steps: usize, alpha: f64) -> Result<Self> {
        Self::graded(horizon, steps, default_grading(alpha))
    }

    fn build(horizon: f64, steps: usize, kind: GridKind) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Grid(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(Error::Grid("at least one time step is required".into()));
        }
        let m = steps as f64;
        let nodes: Vec<f64> = (0..=steps)
            .map(|n| {
                let s = n as f64 / m;
                match kind {
                    GridKind::Graded { exponent } if exponent != 1.0 => horizon * s.powf(exponent),
                    _ => horizon * s,
                }
            })
            .collect();
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("nodes are not strictly increasing".into()));
        }
        Ok(Self { nodes, kind })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Number of steps `M`.
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Step `τ_n = t_n − t_{n−1}` for `n >= 1`.
    pub fn step(&self, n: usize) -> f64 {
        self.nodes[n] - self.nodes[n - 1]
    }

    pub fn is_uniform(&self) -> bool {
        match self.kind {
            GridKind::Uniform => true,
            GridKind::Graded { exponent } => exponent == 1.0,
        }
    }
}

pub fn default_grading(alpha: f64) -> f64 {
    ((2.0 - alpha) / alpha).clamp(1.0, 4.0)
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional order must lie in (0,1), got {alpha}")))
    }
}

/// L1 weights `w_{n,k}` on a given mesh.
///
/// Rows are evaluated on demand; on uniform meshes the Toeplitz lag weights are
/// cached so a row costs one lookup per entry.
#[derive(Debug, Clone)]
pub struct L1Weights {
    alpha: f64,
    grid: TimeGrid,
    inv_gamma: f64,
    lag: Option<Vec<f64>>,
}

impl L1Weights {
    pub fn new(alpha: f64, grid: &TimeGrid) -> Result<Self> {
        check_order(alpha)?;
        let inv_gamma = 1.0 / gamma(2.0 - alpha);
        let lag = grid.is_uniform().then(|| {
            let tau = grid.step(1);
            let scale = tau.powf(-alpha) * inv_gamma;
            let e = 1.0 - alpha;
            (0..grid.steps())
                .map(|j| {
                    let j = j as f64;
                    scale * ((j + 1.0).powf(e) - j.powf(e))
                })
                .collect()
        });
        Ok(Self { alpha, grid: grid.clone(), inv_gamma, lag })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Weight `w_{n,k}` for `1 <= k <= n <= M`.
    pub fn weight(&self, n: usize, k: usize) -> f64 {
        debug_assert!(1 <= k && k <= n && n <= self.grid.steps());
        if let Some(lag) = &self.lag {
            return lag[n - k];
        }
        let t = self.grid.nodes();
        let e = 1.0 - self.alpha;
        let hi = (t[n] - t[k - 1]).powf(e);
        let lo = if k == n { 0.0 } else { (t[n] - t[k]).powf(e) };
        (hi - lo) * self.inv_gamma / (t[k] - t[k - 1])
    }

    /// Row `n` as `[w_{n,1}, …, w_{n,n}]`.
    pub fn row(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.weight(n, k)).collect()
    }

    /// Uniform-mesh lag weights `b_j = w_{n,n−j}`, if cached.
    pub fn lag_weights(&self) -> Option<&[f64]> {
        self.lag.as_deref()
    }

    /// `(D^α v)_n` where `n = history.len() − 1`.
    pub fn apply(&self, history: &[f64]) -> Result<f64> {
        if history.is_empty() {
            return Err(Error::Contract("history must contain at least v_0".into()));
        }
        let n = history.len() - 1;
        if n > self.grid.steps() {
            return Err(Error::Contract(format!(
                "history of length {} exceeds the {} steps of the grid",
                history.len(),
                self.grid.steps()
            )));
        }
        Ok((1..=n)
            .map(|k| self.weight(n, k) * (history[k] - history[k - 1]))
            .sum())
    }
}

/// Builds the L1 weights for order `alpha` on `grid`.
pub fn l1_weights(alpha: f64, grid: &TimeGrid) -> Result<L1Weights> {
    L1Weights::new(alpha, grid)
}

/// Evaluates `(D^α v)_n` for the history `v_0..v_n`.
pub fn apply_l1(weights: &L1Weights, history: &[f64]) -> Result<f64> {
    weights.apply(history)
}

/// Outcome of the discrete convexity check `v_n (D^α v)_n >= ½ (D^α v²)_n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvexityReport {
    /// `v_n (D^α v)_n − ½ (D^α v²)_n` for `n = 1..`.
    pub margins: Vec<f64>,
    /// Margins of the strengthened form that also subtracts `½ g_{1−α}(t_n) v_n²`.
    /// Measured only; never part of the verdict.
    pub strong_margins: Vec<f64>,
    pub min_margin: f64,
    pub min_strong_margin: f64,
    pub violations: usize,
    pub holds: bool,
}

/// Checks the weak discrete convexity inequality at every step of a scalar history.
pub fn check_discrete_convexity(weights: &L1Weights, history: &[f64]) -> Result<ConvexityReport> {
    let fields: Vec<&[f64]> = history.iter().map(std::slice::from_ref).collect();
    check_discrete_convexity_fields(weights, &fields, &[1.0])
}

/// Hilbert-space version: `(v_n, (D^α v)_n) >= ½ (D^α |v|²)_n` with the inner
/// product `(a, b) = Σ q_i a_i b_i` given by quadrature weights `q`.
pub fn check_discrete_convexity_fields<F: AsRef<[f64]>>(
    weights: &L1Weights,
    history: &[F],
    quadrature: &[f64],
) -> Result<ConvexityReport> {
    if history.is_empty() {
        return Err(Error::Contract("history must contain at least v_0".into()));
    }
    let steps = history.len() - 1;
    if steps > weights.grid().steps() {
        return Err(Error::Contract("history longer than the time grid".into()));
    }
    let len = quadrature.len();
    if history.iter().any(|v| v.as_ref().len() != len) {
        return Err(Error::Contract("field length does not match quadrature weights".into()));
    }
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        quadrature.iter().zip(a).zip(b).map(|((q, x), y)| q * x * y).sum()
    };
    let sq: Vec<f64> = history.iter().map(|v| inner(v.as_ref(), v.as_ref())).collect();
    let t = weights.grid().nodes();

    let mut margins = Vec::with_capacity(steps);
    let mut strong = Vec::with_capacity(steps);
    let mut violations = 0;
    let mut dv = vec![0.0; len];
    for n in 1..=steps {
        dv.iter_mut().for_each(|x| *x = 0.0);
        let mut d_sq = 0.0;
        for k in 1..=n {
            let w = weights.weight(n, k);
            let (cur, prev) = (history[k].as_ref(), history[k - 1].as_ref());
            for ((d, c), p) in dv.iter_mut().zip(cur).zip(prev) {
                *d += w * (c - p);
            }
            d_sq += w * (sq[k] - sq[k - 1]);
        }
        let lhs = inner(history[n].as_ref(), &dv);
        let rhs = 0.5 * d_sq;
        let margin = lhs - rhs;
        // rounding allowance for the cancellation in lhs − rhs
        let tol = 64.0 * f64::EPSILON * (lhs.abs() + rhs.abs());
        if margin < -tol {
            violations += 1;
        }
        margins.push(margin);
        strong.push(margin - 0.5 * rl_kernel_or_zero(1.0 - weights.alpha(), t[n]) * sq[n]);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let min_strong_margin = strong.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConvexityReport {
        margins,
        strong_margins: strong,
        min_margin,
        min_strong_margin,
        violations,
        holds: violations == 0,
    })
}

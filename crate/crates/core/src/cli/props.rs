//! Randomized property sweeps: discrete convexity, the discrete comparison
//! principle and sampled Mittag-Leffler bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fode::solve_relaxation_l1;
use crate::frackernel::{check_discrete_convexity, L1Weights, TimeGrid};
use crate::mlf::{ml_tail_bound, ml_value, TailReport};
use crate::Result;

pub const SWEEP_ALPHAS: [f64; 3] = [0.3, 0.5, 0.8];
/// Limit on `sup (1+x)E_{1/2}(−x)` over the sample grid.
pub const TAIL_LIMIT: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub name: String,
    pub cases: usize,
    /// Individual inequality checks (one per step per case).
    pub checks: usize,
    pub violations: usize,
    /// Smallest margin seen (positive means the inequality held with room).
    pub min_margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlBoundsReport {
    pub tails: Vec<TailReport>,
    pub positive: bool,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropsReport {
    pub seed: u64,
    pub convexity: SweepReport,
    pub comparison: SweepReport,
    pub ml_bounds: MlBoundsReport,
    pub pass: bool,
}

fn random_grid(rng: &mut ChaCha8Rng, graded: bool, alpha: f64, steps: usize) -> Result<TimeGrid> {
    let horizon = rng.random_range(0.1..10.0);
    if graded {
        TimeGrid::graded_for_order(horizon, steps, alpha)
    } else {
        TimeGrid::uniform(horizon, steps)
    }
}

/// Random histories of assorted shapes: white noise, random walks and
/// smooth oscillations, with random scale.
fn random_history(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    match rng.random_range(0..3) {
        0 => (0..len).map(|_| scale * rng.random_range(-1.0..1.0)).collect(),
        1 => {
            let mut v = scale * rng.random_range(-1.0..1.0);
            (0..len)
                .map(|_| {
                    v += scale * rng.random_range(-0.3..0.3);
                    v
                })
                .collect()
        }
        _ => {
            let (f, p) = (rng.random_range(0.5..20.0), rng.random_range(0.0..6.3));
            (0..len).map(|i| scale * (f * i as f64 / len as f64 + p).sin()).collect()
        }
    }
}

/// `histories` random histories for each α in [`SWEEP_ALPHAS`] and each grid kind.
pub fn convexity_sweep(seed: u64, histories: usize, steps: usize) -> Result<SweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cases, mut checks, mut violations) = (0, 0, 0);
    let mut min_margin = f64::INFINITY;
    for &alpha in &SWEEP_ALPHAS {
        for graded in [false, true] {
            for _ in 0..histories {
                let grid = random_grid(&mut rng, graded, alpha, steps)?;
                let weights = L1Weights::new(alpha, &grid)?;
                let history = random_history(&mut rng, steps + 1);
                let r = check_discrete_convexity(&weights, &history)?;
                cases += 1;
                checks += r.margins.len();
                violations += r.violations;
                min_margin = min_margin.min(r.min_margin);
            }
        }
    }
    Ok(SweepReport { name: "convexity".into(), cases, checks, violations, min_margin, pass: violations == 0 })
}

/// Builds a random sequence with `W_0 <= V_0` and
/// `(D^α W)_n + μ W_n <= 0` at every step, by choosing `W_n` at or below the
/// value that attains equality.
pub fn random_subsolution(rng: &mut ChaCha8Rng, weights: &L1Weights, rate: f64, v0: f64) -> Vec<f64> {
    let steps = weights.grid().steps();
    let mut w = Vec::with_capacity(steps + 1);
    w.push(v0 * rng.random_range(0.0..=1.0));
    for n in 1..=steps {
        let memory: f64 = (1..n).map(|k| weights.weight(n, k) * (w[k] - w[k - 1])).sum();
        let local = weights.weight(n, n);
        let top = (local * w[n - 1] - memory) / (local + rate);
        let gap = if rng.random_bool(0.3) { 0.0 } else { v0 * rng.random_range(0.0..0.2) };
        w.push(top - gap);
    }
    w
}

/// `(D^α W)_n + μ W_n` evaluated by direct substitution.
pub fn relaxation_residuals(weights: &L1Weights, rate: f64, w: &[f64]) -> Vec<f64> {
    (1..w.len())
        .map(|n| {
            let d: f64 = (1..=n).map(|k| weights.weight(n, k) * (w[k] - w[k - 1])).sum();
            d + rate * w[n]
        })
        .collect()
}

pub fn comparison_sweep(seed: u64, cases: usize) -> Result<SweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (mut checks, mut violations) = (0, 0);
    let mut min_margin = f64::INFINITY;
    for _ in 0..cases {
        let alpha = rng.random_range(0.05..0.95);
        let steps = rng.random_range(8..=64);
        let graded = rng.random_bool(0.5);
        let grid = random_grid(&mut rng, graded, alpha, steps)?;
        let weights = L1Weights::new(alpha, &grid)?;
        let rate = rng.random_range(0.05..5.0);
        let v0 = rng.random_range(0.1..10.0);
        let w = random_subsolution(&mut rng, &weights, rate, v0);
        let v = solve_relaxation_l1(alpha, rate, v0, &grid)?;
        // admissibility by substitution, up to rounding in the weighted sums
        let scale: f64 = weights.weight(steps, steps) * v0;
        let admissible = relaxation_residuals(&weights, rate, &w).iter().all(|&r| r <= 1e-10 * scale);
        if !admissible || w[0] > v[0] {
            violations += 1;
            continue;
        }
        for (a, b) in w.iter().zip(&v).skip(1) {
            checks += 1;
            let margin = b - a;
            min_margin = min_margin.min(margin);
            if margin < -1e-12 * v0 {
                violations += 1;
            }
        }
    }
    Ok(SweepReport { name: "comparison".into(), cases, checks, violations, min_margin, pass: violations == 0 })
}

/// Sample grid on `[0, upper]`: dense uniform near the origin, geometric beyond.
pub fn tail_grid(upper: f64, samples: usize) -> Vec<f64> {
    let near = samples / 4;
    let mut xs: Vec<f64> = (0..near).map(|i| i as f64 / near as f64).collect();
    let far = samples - near;
    let ratio = upper.ln() / (far - 1) as f64;
    xs.extend((0..far).map(|i| (ratio * i as f64).exp()));
    if let Some(x) = xs.last_mut() {
        *x = upper;
    }
    xs
}

/// Positivity, monotonicity and convexity of `E_α(−x)` on a sample of `[0, upper]`,
/// and the tail constant `sup (1+x) E_α(−x)`, for each α in [`SWEEP_ALPHAS`].
pub fn ml_bounds(upper: f64, samples: usize) -> Result<MlBoundsReport> {
    let xs = tail_grid(upper, samples);
    let mut tails = Vec::new();
    let mut positive = true;
    for &alpha in &SWEEP_ALPHAS {
        for &x in xs.iter().step_by(7) {
            positive &= ml_value(alpha, -x)? > 0.0;
        }
        tails.push(ml_tail_bound(alpha, &xs)?);
    }
    let shape = tails.iter().all(|t| t.nonincreasing && t.convex);
    let half = tails.iter().find(|t| t.alpha == 0.5).expect("0.5 is swept");
    let pass = positive && shape && half.constant.is_finite() && half.constant <= TAIL_LIMIT;
    Ok(MlBoundsReport { tails, positive, samples: xs.len(), pass })
}

pub fn run_props(seed: u64) -> Result<PropsReport> {
    let convexity = convexity_sweep(seed, 1000, 48)?;
    let comparison = comparison_sweep(seed, 1000)?;
    let ml_bounds = ml_bounds(1e4, 2000)?;
    let pass = convexity.pass && comparison.pass && ml_bounds.pass;
    Ok(PropsReport { seed, convexity, comparison, ml_bounds, pass })
}

//! Sum-of-exponentials compression of the L1 memory term on uniform meshes.
//!
//! The kernel `σ^{−α}` is written as `Γ(α)^{−1} ∫_0^∞ e^{−sσ} s^{α−1} ds` and the
//! integral is discretized by the trapezoidal rule after the substitution
//! `s = exp(y − e^{−y})`, which makes the integrand decay double
//! exponentially at both ends. Every mode has a positive exponent and weight.
//! The local weight `w_{n,n}` is never compressed; only lags `j >= 1` go
//! through the modes.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use super::L1Weights;
use crate::{Error, Result};

const MODE_BUDGET: usize = 4096;

/// Exponential-mode representation of the history part of the L1 sum.
#[derive(Debug, Clone)]
pub struct CompressedHistory {
    exponents: Vec<f64>,
    weights: Vec<f64>,
    /// `e^{−λ_m τ}`.
    decay: Vec<f64>,
    /// Multiplier turning mode states into the memory sum.
    coeff: Vec<f64>,
    tolerance: f64,
    achieved: f64,
    nodes: usize,
    /// Mode-major: `state[m * nodes + i]`.
    state: Vec<f64>,
}

impl CompressedHistory {
    /// Fits modes reproducing every lag weight of `weights` within relative
    /// error `tolerance`. Only uniform meshes are supported.
    pub fn build(weights: &L1Weights, tolerance: f64, nodes: usize) -> Result<Self> {
        let lag = weights.lag_weights().ok_or_else(|| {
            Error::Contract("history compression requires a uniform time grid".into())
        })?;
        if !(tolerance > 0.0) {
            return Err(Error::Domain(format!("compression tolerance must be positive, got {tolerance}")));
        }
        let alpha = weights.alpha();
        let grid = weights.grid();
        let tau = grid.step(1);
        let horizon = grid.horizon();

        let mut h = 0.6;
        let mut best = f64::INFINITY;
        let mut best_modes = 0;
        loop {
            let (exponents, mode_weights) = trapezoid_modes(alpha, tau, horizon, tolerance, h);
            if exponents.len() > MODE_BUDGET {
                return Err(Error::Compression {
                    requested: tolerance,
                    achieved: best,
                    modes: best_modes,
                });
            }
            let decay: Vec<f64> = exponents.iter().map(|l| (-l * tau).exp()).collect();
            let scale = 1.0 / (gamma(1.0 - alpha) * tau);
            let coeff: Vec<f64> = exponents
                .iter()
                .zip(&mode_weights)
                .map(|(l, w)| scale * w * (-(-l * tau).exp_m1()) / l)
                .collect();
            let achieved = lag_error(lag, &decay, &coeff);
            if achieved < best {
                best = achieved;
                best_modes = exponents.len();
            }
            if achieved <= tolerance {
                let modes = exponents.len();
                return Ok(Self {
                    exponents,
                    weights: mode_weights,
                    decay,
                    coeff,
                    tolerance,
                    achieved,
                    nodes,
                    state: vec![0.0; modes * nodes],
                });
            }
            h *= 0.8;
            if h < 1e-3 {
                return Err(Error::Compression {
                    requested: tolerance,
                    achieved: best,
                    modes: best_modes,
                });
            }
        }
    }

    pub fn modes(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn mode_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Maximum relative lag-weight error measured when the modes were fitted.
    pub fn achieved_error(&self) -> f64 {
        self.achieved
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Clears the accumulated history.
    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|s| *s = 0.0);
    }

    /// Writes `Σ_{k<n} w_{n,k}(v_k − v_{k−1})` into `out`, where `n − 1` increments
    /// have been pushed so far.
    pub fn memory(&self, out: &mut [f64]) {
        assert_eq!(out.len(), self.nodes);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (m, c) in self.coeff.iter().enumerate() {
            let s = &self.state[m * self.nodes..(m + 1) * self.nodes];
            for (o, v) in out.iter_mut().zip(s) {
                *o += c * v;
            }
        }
    }

    /// Appends the increment `v_n − v_{n−1}`.
    pub fn push(&mut self, increment: &[f64]) {
        assert_eq!(increment.len(), self.nodes);
        for (m, q) in self.decay.iter().enumerate() {
            let s = &mut self.state[m * self.nodes..(m + 1) * self.nodes];
            for (v, d) in s.iter_mut().zip(increment) {
                *v = q * (*v + d);
            }
        }
    }
}

/// Trapezoidal nodes in `y` with `s = exp(y − e^{−y})`, truncated where the
/// integrand is negligible against the tolerance.
fn trapezoid_modes(alpha: f64, tau: f64, horizon: f64, tol: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let inv_g = 1.0 / gamma(alpha);
    let density = |y: f64, sigma: f64| -> f64 {
        let s = (y - (-y).exp()).exp();
        (-s * sigma).exp() * s.powf(alpha) * (1.0 + (-y).exp()) * inv_g
    };
    let cut = 1e-3 * tol;
    // left end: compare against the smallest kernel value σ = T
    let floor = horizon.powf(-alpha);
    let mut y_lo = 0.0;
    while density(y_lo, 0.0) > cut * floor {
        y_lo -= h;
    }
    // right end: compare against σ = τ, where the integrand decays fastest
    let ceil = tau.powf(-alpha);
    let mut y_hi = 0.0;
    while density(y_hi, tau) > cut * ceil || (y_hi - (-y_hi).exp()).exp() * tau < 1.0 {
        y_hi += h;
    }
    let count = ((y_hi - y_lo) / h).ceil() as usize + 1;
    let mut exponents = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for j in 0..count {
        let y = y_lo + j as f64 * h;
        let s = (y - (-y).exp()).exp();
        exponents.push(s);
        weights.push(h * s.powf(alpha) * (1.0 + (-y).exp()) * inv_g);
    }
    (exponents, weights)
}

/// `max_j |w̃_j − b_j| / b_j` over the lags `1..M−1` that the history uses.
fn lag_error(lag: &[f64], decay: &[f64], coeff: &[f64]) -> f64 {
    let mut approx = vec![0.0; lag.len()];
    for (q, c) in decay.iter().zip(coeff) {
        let mut p = *q;
        for a in approx.iter_mut().skip(1) {
            *a += c * p;
            p *= q;
        }
    }
    lag.iter()
        .zip(&approx)
        .skip(1)
        .map(|(b, a)| ((a - b) / b).abs())
        .fold(0.0, f64::max)
}

/// Wall-clock comparison of direct and compressed memory evaluation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MemoryTiming {
    pub steps: usize,
    pub nodes: usize,
    pub modes: usize,
    pub direct_secs: f64,
    pub compressed_secs: f64,
    pub build_secs: f64,
    /// Max over steps and nodes of |compressed − direct| / Σ_k w_{n,k}|Δv_k|.
    pub max_rel_deviation: f64,
    pub speedup: f64,
}

/// Accumulates the memory sum of a random history of `nodes` components over
/// every step of `weights`' uniform grid, once directly and once through the
/// compressed modes.
pub fn benchmark_memory(weights: &L1Weights, tolerance: f64, nodes: usize, seed: u64) -> Result<MemoryTiming> {
    let lag = weights
        .lag_weights()
        .ok_or_else(|| Error::Contract("benchmark requires a uniform time grid".into()))?;
    let steps = weights.grid().steps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let increments: Vec<Vec<f64>> = (0..=steps)
        .map(|_| (0..nodes).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();

    let start = Instant::now();
    let mut direct = vec![vec![0.0; nodes]; steps + 1];
    let mut scale = vec![vec![0.0; nodes]; steps + 1];
    for n in 2..=steps {
        let (d, s) = (&mut direct[n], &mut scale[n]);
        for k in 1..n {
            let w = lag[n - k];
            for ((di, si), inc) in d.iter_mut().zip(s.iter_mut()).zip(&increments[k]) {
                *di += w * inc;
                *si += w * inc.abs();
            }
        }
    }
    let direct_secs = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut hist = CompressedHistory::build(weights, tolerance, nodes)?;
    let build_secs = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut compressed = vec![vec![0.0; nodes]; steps + 1];
    for n in 1..=steps {
        hist.memory(&mut compressed[n]);
        hist.push(&increments[n]);
    }
    let compressed_secs = start.elapsed().as_secs_f64();

    let mut dev: f64 = 0.0;
    for n in 2..=steps {
        for i in 0..nodes {
            dev = dev.max((compressed[n][i] - direct[n][i]).abs() / scale[n][i]);
        }
    }
    Ok(MemoryTiming {
        steps,
        nodes,
        modes: hist.modes(),
        direct_secs,
        compressed_secs,
        build_secs,
        max_rel_deviation: dev,
        speedup: direct_secs / compressed_secs.max(1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frackernel::TimeGrid;

    #[test]
    fn graded_grid_rejected() {
        let grid = TimeGrid::graded(1.0, 16, 2.0).unwrap();
        let w = L1Weights::new(0.5, &grid).unwrap();
        assert!(matches!(CompressedHistory::build(&w, 1e-8, 1), Err(Error::Contract(_))));
    }

    #[test]
    fn modes_positive_and_fit_reported() {
        let grid = TimeGrid::uniform(1.0, 512).unwrap();
        let w = L1Weights::new(0.3, &grid).unwrap();
        let h = CompressedHistory::build(&w, 1e-9, 1).unwrap();
        assert!(h.exponents().iter().all(|&l| l > 0.0));
        assert!(h.mode_weights().iter().all(|&x| x > 0.0));
        assert!(h.achieved_error() <= 1e-9);
    }

    #[test]
    fn single_step_history_exact() {
        let grid = TimeGrid::uniform(1.0, 1).unwrap();
        let w = L1Weights::new(0.5, &grid).unwrap();
        let h = CompressedHistory::build(&w, 1e-8, 1).unwrap();
        let mut out = [1.0];
        h.memory(&mut out);
        assert_eq!(out[0], 0.0);
    }

    #[test]
    fn unreachable_tolerance_fails_with_achieved_error() {
        let grid = TimeGrid::uniform(1.0, 256).unwrap();
        let w = L1Weights::new(0.5, &grid).unwrap();
        match CompressedHistory::build(&w, 1e-18, 1) {
            Err(Error::Compression { achieved, requested, .. }) => {
                assert_eq!(requested, 1e-18);
                assert!(achieved.is_finite() && achieved > 1e-18);
            }
            other => panic!("expected compression failure, got {other:?}"),
        }
    }
}

//! Scalar fractional relaxation `∂_t^α (V − V_0) + μ V = 0` and the
//! comparison harness that bounds squared L2 norms of solver trajectories by
//! the envelope `W_0 E_α(−μ t^α)`.

use crate::frackernel::{L1Weights, TimeGrid};
use crate::mlf::ml_value;
use crate::{Error, Result};

/// Default multiplicative slack of the envelope test.
pub const DEFAULT_SLACK: f64 = 1.05;

/// `V_0 E_α(−μ t^α)`.
pub fn relaxation_solution(alpha: f64, rate: f64, initial: f64, t: f64) -> Result<f64> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("relaxation rate must be positive, got {rate}")));
    }
    if !(initial >= 0.0) {
        return Err(Error::Domain(format!("initial value must be nonnegative, got {initial}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(initial);
    }
    Ok(initial * ml_value(alpha, -rate * t.powf(alpha))?)
}

/// L1 solution of the relaxation equation on `grid`: each step solves
/// `(D^α V)_n + μ V_n = 0` for `V_n`. A zero rate is admitted and returns the
/// constant sequence.
pub fn solve_relaxation_l1(alpha: f64, rate: f64, initial: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("relaxation rate must be nonnegative, got {rate}")));
    }
    if !(initial >= 0.0) {
        return Err(Error::Domain(format!("initial value must be nonnegative, got {initial}")));
    }
    let weights = L1Weights::new(alpha, grid)?;
    let steps = grid.steps();
    let mut v = Vec::with_capacity(steps + 1);
    v.push(initial);
    for n in 1..=steps {
        let memory: f64 = (1..n).map(|k| weights.weight(n, k) * (v[k] - v[k - 1])).sum();
        let local = weights.weight(n, n);
        v.push((local * v[n - 1] - memory) / (local + rate));
    }
    Ok(v)
}

/// Envelope comparison of an observed sequence `W(t_n)` against
/// `slack · W_0 E_α(−μ t_n^α)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayCertificate {
    pub alpha: f64,
    pub rate: f64,
    pub initial: f64,
    pub slack: f64,
    pub times: Vec<f64>,
    pub envelope: Vec<f64>,
    pub observed: Vec<f64>,
    /// `min_n (slack V_n − W_n)` over `n >= 1`; `+∞` if no node has `W_n > 0`.
    pub margin: f64,
    /// Largest `W_n / V_n` over `n >= 1`.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Fills the certificate for `observed` sampled on `grid`.
pub fn comparison_check(
    observed: &[f64],
    grid: &TimeGrid,
    alpha: f64,
    rate: f64,
    initial: f64,
    slack: f64,
) -> Result<DecayCertificate> {
    let times = grid.nodes();
    if observed.len() != times.len() {
        return Err(Error::Contract(format!(
            "{} observations for a grid with {} nodes",
            observed.len(),
            times.len()
        )));
    }
    if !(slack >= 1.0) {
        return Err(Error::Domain(format!("slack must be >= 1, got {slack}")));
    }
    if observed[0] > initial * (1.0 + 1e-12) {
        return Err(Error::Contract(format!(
            "W(0) = {} exceeds the envelope start {initial}",
            observed[0]
        )));
    }
    let envelope: Vec<f64> = times
        .iter()
        .map(|&t| relaxation_solution(alpha, rate, initial, t))
        .collect::<Result<_>>()?;
    let mut margin = f64::INFINITY;
    let mut worst_ratio: f64 = 0.0;
    let mut pass = true;
    for (w, v) in observed.iter().zip(&envelope).skip(1) {
        if *w > 0.0 {
            margin = margin.min(slack * v - w);
            worst_ratio = worst_ratio.max(w / v);
        }
        if *w > slack * v {
            pass = false;
        }
    }
    Ok(DecayCertificate {
        alpha,
        rate,
        initial,
        slack,
        times: times.to_vec(),
        envelope,
        observed: observed.to_vec(),
        margin,
        worst_ratio,
        pass,
    })
}

/// Least-squares slope of `log y` against `log t` over samples with
/// `lo <= t <= hi` and `y > 0`.
pub fn log_log_slope(times: &[f64], values: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, y)| **t >= lo && **t <= hi && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

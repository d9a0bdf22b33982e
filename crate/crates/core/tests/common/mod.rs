//! Oracles shared by the integration tests. Nothing here calls into the
//! library's own kernels or special functions.
#![allow(dead_code)]

use statrs::function::gamma::gamma;

/// `e^{x²} erfc(x)`, which equals `E_{1/2}(−x)` for `x >= 0`.
pub fn erfcx(x: f64) -> f64 {
    if x < 1.0 {
        // e^{x²} − (2/√π) Σ 2^n x^{2n+1} / (2n+1)!!
        let (mut sum, mut term, mut n) = (0.0f64, x, 0.0);
        while term > 1e-18 * sum.max(x) {
            sum += term;
            n += 1.0;
            term *= 2.0 * x * x / (2.0 * n + 1.0);
        }
        return (x * x).exp() - 2.0 / std::f64::consts::PI.sqrt() * sum;
    }
    // continued fraction  √π erfcx(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut tail = x;
    for k in (1..=400).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    1.0 / (tail * std::f64::consts::PI.sqrt())
}

/// L1 weight `w_{n,k}` on an arbitrary grid, straight from the definition.
pub fn l1_weight(t: &[f64], alpha: f64, n: usize, k: usize) -> f64 {
    let e = 1.0 - alpha;
    ((t[n] - t[k - 1]).powf(e) - (t[n] - t[k]).powf(e)) / (gamma(2.0 - alpha) * (t[k] - t[k - 1]))
}

/// L1 approximation of the order-α derivative of `v` at node `n`.
pub fn l1_apply(t: &[f64], alpha: f64, v: &[f64], n: usize) -> f64 {
    (1..=n).map(|k| l1_weight(t, alpha, n, k) * (v[k] - v[k - 1])).sum()
}

/// L1 solution of `(D^α V)_n + μ V_n = 0`.
pub fn relaxation_l1(t: &[f64], alpha: f64, rate: f64, v0: f64) -> Vec<f64> {
    let mut v = vec![v0];
    for n in 1..t.len() {
        let hist: f64 = (1..n).map(|k| l1_weight(t, alpha, n, k) * (v[k] - v[k - 1])).sum();
        let local = l1_weight(t, alpha, n, n);
        v.push((local * v[n - 1] - hist) / (local + rate));
    }
    v
}

/// Trapezoidal `∫ u²` on a uniform 1D grid of `u.len()` nodes over an interval of length `len`.
pub fn l2_squared_1d(u: &[f64], len: f64) -> f64 {
    let h = len / (u.len() - 1) as f64;
    let n = u.len();
    h * (u.iter().map(|v| v * v).sum::<f64>() - 0.5 * (u[0] * u[0] + u[n - 1] * u[n - 1]))
}

/// Least-squares slope of `log y` against `log t` for `lo <= t <= hi`.
pub fn loglog_slope(t: &[f64], y: &[f64], lo: f64, hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(t, y)| **t >= lo && **t <= hi && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Backward Euler for `u_t = u_xx` on `(0, len)` with zero Dirichlet data,
/// via the Thomas algorithm. Returns one field per node of `t`.
pub fn heat_backward_euler(u0: &[f64], len: f64, t: &[f64]) -> Vec<Vec<f64>> {
    let n = u0.len();
    let h = len / (n - 1) as f64;
    let mut out = vec![u0.to_vec()];
    for s in 1..t.len() {
        let r = (t[s] - t[s - 1]) / (h * h);
        let prev = &out[s - 1];
        let m = n - 2;
        // interior system: (1+2r) u_i − r u_{i−1} − r u_{i+1} = prev_i
        let (a, b, c) = (-r, 1.0 + 2.0 * r, -r);
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = c / b;
        dp[0] = prev[1] / b;
        for i in 1..m {
            let den = b - a * cp[i - 1];
            cp[i] = c / den;
            dp[i] = (prev[i + 1] - a * dp[i - 1]) / den;
        }
        let mut u = vec![0.0; n];
        u[m] = dp[m - 1];
        for i in (0..m - 1).rev() {
            u[i + 1] = dp[i] - cp[i] * u[i + 2];
        }
        out.push(u);
    }
    out
}

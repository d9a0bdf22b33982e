//! Acceptance suite. Runs every criterion in sequence (timing criteria need
//! an otherwise idle process), prints one line per criterion and exits
//! nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subdiff::cli::config::{GridChoice, HistoryChoice, Oracle, Preset, RunConfig, StudyAxis};
use subdiff::cli::{convergence_study, execute, RunReport};
use subdiff::fode::solve_relaxation_l1;
use subdiff::frackernel::{check_discrete_convexity, L1Weights, TimeGrid};
use subdiff::mlf::{mittag_leffler, ml_tail_bound, ml_value};
use subdiff::solver::{run_trajectory, ProblemSpec, SolverOptions, Source, Trajectory};
use subdiff::spatial::{build_grid, DiffusionLaw};

const SEED: u64 = 20240611;

// pinned thresholds
const EIGENMODE_REL_L2: f64 = 0.02;
const EIGENMODE_SECONDS: f64 = 10.0;
const DECAY_SLACK: f64 = 1.05;
const TAIL_EXPONENT_BAND: f64 = 0.1;
const SWEEP_HISTORIES: usize = 1000;
const BOUNDEDNESS_ROUNDING: f64 = 1e-12;
const COMPARISON_CASES: usize = 1000;
const ML_HALF_TOL: f64 = 1e-10;
const ML_ONE_TOL: f64 = 1e-12;
const TAIL_CONSTANT: f64 = 1.2;
const CLASSICAL_REL_L2: f64 = 0.01;
const COMPRESSION_TOL: f64 = 1e-8;
const COMPRESSION_AGREEMENT: f64 = 1e-7;
const COMPRESSION_SPEEDUP: f64 = 10.0;
const COMPRESSION_STEPS: usize = 16384;
const SPACE_ORDER: (f64, f64) = (1.7, 2.3);
const TIME_ORDER_FLOOR: f64 = 1.0;

type Outcome = Result<String, String>;

/// Sup norms of every homogeneous acceptance run, for the boundedness criterion.
#[derive(Default)]
struct Ledger {
    runs: Vec<(String, f64, f64)>,
}

impl Ledger {
    fn record(&mut self, label: &str, spec: &ProblemSpec, traj: &Trajectory) {
        if !spec.source.is_zero() {
            return;
        }
        let start = spec.initial.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let max = traj.fields.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()));
        self.runs.push((label.to_string(), start, max));
    }
}

fn check(ok: bool, pass: String, fail: String) -> Outcome {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

fn run(config: &RunConfig, label: &str, ledger: &mut Ledger) -> Result<(RunReport, Trajectory, ProblemSpec), String> {
    let (report, traj, spec) = execute(config).map_err(|e| format!("{label}: {e}"))?;
    ledger.record(label, &spec, &traj);
    if let Some(f) = &report.summary.failure {
        return Err(format!("{label}: {f}"));
    }
    Ok((report, traj, spec))
}

fn quiet(mut c: RunConfig) -> RunConfig {
    c.diagnostics.decay = false;
    c.diagnostics.boundedness = false;
    c.diagnostics.convexity = false;
    c
}

fn eigenmode(ledger: &mut Ledger) -> Outcome {
    let c = RunConfig::preset(Preset::Eigenmode);
    assert_eq!((c.space.points[0], c.time.steps, c.problem.alpha), (128, 256, 0.5));
    let start = Instant::now();
    let (_, traj, spec) = run(&quiet(c), "eigenmode", ledger)?;
    let secs = start.elapsed().as_secs_f64();
    let x = spec.space.axis_nodes(0);
    let mut worst: f64 = 0.0;
    for (t, u) in traj.times.iter().zip(&traj.fields) {
        let decay = common::erfcx(t.sqrt());
        let exact: Vec<f64> = x.iter().map(|x| decay * x.sin()).collect();
        let diff: Vec<f64> = u.iter().zip(&exact).map(|(a, b)| a - b).collect();
        let rel = (common::l2_squared_1d(&diff, PI) / common::l2_squared_1d(&exact, PI)).sqrt();
        worst = worst.max(rel);
    }
    let msg = format!("max rel L2 error {worst:.3e} (limit {EIGENMODE_REL_L2}), runtime {secs:.2}s (limit {EIGENMODE_SECONDS}s)");
    check(worst <= EIGENMODE_REL_L2 && secs < EIGENMODE_SECONDS, msg.clone(), msg)
}

fn quasilinear_runs(ledger: &mut Ledger) -> Result<Vec<(f64, Trajectory)>, String> {
    let mut out = Vec::new();
    for alpha in [0.3, 0.5, 0.8] {
        let mut c = quiet(RunConfig::preset(Preset::Quasilinear));
        c.problem.alpha = alpha;
        assert_eq!(c.time.horizon, 50.0);
        let (_, traj, _) = run(&c, &format!("quasilinear alpha={alpha}"), ledger)?;
        out.push((alpha, traj));
    }
    Ok(out)
}

fn decay_envelope(runs: &[(f64, Trajectory)]) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (alpha, traj) in runs {
        let w: Vec<f64> = traj.fields.iter().map(|u| common::l2_squared_1d(u, PI)).collect();
        let mut worst: f64 = 0.0;
        for (t, wn) in traj.times.iter().zip(&w).skip(1) {
            let env = if *alpha == 0.5 {
                common::erfcx(2.0 * t.sqrt())
            } else {
                ml_value(*alpha, -2.0 * t.powf(*alpha)).map_err(|e| e.to_string())?
            };
            worst = worst.max(wn / (w[0] * env));
        }
        ok &= worst <= DECAY_SLACK;
        lines.push(format!("alpha={alpha}: max W/(W0 E) = {worst:.6}"));
    }
    let msg = format!("{} (limit {DECAY_SLACK})", lines.join(", "));
    check(ok, msg.clone(), msg)
}

fn decay_tail_exponent(runs: &[(f64, Trajectory)]) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (alpha, traj) in runs {
        let w: Vec<f64> = traj.fields.iter().map(|u| common::l2_squared_1d(u, PI)).collect();
        let horizon = *traj.times.last().unwrap();
        let slope = common::loglog_slope(&traj.times, &w, horizon / 10.0, horizon);
        ok &= (slope + alpha).abs() <= TAIL_EXPONENT_BAND;
        lines.push(format!("alpha={alpha}: slope {slope:.3} vs {:.3}", -alpha));
    }
    let msg = format!("{} (band ±{TAIL_EXPONENT_BAND})", lines.join(", "));
    check(ok, msg.clone(), msg)
}

fn random_history(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let mut v = 0.0;
    (0..len)
        .map(|_| {
            v += scale * rng.random_range(-1.0..1.0);
            if rng.random_bool(0.2) {
                v = scale * rng.random_range(-1.0..1.0);
            }
            v
        })
        .collect()
}

fn convexity(_: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let steps = 40;
    let (mut cases, mut lib_violations, mut direct_violations) = (0, 0, 0);
    for alpha in [0.3, 0.5, 0.8] {
        for graded in [false, true] {
            for _ in 0..SWEEP_HISTORIES {
                let horizon = rng.random_range(0.5..5.0);
                let grid = if graded {
                    TimeGrid::graded_for_order(horizon, steps, alpha)
                } else {
                    TimeGrid::uniform(horizon, steps)
                }
                .unwrap();
                let v = random_history(&mut rng, steps + 1);
                let weights = L1Weights::new(alpha, &grid).unwrap();
                lib_violations += check_discrete_convexity(&weights, &v).unwrap().violations;
                // direct evaluation of v_n (D v)_n − ½ (D v²)_n from the definition
                let t = grid.nodes();
                let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
                for n in 1..=steps {
                    let lhs = v[n] * common::l1_apply(t, alpha, &v, n);
                    let rhs = 0.5 * common::l1_apply(t, alpha, &sq, n);
                    if lhs - rhs < -1e-12 * (lhs.abs() + rhs.abs()) {
                        direct_violations += 1;
                    }
                }
                cases += 1;
            }
        }
    }
    let msg = format!(
        "{cases} histories x {steps} steps: {lib_violations} violations (library), {direct_violations} (direct)"
    );
    check(cases >= 6000 && lib_violations == 0 && direct_violations == 0, msg.clone(), msg)
}

fn boundedness(ledger: &Ledger) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for (label, start, max) in &ledger.runs {
        worst = worst.max(max - start);
        if *max > start + BOUNDEDNESS_ROUNDING {
            bad.push(label.clone());
        }
    }
    let msg = format!(
        "{} homogeneous runs, max(sup u_n − sup u0) = {worst:.3e} (limit {BOUNDEDNESS_ROUNDING:e}){}",
        ledger.runs.len(),
        if bad.is_empty() { String::new() } else { format!("; exceeded in {}", bad.join(", ")) }
    );
    check(bad.is_empty() && ledger.runs.len() >= 5, msg.clone(), msg)
}

fn comparison(_: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut nodes, mut violations, mut inadmissible) = (0, 0, 0);
    for _ in 0..COMPARISON_CASES {
        let alpha = rng.random_range(0.05..0.95);
        let steps = rng.random_range(5..=48);
        let horizon = rng.random_range(0.1..20.0);
        let grid = if rng.random_bool(0.5) {
            TimeGrid::uniform(horizon, steps)
        } else {
            TimeGrid::graded(horizon, steps, rng.random_range(1.0..4.0))
        }
        .unwrap();
        let t = grid.nodes();
        let rate = rng.random_range(0.01..10.0);
        let v0 = rng.random_range(0.1..5.0);
        // a sub-solution: each W_n at or below the equality value, with random slack
        let mut w = vec![v0 * rng.random_range(0.0..=1.0)];
        for n in 1..=steps {
            let hist: f64 = (1..n).map(|k| common::l1_weight(t, alpha, n, k) * (w[k] - w[k - 1])).sum();
            let local = common::l1_weight(t, alpha, n, n);
            let top = (local * w[n - 1] - hist) / (local + rate);
            w.push(top - if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.3) * v0 });
        }
        for n in 1..=steps {
            let residual = common::l1_apply(t, alpha, &w, n) + rate * w[n];
            if residual > 1e-9 * v0 * common::l1_weight(t, alpha, n, n) {
                inadmissible += 1;
            }
        }
        let v_lib = solve_relaxation_l1(alpha, rate, v0, &grid).unwrap();
        let v_ref = common::relaxation_l1(t, alpha, rate, v0);
        for n in 1..=steps {
            nodes += 1;
            if w[n] > v_lib[n] + 1e-12 * v0 || w[n] > v_ref[n] + 1e-12 * v0 {
                violations += 1;
            }
        }
    }
    let msg = format!(
        "{COMPARISON_CASES} sub-solutions, {nodes} nodes: {violations} violations, {inadmissible} inadmissible"
    );
    check(violations == 0 && inadmissible == 0, msg.clone(), msg)
}

fn mittag_leffler_accuracy(_: &mut Ledger) -> Outcome {
    let mut half: f64 = 0.0;
    for i in 0..1000 {
        let x = 30.0 * i as f64 / 999.0;
        let v = mittag_leffler(0.5, -x).map_err(|e| e.to_string())?.value;
        half = half.max((v - common::erfcx(x)).abs());
    }
    let mut one: f64 = 0.0;
    for i in 0..1000 {
        let z = -50.0 * i as f64 / 999.0;
        let v = ml_value(1.0, z).map_err(|e| e.to_string())?;
        one = one.max((v - z.exp()).abs());
    }
    let xs = cm_grid();
    let mut shape = true;
    for alpha in [0.3, 0.5, 0.8] {
        let r = ml_tail_bound(alpha, &xs).map_err(|e| e.to_string())?;
        shape &= r.nonincreasing && r.convex;
        let vals: Vec<f64> = xs.iter().map(|&x| ml_value(alpha, -x).unwrap()).collect();
        shape &= vals.iter().all(|&v| v > 0.0);
    }
    let msg = format!(
        "max |E_0.5 − erfcx| = {half:.2e} (limit {ML_HALF_TOL:e}), max |E_1 − exp| = {one:.2e} (limit {ML_ONE_TOL:e}), positive/monotone/convex on [0,1e4]: {shape}"
    );
    check(half <= ML_HALF_TOL && one <= ML_ONE_TOL && shape, msg.clone(), msg)
}

fn cm_grid() -> Vec<f64> {
    let mut xs: Vec<f64> = (0..500).map(|i| i as f64 * 0.002).collect();
    xs.extend((0..1500).map(|i| (i as f64 * (1e4f64).ln() / 1499.0).exp()));
    xs
}

fn tail_bound(_: &mut Ledger) -> Outcome {
    let xs = cm_grid();
    let lib = ml_tail_bound(0.5, &xs).map_err(|e| e.to_string())?.constant;
    let oracle = xs.iter().map(|&x| (1.0 + x) * common::erfcx(x)).fold(f64::NEG_INFINITY, f64::max);
    let msg = format!("sup (1+x)E_0.5(−x) = {lib:.6} (oracle {oracle:.6}, limit {TAIL_CONSTANT})");
    check(lib.is_finite() && lib <= TAIL_CONSTANT && oracle <= TAIL_CONSTANT, msg.clone(), msg)
}

fn classical_limit(ledger: &mut Ledger) -> Outcome {
    let alpha = 1.0 - 1e-3;
    let points = 65;
    let grid = build_grid(&[(0.0, PI)], &[points]).unwrap();
    let time = TimeGrid::uniform(1.0, 400).unwrap();
    let initial: Vec<f64> = grid
        .sample(|p| p[0].sin() + 0.5 * (3.0 * p[0]).sin() + 0.2 * p[0] * (PI - p[0]))
        .into_iter()
        .enumerate()
        .map(|(i, v)| if grid.is_boundary(i) { 0.0 } else { v })
        .collect();
    let spec = ProblemSpec::new(
        alpha,
        time.clone(),
        grid.clone(),
        DiffusionLaw::constant(1.0),
        Source::Zero,
        vec![0.0; points],
        initial.clone(),
    )
    .unwrap();
    let traj = run_trajectory(&spec, &SolverOptions::default()).map_err(|e| e.to_string())?;
    ledger.record("classical limit", &spec, &traj);
    let reference = common::heat_backward_euler(&initial, PI, time.nodes());
    let mut worst: f64 = 0.0;
    for (u, r) in traj.fields.iter().zip(&reference) {
        let diff: Vec<f64> = u.iter().zip(r).map(|(a, b)| a - b).collect();
        worst = worst.max((common::l2_squared_1d(&diff, PI) / common::l2_squared_1d(r, PI)).sqrt());
    }
    let msg = format!("alpha = 1 − 1e−3: max rel L2 vs backward Euler {worst:.3e} (limit {CLASSICAL_REL_L2})");
    check(worst <= CLASSICAL_REL_L2, msg.clone(), msg)
}

fn global_horizon(ledger: &mut Ledger) -> Outcome {
    let mut c = RunConfig::preset(Preset::Quasilinear);
    c.time.horizon = 100.0;
    let (report, _, _) = run(&c, "quasilinear T=100", ledger)?;
    let names: Vec<String> =
        report.certificates.iter().map(|c| format!("{}={}", c.name, if c.pass { "pass" } else { "FAIL" })).collect();
    let msg = format!(
        "{} / {} steps, certificates: {}",
        report.summary.completed_steps,
        report.summary.total_steps,
        names.join(" ")
    );
    check(report.summary.pass && report.certificates.len() == 3, msg.clone(), msg)
}

fn compression(ledger: &mut Ledger) -> Outcome {
    let mut c = quiet(RunConfig::preset(Preset::Eigenmode));
    c.space.points = vec![33];
    c.time.grid = GridChoice::Uniform;
    c.time.steps = COMPRESSION_STEPS;
    c.solver.compression_tol = COMPRESSION_TOL;
    let (direct, d_traj, _) = run(&c, "direct M=16384", ledger)?;
    c.solver.history = HistoryChoice::Compressed;
    let (compressed, c_traj, _) = run(&c, "compressed M=16384", ledger)?;
    let scale = d_traj.fields.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()));
    let gap = d_traj
        .fields
        .iter()
        .flatten()
        .zip(c_traj.fields.iter().flatten())
        .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    let rel = gap / scale;
    let (td, tc) = (direct.timings.solver.memory_secs, compressed.timings.solver.memory_secs);
    let speedup = td / tc;
    let msg = format!(
        "sup-relative gap {rel:.2e} (limit {COMPRESSION_AGREEMENT:e}), memory term {td:.3}s direct vs {tc:.3}s compressed ({} modes): {speedup:.1}x (limit {COMPRESSION_SPEEDUP}x)",
        compressed.history_modes.unwrap_or(0)
    );
    check(rel <= COMPRESSION_AGREEMENT && speedup >= COMPRESSION_SPEEDUP, msg.clone(), msg)
}

fn convergence(_: &mut Ledger) -> Outcome {
    let mut c = RunConfig::preset(Preset::Eigenmode);
    c.space.points = vec![9];
    c.time.steps = 2048;
    c.study.axis = StudyAxis::Space;
    c.study.oracle = Oracle::Analytic;
    let space = convergence_study(&c, 3).map_err(|e| e.to_string())?;
    let space_orders = space.orders();

    let mut c = RunConfig::preset(Preset::Eigenmode);
    c.space.points = vec![33];
    c.time.steps = 32;
    c.study.axis = StudyAxis::Time;
    c.study.oracle = Oracle::SelfReference;
    let time = convergence_study(&c, 3).map_err(|e| e.to_string())?;
    let time_orders = time.orders();

    let ok = space.oracle == Oracle::Analytic
        && space_orders.iter().all(|p| *p >= SPACE_ORDER.0 && *p <= SPACE_ORDER.1)
        && time_orders.iter().all(|p| *p >= TIME_ORDER_FLOOR);
    let fmt = |v: &[f64]| v.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>().join(", ");
    let msg = format!(
        "spatial orders [{}] (band {:?}), temporal self-convergence orders [{}] (floor {TIME_ORDER_FLOOR})",
        fmt(&space_orders),
        SPACE_ORDER,
        fmt(&time_orders)
    );
    check(ok, msg.clone(), msg)
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let what = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {what}"))
    })
}

fn main() -> ExitCode {
    // honour `cargo test -- --list` and name filters
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let filter: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();

    let mut ledger = Ledger::default();
    let mut results: Vec<(&str, &str, Outcome)> = Vec::new();
    let mut report = |id: &'static str, name: &'static str, outcome: Outcome| {
        let (tag, text) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("{tag} [{id:>3}] {name}: {text}");
        results.push((id, name, outcome));
    };
    let selected = |name: &str| filter.is_empty() || filter.iter().any(|f| name.contains(f.as_str()));

    let t0 = Instant::now();
    if selected("eigenmode") {
        report("1", "eigenmode oracle", guarded(|| eigenmode(&mut ledger)));
    }
    if selected("decay") {
        match quasilinear_runs(&mut ledger) {
            Ok(runs) => {
                report("2a", "decay envelope", guarded(|| decay_envelope(&runs)));
                report("2b", "decay tail exponent", guarded(|| decay_tail_exponent(&runs)));
            }
            Err(e) => report("2", "decay estimate", Err(e)),
        }
    }
    if selected("convexity") {
        report("3", "discrete convexity sweep", guarded(|| convexity(&mut ledger)));
    }
    if selected("comparison") {
        report("5", "comparison principle", guarded(|| comparison(&mut ledger)));
    }
    if selected("mittag") {
        report("6", "Mittag-Leffler accuracy", guarded(|| mittag_leffler_accuracy(&mut ledger)));
    }
    if selected("tail") {
        report("7", "tail bound", guarded(|| tail_bound(&mut ledger)));
    }
    if selected("classical") {
        report("8", "classical limit", guarded(|| classical_limit(&mut ledger)));
    }
    if selected("horizon") {
        report("9", "global horizon smoke", guarded(|| global_horizon(&mut ledger)));
    }
    if selected("compression") {
        report("10", "history compression", guarded(|| compression(&mut ledger)));
    }
    if selected("convergence") {
        report("11", "convergence study", guarded(|| convergence(&mut ledger)));
    }
    if selected("boundedness") {
        report("4", "boundedness", guarded(|| boundedness(&ledger)));
    }

    let failed: Vec<String> =
        results.iter().filter(|r| r.2.is_err()).map(|r| format!("{} ({})", r.0, r.1)).collect();
    println!(
        "acceptance: {} passed, {} failed in {:.1}s{}",
        results.len() - failed.len(),
        failed.len(),
        t0.elapsed().as_secs_f64(),
        if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use crate::diagnostics::{
    boundedness_report, convexity_report, decay_report, hoelder_seminorm, norms, weakform_residual, Region,
    TestFunctionSet,
};
use crate::fode::relaxation_solution;
use crate::frackernel::{benchmark_memory, L1Weights};
use crate::solver::{run_trajectory_partial, ProblemSpec, Timings, Trajectory};
use crate::spatial::{poincare_lambda1, PoincareEstimate};
use crate::Result;

pub const NORMS_HEADER: &str = "t,L2,sup,W,V_envelope";
pub const FAILURE_MARKER: &str = "# FAILED";
/// Probe exponent for the Hölder seminorm: `β1 = αε/2`, `β2 = ε`.
pub const HOELDER_PROBE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRow {
    pub t: f64,
    pub l2: f64,
    pub sup: f64,
    pub w: f64,
    pub v_envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub completed_steps: usize,
    pub total_steps: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTimings {
    #[serde(flatten)]
    pub solver: Timings,
    pub diagnostics_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub poincare: PoincareEstimate,
    /// `μ = 2νλ_1` with the continuous `λ_1`.
    pub rate: f64,
    pub norms: Vec<NormRow>,
    pub certificates: Vec<Certificate>,
    pub measurements: Vec<Measurement>,
    pub timings: RunTimings,
    pub history_modes: Option<usize>,
    pub summary: Summary,
}

/// Solves, evaluates the enabled diagnostics and returns the report together with the trajectory.
pub fn execute(config: &RunConfig) -> Result<(RunReport, Trajectory, ProblemSpec)> {
    let spec = config.build_spec()?;
    let options = config.solver_options();
    let poincare = poincare_lambda1(&spec.space)?;
    let rate = 2.0 * spec.law.floor * poincare.continuous;

    let (traj, failure) = run_trajectory_partial(&spec, &options);
    let t_diag = Instant::now();
    let step_norms = norms(&traj, &spec.space);
    let w0 = step_norms[0].l2 * step_norms[0].l2;
    let norm_rows = step_norms
        .iter()
        .zip(&traj.times)
        .map(|(n, &t)| {
            Ok(NormRow {
                t,
                l2: n.l2,
                sup: n.sup,
                w: n.l2 * n.l2,
                v_envelope: relaxation_solution(spec.alpha, rate, w0, t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let d = &config.diagnostics;
    let mut certificates = Vec::new();
    let mut measurements = Vec::new();
    if failure.is_none() {
        if d.decay {
            let r = decay_report(&traj, &spec, spec.law.floor, poincare.continuous, d.slack)?;
            certificates.push(Certificate {
                name: "decay".into(),
                pass: r.certificate.pass,
                detail: json!({
                    "rate": r.rate,
                    "slack": r.certificate.slack,
                    "initial": r.certificate.initial,
                    "margin": r.certificate.margin,
                    "worst_ratio": r.certificate.worst_ratio,
                    "tail_exponent": r.tail_exponent,
                }),
            });
        }
        if d.boundedness {
            let r = boundedness_report(&traj, &spec);
            certificates.push(Certificate { name: "boundedness".into(), pass: r.pass, detail: json!(r) });
        }
        if d.convexity {
            let r = convexity_report(&traj, &spec)?;
            certificates.push(Certificate {
                name: "convexity".into(),
                pass: r.holds,
                detail: json!({
                    "min_margin": r.min_margin,
                    "min_strong_margin": r.min_strong_margin,
                    "violations": r.violations,
                }),
            });
        }
        if d.weakform {
            let r = weakform_residual(&traj, &spec, TestFunctionSet::default())?;
            measurements.push(Measurement { name: "weakform_residual".into(), value: json!(r) });
        }
        if d.hoelder {
            let e = HOELDER_PROBE;
            let r = hoelder_seminorm(&traj, &spec.space, spec.alpha * e / 2.0, e, 1, Region::Full)?;
            measurements.push(Measurement { name: "hoelder_seminorm".into(), value: json!(r) });
        }
    }
    if d.memory_benchmark {
        let weights = L1Weights::new(spec.alpha, &spec.time)?;
        let r = benchmark_memory(&weights, config.solver.compression_tol, spec.space.len(), config.seed)?;
        measurements.push(Measurement { name: "memory_benchmark".into(), value: json!(r) });
    }

    let completed = traj.len() - 1;
    let failure = failure.map(|e| e.to_string());
    let pass = failure.is_none() && certificates.iter().all(|c| c.pass);
    let report = RunReport {
        config: config.clone(),
        poincare,
        rate,
        norms: norm_rows,
        certificates,
        measurements,
        timings: RunTimings { solver: traj.timings, diagnostics_secs: t_diag.elapsed().as_secs_f64() },
        history_modes: traj.history_modes,
        summary: Summary { pass, completed_steps: completed, total_steps: spec.time.steps(), failure },
    };
    Ok((report, traj, spec))
}

/// Runs the configuration and writes `norms.csv`, `snapshot_*.txt` and
/// `report.json` into the output directory.
pub fn run_command(config: &RunConfig) -> Result<RunReport> {
    let (report, traj, spec) = execute(config)?;
    write_outputs(&config.output.dir, &report, &traj, &spec)?;
    Ok(report)
}

pub fn write_outputs(dir: &Path, report: &RunReport, traj: &Trajectory, spec: &ProblemSpec) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_norms(&dir.join("norms.csv"), report)?;
    let shape: Vec<String> = spec.space.points().iter().map(|n| n.to_string()).collect();
    for (k, &t) in report.config.output.snapshots.iter().enumerate() {
        let n = nearest_node(&traj.times, t);
        if n >= traj.fields.len() {
            continue;
        }
        let mut f = BufWriter::new(File::create(dir.join(format!("snapshot_{k:03}.txt")))?);
        writeln!(f, "# shape={} t={}", shape.join(","), traj.times[n])?;
        for v in &traj.fields[n] {
            writeln!(f, "{v:e}")?;
        }
        f.flush()?;
    }
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(dir.join("report.json"), json)?;
    Ok(())
}

fn write_norms(path: &Path, report: &RunReport) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "{NORMS_HEADER}")?;
    for r in &report.norms {
        writeln!(f, "{:e},{:e},{:e},{:e},{:e}", r.t, r.l2, r.sup, r.w, r.v_envelope)?;
    }
    if let Some(msg) = &report.summary.failure {
        writeln!(f, "{FAILURE_MARKER} after step {}: {}", report.summary.completed_steps, msg.replace('\n', " "))?;
    }
    f.flush()?;
    Ok(())
}

fn nearest_node(times: &[f64], t: f64) -> usize {
    times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Preset;

    #[test]
    fn nearest_node_picks_closest() {
        assert_eq!(nearest_node(&[0.0, 0.1, 0.3, 1.0], 0.25), 2);
        assert_eq!(nearest_node(&[0.0, 0.1, 0.3, 1.0], 7.0), 3);
    }

    #[test]
    fn zero_preset_is_all_zero() {
        let mut c = RunConfig::preset(Preset::Zero);
        c.time.steps = 8;
        let (report, _, _) = execute(&c).unwrap();
        assert!(report.summary.pass);
        assert!(report.norms.iter().all(|r| r.l2 == 0.0 && r.sup == 0.0 && r.w == 0.0));
        assert_eq!(report.certificates.len(), 3);
    }

    #[test]
    fn invalid_law_refused_before_stepping() {
        let (report, traj, _) = execute(&RunConfig::preset(Preset::InvalidLaw)).unwrap();
        assert!(!report.summary.pass);
        assert_eq!(report.summary.completed_steps, 0);
        assert_eq!(traj.fields.len(), 1);
        assert!(report.summary.failure.unwrap().contains("ellipticity"));
    }
}

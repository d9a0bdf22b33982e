use std::fs;
use std::path::Path;
use std::thread;

use serde::Serialize;

use super::config::{InitialShape, LawConfig, Oracle, RunConfig, StudyAxis};
use crate::diagnostics::l2_norm;
use crate::mlf::ml_value;
use crate::solver::run_trajectory;
use crate::spatial::{Field, SpatialGrid};
use crate::{Error, Result};

pub const STUDY_HEADER: &str = "level,points,steps,error,order";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub level: usize,
    /// Nodes along the first axis.
    pub points: usize,
    pub steps: usize,
    pub error: f64,
    /// `log2(e_{l−1} / e_l)`; absent on the coarsest level.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub axis: StudyAxis,
    pub oracle: Oracle,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(STUDY_HEADER);
        out.push('\n');
        for r in &self.rows {
            let order = r.order.map(|o| format!("{o}")).unwrap_or_default();
            out.push_str(&format!("{},{},{},{:e},{}\n", r.level, r.points, r.steps, r.error, order));
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("study.csv"), self.to_csv())?;
        Ok(())
    }
}

/// Observed order between consecutive errors.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Closed-form solution at `t` when the problem is a scaled Dirichlet
/// eigenmode of a constant-coefficient law with `f = g = 0`.
pub fn analytic_solution(config: &RunConfig, t: f64) -> Option<Box<dyn Fn([f64; 2]) -> f64 + '_>> {
    let p = &config.problem;
    let LawConfig::Constant { value } = p.law else { return None };
    if p.source != 0.0 || p.boundary != 0.0 || p.initial != InitialShape::Sine {
        return None;
    }
    let k = p.harmonic as f64;
    let lambda: f64 = p.domain.iter().map(|[a, b]| (k * std::f64::consts::PI / (b - a)).powi(2)).sum();
    let decay = ml_value(p.alpha, -value * lambda * t.powf(p.alpha)).ok()?;
    Some(Box::new(move |x| p.amplitude * decay * config.initial_shape(x)))
}

fn level_config(base: &RunConfig, axis: StudyAxis, level: usize) -> RunConfig {
    let mut c = base.clone();
    let factor = 1usize << level;
    match axis {
        StudyAxis::Space => {
            c.space.points = base.space.points.iter().map(|&n| (n - 1) * factor + 1).collect();
        }
        StudyAxis::Time => c.time.steps = base.time.steps * factor,
    }
    c
}

/// Final field restricted to the nodes of a coarser grid that is
/// `2^shift` times coarser along each axis.
fn restrict(fine: &[f64], fine_grid: &SpatialGrid, shift: usize) -> Field {
    let step = 1usize << shift;
    let nx = fine_grid.points()[0];
    let ny = if fine_grid.dim() == 2 { fine_grid.points()[1] } else { 1 };
    let mut out = Vec::new();
    for j in (0..ny).step_by(if fine_grid.dim() == 2 { step } else { 1 }) {
        for i in (0..nx).step_by(step) {
            out.push(fine[fine_grid.index(i, j)]);
        }
    }
    out
}

/// Runs `levels` refinements of `config` along the configured axis and
/// reports the L2 error at the horizon with observed orders. Levels are
/// solved concurrently.
pub fn convergence_study(config: &RunConfig, levels: usize) -> Result<StudyTable> {
    if levels < 3 {
        return Err(Error::Study(format!("at least 3 refinement levels required, got {levels}")));
    }
    let axis = config.study.axis;
    let horizon = config.time.horizon;
    let analytic = analytic_solution(config, horizon).is_some();
    let oracle = match config.study.oracle {
        Oracle::Analytic if analytic => Oracle::Analytic,
        Oracle::Analytic if config.study.allow_self => Oracle::SelfReference,
        Oracle::Analytic => {
            return Err(Error::Study(
                "no analytic oracle for this problem and self-reference is disabled".into(),
            ))
        }
        Oracle::SelfReference => Oracle::SelfReference,
    };
    let runs = if oracle == Oracle::SelfReference { levels + 1 } else { levels };
    let configs: Vec<RunConfig> = (0..runs).map(|l| level_config(config, axis, l)).collect();

    let results: Vec<Result<(SpatialGrid, Field)>> = thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                s.spawn(move || {
                    let spec = c.build_spec()?;
                    let traj = run_trajectory(&spec, &c.solver_options())?;
                    Ok((spec.space.clone(), traj.final_field().clone()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("study level panicked")).collect()
    });
    let results: Vec<(SpatialGrid, Field)> = results.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(levels);
    for (l, (grid, u)) in results.iter().take(levels).enumerate() {
        let error = match oracle {
            Oracle::Analytic => {
                let exact = analytic_solution(&configs[l], horizon).expect("checked above");
                let diff: Vec<f64> = u.iter().enumerate().map(|(i, v)| v - exact(grid.coordinate(i))).collect();
                l2_norm(&diff, grid)
            }
            Oracle::SelfReference => {
                let (ref_grid, ref_u) = &results[levels];
                let reference = match axis {
                    StudyAxis::Space => restrict(ref_u, ref_grid, levels - l),
                    StudyAxis::Time => ref_u.clone(),
                };
                let diff: Vec<f64> = u.iter().zip(&reference).map(|(a, b)| a - b).collect();
                l2_norm(&diff, grid)
            }
        };
        let order = rows.last().map(|prev: &StudyRow| observed_order(prev.error, error));
        rows.push(StudyRow { level: l, points: grid.points()[0], steps: configs[l].time.steps, error, order });
    }
    Ok(StudyTable { axis, oracle, rows })
}

use std::path::Path;

use super::config::ExperimentConfig;
use super::run::simulate;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::fem::Mesh2D;

/// Kinetic energy history of one refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTrace {
    pub level: usize,
    pub tau: f64,
    pub t: Vec<f64>,
    pub kinetic: Vec<f64>,
    /// First time an internal variable moved.
    pub onset: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDifference {
    pub level_a: usize,
    pub level_b: usize,
    /// `||a - b|| / max(||a||, ||b||)` over the comparison window.
    pub relative_l2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementReport {
    pub traces: Vec<LevelTrace>,
    /// Samples at `t < window_end` on the coarse time grid are compared.
    pub window_end: f64,
    pub samples: usize,
    pub pairwise: Vec<PairDifference>,
    /// Tip displacements at the end of the window for `tau`, `tau/2`, `tau/4`
    /// on the first level, and the order they imply.
    pub tip_values: [f64; 3],
    pub observed_order: f64,
}

/// `log2(|a - b| / |b - c|)` for values at step sizes `h`, `h/2`, `h/4`.
pub fn observed_order(a: f64, b: f64, c: f64) -> f64 {
    ((a - b) / (b - c)).abs().log2()
}

/// Relative L2 distance of two equally sampled series.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale == 0.0 {
        0.0
    } else {
        d / scale
    }
}

fn tip_node(mesh: &Mesh2D) -> Result<usize> {
    let (nx, ny) = mesh
        .grid()
        .ok_or_else(|| Error::InvalidArgument("experiment mesh must be structured".into()))?;
    mesh.grid_node(nx, ny / 2)
        .ok_or_else(|| Error::InvalidArgument("grid node out of range".into()))
}

/// Horizontal tip displacement at `n_coarse * cfg.tau` for the step sizes
/// `cfg.tau / d`.
fn tip_displacement(cfg: &ExperimentConfig, n_coarse: usize, divisor: usize) -> Result<f64> {
    let mut c = cfg.clone();
    c.tau = cfg.tau / divisor as f64;
    c.t_end = n_coarse as f64 * cfg.tau;
    let sim = simulate(&c, None)?;
    let mesh = super::run::experiment_mesh(&c)?;
    Ok(sim.final_state.u[2 * tip_node(&mesh)?])
}

/// Runs `base` on each of `levels`, level `i` with time step
/// `base.tau / tau_divisors[i]`, and compares the kinetic energy histories
/// before the first inelastic event.
pub fn refinement_study(base: &ExperimentConfig, levels: &[usize], tau_divisors: &[usize]) -> Result<RefinementReport> {
    if levels.len() < 2 {
        return Err(Error::Config("a refinement study needs at least two levels".into()));
    }
    if levels.len() != tau_divisors.len() || tau_divisors.contains(&0) {
        return Err(Error::Config("one positive time-step divisor per level is required".into()));
    }
    base.validate()?;
    let n_coarse = base.n_steps();
    let exec = base.execution();
    let traces = map_indexed(levels.len(), exec, |i| {
        let mut cfg = base.clone();
        cfg.mesh_level = levels[i];
        cfg.tau = base.tau / tau_divisors[i] as f64;
        cfg.t_end = n_coarse as f64 * base.tau;
        let sim = simulate(&cfg, None)?;
        let rows = sim.ledger.rows();
        Ok(LevelTrace {
            level: levels[i],
            tau: cfg.tau,
            t: rows.iter().map(|r| r.t).collect(),
            kinetic: rows.iter().map(|r| r.kinetic).collect(),
            onset: sim.summary.onset,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let window_end = traces
        .iter()
        .filter_map(|t| t.onset)
        .fold(n_coarse as f64 * base.tau, f64::min);
    // coarse samples strictly before the window end
    let samples = ((window_end / base.tau) - 1e-9).ceil().max(1.0) as usize;
    let sampled: Vec<Vec<f64>> = traces
        .iter()
        .zip(tau_divisors)
        .map(|(tr, &d)| (0..samples).map(|k| tr.kinetic[k * d]).collect())
        .collect();
    let mut pairwise = Vec::new();
    for i in 0..traces.len() {
        for j in i + 1..traces.len() {
            pairwise.push(PairDifference {
                level_a: traces[i].level,
                level_b: traces[j].level,
                relative_l2: relative_l2(&sampled[i], &sampled[j]),
            });
        }
    }
    let mut first = base.clone();
    first.mesh_level = levels[0];
    first.tau = base.tau / tau_divisors[0] as f64;
    let n_window = ((window_end / first.tau) - 1e-9).floor().max(1.0) as usize;
    let tips = map_indexed(3, exec, |i| tip_displacement(&first, n_window, 1 << i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let tip_values = [tips[0], tips[1], tips[2]];
    Ok(RefinementReport {
        traces,
        window_end,
        samples,
        pairwise,
        observed_order: observed_order(tip_values[0], tip_values[1], tip_values[2]),
        tip_values,
    })
}

/// Writes `kinetic_levels.csv` (coarse time grid, one column per level) and
/// `refinement.csv` (pairwise differences and the observed order).
pub fn write_refinement_report(report: &RefinementReport, base_tau: f64, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("kinetic_levels.csv"))?;
    let mut header = vec!["t".to_string()];
    header.extend(report.traces.iter().map(|t| format!("kinetic_level_{}", t.level)));
    w.write_record(&header)?;
    let n = report
        .traces
        .iter()
        .map(|t| ((t.t.len() - 1) as f64 * t.tau / base_tau).round() as usize + 1)
        .min()
        .unwrap_or(0);
    for k in 0..n {
        let mut row = vec![format!("{:e}", k as f64 * base_tau)];
        for tr in &report.traces {
            let stride = (base_tau / tr.tau).round() as usize;
            row.push(format!("{:e}", tr.kinetic[k * stride]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("refinement.csv"))?;
    w.write_record(["level_a", "level_b", "relative_l2", "window_end", "observed_order"])?;
    for p in &report.pairwise {
        w.write_record([
            p.level_a.to_string(),
            p.level_b.to_string(),
            format!("{:e}", p.relative_l2),
            format!("{:e}", report.window_end),
            format!("{:.4}", report.observed_order),
        ])?;
    }
    w.flush()?;
    Ok(())
}

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, ExperimentKind, WaveformKind, BAR_HEIGHT, BAR_LENGTH};
use crate::bulk::{BulkParams, BulkProblem, BulkSupport};
use crate::error::{Error, Result};
use crate::fem::{build_bar_mesh, ContactAnchor, ElasticityParams, Mesh2D};
use crate::schemes::{run_trajectory, EnergyLedger, Observer, ProblemInstance, SchemeConfig, State3F, StepEnergy};
use crate::surface::{SurfaceKind, SurfaceParams, SurfaceProblem, Waveform};

/// Result of one experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub experiment: ExperimentKind,
    pub steps: usize,
    pub max_relative_residual: f64,
    pub max_abs_residual: f64,
    pub final_residual: f64,
    /// First time any internal variable changed.
    pub onset: Option<f64>,
    pub rupture_time: Option<f64>,
    /// Number of damage episodes; changes closer than 1% of the horizon
    /// belong to the same episode.
    pub rupture_intervals: usize,
    pub total_sweeps: usize,
    pub hysteresis: Option<HysteresisLoop>,
}

impl RunSummary {
    pub fn line(&self) -> String {
        let mut s = format!(
            "experiment={} steps={} max_rel_residual={:.3e} final_residual={:.3e} sweeps={}",
            self.experiment, self.steps, self.max_relative_residual, self.final_residual, self.total_sweeps
        );
        if let Some(t) = self.rupture_time {
            s.push_str(&format!(" rupture_time={t:.6e} rupture_intervals={}", self.rupture_intervals));
        }
        if let Some(h) = &self.hysteresis {
            s.push_str(&format!(" loop_area={:.6e} loop_dissipation={:.6e}", h.area, h.dissipation));
        }
        s
    }
}

/// One closed cycle of the traction-displacement curve at a contact point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HysteresisLoop {
    /// Row indices of two consecutive upward zero crossings of the traction.
    pub start: usize,
    pub end: usize,
    /// `sum 1/2 (t_k + t_{k-1}) (u_k - u_{k-1})`, positive for a clockwise loop.
    pub area: f64,
    /// `sigma_y sum |slip_k - slip_{k-1}|` with `slip = u - t / k_adh`.
    pub dissipation: f64,
}

/// Finds the first complete cycle in a `(u_t, traction)` record.
pub fn hysteresis_loop(u: &[f64], traction: &[f64], sigma_y: f64, k_adh: f64) -> Option<HysteresisLoop> {
    let n = u.len().min(traction.len());
    let mut up = (1..n).filter(|&k| traction[k - 1] < 0.0 && traction[k] >= 0.0);
    let start = up.next()?;
    let end = up.next()?;
    let slip = |k: usize| u[k] - traction[k] / k_adh;
    let mut area = 0.0;
    let mut dissipation = 0.0;
    for k in start + 1..=end {
        area += 0.5 * (traction[k] + traction[k - 1]) * (u[k] - u[k - 1]);
        dissipation += sigma_y * (slip(k) - slip(k - 1)).abs();
    }
    Some(HysteresisLoop {
        start,
        end,
        area,
        dissipation,
    })
}

pub(crate) fn elastic(cfg: &ExperimentConfig) -> ElasticityParams {
    ElasticityParams {
        e: cfg.young,
        nu: cfg.poisson,
        rho: cfg.density,
        chi: cfg.chi,
    }
}

pub(crate) fn waveform(cfg: &ExperimentConfig) -> Waveform {
    match cfg.waveform {
        WaveformKind::TriangleCyclic => Waveform::TriangleCyclic {
            amplitude: cfg.amplitude,
            period: cfg.period,
        },
        WaveformKind::RampThenDrop => Waveform::RampThenDrop {
            amplitude: cfg.amplitude,
            ramp_end: cfg.ramp_end,
        },
    }
}

pub fn experiment_mesh(cfg: &ExperimentConfig) -> Result<Mesh2D> {
    let l = cfg.mesh_level;
    build_bar_mesh(BAR_LENGTH, BAR_HEIGHT, 40 * l, 2 * l, cfg.contact_fraction, ContactAnchor::Left)
}

pub fn surface_problem(cfg: &ExperimentConfig) -> Result<SurfaceProblem> {
    let kind = match cfg.experiment {
        ExperimentKind::Friction => SurfaceKind::Friction,
        ExperimentKind::Delamination => SurfaceKind::Delamination,
        ExperimentKind::Bulk => return Err(Error::Config("bulk experiment has no contact surface".into())),
    };
    let surf = SurfaceParams {
        k_adh: cfg.k_adh,
        sigma_y: cfg.sigma_y,
        a2: cfg.toughness,
        ..Default::default()
    };
    SurfaceProblem::new(kind, experiment_mesh(cfg)?, &elastic(cfg), &surf, waveform(cfg), cfg.execution())
}

pub fn bulk_problem(cfg: &ExperimentConfig) -> Result<BulkProblem> {
    let params = BulkParams {
        elastic: elastic(cfg),
        h_hard: cfg.h_hard,
        sigma_y: cfg.sigma_y,
        kappa1: cfg.kappa1,
        kappa2: cfg.kappa2,
        eps: cfg.eps,
        alpha: cfg.alpha,
    };
    BulkProblem::new(experiment_mesh(cfg)?, &params, BulkSupport::LeftRoller, waveform(cfg), cfg.execution())
}

pub(crate) fn scheme_config(cfg: &ExperimentConfig) -> SchemeConfig {
    SchemeConfig::new(cfg.tau, cfg.scheme)
}

type CsvOut = csv::Writer<BufWriter<File>>;

fn csv_file(dir: &Path, name: &str, header: &[String]) -> Result<CsvOut> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(dir.join(name))?));
    w.write_record(header)?;
    Ok(w)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// What a run reports beyond the energy ledger.
#[derive(Default)]
struct Tracker {
    onset: Option<f64>,
    intervals: usize,
    last_change: Option<f64>,
    merge_gap: f64,
    prev_zeta: Vec<f64>,
    prev_pi: Vec<f64>,
    hyst_u: Vec<f64>,
    hyst_t: Vec<f64>,
}

impl Tracker {
    fn update(&mut self, s: &State3F) {
        let changed_z = s.zeta != self.prev_zeta;
        if self.onset.is_none() && (changed_z || s.pi != self.prev_pi) {
            self.onset = Some(s.t);
        }
        if changed_z {
            if self.last_change.is_none_or(|t| s.t - t > self.merge_gap) {
                self.intervals += 1;
            }
            self.last_change = Some(s.t);
        }
        self.prev_zeta.clone_from(&s.zeta);
        self.prev_pi.clone_from(&s.pi);
    }
}

/// Streams the run's CSV files; absent when no output is requested.
struct Files {
    energies: CsvOut,
    trace: CsvOut,
    hysteresis: Option<CsvOut>,
    damage: Option<CsvOut>,
}

struct Recorder {
    files: Option<Files>,
    tip: usize,
    left: Option<usize>,
    probe_segment: Option<usize>,
    e0: f64,
    dv: f64,
    dr: f64,
    work: f64,
    tracker: Tracker,
}

impl Recorder {
    fn new(
        mesh: &Mesh2D,
        files: Option<Files>,
        left: bool,
        probe_segment: Option<usize>,
        horizon: f64,
    ) -> Result<Self> {
        let (nx, ny) = mesh
            .grid()
            .ok_or_else(|| Error::InvalidArgument("experiment mesh must be structured".into()))?;
        let node = |i, j| {
            mesh.grid_node(i, j)
                .ok_or_else(|| Error::InvalidArgument("grid node out of range".into()))
        };
        Ok(Recorder {
            files,
            tip: node(nx, ny / 2)?,
            left: if left { Some(node(0, 0)?) } else { None },
            probe_segment,
            e0: 0.0,
            dv: 0.0,
            dr: 0.0,
            work: 0.0,
            tracker: Tracker {
                merge_gap: 0.01 * horizon,
                ..Default::default()
            },
        })
    }

    fn write<P: ProblemInstance + ?Sized>(
        &mut self,
        problem: &P,
        s: &State3F,
        kinetic: f64,
        traction: Option<f64>,
    ) -> Result<()> {
        let Some(f) = self.files.as_mut() else {
            return Ok(());
        };
        let parts = problem.stored_energy(&s.u, &s.pi, &s.zeta)?;
        let residual = kinetic + parts.total() + self.dv + self.dr - self.work - self.e0;
        f.energies.write_record(
            [
                s.t,
                kinetic,
                parts.elastic_bulk,
                parts.adhesive,
                parts.hardening,
                self.dv,
                self.dr,
                self.work,
                residual,
            ]
            .map(fmt),
        )?;
        let mut row = vec![s.t, s.u[2 * self.tip], s.u[2 * self.tip + 1], s.v[2 * self.tip], s.v[2 * self.tip + 1]];
        if let Some(l) = self.left {
            row.extend([s.u[2 * l], s.u[2 * l + 1], s.v[2 * l], s.v[2 * l + 1]]);
        }
        f.trace.write_record(row.into_iter().map(fmt))?;
        if let (Some(w), Some(t)) = (f.hysteresis.as_mut(), traction) {
            let u = *self.tracker.hyst_u.last().unwrap_or(&0.0);
            w.write_record([s.t, u, t].map(fmt))?;
        }
        if let Some(w) = f.damage.as_mut() {
            w.write_record(std::iter::once(s.t).chain(s.zeta.iter().copied()).map(fmt))?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if let Some(f) = self.files.as_mut() {
            f.energies.flush()?;
            f.trace.flush()?;
            if let Some(w) = f.hysteresis.as_mut() {
                w.flush()?;
            }
            if let Some(w) = f.damage.as_mut() {
                w.flush()?;
            }
        }
        Ok(())
    }
}

impl Recorder {
    fn probe(&mut self, p: &SurfaceProblem, s: &State3F) -> Option<f64> {
        let seg = self.probe_segment?;
        let t = p.traction(s, seg);
        self.tracker.hyst_u.push(p.trace(&s.u, seg));
        self.tracker.hyst_t.push(t);
        Some(t)
    }
}

impl Observer<SurfaceProblem> for Recorder {
    fn initial(&mut self, p: &SurfaceProblem, s: &State3F) -> Result<()> {
        let kinetic = 0.5 * p.mass().quad_form(&s.v);
        self.e0 = kinetic + p.stored_energy_parts(s)?.total();
        self.tracker.prev_zeta.clone_from(&s.zeta);
        self.tracker.prev_pi.clone_from(&s.pi);
        let tr = self.probe(p, s);
        self.write(p, s, kinetic, tr)
    }

    fn observe(&mut self, p: &SurfaceProblem, s: &State3F, e: &StepEnergy) -> Result<()> {
        self.dv += e.dissip_viscous;
        self.dr += e.dissip_rate_indep;
        self.work += e.work;
        self.tracker.update(s);
        let tr = self.probe(p, s);
        self.write(p, s, e.kinetic, tr)
    }
}

impl Observer<BulkProblem> for Recorder {
    fn initial(&mut self, p: &BulkProblem, s: &State3F) -> Result<()> {
        let kinetic = 0.5 * p.mass().quad_form(&s.v);
        self.e0 = kinetic + p.stored_energy(&s.u, &s.pi, &s.zeta)?.total();
        self.tracker.prev_zeta.clone_from(&s.zeta);
        self.tracker.prev_pi.clone_from(&s.pi);
        self.write(p, s, kinetic, None)
    }

    fn observe(&mut self, p: &BulkProblem, s: &State3F, e: &StepEnergy) -> Result<()> {
        self.dv += e.dissip_viscous;
        self.dr += e.dissip_rate_indep;
        self.work += e.work;
        self.tracker.update(s);
        self.write(p, s, e.kinetic, None)
    }
}

/// Output of [`simulate`]: the ledger and per-run diagnostics.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub summary: RunSummary,
    pub ledger: EnergyLedger,
    pub final_state: State3F,
    /// `(u_t, traction)` at the probed contact segment (friction only).
    pub hysteresis_record: Option<(Vec<f64>, Vec<f64>)>,
}

fn open_files(dir: &Path, cfg: &ExperimentConfig, n_contact: usize) -> Result<Files> {
    let energies = csv_file(
        dir,
        "energies.csv",
        &strings(&[
            "t",
            "kinetic",
            "elastic_bulk",
            "adhesive",
            "hardening",
            "dissip_viscous_cum",
            "dissip_rate_indep_cum",
            "work_ext_cum",
            "residual",
        ]),
    )?;
    let mut trace_header = strings(&["t", "ux_tip", "uy_tip", "vx_tip", "vy_tip"]);
    if cfg.experiment == ExperimentKind::Delamination {
        trace_header.extend(strings(&["ux_left", "uy_left", "vx_left", "vy_left"]));
    }
    let trace = csv_file(dir, "trace.csv", &trace_header)?;
    let hysteresis = if cfg.experiment == ExperimentKind::Friction {
        Some(csv_file(dir, "hysteresis.csv", &strings(&["t", "u_t_point", "traction_t_point"]))?)
    } else {
        None
    };
    let damage = if cfg.experiment == ExperimentKind::Delamination {
        let mut h = vec!["t".to_string()];
        h.extend((1..=n_contact).map(|i| format!("zeta_{i}")));
        Some(csv_file(dir, "damage.csv", &h)?)
    } else {
        None
    };
    Ok(Files {
        energies,
        trace,
        hysteresis,
        damage,
    })
}

/// Runs `cfg`, writing the CSV files into `out` when given.
pub fn simulate(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Simulation> {
    cfg.validate()?;
    let n_steps = cfg.n_steps();
    let sc = scheme_config(cfg);
    match cfg.experiment {
        ExperimentKind::Friction | ExperimentKind::Delamination => {
            let mut p = surface_problem(cfg)?;
            let files = out.map(|d| open_files(d, cfg, p.n_contact())).transpose()?;
            let friction = cfg.experiment == ExperimentKind::Friction;
            let probe = if friction { Some(p.n_contact() - 1) } else { None };
            let mut rec = Recorder::new(p.mesh(), files, !friction, probe, cfg.t_end)?;
            let s0 = State3F::at_rest(p.dims());
            let res = run_trajectory(&mut p, &s0, &sc, n_steps, &mut [&mut rec]);
            rec.flush()?;
            let tr = res?;
            let hysteresis = if friction {
                hysteresis_loop(&rec.tracker.hyst_u, &rec.tracker.hyst_t, cfg.sigma_y, cfg.k_adh)
            } else {
                None
            };
            let record = friction.then(|| (rec.tracker.hyst_u.clone(), rec.tracker.hyst_t.clone()));
            Ok(finish(cfg, tr, &rec.tracker, p.rupture_time(), hysteresis, record))
        }
        ExperimentKind::Bulk => {
            let mut p = bulk_problem(cfg)?;
            let files = out.map(|d| open_files(d, cfg, 0)).transpose()?;
            let mut rec = Recorder::new(p.mesh(), files, false, None, cfg.t_end)?;
            let s0 = State3F::at_rest(p.dims());
            let res = run_trajectory(&mut p, &s0, &sc, n_steps, &mut [&mut rec]);
            rec.flush()?;
            let tr = res?;
            Ok(finish(cfg, tr, &rec.tracker, None, None, None))
        }
    }
}

fn finish(
    cfg: &ExperimentConfig,
    tr: crate::schemes::Trajectory,
    tracker: &Tracker,
    rupture_time: Option<f64>,
    hysteresis: Option<HysteresisLoop>,
    record: Option<(Vec<f64>, Vec<f64>)>,
) -> Simulation {
    let ledger = tr.ledger;
    let summary = RunSummary {
        experiment: cfg.experiment,
        steps: ledger.steps(),
        max_relative_residual: ledger.max_relative_residual(),
        max_abs_residual: ledger.max_abs_residual(),
        final_residual: ledger.rows().last().map_or(0.0, |r| r.residual),
        onset: tracker.onset,
        rupture_time,
        rupture_intervals: tracker.intervals,
        total_sweeps: tr.total_sweeps,
        hysteresis,
    };
    Simulation {
        summary,
        ledger,
        final_state: tr.final_state,
        hysteresis_record: record,
    }
}

/// Runs `cfg` and writes `energies.csv`, `trace.csv`, `hysteresis.csv`
/// (friction), `damage.csv` (delamination) and `config.txt` into `cfg.out`.
/// Nothing is written if the configuration is invalid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let dir: PathBuf = cfg.out.clone();
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.txt"), cfg.echo())?;
    let sim = simulate(cfg, Some(&dir))?;
    Ok(sim.summary)
}

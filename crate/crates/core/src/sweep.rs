//! Parameter sweeps over `(x_min, T)`, CSV output and the canned demos.

use std::fmt::{self, Write as _};
use std::io;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{classical_minimize, gap_profile, success_probability, success_sandwich, tsirelson_bound};
use crate::config::{ExperimentConfig, PotentialSpec};
use crate::error::Result;
use crate::evolve::{propagate, propagate_reference, StepControl};
use crate::hamiltonian::{
    build_hi, delta_potential, poly_potential, shift_potential, InitialHamiltonian, InitialKind, Params, Potential,
    Schedule, Variant,
};
use crate::hilbert::{distance, edge_cutoff, phase_align, tail_mass, EVOLVED_NORMALIZATION_TOL};

/// CSV header, in column order.
pub const COLUMNS: [&str; 12] = [
    "x_min",
    "T",
    "success_probability",
    "deviation",
    "bound",
    "hp_gi_norm",
    "min_gap",
    "norm_drift",
    "classical_x_star",
    "classical_value",
    "tail_mass_final",
    "status",
];

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Ok,
    /// `deviation > bound + slack`.
    BoundViolated,
    /// A trajectory exceeded the norm-drift limit.
    NormDrift,
    /// The row could not be computed.
    Aborted(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::BoundViolated => f.write_str("bound_violated"),
            RowStatus::NormDrift => f.write_str("norm_drift"),
            RowStatus::Aborted(msg) => write!(f, "aborted: {msg}"),
        }
    }
}

impl FromStr for RowStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ok" => Ok(RowStatus::Ok),
            "bound_violated" => Ok(RowStatus::BoundViolated),
            "norm_drift" => Ok(RowStatus::NormDrift),
            _ => s
                .strip_prefix("aborted: ")
                .map(|m| RowStatus::Aborted(m.to_string()))
                .ok_or_else(|| format!("unknown status `{s}`")),
        }
    }
}

/// Measured quantities of one completed row.
#[derive(Clone, Debug, PartialEq)]
pub struct RowMetrics {
    pub success_probability: f64,
    pub deviation: f64,
    pub bound: f64,
    pub hp_gi_norm: f64,
    pub min_gap: f64,
    pub norm_drift: f64,
    pub classical_x_star: usize,
    pub classical_value: f64,
    pub tail_mass_final: f64,
}

/// One `(x_min, T)` result. Aborted rows carry no metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub x_min: usize,
    pub total_time: f64,
    pub metrics: Option<RowMetrics>,
    pub status: RowStatus,
}

/// Row quantities that are reported by the demos but not written to CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct RowDetail {
    pub overlap: Option<f64>,
    pub aligned_deviation: f64,
    /// `||phase_align(g(T), g_I) - g_I||`.
    pub final_vs_ground: f64,
    pub sandwich_holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowOutcome {
    pub row: SweepRow,
    pub detail: Option<RowDetail>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepRow {
    pub fn to_record(&self) -> Vec<String> {
        let mut rec = vec![self.x_min.to_string(), fmt_f64(self.total_time)];
        match &self.metrics {
            Some(m) => rec.extend([
                fmt_f64(m.success_probability),
                fmt_f64(m.deviation),
                fmt_f64(m.bound),
                fmt_f64(m.hp_gi_norm),
                fmt_f64(m.min_gap),
                fmt_f64(m.norm_drift),
                m.classical_x_star.to_string(),
                fmt_f64(m.classical_value),
                fmt_f64(m.tail_mass_final),
            ]),
            None => rec.extend(std::iter::repeat(String::new()).take(9)),
        }
        rec.push(self.status.to_string());
        rec
    }

    pub fn from_record(rec: &csv::StringRecord) -> std::result::Result<Self, String> {
        if rec.len() != COLUMNS.len() {
            return Err(format!("expected {} columns, got {}", COLUMNS.len(), rec.len()));
        }
        fn num<T: FromStr>(rec: &csv::StringRecord, i: usize) -> std::result::Result<T, String> {
            rec[i]
                .parse()
                .map_err(|_| format!("column `{}`: cannot parse `{}`", COLUMNS[i], &rec[i]))
        }
        let metrics = if rec[2].is_empty() {
            None
        } else {
            Some(RowMetrics {
                success_probability: num(rec, 2)?,
                deviation: num(rec, 3)?,
                bound: num(rec, 4)?,
                hp_gi_norm: num(rec, 5)?,
                min_gap: num(rec, 6)?,
                norm_drift: num(rec, 7)?,
                classical_x_star: num(rec, 8)?,
                classical_value: num(rec, 9)?,
                tail_mass_final: num(rec, 10)?,
            })
        };
        Ok(SweepRow {
            x_min: num(rec, 0)?,
            total_time: num(rec, 1)?,
            metrics,
            status: rec[11].parse()?,
        })
    }
}

pub fn write_csv<W: io::Write>(rows: &[SweepRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> io::Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

pub fn read_csv<R: io::Read>(input: R) -> std::result::Result<Vec<SweepRow>, String> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(COLUMNS) {
        return Err(format!("unexpected header {header:?}"));
    }
    r.records()
        .map(|rec| SweepRow::from_record(&rec.map_err(|e| e.to_string())?))
        .collect()
}

fn build_potential(cfg: &ExperimentConfig, x_min: Option<usize>) -> Result<Potential> {
    let base = match (&cfg.potential, x_min) {
        (PotentialSpec::Delta { .. }, Some(x)) => delta_potential(x, cfg.dim)?,
        (PotentialSpec::Polynomial { coefficients }, _) => poly_potential(coefficients, cfg.dim)?,
        (PotentialSpec::Delta { .. }, None) => unreachable!("delta rows always carry x_min"),
    };
    Ok(shift_potential(&base, cfg.shift))
}

/// The `(potential, x_min, T)` jobs of a config, sorted by `(x_min, T)`.
fn jobs(cfg: &ExperimentConfig) -> Result<Vec<(Potential, usize, f64)>> {
    let mut out = Vec::new();
    match &cfg.potential {
        PotentialSpec::Delta { x_mins } => {
            for &x in x_mins {
                let p = build_potential(cfg, Some(x))?;
                for &t in &cfg.total_times {
                    out.push((p.clone(), x, t));
                }
            }
        }
        PotentialSpec::Polynomial { .. } => {
            // the minimizer of the tabulated polynomial plays the role of x_min
            let p = build_potential(cfg, None)?;
            let (x, _) = classical_minimize(&p, cfg.dim)?;
            for &t in &cfg.total_times {
                out.push((p.clone(), x, t));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.2.total_cmp(&b.2)));
    Ok(out)
}

fn evaluate_row(
    hi: &InitialHamiltonian,
    p: &Potential,
    x_min: usize,
    total_time: f64,
    step: &StepControl,
    slack: f64,
    gap_samples: usize,
) -> Result<RowOutcome> {
    let full = Schedule::full(hi.clone(), p.clone(), total_time)?;
    let g_traj = propagate(&full, &hi.ground_state, step)?;
    let g0_traj = propagate_reference(&full.with_variant(Variant::Reference), step)?;
    let report = tsirelson_bound(p, hi, total_time)?.evaluate(&g_traj, &g0_traj, slack)?;
    let gaps = gap_profile(&full, gap_samples)?;
    let final_state = g_traj.final_state();
    let (x_star, value) = classical_minimize(p, p.dim())?;
    let norm_drift = g_traj.norm_drift.max(g0_traj.norm_drift);
    let sandwich = success_sandwich(&g_traj, &g0_traj, &report, x_min)?;
    let final_vs_ground = match phase_align(final_state, &hi.ground_state) {
        Ok(a) => distance(&a, &hi.ground_state)?,
        Err(_) => distance(final_state, &hi.ground_state)?,
    };

    let status = if norm_drift > EVOLVED_NORMALIZATION_TOL {
        RowStatus::NormDrift
    } else if report.satisfied != Some(true) {
        RowStatus::BoundViolated
    } else {
        RowStatus::Ok
    };
    Ok(RowOutcome {
        row: SweepRow {
            x_min,
            total_time,
            metrics: Some(RowMetrics {
                success_probability: success_probability(final_state, x_min)?,
                deviation: report.deviation.expect("evaluated"),
                bound: report.bound,
                hp_gi_norm: report.hp_gi_norm,
                min_gap: gaps.min_gap,
                norm_drift,
                classical_x_star: x_star,
                classical_value: value,
                tail_mass_final: tail_mass(final_state, edge_cutoff(p.dim()))?,
            }),
            status,
        },
        detail: Some(RowDetail {
            overlap: report.overlap,
            aligned_deviation: report.aligned_deviation.expect("evaluated"),
            final_vs_ground,
            sandwich_holds: sandwich.holds(slack),
        }),
    })
}

/// Runs every `(x_min, T)` row of the config, in parallel over
/// `cfg.workers` threads. Rows come back sorted by `(x_min, T)`; a row that
/// fails to compute is kept with an `aborted` status.
pub fn run_sweep_detailed(cfg: &ExperimentConfig) -> Result<Vec<RowOutcome>> {
    let hi = build_hi(cfg.hi_kind, &cfg.hi_params, cfg.dim, cfg.seed)?;
    let jobs = jobs(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .expect("thread pool");
    let outcomes = pool.install(|| {
        jobs.par_iter()
            .map(|(p, x_min, t)| {
                evaluate_row(&hi, p, *x_min, *t, &cfg.step, cfg.slack, cfg.gap_samples).unwrap_or_else(|e| {
                    RowOutcome {
                        row: SweepRow {
                            x_min: *x_min,
                            total_time: *t,
                            metrics: None,
                            status: RowStatus::Aborted(e.to_string()),
                        },
                        detail: None,
                    }
                })
            })
            .collect()
    });
    Ok(outcomes)
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    Ok(run_sweep_detailed(cfg)?.into_iter().map(|o| o.row).collect())
}

/// Names accepted by [`run_failure_demo`].
pub const PRESETS: [&str; 2] = ["tsirelson-s3", "diagonal-noop"];

/// The configuration behind a named demo.
pub fn preset_config(name: &str) -> Option<ExperimentConfig> {
    let base = |dim: usize, kind: InitialKind, x_mins: Vec<usize>, t: f64, dt: f64| ExperimentConfig {
        dim,
        hi_kind: kind,
        hi_params: Params::new(),
        seed: 0,
        potential: PotentialSpec::Delta { x_mins },
        shift: 0.0,
        total_times: vec![t],
        step: StepControl::new(dt, 50),
        slack: crate::analysis::BOUND_SLACK,
        gap_samples: 33,
        workers: 1,
        output: None,
    };
    match name {
        "tsirelson-s3" => {
            let mut cfg = base(512, InitialKind::Hopping, vec![8, 64, 128, 256, 384, 448], 50.0, 0.1);
            cfg.hi_params.insert("kappa".into(), 1.0);
            Some(cfg)
        }
        "diagonal-noop" => Some(base(64, InitialKind::Diagonal, vec![1, 16, 40, 63], 10.0, 0.05)),
        _ => None,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("unknown preset `{name}`; available presets: {}", PRESETS.join(", "))]
    UnknownPreset { name: String },
    #[error(transparent)]
    Sim(#[from] crate::error::Error),
}

#[derive(Clone, Debug)]
pub struct DemoOutcome {
    pub preset: String,
    pub config: ExperimentConfig,
    pub rows: Vec<RowOutcome>,
    pub report: String,
    /// Every row completed with the bound inequality and norm checks intact.
    pub passed: bool,
}

impl DemoOutcome {
    pub fn sweep_rows(&self) -> Vec<SweepRow> {
        self.rows.iter().map(|o| o.row.clone()).collect()
    }
}

/// Runs a named scenario and renders the bound chain per row.
pub fn run_failure_demo(preset: &str) -> std::result::Result<DemoOutcome, DemoError> {
    let cfg = preset_config(preset).ok_or_else(|| DemoError::UnknownPreset {
        name: preset.to_string(),
    })?;
    let rows = run_sweep_detailed(&cfg)?;
    let passed = rows.iter().all(|o| o.row.status.is_ok());
    let report = render_report(preset, &cfg, &rows, passed);
    Ok(DemoOutcome {
        preset: preset.to_string(),
        config: cfg,
        rows,
        report,
        passed,
    })
}

fn render_report(preset: &str, cfg: &ExperimentConfig, rows: &[RowOutcome], passed: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "preset {preset}: dim={} H_I={} T={:?} dt={}",
        cfg.dim, cfg.hi_kind, cfg.total_times, cfg.step.base_step
    );
    let _ = writeln!(
        s,
        "{:>6} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>10}  {}",
        "x_min", "T", "overlap", "bound", "deviation", "success", "|g(T)-g_I|", "classical", "status"
    );
    for o in rows {
        let r = &o.row;
        match (&r.metrics, &o.detail) {
            (Some(m), Some(d)) => {
                let _ = writeln!(
                    s,
                    "{:>6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>10}  {}",
                    r.x_min,
                    r.total_time,
                    d.overlap.unwrap_or(m.hp_gi_norm),
                    m.bound,
                    m.deviation,
                    m.success_probability,
                    d.final_vs_ground,
                    format!("({}, {})", m.classical_x_star, m.classical_value),
                    r.status
                );
            }
            _ => {
                let _ = writeln!(s, "{:>6} {:>6} {}", r.x_min, r.total_time, r.status);
            }
        }
    }
    let classical_hits = rows
        .iter()
        .filter(|o| o.row.metrics.as_ref().is_some_and(|m| m.classical_x_star == o.row.x_min))
        .count();
    let _ = writeln!(
        s,
        "classical exhaustive search located the minimizer on {classical_hits}/{} rows",
        rows.len()
    );
    let _ = writeln!(
        s,
        "deviation <= bound on every row: {}",
        if passed { "yes" } else { "NO" }
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(status: RowStatus, metrics: bool) -> SweepRow {
        SweepRow {
            x_min: 3,
            total_time: 0.1 + 0.2,
            metrics: metrics.then(|| RowMetrics {
                success_probability: 1.0 / 3.0,
                deviation: 2.0f64.sqrt() * 1e-7,
                bound: std::f64::consts::PI,
                hp_gi_norm: 1e-300,
                min_gap: 0.0,
                norm_drift: 4.4e-16,
                classical_x_star: 3,
                classical_value: -1.0,
                tail_mass_final: 1.234_567_890_123_456_7e-9,
            }),
            status,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = vec![
            row(RowStatus::Ok, true),
            row(RowStatus::BoundViolated, true),
            row(RowStatus::Aborted("bad, \"quoted\" thing".into()), false),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&COLUMNS.join(",")));
        assert!(text.contains("3.3333333333333331e-1"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn status_strings() {
        for s in [
            RowStatus::Ok,
            RowStatus::BoundViolated,
            RowStatus::NormDrift,
            RowStatus::Aborted("x".into()),
        ] {
            assert_eq!(s.to_string().parse::<RowStatus>().unwrap(), s);
        }
        assert!("weird".parse::<RowStatus>().is_err());
    }

    #[test]
    fn unknown_preset_lists_choices() {
        let err = run_failure_demo("bogus").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tsirelson-s3") && msg.contains("diagonal-noop"));
    }

    #[test]
    fn presets_exist() {
        for p in PRESETS {
            assert!(preset_config(p).is_some());
        }
        let cfg = preset_config("tsirelson-s3").unwrap();
        assert_eq!(cfg.dim, 512);
        assert_eq!(cfg.total_times, vec![50.0]);
        assert_eq!(
            cfg.potential,
            PotentialSpec::Delta {
                x_mins: vec![8, 64, 128, 256, 384, 448]
            }
        );
    }
}

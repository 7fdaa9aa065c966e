//! One experiment: ground state, verdict, evolution with virial monitoring,
//! and the run directory.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use nls_core::classifier::{classify, SetLabel, Verdict};
use nls_core::functionals::{integrals, Equation, FunctionalSnapshot, ModelParams};
use nls_core::groundstate::{solve_ground_state, GroundStateSolution, Guess, Which};
use nls_core::propagator::{
    detect_blowup, drifts, evolve_with, scattering_proxy, BlowupDiagnosis, Drifts, Outcome, ScatteringReport,
};
use nls_core::spectral::io::{load_field, save_field};
use nls_core::spectral::ComplexField;
use nls_core::symmetries::{apply_symmetry_with, large_scale_profile};
use nls_core::virial::{virial_derivatives, virial_value, VirialDerivatives, VirialWeight};

use crate::config::{ExperimentConfig, InitialData};

/// Failure that prevents a run from producing results. Aborts of the
/// evolution itself are outcomes, not errors.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{stage}: {source}")]
    Numerics {
        stage: &'static str,
        source: nls_core::Error,
    },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn numerics(stage: &'static str) -> impl FnOnce(nls_core::Error) -> RunError {
    move |source| RunError::Numerics { stage, source }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateInfo {
    pub which: Which,
    pub q0: f64,
    pub mass: f64,
    pub m_omega: f64,
    pub residual: f64,
    pub k_value: f64,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialFunctionals {
    pub mass: f64,
    pub energy: f64,
    pub action: f64,
    pub k: f64,
    pub h: f64,
    pub grad_l2_sq: f64,
}

/// Centered-difference checks of the virial chain plus the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialConsistency {
    pub radius: f64,
    /// `max |(V_R(t+h) - V_R(t-h)) / 2h - V'(t)|`.
    pub v1_residual: f64,
    /// `max |(V'(t+h) - V'(t-h)) / 2h - V''(t)|`.
    pub v2_residual: f64,
    pub v1_scale: f64,
    pub v2_scale: f64,
    pub max_abs_remainder: f64,
    pub max_exterior: f64,
}

/// Snapshot check of the set's defining inequality: `K < -(m - S)` on
/// `A_minus`, `K > 0` on `A_plus`, and persistence of the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCheck {
    pub label: SetLabel,
    pub inequality: String,
    pub snapshots: usize,
    pub violations: usize,
    /// Smallest slack over the checked snapshots (positive when it holds).
    pub min_slack: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: Option<u64>,
    pub equation: Equation,
    pub d: usize,
    pub p: f64,
    pub omega: f64,
    pub n: usize,
    pub half_width: f64,
    pub dt: f64,
    pub t_final: f64,
    pub initial_data: String,
    pub ground_state: GroundStateInfo,
    pub initial: InitialFunctionals,
    pub verdict: Verdict,
    pub outcome: Outcome,
    pub abort_time: Option<f64>,
    pub snapshots: usize,
    pub drifts: Drifts,
    pub blowup: BlowupDiagnosis,
    pub scattering: Option<ScatteringReport>,
    pub scattering_note: Option<String>,
    pub virial: VirialConsistency,
    /// `max_t || |u(t)| - |u0| ||_2 / ||u0||_2`, the stationarity residual of standing waves.
    pub modulus_deviation: f64,
    pub set_check: Option<SetCheck>,
    pub checkpoints: Vec<String>,
}

impl RunSummary {
    /// Whether the observed outcome matches the prediction, when there is one.
    pub fn agreement(&self) -> Option<bool> {
        use nls_core::classifier::Prediction;
        match self.verdict.prediction {
            Prediction::GlobalScattering => Some(
                self.outcome == Outcome::Completed && self.scattering.map(|s| s.pass).unwrap_or(false),
            ),
            Prediction::FiniteTimeBlowup => Some(self.outcome == Outcome::BlowupDetected),
            Prediction::NoPrediction => None,
        }
    }
}

/// Ground state matched to the model: the double ground state for `E1`,
/// the mass-critical one for `E2`.
pub fn ground_state_for(cfg: &ExperimentConfig) -> Result<GroundStateSolution<f64>, RunError> {
    let mp = cfg.model()?;
    let which = match mp.equation {
        Equation::E1 => Which::Double,
        Equation::E2 => Which::MassCritical,
    };
    solve_ground_state(&mp, which, &Guess::default(), &cfg.ground_state_options()).map_err(numerics("ground state"))
}

pub fn initial_field(
    cfg: &ExperimentConfig,
    gs: &GroundStateSolution<f64>,
) -> Result<ComplexField<f64>, RunError> {
    let grid = cfg.grid()?;
    let profile = |amp: f64, width: f64, center: [f64; 2], boost: [f64; 2], sech: bool| {
        ComplexField::from_fn(&grid, |x: [f64; 2]| {
            let y = [x[0] - center[0], x[1] - center[1]];
            let r2 = y[0] * y[0] + y[1] * y[1];
            let a = if sech {
                amp / (r2.sqrt() / width).cosh()
            } else {
                amp * (-r2 / (2.0 * width * width)).exp()
            };
            Complex::from_polar(a, boost[0] * y[0] + boost[1] * y[1])
        })
    };
    let u = match &cfg.initial_data {
        InitialData::Gaussian { amplitude, width, center, boost } => {
            profile(*amplitude, *width, *center, *boost, false)
        }
        InitialData::Sech { amplitude, width, center, boost } => profile(*amplitude, *width, *center, *boost, true),
        InitialData::ScaledGroundState { c } => gs.field_on(&grid).scale(*c),
        InitialData::LargeScaleProfile { amplitude, width, exponent } => {
            let sym = cfg.symmetry.as_ref().expect("validated");
            let phi = profile(*amplitude, *width, [0.0; 2], [0.0; 2], false);
            return large_scale_profile(&phi, &sym.element(), *exponent, &sym.options())
                .map_err(numerics("large-scale profile"));
        }
        InitialData::File { path } => {
            let full = cfg.resolve(path);
            let f: ComplexField<f64> = load_field(&full).map_err(numerics("initial field file"))?;
            if f.grid() != &grid {
                return Err(RunError::Numerics {
                    stage: "initial field file",
                    source: nls_core::Error::GridMismatch(format!("{} is not on the configured grid", full.display())),
                });
            }
            f
        }
    };
    match &cfg.symmetry {
        Some(sym) => apply_symmetry_with(&u, &sym.element(), &sym.options())
            .map(|(u, _)| u)
            .map_err(numerics("symmetry")),
        None => Ok(u),
    }
}

fn initial_functionals(u: &ComplexField<f64>, mp: &ModelParams<f64>) -> InitialFunctionals {
    let i = integrals(u, mp);
    InitialFunctionals {
        mass: i.mass,
        energy: mp.energy_from(&i),
        action: mp.action_from(&i),
        k: mp.k_from(&i),
        h: mp.h_from(&i),
        grad_l2_sq: i.grad_sq,
    }
}

fn modulus_distance(u: &ComplexField<f64>, u0: &ComplexField<f64>) -> f64 {
    let d: f64 = u
        .values()
        .iter()
        .zip(u0.values())
        .map(|(a, b)| (a.norm() - b.norm()).powi(2))
        .sum();
    (d / u0.values().iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

fn chain_residuals(times: &[f64], rows: &[(f64, VirialDerivatives)]) -> (f64, f64) {
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for j in 1..rows.len().saturating_sub(1) {
        let (h1, h2) = (times[j] - times[j - 1], times[j + 1] - times[j]);
        if (h1 - h2).abs() > 1e-9 * h1 {
            continue;
        }
        let fd1 = (rows[j + 1].0 - rows[j - 1].0) / (2.0 * h1);
        let fd2 = (rows[j + 1].1.v1 - rows[j - 1].1.v1) / (2.0 * h1);
        r1 = r1.max((fd1 - rows[j].1.v1).abs());
        r2 = r2.max((fd2 - rows[j].1.v2).abs());
    }
    (r1, r2)
}

const SERIES_HEADER: &str = "V_R,V1,V2,A_R,exterior,scatter_accum,tail_fraction,edge_fraction";

/// Runs `cfg` and writes `out_dir/<name>/` with `summary.json`,
/// `timeseries.csv`, `config.toml` and `checkpoints/`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary, RunError> {
    cfg.validate()?;
    let mp = cfg.model()?;
    let grid = cfg.grid()?;
    let stepper = cfg.stepper();
    let gs = ground_state_for(cfg)?;
    let u0 = initial_field(cfg, &gs)?;
    let verdict = classify(&u0, &mp, &gs).map_err(numerics("classification"))?;
    let weight = match cfg.virial.radius {
        Some(r) => VirialWeight::new(&grid, r),
        None => VirialWeight::whole_support(&grid),
    }
    .map_err(numerics("virial weight"))?;

    let m_omega = gs.m_omega;
    let label = verdict.set_label;
    let mut rows: Vec<(f64, VirialDerivatives)> = Vec::new();
    let mut modulus_deviation = 0.0f64;
    let mut slack = Vec::new();
    let mut failure = None;
    let log = evolve_with(&u0, &mp, &stepper, |u, s: &FunctionalSnapshot<f64>| {
        if failure.is_some() {
            return;
        }
        match (virial_value(u, &weight), virial_derivatives(u, &mp, &weight)) {
            (Ok(v), Ok(der)) => rows.push((v, der)),
            (Err(e), _) | (_, Err(e)) => failure = Some(e),
        }
        modulus_deviation = modulus_deviation.max(modulus_distance(u, &u0));
        match label {
            Some(SetLabel::AMinus) => slack.push(-(m_omega - s.action) - s.scaling_derivative),
            Some(SetLabel::APlus) => slack.push(s.scaling_derivative),
            _ => {}
        }
    })
    .map_err(numerics("evolution"))?;
    if let Some(e) = failure {
        return Err(numerics("virial monitor")(e));
    }

    let times: Vec<f64> = log.snapshots.iter().map(|s| s.t).collect();
    let (v1_residual, v2_residual) = chain_residuals(&times, &rows);
    let virial = VirialConsistency {
        radius: weight.radius(),
        v1_residual,
        v2_residual,
        v1_scale: rows.iter().map(|r| r.1.v1.abs()).fold(0.0, f64::max),
        v2_scale: rows.iter().map(|r| r.1.v2.abs()).fold(0.0, f64::max),
        max_abs_remainder: rows.iter().map(|r| r.1.a_r.abs()).fold(0.0, f64::max),
        max_exterior: rows.iter().map(|r| r.1.exterior).fold(0.0, f64::max),
    };

    // Only snapshots before an abort count.
    let checked = match log.abort_time {
        Some(ta) => times.iter().take_while(|&&t| t < ta).count(),
        None => times.len(),
    };
    let set_check = label.and_then(|l| {
        let inequality = match l {
            SetLabel::AMinus => "K < -(m_omega - S_omega)",
            SetLabel::APlus => "K > 0",
            _ => return None,
        };
        let s = &slack[..checked.min(slack.len())];
        let violations = s.iter().filter(|&&x| !(x > 0.0)).count();
        Some(SetCheck {
            label: l,
            inequality: inequality.into(),
            snapshots: s.len(),
            violations,
            min_slack: s.iter().copied().reduce(f64::min),
            holds: violations == 0,
        })
    });

    let blowup = detect_blowup(&log, &stepper).map_err(numerics("blow-up diagnosis"))?;
    let (scattering, scattering_note) = match scattering_proxy(&log) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let run_dir = out_dir.join(&cfg.name);
    let ckpt_dir = run_dir.join("checkpoints");
    fs::create_dir_all(&ckpt_dir).map_err(io(&ckpt_dir))?;
    let mut checkpoints = Vec::new();
    for c in &log.checkpoints {
        let name = format!("t_{:012.6}.field", c.t);
        save_field(&c.field, ckpt_dir.join(&name)).map_err(numerics("checkpoint"))?;
        checkpoints.push(format!("checkpoints/{name}"));
    }

    let csv_path = run_dir.join("timeseries.csv");
    let mut w = BufWriter::new(fs::File::create(&csv_path).map_err(io(&csv_path))?);
    let write_csv = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "{},{SERIES_HEADER}", FunctionalSnapshot::<f64>::CSV_HEADER)?;
        for (k, s) in log.snapshots.iter().enumerate() {
            let (v, d) = rows[k];
            writeln!(
                w,
                "{},{v:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.csv_row(),
                d.v1,
                d.v2,
                d.a_r,
                d.exterior,
                log.scatter_accum[k],
                log.tail_fractions[k],
                log.edge_fractions[k]
            )?;
        }
        w.flush()
    };
    write_csv(&mut w).map_err(io(&csv_path))?;

    let config_path = run_dir.join("config.toml");
    fs::write(&config_path, cfg.to_toml()).map_err(io(&config_path))?;

    let summary = RunSummary {
        name: cfg.name.clone(),
        seed: cfg.seed,
        equation: mp.equation,
        d: mp.d,
        p: mp.p,
        omega: mp.omega,
        n: grid.n_per_axis(),
        half_width: grid.half_width(),
        dt: stepper.dt,
        t_final: stepper.t_final,
        initial_data: cfg.initial_data.label(),
        ground_state: GroundStateInfo {
            which: gs.which,
            q0: gs.q0(),
            mass: gs.mass,
            m_omega: gs.m_omega,
            residual: gs.residual,
            k_value: gs.k_value,
            hash: gs.provenance_hash(),
        },
        initial: initial_functionals(&u0, &mp),
        verdict,
        outcome: log.outcome,
        abort_time: log.abort_time,
        snapshots: log.snapshots.len(),
        drifts: drifts(&log),
        blowup,
        scattering,
        scattering_note,
        virial,
        modulus_deviation,
        set_check,
        checkpoints,
    };
    let summary_path = run_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_path, json + "\n").map_err(io(&summary_path))?;
    Ok(summary)
}

pub fn load_summary(run_dir: &Path) -> Result<RunSummary, String> {
    let path = run_dir.join("summary.json");
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

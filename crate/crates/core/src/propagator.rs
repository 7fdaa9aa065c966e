//! Strang split-step Fourier evolution.
//!
//! One step of size `dt` is
//!
//! ```text
//! u <- u exp(-i dt/2 V(|u|^2))        V = mu_mc |u|^{4/d} + mu_p |u|^{p-1}
//! u <- F^{-1} exp(-i dt |k|^2) F u
//! u <- u exp(-i dt/2 V(|u|^2))
//! ```
//!
//! Both substeps are exact flows (the nonlinear one leaves `|u|` unchanged),
//! so mass is conserved up to transform roundoff and the scheme is
//! time-reversible.
//!
//! Runs are monitored at snapshot times. A run stops early when the field
//! becomes non-finite, when the spectral tail fraction exceeds its limit
//! (classified as blow-up when the gradient norm has also grown by
//! `blowup_grad_factor`, otherwise as lost resolution), or when mass reaches
//! the box edge.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{snapshot, FunctionalSnapshot, ModelParams};
use crate::scalar::{lit, pow_real, to_f64, Real};
use crate::spectral::{ComplexField, Direction, FourierMultiplier, GridSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig<T> {
    pub dt: T,
    pub t_final: T,
    pub snapshot_every: usize,
    pub blowup_grad_factor: T,
    /// Limit on the spectral mass fraction carried by the top third of frequencies.
    pub tail_fraction_max: T,
    /// Limit on the mass fraction within `edge_cells` sites of the box edge.
    pub edge_mass_max: T,
    pub edge_cells: usize,
    /// Extra times at which a field checkpoint is kept (first snapshot at or after each).
    pub checkpoint_times: Vec<T>,
}

impl<T: Real> Default for StepperConfig<T> {
    fn default() -> Self {
        Self {
            dt: lit(1e-3),
            t_final: T::one(),
            snapshot_every: 100,
            blowup_grad_factor: lit(1e3),
            tail_fraction_max: lit(1e-6),
            edge_mass_max: lit(1e-10),
            edge_cells: 4,
            checkpoint_times: Vec::new(),
        }
    }
}

impl<T: Real> StepperConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.dt) || !pos(self.t_final) {
            return Err(Error::InvalidArgument("dt and t_final must be positive".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidArgument("snapshot_every must be at least 1".into()));
        }
        if !pos(self.blowup_grad_factor) || !pos(self.tail_fraction_max) || !pos(self.edge_mass_max) {
            return Err(Error::InvalidArgument("abort thresholds must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps, `round(t_final / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().to_usize().unwrap_or(0).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    BlowupDetected,
    ResolutionLost,
    BoxEscape,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Completed => "completed",
            Outcome::BlowupDetected => "blowup_detected",
            Outcome::ResolutionLost => "resolution_lost",
            Outcome::BoxEscape => "box_escape",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Checkpoint<T: Real> {
    pub t: T,
    pub field: ComplexField<T>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryLog<T: Real> {
    pub snapshots: Vec<FunctionalSnapshot<T>>,
    pub checkpoints: Vec<Checkpoint<T>>,
    /// Left-endpoint accumulation of `||<grad>^{s_p} u||^{q}_{L^q} dt`,
    /// `q = 2(d+2)/d`, one entry per snapshot.
    pub scatter_accum: Vec<T>,
    /// The integrand of `scatter_accum` at each snapshot.
    pub scatter_density: Vec<T>,
    pub tail_fractions: Vec<T>,
    pub edge_fractions: Vec<T>,
    pub outcome: Outcome,
    /// Snapshot time at which an abort was triggered.
    pub abort_time: Option<T>,
    pub final_field: ComplexField<T>,
    pub dt: T,
    pub t_final: T,
}

/// Precomputed split-step propagator for a fixed grid, model and step.
#[derive(Debug, Clone)]
pub struct Stepper<T: Real> {
    grid: GridSpec<T>,
    kinetic: Vec<Complex<T>>,
    half_dt: T,
    mu_mc: T,
    mu_p: T,
    e_mc: T,
    e_p: T,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &GridSpec<T>, mp: &ModelParams<T>, dt: T) -> Self {
        let (mu_mc, mu_p) = mp.couplings();
        Self {
            grid: grid.clone(),
            kinetic: FourierMultiplier::free_flow(grid, dt).symbol().to_vec(),
            half_dt: dt * lit(0.5),
            mu_mc,
            mu_p,
            e_mc: lit::<T>(2.0) / lit(mp.d as f64),
            e_p: (mp.p - T::one()) * lit(0.5),
        }
    }

    /// `u <- u exp(-i tau V(|u|^2))`.
    pub fn nonlinear_phase(&self, values: &mut [Complex<T>], tau: T) {
        for z in values.iter_mut() {
            let rho = z.norm_sqr();
            let mut v = T::zero();
            if self.mu_mc != T::zero() {
                v = v + self.mu_mc * pow_real(rho, self.e_mc);
            }
            if self.mu_p != T::zero() {
                v = v + self.mu_p * pow_real(rho, self.e_p);
            }
            let ph = -tau * v;
            *z = *z * Complex::new(ph.cos(), ph.sin());
        }
    }

    pub fn step(&self, u: &mut ComplexField<T>) -> Result<()> {
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch("field and stepper grids differ".into()));
        }
        self.nonlinear_phase(u.values_mut(), self.half_dt);
        u.transform_in_place(Direction::Forward);
        for (z, s) in u.values_mut().iter_mut().zip(&self.kinetic) {
            *z = *z * *s;
        }
        u.transform_in_place(Direction::Inverse);
        self.nonlinear_phase(u.values_mut(), self.half_dt);
        Ok(())
    }
}

/// One Strang step; fails with [`Error::NonFinite`] when the result is not finite.
pub fn strang_step<T: Real>(u: &ComplexField<T>, mp: &ModelParams<T>, dt: T) -> Result<ComplexField<T>> {
    let mut out = u.clone();
    Stepper::new(u.grid(), mp, dt).step(&mut out)?;
    if !out.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// `||<grad>^{s_p} u||^{q}_{L^q}` with `q = 2(d+2)/d` and `<grad>^s = 1 + |grad|^s`.
pub fn scatter_density<T: Real>(u: &ComplexField<T>, mp: &ModelParams<T>) -> T {
    let m = FourierMultiplier::japanese_bracket(u.grid(), mp.s_p());
    let mut w = u.clone();
    m.apply_in_place(&mut w).expect("multiplier built on the field's grid");
    w.lq_power(mp.mc_exponent())
}

/// Abort decision from the monitored quantities at one snapshot.
pub fn abort_reason<T: Real>(
    finite: bool,
    grad_ratio: T,
    tail: T,
    edge: T,
    cfg: &StepperConfig<T>,
) -> Option<Outcome> {
    if !finite {
        return Some(Outcome::BlowupDetected);
    }
    if tail > cfg.tail_fraction_max {
        return Some(if grad_ratio >= cfg.blowup_grad_factor {
            Outcome::BlowupDetected
        } else {
            Outcome::ResolutionLost
        });
    }
    if edge > cfg.edge_mass_max {
        return Some(Outcome::BoxEscape);
    }
    None
}

/// Evolves `u0` to `cfg.t_final` or the first abort.
pub fn evolve<T: Real>(u0: &ComplexField<T>, mp: &ModelParams<T>, cfg: &StepperConfig<T>) -> Result<TrajectoryLog<T>> {
    evolve_with(u0, mp, cfg, |_, _| {})
}

/// As [`evolve`], calling `observer` with the field and its snapshot at every
/// snapshot time (including `t = 0`).
pub fn evolve_with<T: Real>(
    u0: &ComplexField<T>,
    mp: &ModelParams<T>,
    cfg: &StepperConfig<T>,
    mut observer: impl FnMut(&ComplexField<T>, &FunctionalSnapshot<T>),
) -> Result<TrajectoryLog<T>> {
    cfg.validate()?;
    if !u0.is_finite() {
        return Err(Error::NonFinite);
    }
    let edge0 = u0.edge_mass_fraction(cfg.edge_cells);
    if edge0 > cfg.edge_mass_max {
        return Err(Error::EdgeCriterion {
            fraction: to_f64(edge0),
            limit: to_f64(cfg.edge_mass_max),
        });
    }
    let steps = cfg.steps();
    let stepper = Stepper::new(u0.grid(), mp, cfg.dt);
    let mut u = u0.clone();
    let mut log = TrajectoryLog {
        snapshots: Vec::new(),
        checkpoints: Vec::new(),
        scatter_accum: Vec::new(),
        scatter_density: Vec::new(),
        tail_fractions: Vec::new(),
        edge_fractions: Vec::new(),
        outcome: Outcome::Completed,
        abort_time: None,
        final_field: u0.clone(),
        dt: cfg.dt,
        t_final: cfg.t_final,
    };
    let t_end = cfg.dt * T::from_usize(steps).unwrap();
    let mut pending: Vec<T> = cfg.checkpoint_times.clone();
    pending.push(t_end * lit(0.75));
    pending.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut grad0 = None;

    for k in 0..=steps {
        if k > 0 {
            stepper.step(&mut u)?;
        }
        if k % cfg.snapshot_every != 0 && k != steps {
            continue;
        }
        let t = cfg.dt * T::from_usize(k).unwrap();
        let finite = u.is_finite();
        let snap = snapshot(&u, mp, t);
        let g0 = *grad0.get_or_insert(snap.grad_l2_sq.sqrt());
        let ratio = if finite {
            snap.grad_l2_sq.sqrt() / g0
        } else {
            T::infinity()
        };
        let tail = if finite { u.spectral_tail_fraction() } else { T::infinity() };
        let edge = if finite { u.edge_mass_fraction(cfg.edge_cells) } else { T::infinity() };
        let density = if finite { scatter_density(&u, mp) } else { T::infinity() };
        let accum = match (log.snapshots.last(), log.scatter_density.last(), log.scatter_accum.last()) {
            (Some(prev), Some(&dens), Some(&acc)) => acc + dens * (t - prev.t),
            _ => T::zero(),
        };
        observer(&u, &snap);
        log.snapshots.push(snap);
        log.scatter_accum.push(accum);
        log.scatter_density.push(density);
        log.tail_fractions.push(tail);
        log.edge_fractions.push(edge);
        if k == 0 {
            log.checkpoints.push(Checkpoint { t, field: u.clone() });
        }
        while let Some(&tc) = pending.first() {
            if t >= tc && k > 0 {
                log.checkpoints.push(Checkpoint { t, field: u.clone() });
                pending.remove(0);
            } else {
                break;
            }
        }
        if let Some(out) = abort_reason(finite, ratio, tail, edge, cfg) {
            log.outcome = out;
            log.abort_time = Some(t);
            break;
        }
    }
    if log.outcome == Outcome::Completed {
        let t = log.snapshots.last().unwrap().t;
        if log.checkpoints.last().map(|c| c.t) != Some(t) {
            log.checkpoints.push(Checkpoint { t, field: u.clone() });
        }
    }
    log.final_field = u;
    Ok(log)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupKind {
    /// Gradient growth together with grid-scale concentration.
    FocusingCollapse,
    /// Spectral tail exceeded without significant gradient growth.
    ResolutionLoss,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupDiagnosis {
    pub detected: bool,
    pub kind: BlowupKind,
    /// Time of the snapshot at which the criterion first held.
    pub time: Option<f64>,
    pub max_grad_ratio: f64,
    pub max_tail_fraction: f64,
}

/// Re-evaluates the blow-up criterion over a recorded log.
pub fn detect_blowup<T: Real>(log: &TrajectoryLog<T>, cfg: &StepperConfig<T>) -> Result<BlowupDiagnosis> {
    let first = log
        .snapshots
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory log".into()))?;
    let g0 = first.grad_l2_sq.sqrt();
    let mut max_ratio = T::zero();
    let mut max_tail = T::zero();
    let mut kind = BlowupKind::None;
    let mut time = None;
    for (s, &tail) in log.snapshots.iter().zip(&log.tail_fractions) {
        let ratio = if s.grad_l2_sq.is_finite() {
            s.grad_l2_sq.sqrt() / g0
        } else {
            T::infinity()
        };
        max_ratio = max_ratio.max(ratio);
        max_tail = max_tail.max(tail);
        if kind == BlowupKind::None && tail > cfg.tail_fraction_max {
            kind = if ratio >= cfg.blowup_grad_factor {
                BlowupKind::FocusingCollapse
            } else {
                BlowupKind::ResolutionLoss
            };
            time = Some(to_f64(s.t));
        }
    }
    Ok(BlowupDiagnosis {
        detected: kind == BlowupKind::FocusingCollapse,
        kind,
        time,
        max_grad_ratio: to_f64(max_ratio),
        max_tail_fraction: to_f64(max_tail),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub scatter_accum: f64,
    pub mean_rate: f64,
    pub last_quarter_rate: f64,
    /// `last_quarter_rate / mean_rate`.
    pub saturation_ratio: f64,
    /// Saturation threshold on `saturation_ratio` (0.01).
    pub threshold: f64,
    pub pass: bool,
    /// `||u(T)||_{p+1}^{p+1} / max_t ||u(t)||_{p+1}^{p+1}`.
    pub lp1_decay_factor: f64,
    /// `||e^{-iT Lap} u(T) - e^{-it Lap} u(t)||_2 / ||u||_2` with `t` the first snapshot at or after `3T/4`.
    pub cauchy_distance: Option<f64>,
}

pub const SATURATION_THRESHOLD: f64 = 0.01;

/// Saturation of the accumulated space-time norm plus the free-flow Cauchy test.
pub fn scattering_proxy<T: Real>(log: &TrajectoryLog<T>) -> Result<ScatteringReport> {
    if log.outcome != Outcome::Completed {
        return Err(Error::IncompleteTrajectory(log.outcome.as_str().into()));
    }
    let n = log.snapshots.len();
    if n < 3 {
        return Err(Error::IncompleteTrajectory("fewer than three snapshots".into()));
    }
    let t_end = log.snapshots[n - 1].t;
    let a_end = log.scatter_accum[n - 1];
    let t_q = t_end * lit(0.75);
    let iq = log.snapshots.iter().position(|s| s.t >= t_q).unwrap_or(n - 1);
    let span = t_end - log.snapshots[iq].t;
    let mean = a_end / t_end;
    let last = if span > T::zero() {
        (a_end - log.scatter_accum[iq]) / span
    } else {
        T::zero()
    };
    let ratio = if mean > T::zero() { last / mean } else { T::zero() };
    let lp_max = log.snapshots.iter().map(|s| s.lp1).fold(T::zero(), T::max);
    let lp_decay = if lp_max > T::zero() {
        log.snapshots[n - 1].lp1 / lp_max
    } else {
        T::zero()
    };

    let cauchy = {
        let late = log.checkpoints.iter().find(|c| c.t >= t_q && c.t < t_end);
        let fin = log.checkpoints.iter().rev().find(|c| c.t == t_end);
        match (late, fin) {
            (Some(a), Some(b)) => {
                let pa = FourierMultiplier::free_flow(a.field.grid(), -a.t).apply(&a.field)?;
                let pb = FourierMultiplier::free_flow(b.field.grid(), -b.t).apply(&b.field)?;
                Some(to_f64((pb.sub(&pa)?.l2_norm_sq() / pb.l2_norm_sq()).sqrt()))
            }
            _ => None,
        }
    };
    Ok(ScatteringReport {
        scatter_accum: to_f64(a_end),
        mean_rate: to_f64(mean),
        last_quarter_rate: to_f64(last),
        saturation_ratio: to_f64(ratio),
        threshold: SATURATION_THRESHOLD,
        pass: to_f64(ratio) < SATURATION_THRESHOLD,
        lp1_decay_factor: to_f64(lp_decay),
        cauchy_distance: cauchy,
    })
}

/// Largest deviations of the conserved quantities from their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drifts {
    /// `max |M(t) - M(0)| / M(0)`.
    pub mass: f64,
    /// `max |E(t) - E(0)| / |E(0)|`.
    pub energy: f64,
    /// `max |P(t) - P(0)| / (||u0||_2 ||grad u0||_2)`, the Cauchy-Schwarz scale of `P`.
    pub momentum: f64,
}

pub fn drifts<T: Real>(log: &TrajectoryLog<T>) -> Drifts {
    let Some(s0) = log.snapshots.first() else {
        return Drifts {
            mass: 0.0,
            energy: 0.0,
            momentum: 0.0,
        };
    };
    let pscale = (s0.mass * s0.grad_l2_sq).sqrt();
    let mut d = Drifts {
        mass: 0.0,
        energy: 0.0,
        momentum: 0.0,
    };
    for s in &log.snapshots {
        d.mass = d.mass.max(to_f64((s.mass - s0.mass).abs() / s0.mass));
        d.energy = d.energy.max(to_f64((s.energy - s0.energy).abs() / s0.energy.abs()));
        let dp = s
            .momentum
            .iter()
            .zip(&s0.momentum)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .fold(T::zero(), |x, y| x + y)
            .sqrt();
        d.momentum = d.momentum.max(to_f64(dp / pscale));
    }
    d
}

/// Exact Galilean image of a solution at time `t`:
/// `e^{i x.xi} e^{-i t |xi|^2} u(x - 2 xi t)`.
pub fn galilean_transform<T: Real>(u: &ComplexField<T>, xi: [T; 2], t: T) -> Result<ComplexField<T>> {
    let two_t = lit::<T>(2.0) * t;
    let shifted = FourierMultiplier::translation(u.grid(), [two_t * xi[0], two_t * xi[1]]).apply(u)?;
    let phase = -t * (xi[0] * xi[0] + xi[1] * xi[1]);
    Ok(shifted.map_with_position(|x, z| {
        z * Complex::from_polar(T::one(), xi[0] * x[0] + xi[1] * x[1] + phase)
    }))
}

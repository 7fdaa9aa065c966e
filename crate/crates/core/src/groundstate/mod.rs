//! Ground states of the stationary problems
//!
//! ```text
//! double:         Lap Q - omega Q + |Q|^{p-1} Q - |Q|^{4/d} Q = 0
//! single_power:   Lap Q - omega Q + |Q|^{p-1} Q = 0
//! mass_critical:  Lap Q - Q + |Q|^{4/d} Q = 0
//! ```
//!
//! Each problem is paired with the model whose action it makes stationary
//! (see [`Which::functional_model`]), so `m_omega = S_omega(Q)` and `K(Q)` are
//! evaluated with the matching couplings. Profiles are computed by radial
//! shooting in any `d = 1..4`; for `d = 1, 2` the profile is also sampled
//! onto a periodic grid and independently recomputed there by spectral
//! renormalization.

mod renorm;
mod shooting;

pub use renorm::{spectral_renormalization, RenormOptions, RenormOutcome};
pub use shooting::{RadialOde, Shot, ShootingOptions};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::functionals::{integrals, Equation, Integrals, ModelParams};
use crate::scalar::{lit, pow_real, to_f64, Real};
use crate::spectral::{ComplexField, Direction, GridSpec};
use shooting::Shooter;

/// Which stationary problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Double,
    MassCritical,
    SinglePower,
    /// Positive standing wave `e^{i omega t} Q` of the model's own equation,
    /// including `E2`; same profile as `Double` for `E1`.
    StandingWave,
}

impl Which {
    /// Model whose action is stationary at the solution: the `E1` model for
    /// `Double`, the focusing `p` term alone for `SinglePower`, and the
    /// focusing mass-critical term alone with `omega = 1` for `MassCritical`.
    pub fn functional_model<T: Real>(self, mp: &ModelParams<T>) -> Result<ModelParams<T>> {
        match self {
            Which::Double => {
                if mp.equation != Equation::E1 {
                    return Err(Error::InvalidModel(
                        "double ground state exists for E1 only; use mass_critical for E2".into(),
                    ));
                }
                ModelParams::new(mp.d, mp.p, mp.omega, Equation::E1)
            }
            Which::SinglePower => ModelParams::single_power(mp.d, mp.p, mp.omega),
            Which::StandingWave => Ok(*mp),
            Which::MassCritical => Ok(ModelParams::new(mp.d, mp.p, T::one(), Equation::E2)?
                .with_couplings(-T::one(), T::zero())),
        }
    }
}

/// Positive Gaussian starting profile `amplitude * exp(-r^2 / width^2)`.
///
/// For shooting only the amplitude matters: it centers the scanned bracket
/// `[amplitude / 4, 4 amplitude]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guess<T> {
    pub amplitude: Option<T>,
    pub width: Option<T>,
}

impl<T> Default for Guess<T> {
    fn default() -> Self {
        Self {
            amplitude: None,
            width: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateOptions<T: Real> {
    pub shooting: ShootingOptions<T>,
    /// Grid for the sampled field and the spectral cross-check.
    pub grid: Option<GridSpec<T>>,
    pub cross_check: bool,
    pub renorm: RenormOptions<T>,
    /// Solve fails when the radial residual exceeds `residual_tol * Q(0)`.
    pub residual_tol: T,
    /// Solve fails when the two methods disagree on `Q(0)` by more than this (relative).
    pub agreement_tol: T,
    pub pohozaev_tol: T,
    /// Times the amplitude bracket is extended upward by a factor of 4 when
    /// the initial scan finds no transition.
    pub bracket_extensions: usize,
}

impl<T: Real> Default for GroundStateOptions<T> {
    fn default() -> Self {
        Self {
            shooting: ShootingOptions::default(),
            grid: None,
            cross_check: true,
            renorm: RenormOptions::default(),
            residual_tol: lit(1e-8),
            agreement_tol: lit(1e-6),
            pohozaev_tol: lit(1e-6),
            bracket_extensions: 3,
        }
    }
}

/// One undershoot/overshoot transition found by the amplitude scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Branch {
    pub bracket: (f64, f64),
    pub q0: f64,
    pub action: f64,
    pub mass: f64,
    pub is_ground_state: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub q0_grid: f64,
    pub relative_gap: f64,
    pub iterations: usize,
    pub stabilizer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    /// `S_omega(Q)` under the functional model.
    pub m_omega: f64,
    /// `||Q||_2^2`.
    pub q_mass: f64,
}

/// Nehari and Pohozaev identities, each normalized by the sum of the
/// absolute values of its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub nehari: f64,
    pub pohozaev: f64,
    /// `|K(Q)| / (||grad Q||^2 + 1)`.
    pub k_relative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct GroundStateSolution<T: Real> {
    pub which: Which,
    /// Parameters the solve was requested with.
    pub params: ModelParams<T>,
    /// Model whose action the profile makes stationary.
    pub model: ModelParams<T>,
    pub omega: T,
    /// Radial step; node `i` sits at `r = i * step`.
    pub step: T,
    pub q: Vec<T>,
    pub dq: Vec<T>,
    /// Far-field amplitude `A` in `Q ~ A e^{-sqrt(omega) r} r^{-(d-1)/2}`.
    pub tail_amplitude: T,
    /// `|Q'|` mismatch where the outward and inward solutions are joined.
    pub match_slope_error: T,
    pub field: Option<ComplexField<T>>,
    /// Sup-norm of the stationary equation on the radial nodes.
    pub residual: T,
    /// Spectral residual of the sampled grid field, when present.
    pub grid_residual: Option<T>,
    pub integrals: Integrals<T>,
    pub m_omega: T,
    pub mass: T,
    pub k_value: T,
    pub branches: Vec<Branch>,
    pub cross_check: Option<CrossCheck>,
    pohozaev_tol: T,
}

fn surface_area<T: Real>(d: usize) -> T {
    let pi = T::PI();
    match d {
        1 => lit(2.0),
        2 => lit::<T>(2.0) * pi,
        3 => lit::<T>(4.0) * pi,
        _ => lit::<T>(2.0) * pi * pi,
    }
}

/// Simpson quadrature of `|S^{d-1}| int_0^R g(r) r^{d-1} dr` on an even node count.
fn radial_integral<T: Real>(d: usize, h: T, vals: impl Iterator<Item = T>) -> T {
    let mut s = T::zero();
    let vals: Vec<T> = vals.collect();
    let n = vals.len() - 1;
    for (i, v) in vals.into_iter().enumerate() {
        let r = h * T::from_usize(i).unwrap();
        let w = if i == 0 || i == n {
            T::one()
        } else if i % 2 == 1 {
            lit(4.0)
        } else {
            lit(2.0)
        };
        s = s + w * v * r.powi(d as i32 - 1);
    }
    s * h / lit(3.0) * surface_area(d)
}

/// Radial integrals of a profile sampled at `r_i = i h`.
pub fn radial_integrals<T: Real>(model: &ModelParams<T>, h: T, q: &[T], dq: &[T]) -> Integrals<T> {
    let d = model.d;
    let p1 = model.p + T::one();
    let mc = model.mc_exponent();
    Integrals {
        mass: radial_integral(d, h, q.iter().map(|&v| v * v)),
        grad_sq: radial_integral(d, h, dq.iter().map(|&v| v * v)),
        lp1: radial_integral(d, h, q.iter().map(|&v| pow_real(v.abs(), p1))),
        lmc: radial_integral(d, h, q.iter().map(|&v| pow_real(v.abs(), mc))),
    }
}

fn ode_for<T: Real>(model: &ModelParams<T>) -> RadialOde<T> {
    let (mu_mc, mu_p) = model.couplings();
    RadialOde {
        d: model.d,
        omega: model.omega,
        terms: [(mu_mc, model.mc_power() + T::one()), (mu_p, model.p)],
    }
}

/// Amplitude of the single-power soliton of the dominant focusing term.
fn reference_amplitude<T: Real>(model: &ModelParams<T>) -> T {
    let (mu_mc, mu_p) = model.couplings();
    let e = if mu_p < T::zero() || !(mu_mc < T::zero()) {
        model.p
    } else {
        model.mc_power() + T::one()
    };
    ((e + T::one()) * model.omega * lit(0.5)).powf(T::one() / (e - T::one()))
}

/// Nehari and Pohozaev residuals from precomputed integrals.
pub fn pohozaev_residuals<T: Real>(model: &ModelParams<T>, i: &Integrals<T>, tol: T) -> Result<PohozaevReport> {
    if !(i.mass > T::zero()) {
        return Err(Error::InvalidArgument("zero profile is not a ground state".into()));
    }
    let d = lit::<T>(model.d as f64);
    let (mu_mc, mu_p) = model.couplings();
    let mc = model.mc_exponent();
    let p1 = model.p + T::one();
    // Multiplying by Q: -g - omega M - mu_mc lmc - mu_p lp1 = 0.
    let n_terms = [i.grad_sq, model.omega * i.mass, mu_mc * i.lmc, mu_p * i.lp1];
    // Multiplying by x . grad Q: (d-2)/2 g + d (omega M / 2 + mu_mc lmc / mc + mu_p lp1 / (p+1)) = 0.
    let p_terms = [
        (d - lit(2.0)) * lit(0.5) * i.grad_sq,
        d * model.omega * i.mass * lit(0.5),
        d * mu_mc * i.lmc / mc,
        d * mu_p * i.lp1 / p1,
    ];
    let rel = |t: &[T]| {
        let s: T = t.iter().copied().sum();
        let a: T = t.iter().map(|v| v.abs()).sum();
        to_f64(s.abs() / a)
    };
    let nehari = rel(&n_terms);
    let pohozaev = rel(&p_terms);
    let k_relative = to_f64(model.k_from(i).abs() / (i.grad_sq + T::one()));
    let t = to_f64(tol);
    Ok(PohozaevReport {
        nehari,
        pohozaev,
        k_relative,
        tolerance: t,
        passed: nehari < t && pohozaev < t && k_relative < t,
    })
}

/// `sup |Q'' + (d-1)/r Q' - F(Q)|` with `Q''` from sixth-order differences of `Q'`.
fn radial_residual<T: Real>(ode: &RadialOde<T>, h: T, q: &[T], dq: &[T]) -> T {
    let n = q.len() - 1;
    let at = |j: isize| -> T {
        if j < 0 {
            -dq[(-j) as usize]
        } else {
            dq[j as usize]
        }
    };
    let c = [lit::<T>(-1.0), lit(9.0), lit(-45.0), T::zero(), lit(45.0), lit(-9.0), lit(1.0)];
    let dm1 = lit::<T>((ode.d - 1) as f64);
    let mut worst = T::zero();
    for i in 0..=n.saturating_sub(3) {
        let mut d2 = T::zero();
        for (k, ck) in c.iter().enumerate() {
            d2 = d2 + *ck * at(i as isize + k as isize - 3);
        }
        d2 = d2 / (lit::<T>(60.0) * h);
        let lhs = if i == 0 {
            lit::<T>(ode.d as f64) * d2
        } else {
            d2 + dm1 / (h * T::from_usize(i).unwrap()) * dq[i]
        };
        worst = worst.max((lhs - ode.f(q[i])).abs());
    }
    worst
}

/// Solves the stationary problem selected by `which`.
pub fn solve_ground_state<T: Real>(
    mp: &ModelParams<T>,
    which: Which,
    guess: &Guess<T>,
    opts: &GroundStateOptions<T>,
) -> Result<GroundStateSolution<T>> {
    let model = which.functional_model(mp)?;
    let ode = ode_for(&model);
    let shooter = Shooter::new(ode, opts.shooting)?;
    let center = guess.amplitude.unwrap_or_else(|| reference_amplitude(&model));
    if !(center > T::zero()) {
        return Err(Error::InvalidArgument("guess amplitude must be positive".into()));
    }
    let (lo, mut hi) = (center / lit(4.0), center * lit(4.0));
    let mut brackets = shooter.brackets(lo, hi);
    for _ in 0..opts.bracket_extensions {
        if !brackets.is_empty() {
            break;
        }
        let next = hi * lit(4.0);
        brackets = shooter.brackets(hi, next);
        hi = next;
    }
    if brackets.is_empty() {
        return Err(Error::NoSignChange {
            lo: to_f64(lo),
            hi: to_f64(hi),
        });
    }

    let mut candidates = Vec::new();
    let mut last_err = None;
    for &(a, b) in &brackets {
        let q0 = shooter.bisect(a, b)?;
        match shooter.profile(q0) {
            Ok(prof) => {
                let ints = radial_integrals(&model, shooter.h, &prof.q, &prof.dq);
                candidates.push(((a, b), prof, ints, model.action_from(&ints)));
            }
            Err(e) => last_err = Some(e),
        }
    }
    if candidates.is_empty() {
        return Err(last_err.unwrap_or(Error::NoSignChange {
            lo: to_f64(lo),
            hi: to_f64(hi),
        }));
    }
    let best = candidates
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap();
    let branches = candidates
        .iter()
        .enumerate()
        .map(|(i, (br, prof, ints, s))| Branch {
            bracket: (to_f64(br.0), to_f64(br.1)),
            q0: to_f64(prof.q[0]),
            action: to_f64(*s),
            mass: to_f64(ints.mass),
            is_ground_state: i == best,
        })
        .collect();
    let (_, prof, ints, action) = candidates.swap_remove(best);

    let residual = radial_residual(&ode, shooter.h, &prof.q, &prof.dq);
    let q0 = prof.q[0];
    if !(residual < opts.residual_tol * q0) {
        return Err(Error::NoConvergence {
            method: "shooting (stationary residual)",
            iterations: opts.shooting.max_bisection,
            last_change: to_f64(residual / q0),
        });
    }

    let mut gs = GroundStateSolution {
        which,
        params: *mp,
        model,
        omega: model.omega,
        step: shooter.h,
        q: prof.q,
        dq: prof.dq,
        tail_amplitude: prof.tail_amplitude,
        match_slope_error: prof.match_slope_error,
        field: None,
        residual,
        grid_residual: None,
        integrals: ints,
        m_omega: action,
        mass: ints.mass,
        k_value: model.k_from(&ints),
        branches,
        cross_check: None,
        pohozaev_tol: opts.pohozaev_tol,
    };

    if let Some(grid) = &opts.grid {
        if grid.dim() != mp.d {
            return Err(Error::GridMismatch(format!(
                "grid dimension {} differs from model dimension {}",
                grid.dim(),
                mp.d
            )));
        }
        let field = gs.field_on(grid);
        gs.grid_residual = Some(stationary_residual(&model, &field));
        if opts.cross_check {
            let amp = guess.amplitude.unwrap_or_else(|| reference_amplitude(&model));
            let width = guess.width.unwrap_or_else(|| T::one() / model.omega.sqrt());
            let start = ComplexField::from_real_fn(grid, |x| {
                amp * (-(x[0] * x[0] + x[1] * x[1]) / (width * width)).exp()
            });
            let out = spectral_renormalization(&model, &start, &opts.renorm)?;
            let q0_grid = out.field.values()[grid.origin_index()].re;
            let gap = ((q0_grid - q0) / q0).abs();
            gs.cross_check = Some(CrossCheck {
                q0_grid: to_f64(q0_grid),
                relative_gap: to_f64(gap),
                iterations: out.iterations,
                stabilizer: to_f64(out.stabilizer),
            });
            if !(gap < opts.agreement_tol) {
                return Err(Error::NoConvergence {
                    method: "shooting / spectral renormalization agreement",
                    iterations: out.iterations,
                    last_change: to_f64(gap),
                });
            }
        }
        gs.field = Some(field);
    }
    Ok(gs)
}

/// `sup |Lap f - F(f)|` on the grid, with the Laplacian taken spectrally.
pub fn stationary_residual<T: Real>(model: &ModelParams<T>, f: &ComplexField<T>) -> T {
    let ode = ode_for(model);
    let grid = f.grid();
    let mut s = f.transform(Direction::Forward);
    for (i, z) in s.values_mut().iter_mut().enumerate() {
        *z = *z * (-grid.k_squared(i));
    }
    s.transform_in_place(Direction::Inverse);
    s.values()
        .iter()
        .zip(f.values())
        .map(|(lap, z)| (lap.re - ode.f(z.re)).abs().max(lap.im.abs()))
        .fold(T::zero(), T::max)
}

impl<T: Real> GroundStateSolution<T> {
    pub fn q0(&self) -> T {
        self.q[0]
    }

    pub fn r_max(&self) -> T {
        self.step * T::from_usize(self.q.len() - 1).unwrap()
    }

    pub fn radius(&self, i: usize) -> T {
        self.step * T::from_usize(i).unwrap()
    }

    fn ode(&self) -> RadialOde<T> {
        ode_for(&self.model)
    }

    fn second_derivative(&self, i: usize) -> T {
        let ode = self.ode();
        if i == 0 {
            ode.f(self.q[0]) / lit(self.model.d as f64)
        } else {
            ode.f(self.q[i]) - lit::<T>((self.model.d - 1) as f64) / self.radius(i) * self.dq[i]
        }
    }

    /// `Q(r)` by quintic Hermite interpolation between nodes; beyond `r_max`
    /// the far-field asymptote is used.
    pub fn value(&self, r: T) -> T {
        let r = r.abs();
        let n = self.q.len() - 1;
        if r >= self.r_max() {
            let k = self.omega.sqrt();
            let nu = lit::<T>((self.model.d - 1) as f64) * lit(0.5);
            return self.tail_amplitude * (-k * r).exp() * r.powf(-nu);
        }
        let h = self.step;
        let i = (r / h).floor().to_usize().unwrap_or(0).min(n - 1);
        let t = (r - self.radius(i)) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let c = |x: f64| lit::<T>(x);
        let h0 = T::one() - c(10.0) * t3 + c(15.0) * t4 - c(6.0) * t5;
        let h1 = c(10.0) * t3 - c(15.0) * t4 + c(6.0) * t5;
        let h2 = t - c(6.0) * t3 + c(8.0) * t4 - c(3.0) * t5;
        let h3 = -c(4.0) * t3 + c(7.0) * t4 - c(3.0) * t5;
        let h4 = (t2 - c(3.0) * t3 + c(3.0) * t4 - t5) * c(0.5);
        let h5 = (t3 - c(2.0) * t4 + t5) * c(0.5);
        self.q[i] * h0
            + self.q[i + 1] * h1
            + h * (self.dq[i] * h2 + self.dq[i + 1] * h3)
            + h * h * (self.second_derivative(i) * h4 + self.second_derivative(i + 1) * h5)
    }

    /// Samples `Q(|x|)` onto `grid`.
    pub fn field_on(&self, grid: &GridSpec<T>) -> ComplexField<T> {
        let mut f = ComplexField::zeros(grid);
        for (i, z) in f.values_mut().iter_mut().enumerate() {
            *z = Complex::new(self.value(grid.radius(i)), T::zero());
        }
        f
    }

    pub fn threshold(&self) -> Threshold {
        threshold(self)
    }

    pub fn pohozaev_check(&self) -> Result<PohozaevReport> {
        pohozaev_check(self)
    }

    /// `H_omega(Q)` under the functional model.
    pub fn h_value(&self) -> T {
        self.model.h_from(&self.integrals)
    }

    /// SHA-256 over the model parameters and the little-endian profile bytes.
    pub fn provenance_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{:?}|{}|{}|{}", self.which, self.model.d, self.model.p, self.omega).as_bytes());
        h.update(to_f64(self.step).to_le_bytes());
        for v in &self.q {
            h.update(to_f64(*v).to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Writes `r,Q,dQ` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,Q,dQ")?;
        for i in 0..self.q.len() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e}",
                to_f64(self.radius(i)),
                to_f64(self.q[i]),
                to_f64(self.dq[i])
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Saves the sampled grid field in the binary field format.
    pub fn save_field(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = self
            .field
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("ground state has no grid field".into()))?;
        crate::spectral::io::save_field(f, path)
    }
}

/// `m_omega = S_omega(Q)` and `||Q||_2^2`.
pub fn threshold<T: Real>(gs: &GroundStateSolution<T>) -> Threshold {
    Threshold {
        m_omega: to_f64(gs.m_omega),
        q_mass: to_f64(gs.mass),
    }
}

pub fn pohozaev_check<T: Real>(gs: &GroundStateSolution<T>) -> Result<PohozaevReport> {
    pohozaev_residuals(&gs.model, &gs.integrals, gs.pohozaev_tol)
}

/// Pohozaev report for an arbitrary grid field under `model`.
pub fn pohozaev_check_field<T: Real>(model: &ModelParams<T>, f: &ComplexField<T>, tol: T) -> Result<PohozaevReport> {
    pohozaev_residuals(model, &integrals(f, model), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    fn model(d: usize, p: f64, omega: f64) -> ModelParams<f64> {
        ModelParams::new(d, p, omega, Equation::E1).unwrap()
    }

    fn single(d: usize, p: f64, omega: f64) -> ModelParams<f64> {
        ModelParams::single_power(d, p, omega).unwrap()
    }

    #[test]
    fn quintic_soliton_closed_form() {
        let mp = single(1, 5.0, 1.0);
        let gs = solve_ground_state(&mp, Which::SinglePower, &Guess::default(), &Default::default()).unwrap();
        let exact = |r: f64| 3f64.powf(0.25) / (2.0 * r).cosh().sqrt();
        assert!((gs.q0() - 3f64.powf(0.25)).abs() < 1e-9);
        let mut err = 0.0f64;
        for i in 0..gs.q.len() {
            err = err.max((gs.q[i] - exact(gs.radius(i))).abs());
        }
        assert!(err < 1e-8, "sup error {err:e}");
        let m = 3f64.sqrt() * std::f64::consts::PI / 2.0;
        assert!((gs.mass - m).abs() < 1e-8);
        assert!(gs.q.last().unwrap() / gs.q0() < 1e-8);
        assert!(gs.q.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        let rep = gs.pohozaev_check().unwrap();
        assert!(rep.nehari < 1e-8 && rep.pohozaev < 1e-8, "{rep:?}");
    }

    #[test]
    fn single_power_amplitude_formula() {
        for (p, omega) in [(3.0, 1.0), (6.0, 1.0), (7.0, 0.5), (9.0, 2.0)] {
            let mp = single(1, p, omega);
            let gs = solve_ground_state(&mp, Which::SinglePower, &Guess::default(), &Default::default()).unwrap();
            let a = ((p + 1.0) * omega / 2.0).powf(1.0 / (p - 1.0));
            assert!((gs.q0() - a).abs() < 1e-9 * a, "p={p} omega={omega}: {} vs {a}", gs.q0());
        }
    }

    #[test]
    fn double_ground_state_and_cross_check() {
        let mp = model(1, 7.0, 1.0);
        let grid = make_grid(1, 1024, 32.0).unwrap();
        let opts = GroundStateOptions {
            grid: Some(grid),
            ..Default::default()
        };
        let gs = solve_ground_state(&mp, Which::Double, &Guess::default(), &opts).unwrap();
        assert!(gs.residual < 1e-8 * gs.q0());
        assert!(gs.k_value.abs() < 1e-6 * (gs.integrals.grad_sq + 1.0));
        assert!(gs.m_omega > 0.0);
        assert!((gs.h_value() - gs.m_omega).abs() < 1e-8);
        let cc = gs.cross_check.unwrap();
        assert!(cc.relative_gap < 1e-6, "{cc:?}");
        assert!(gs.grid_residual.unwrap() < 1e-6, "{:?}", gs.grid_residual);
        assert!(gs.pohozaev_check().unwrap().passed);
        assert_eq!(gs.branches.iter().filter(|b| b.is_ground_state).count(), 1);
    }

    #[test]
    fn fourth_order_in_radial_step() {
        let mp = model(2, 4.0, 1.0);
        let q0 = |h: f64| {
            let opts = GroundStateOptions {
                shooting: ShootingOptions {
                    radial_step: Some(h),
                    ..Default::default()
                },
                residual_tol: 1.0,
                ..Default::default()
            };
            solve_ground_state(&mp, Which::Double, &Guess::default(), &opts).unwrap().q0()
        };
        let (a, b, c) = (q0(0.02), q0(0.01), q0(0.005));
        let order = ((a - b) / (b - c)).log2();
        assert!(order > 3.6 && order < 4.5, "observed order {order}");
    }

    #[test]
    fn townes_mass_at_two_resolutions() {
        let mp = model(2, 4.0, 1.0);
        let mass = |h: f64| {
            let opts = GroundStateOptions {
                shooting: ShootingOptions {
                    radial_step: Some(h),
                    ..Default::default()
                },
                ..Default::default()
            };
            solve_ground_state(&mp, Which::MassCritical, &Guess::default(), &opts).unwrap().mass
        };
        let (m1, m2) = (mass(2.5e-3), mass(1.25e-3));
        assert!(((m1 - m2) / m2).abs() < 1e-4);
        assert!((m2 - 11.700896).abs() < 1e-4, "Townes mass {m2}");
    }

    #[test]
    fn perturbed_profile_fails_pohozaev() {
        let mp = model(1, 7.0, 1.0);
        let grid = make_grid(1, 1024, 32.0).unwrap();
        let opts = GroundStateOptions {
            grid: Some(grid.clone()),
            cross_check: false,
            ..Default::default()
        };
        let gs = solve_ground_state(&mp, Which::Double, &Guess::default(), &opts).unwrap();
        let f = gs.field.as_ref().unwrap();
        let ok = pohozaev_check_field(&gs.model, f, 1e-6).unwrap();
        assert!(ok.passed, "{ok:?}");
        let bump = ComplexField::from_real_fn(&grid, |x| 0.05 * (-(x[0] - 0.5).powi(2) * 4.0).exp());
        let bad = pohozaev_check_field(&gs.model, &f.add(&bump).unwrap(), 1e-6).unwrap();
        assert!(!bad.passed && bad.nehari.max(bad.pohozaev) > 1e-3, "{bad:?}");
        assert!(pohozaev_check_field(&gs.model, &ComplexField::zeros(&grid), 1e-6).is_err());
    }

    #[test]
    fn double_requires_e1() {
        let mp = ModelParams::new(1, 7.0, 1.0, Equation::E2).unwrap();
        assert!(solve_ground_state(&mp, Which::Double, &Guess::default(), &Default::default()).is_err());
    }

    #[test]
    fn higher_dimensions() {
        for (d, p) in [(3, 3.0), (4, 2.5)] {
            let mp = model(d, p, 1.0);
            // Large amplitudes make the core narrow; refine the step accordingly.
            let o = GroundStateOptions {
                shooting: ShootingOptions {
                    radial_step: Some(1e-3),
                    ..Default::default()
                },
                ..Default::default()
            };
            let gs = solve_ground_state(&mp, Which::Double, &Guess::default(), &o).unwrap();
            assert!(gs.pohozaev_check().unwrap().passed, "d={d}");
            assert!(gs.m_omega > 0.0);
        }
    }
}

//! Sub-threshold classification of initial data.
//!
//! For `E1` the sets are
//!
//! ```text
//! A_+ = { S_omega < m_omega, K >= 0 },   A_- = { S_omega < m_omega, K < 0 }
//! ```
//!
//! with global scattering predicted on `A_+` and finite-time blow-up on `A_-`.
//! For `E2` the split is by mass against the mass-critical ground state `Q`,
//! with scattering predicted for `M(u_0) < M(Q)`.
//!
//! A margin is used only if it exceeds [`GATE_FACTOR`] times its uncertainty.
//! The uncertainty adds a quadrature part (spectral tail, edge mass, rounding)
//! and a threshold part: the discrepancy between the ground state sampled on
//! the same grid and its radially computed threshold value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{coercivity_constant, integrals, Equation, Integrals, ModelParams};
use crate::groundstate::{GroundStateSolution, Which};
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::ComplexField;

pub const GATE_FACTOR: f64 = 3.0;

/// `delta` in `K >= min(kinetic bound, delta (m_omega - S_omega))` on `A_+`,
/// measured on the scaled-ground-state corpus (`d = 1`, `p = 7`).
pub const TRAP_DELTA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetLabel {
    #[serde(rename = "A_plus")]
    APlus,
    #[serde(rename = "A_minus")]
    AMinus,
    #[serde(rename = "above_threshold")]
    AboveThreshold,
    #[serde(rename = "below_mass_threshold")]
    BelowMassThreshold,
    #[serde(rename = "above_mass_threshold")]
    AboveMassThreshold,
}

impl SetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SetLabel::APlus => "A_plus",
            SetLabel::AMinus => "A_minus",
            SetLabel::AboveThreshold => "above_threshold",
            SetLabel::BelowMassThreshold => "below_mass_threshold",
            SetLabel::AboveMassThreshold => "above_mass_threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    GlobalScattering,
    FiniteTimeBlowup,
    NoPrediction,
}

impl Prediction {
    pub fn as_str(self) -> &'static str {
        match self {
            Prediction::GlobalScattering => "global_scattering",
            Prediction::FiniteTimeBlowup => "finite_time_blowup",
            Prediction::NoPrediction => "no_prediction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub uncertainty: f64,
}

impl Margin {
    /// `Some(sign)` when `|value| > GATE_FACTOR * uncertainty`.
    pub fn resolved_sign(&self) -> Option<i8> {
        if self.value.abs() > GATE_FACTOR * self.uncertainty {
            Some(if self.value > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }
}

/// Side hypotheses attached to a blow-up prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// Finite second moment with negligible mass at the box edge.
    pub sigma_data: bool,
    pub second_moment: f64,
    /// Invariant under the lattice's reflections and axis swap.
    pub radial: bool,
    /// `d >= 2` and `p <= min(5, 1 + 4/(d-2))`.
    pub radial_exponent_ok: bool,
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub equation: Equation,
    pub set_label: Option<SetLabel>,
    pub prediction: Prediction,
    /// `S_omega(u0) - m_omega` (E1).
    pub action_margin: Option<Margin>,
    /// `K(u0)` (E1).
    pub k_margin: Option<Margin>,
    /// `M(u0) - M(Q)`.
    pub mass_margin: Margin,
    /// `C (m_omega + m_omega / omega)` for `A_plus` data.
    pub h1_bound: Option<f64>,
    pub hypotheses: Option<Hypotheses>,
    pub gate_factor: f64,
    pub ground_state_hash: String,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict is plain data")
    }
}

fn check_match<T: Real>(mp: &ModelParams<T>, gs: &GroundStateSolution<T>) -> Result<()> {
    let ok = match mp.equation {
        Equation::E1 => {
            gs.which == Which::Double
                && gs.params.d == mp.d
                && gs.params.p == mp.p
                && gs.omega == mp.omega
                && gs.params.equation == Equation::E1
        }
        Equation::E2 => gs.which == Which::MassCritical && gs.params.d == mp.d,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "ground state ({:?}, d={}, p={}, omega={}) does not match model ({:?}, d={}, p={}, omega={})",
            gs.which, gs.params.d, gs.params.p, gs.omega, mp.equation, mp.d, mp.p, mp.omega
        )))
    }
}

fn quadrature_error<T: Real>(u: &ComplexField<T>) -> f64 {
    let tail = to_f64(u.spectral_tail_fraction()).max(0.0).sqrt();
    let edge = to_f64(u.edge_mass_fraction(4));
    tail + edge + 64.0 * f64::EPSILON * (u.grid().len() as f64).log2().max(1.0)
}

struct Scales {
    action: f64,
    k: f64,
}

fn scales<T: Real>(mp: &ModelParams<T>, i: &Integrals<T>) -> Scales {
    let d = mp.d as f64;
    let p = to_f64(mp.p);
    let (g, m, lp1, lmc) = (to_f64(i.grad_sq), to_f64(i.mass), to_f64(i.lp1), to_f64(i.lmc));
    Scales {
        action: 0.5 * g + d / (2.0 * (d + 2.0)) * lmc + lp1 / (p + 1.0) + 0.5 * to_f64(mp.omega) * m,
        k: g + d / (d + 2.0) * lmc + d * (p - 1.0) / (2.0 * (p + 1.0)) * lp1,
    }
}

fn hypotheses<T: Real>(u: &ComplexField<T>, mp: &ModelParams<T>) -> Hypotheses {
    let g = u.grid();
    let n = g.n_per_axis();
    let second: T = (0..g.len())
        .map(|i| {
            let r = g.radius(i);
            r * r * u.values()[i].norm_sqr()
        })
        .sum::<T>()
        * g.cell_volume();
    let second_moment = to_f64(second);
    let sigma_data = second_moment.is_finite() && to_f64(u.edge_mass_fraction(4)) < 1e-10;

    // Lattice site i mirrors to (n - i) mod n about the origin.
    let mirror = |a: usize| (n - a) % n;
    let top = to_f64(u.sup_norm()).max(f64::MIN_POSITIVE);
    let mut dev = 0.0f64;
    for i in 0..g.len() {
        let [a, b] = g.unflatten(i);
        let z = u.values()[i];
        let mut images = vec![[mirror(a), b]];
        if g.dim() == 2 {
            images.push([a, mirror(b)]);
            images.push([b, a]);
        }
        for im in images {
            dev = dev.max(to_f64((z - u.values()[g.flatten(im)]).norm()));
        }
    }
    let radial = dev <= 1e-12 * top;
    let d = mp.d as f64;
    let p = to_f64(mp.p);
    let cap = if mp.d >= 3 { 5f64.min(1.0 + 4.0 / (d - 2.0)) } else { 5.0 };
    let radial_exponent_ok = mp.d >= 2 && p <= cap;
    Hypotheses {
        sigma_data,
        second_moment,
        radial,
        radial_exponent_ok,
        met: sigma_data || (radial && radial_exponent_ok),
    }
}

/// `max(2, 1/c)` with `c` the coercivity constant: on `A_+`,
/// `||u||_{H^1}^2 <= C (m_omega + m_omega / omega)`.
pub fn h1_constant<T: Real>(mp: &ModelParams<T>) -> f64 {
    2f64.max(1.0 / to_f64(coercivity_constant(mp)))
}

/// Labels `u0` and states the predicted dynamics.
pub fn classify<T: Real>(
    u0: &ComplexField<T>,
    mp: &ModelParams<T>,
    gs: &GroundStateSolution<T>,
) -> Result<Verdict> {
    check_match(mp, gs)?;
    let grid = u0.grid();
    let q_grid = gs.field_on(grid);
    let quad = quadrature_error(u0);
    let q_quad = quadrature_error(&q_grid);

    let iu = integrals(u0, mp);
    let iq = integrals(&q_grid, &gs.model);
    let mass_u = to_f64(iu.mass);
    let mass_q = to_f64(gs.mass);
    let mass_margin = Margin {
        value: mass_u - mass_q,
        uncertainty: quad * mass_u + q_quad * mass_q + (to_f64(iq.mass) - mass_q).abs(),
    };
    let hash = gs.provenance_hash();

    if mp.equation == Equation::E2 {
        let (set_label, prediction) = match mass_margin.resolved_sign() {
            Some(-1) => (Some(SetLabel::BelowMassThreshold), Prediction::GlobalScattering),
            Some(_) => (Some(SetLabel::AboveMassThreshold), Prediction::NoPrediction),
            None => (None, Prediction::NoPrediction),
        };
        return Ok(Verdict {
            equation: Equation::E2,
            set_label,
            prediction,
            action_margin: None,
            k_margin: None,
            mass_margin,
            h1_bound: None,
            hypotheses: None,
            gate_factor: GATE_FACTOR,
            ground_state_hash: hash,
        });
    }

    let su = scales(mp, &iu);
    let sq = scales(mp, &iq);
    let m_omega = to_f64(gs.m_omega);
    let s_u = to_f64(mp.action_from(&iu));
    let k_u = to_f64(mp.k_from(&iu));
    let action_margin = Margin {
        value: s_u - m_omega,
        uncertainty: quad * su.action + q_quad * sq.action + (to_f64(mp.action_from(&iq)) - m_omega).abs(),
    };
    let k_margin = Margin {
        value: k_u,
        uncertainty: quad * su.k + q_quad * sq.k + to_f64(mp.k_from(&iq)).abs(),
    };

    let set_label = match (action_margin.resolved_sign(), k_margin.resolved_sign()) {
        (Some(1), _) => Some(SetLabel::AboveThreshold),
        (Some(-1), Some(1)) => Some(SetLabel::APlus),
        (Some(-1), Some(-1)) => Some(SetLabel::AMinus),
        _ => None,
    };
    let prediction = match set_label {
        Some(SetLabel::APlus) => Prediction::GlobalScattering,
        Some(SetLabel::AMinus) => Prediction::FiniteTimeBlowup,
        _ => Prediction::NoPrediction,
    };
    let omega = to_f64(mp.omega);
    let h1_bound = (set_label == Some(SetLabel::APlus))
        .then(|| h1_constant(mp) * (m_omega + m_omega / omega));
    Ok(Verdict {
        equation: Equation::E1,
        set_label,
        prediction,
        action_margin: Some(action_margin),
        k_margin: Some(k_margin),
        mass_margin,
        h1_bound,
        hypotheses: Some(hypotheses(u0, mp)),
        gate_factor: GATE_FACTOR,
        ground_state_hash: hash,
    })
}

/// Trapping checks for labeled `E1` data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum TrapReport {
    APlus {
        h1_norm_sq: f64,
        h1_bound: f64,
        h1_constant: f64,
        /// `h1_norm_sq / (m_omega + m_omega / omega)`.
        h1_ratio: f64,
        h1_holds: bool,
        k: f64,
        /// `(d(p-1) - 4)/(d(p-1)) (||grad u||^2 + d/(d+2) ||u||_{2(d+2)/d}^{2(d+2)/d})`.
        k_kinetic_lower: f64,
        /// `m_omega - S_omega(u)`.
        action_gap: f64,
        /// Largest `delta` with `K >= delta (m_omega - S_omega)`.
        delta_max: f64,
    },
    AMinus {
        k: f64,
        action_gap: f64,
        /// `K < -(m_omega - S_omega)`.
        holds: bool,
    },
}

/// Kinetic branch of the `A_+` lower bound on `K`.
pub fn k_kinetic_lower<T: Real>(mp: &ModelParams<T>, i: &Integrals<T>) -> T {
    let d = lit::<T>(mp.d as f64);
    let s = d * (mp.p - T::one());
    (s - lit(4.0)) / s * (i.grad_sq + d / (d + lit(2.0)) * i.lmc)
}

/// H^1 and `K` trapping bounds for `A_plus` / `A_minus` data.
pub fn trap_bounds<T: Real>(
    u0: &ComplexField<T>,
    mp: &ModelParams<T>,
    gs: &GroundStateSolution<T>,
) -> Result<TrapReport> {
    let v = classify(u0, mp, gs)?;
    let i = integrals(u0, mp);
    let m_omega = to_f64(gs.m_omega);
    let k = to_f64(mp.k_from(&i));
    let action_gap = m_omega - to_f64(mp.action_from(&i));
    match v.set_label {
        Some(SetLabel::APlus) => {
            let h1 = to_f64(i.grad_sq + i.mass);
            let scale = m_omega + m_omega / to_f64(mp.omega);
            let c = h1_constant(mp);
            Ok(TrapReport::APlus {
                h1_norm_sq: h1,
                h1_bound: c * scale,
                h1_constant: c,
                h1_ratio: h1 / scale,
                h1_holds: h1 <= c * scale,
                k,
                k_kinetic_lower: to_f64(k_kinetic_lower(mp, &i)),
                action_gap,
                delta_max: k / action_gap,
            })
        }
        Some(SetLabel::AMinus) => Ok(TrapReport::AMinus {
            k,
            action_gap,
            holds: k < -action_gap,
        }),
        other => Err(Error::Unlabeled(format!(
            "trapping bounds need A_plus or A_minus data, got {}",
            other.map_or("no label", |l| l.as_str())
        ))),
    }
}

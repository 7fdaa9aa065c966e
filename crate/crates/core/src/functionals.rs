//! Conserved quantities and variational functionals.
//!
//! Both model equations are written as
//!
//! ```text
//! i u_t + Lap u = mu_mc |u|^{4/d} u + mu_p |u|^{p-1} u
//! ```
//!
//! with `(mu_mc, mu_p) = (+1, -1)` for [`Equation::E1`] (defocusing
//! mass-critical term, focusing supercritical term) and `(-1, +1)` for
//! [`Equation::E2`]. Every functional below is expressed through the four
//! integrals collected in [`Integrals`], so the grid and the radial
//! quadratures share one set of formulas.
//!
//! The scaling derivative `K` is the derivative of `S_omega` along the
//! mass-preserving scaling `lambda^{d/2} f(lambda x)` at `lambda = 1`, and
//! `H_omega = S_omega - K/2`. For `E1` these are the functionals of the
//! scattering/blow-up dichotomy; for `E2` they are reported but flagged
//! advisory.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::spectral::{ComplexField, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equation {
    /// Defocusing mass-critical plus focusing supercritical nonlinearity.
    E1,
    /// Focusing mass-critical plus defocusing supercritical nonlinearity.
    E2,
}

impl Equation {
    /// `(mu_mc, mu_p)` on the right-hand side of `i u_t + Lap u = N(u)`.
    pub fn couplings(self) -> (f64, f64) {
        match self {
            Equation::E1 => (1.0, -1.0),
            Equation::E2 => (-1.0, 1.0),
        }
    }
}

/// Dimension, supercritical exponent, frequency and equation selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams<T: Real> {
    pub d: usize,
    pub p: T,
    pub omega: T,
    pub equation: Equation,
    mu_mc: T,
    mu_p: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(d: usize, p: T, omega: T, equation: Equation) -> Result<Self> {
        if !(1..=4).contains(&d) {
            return Err(Error::InvalidModel(format!("dimension must be in 1..=4, got {d}")));
        }
        let dt = lit::<T>(d as f64);
        let lower = T::one() + lit::<T>(4.0) / dt;
        if !(p > lower) || !p.is_finite() {
            return Err(Error::InvalidModel(format!(
                "p = {p} must exceed 1 + 4/d = {lower}"
            )));
        }
        if d >= 3 {
            let upper = T::one() + lit::<T>(4.0) / (dt - lit(2.0));
            if !(p < upper) {
                return Err(Error::InvalidModel(format!(
                    "p = {p} must be below 1 + 4/(d-2) = {upper}"
                )));
            }
        }
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::InvalidModel(format!("omega must be positive, got {omega}")));
        }
        let (a, b) = equation.couplings();
        Ok(Self {
            d,
            p,
            omega,
            equation,
            mu_mc: lit(a),
            mu_p: lit(b),
        })
    }

    /// Focusing single-power model `i u_t + Lap u = -|u|^{p-1} u` for any
    /// `p > 1` below the energy-critical exponent. The mass-critical term is
    /// switched off, so `p` may sit at or below `1 + 4/d`.
    pub fn single_power(d: usize, p: T, omega: T) -> Result<Self> {
        if !(1..=4).contains(&d) {
            return Err(Error::InvalidModel(format!("dimension must be in 1..=4, got {d}")));
        }
        let dt = lit::<T>(d as f64);
        if !(p > T::one()) || !p.is_finite() || (d >= 3 && !(p < T::one() + lit::<T>(4.0) / (dt - lit(2.0)))) {
            return Err(Error::InvalidModel(format!("single-power exponent p = {p} out of range")));
        }
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::InvalidModel(format!("omega must be positive, got {omega}")));
        }
        Ok(Self {
            d,
            p,
            omega,
            equation: Equation::E1,
            mu_mc: T::zero(),
            mu_p: -T::one(),
        })
    }

    /// Overrides the nonlinear couplings. Intended for reduced or linear
    /// model runs in tests; a zero coupling removes that term everywhere.
    pub fn with_couplings(mut self, mu_mc: T, mu_p: T) -> Self {
        self.mu_mc = mu_mc;
        self.mu_p = mu_p;
        self
    }

    pub fn with_omega(mut self, omega: T) -> Self {
        self.omega = omega;
        self
    }

    pub fn couplings(&self) -> (T, T) {
        (self.mu_mc, self.mu_p)
    }

    pub fn has_standard_couplings(&self) -> bool {
        let (a, b) = self.equation.couplings();
        self.mu_mc == lit(a) && self.mu_p == lit(b)
    }

    fn dr(&self) -> T {
        lit(self.d as f64)
    }

    /// Critical Sobolev index `d/2 - 2/(p-1)`.
    pub fn s_p(&self) -> T {
        self.dr() * lit(0.5) - lit::<T>(2.0) / (self.p - T::one())
    }

    /// Exponent `2(d+2)/d` of the mass-critical potential term.
    pub fn mc_exponent(&self) -> T {
        lit::<T>(2.0) * (self.dr() + lit(2.0)) / self.dr()
    }

    /// Potential-energy power `4/d` of the mass-critical nonlinearity.
    pub fn mc_power(&self) -> T {
        lit::<T>(4.0) / self.dr()
    }

    /// `(d(p-1) - 4) / (4(p+1))`, the coefficient in `H_omega`.
    pub fn h_coefficient(&self) -> T {
        (self.dr() * (self.p - T::one()) - lit(4.0)) / (lit::<T>(4.0) * (self.p + T::one()))
    }

    pub fn energy_from(&self, i: &Integrals<T>) -> T {
        let d = self.dr();
        lit::<T>(0.5) * i.grad_sq
            + self.mu_mc * d / (lit::<T>(2.0) * (d + lit(2.0))) * i.lmc
            + self.mu_p / (self.p + T::one()) * i.lp1
    }

    pub fn action_from(&self, i: &Integrals<T>) -> T {
        self.energy_from(i) + lit::<T>(0.5) * self.omega * i.mass
    }

    pub fn k_from(&self, i: &Integrals<T>) -> T {
        let d = self.dr();
        i.grad_sq
            + self.mu_mc * d / (d + lit(2.0)) * i.lmc
            + self.mu_p * d * (self.p - T::one()) / (lit::<T>(2.0) * (self.p + T::one())) * i.lp1
    }

    pub fn h_from(&self, i: &Integrals<T>) -> T {
        lit::<T>(0.5) * self.omega * i.mass - self.mu_p * self.h_coefficient() * i.lp1
    }
}

/// The four integrals every functional is built from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Integrals<T> {
    /// `int |f|^2`
    pub mass: T,
    /// `int |grad f|^2`
    pub grad_sq: T,
    /// `int |f|^{p+1}`
    pub lp1: T,
    /// `int |f|^{2(d+2)/d}`
    pub lmc: T,
}

/// Every functional value of one field at one instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalSnapshot<T: Real> {
    pub t: T,
    pub mass: T,
    pub energy: T,
    pub momentum: Vec<T>,
    pub action: T,
    pub scaling_derivative: T,
    pub positive_part: T,
    pub grad_l2_sq: T,
    pub lp1: T,
    pub lmc: T,
    /// Set for `E2`, where `K` and `H` are outside the dichotomy's scope.
    pub advisory: bool,
}

impl<T: Real> FunctionalSnapshot<T> {
    pub const CSV_HEADER: &'static str =
        "t,mass,energy,momentum_x,momentum_y,action,K,H,grad_l2_sq,lp1,lmc";

    /// One CSV row; the second momentum component is blank in `d = 1`.
    pub fn csv_row(&self) -> String {
        let py = self
            .momentum
            .get(1)
            .map(|v| format!("{v:e}"))
            .unwrap_or_default();
        format!(
            "{:e},{:e},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.t,
            self.mass,
            self.energy,
            self.momentum[0],
            py,
            self.action,
            self.scaling_derivative,
            self.positive_part,
            self.grad_l2_sq,
            self.lp1,
            self.lmc
        )
    }

    pub fn integrals(&self) -> Integrals<T> {
        Integrals {
            mass: self.mass,
            grad_sq: self.grad_l2_sq,
            lp1: self.lp1,
            lmc: self.lmc,
        }
    }
}

/// Spectral quantities computed from one forward transform.
struct SpectralMoments<T> {
    grad_sq: T,
    momentum: [T; 2],
}

fn spectral_moments<T: Real>(f: &ComplexField<T>) -> SpectralMoments<T> {
    let g = f.grid();
    let spec = f.transform(Direction::Forward);
    let mut grad_sq = T::zero();
    let mut mom = [T::zero(); 2];
    for (i, z) in spec.values().iter().enumerate() {
        let e = z.norm_sqr();
        let k = g.wavevector(i);
        grad_sq = grad_sq + (k[0] * k[0] + k[1] * k[1]) * e;
        if !g.is_nyquist(i) {
            mom[0] = mom[0] + k[0] * e;
            mom[1] = mom[1] + k[1] * e;
        }
    }
    let w = g.cell_volume();
    SpectralMoments {
        grad_sq: grad_sq * w,
        momentum: [mom[0] * w, mom[1] * w],
    }
}

/// `int |grad f|^2`, evaluated spectrally. This is the single source of the
/// kinetic term throughout the crate.
pub fn grad_l2_sq<T: Real>(f: &ComplexField<T>) -> T {
    spectral_moments(f).grad_sq
}

pub fn mass<T: Real>(f: &ComplexField<T>) -> T {
    f.l2_norm_sq()
}

/// Gathers mass, kinetic and both potential integrals.
pub fn integrals<T: Real>(f: &ComplexField<T>, mp: &ModelParams<T>) -> Integrals<T> {
    let grad_sq = grad_l2_sq(f);
    potential_integrals(f, mp, grad_sq)
}

fn potential_integrals<T: Real>(f: &ComplexField<T>, mp: &ModelParams<T>, grad_sq: T) -> Integrals<T> {
    let half_p1 = (mp.p + T::one()) * lit(0.5);
    let half_mc = mp.mc_exponent() * lit(0.5);
    let mut m = T::zero();
    let mut lp1 = T::zero();
    let mut lmc = T::zero();
    for z in f.values() {
        let rho = z.norm_sqr();
        m = m + rho;
        lp1 = lp1 + crate::scalar::pow_real(rho, half_p1);
        lmc = lmc + crate::scalar::pow_real(rho, half_mc);
    }
    let w = f.grid().cell_volume();
    Integrals {
        mass: m * w,
        grad_sq,
        lp1: lp1 * w,
        lmc: lmc * w,
    }
}

/// Sign-aware energy of `mp.equation`.
pub fn energy<T: Real>(f: &ComplexField<T>, mp: &ModelParams<T>) -> T {
    mp.energy_from(&integrals(f, mp))
}

/// `Im int grad f conj(f)`, one component per axis.
pub fn momentum<T: Real>(f: &ComplexField<T>) -> Vec<T> {
    let m = spectral_moments(f).momentum;
    m[..f.grid().dim()].to_vec()
}

/// `(S_omega, K, H_omega)`.
pub fn action_k_h<T: Real>(f: &ComplexField<T>, mp: &ModelParams<T>) -> (T, T, T) {
    let i = integrals(f, mp);
    (mp.action_from(&i), mp.k_from(&i), mp.h_from(&i))
}

/// Full functional snapshot at time `t`.
pub fn snapshot<T: Real>(f: &ComplexField<T>, mp: &ModelParams<T>, t: T) -> FunctionalSnapshot<T> {
    let sm = spectral_moments(f);
    let i = potential_integrals(f, mp, sm.grad_sq);
    FunctionalSnapshot {
        t,
        mass: i.mass,
        energy: mp.energy_from(&i),
        momentum: sm.momentum[..f.grid().dim()].to_vec(),
        action: mp.action_from(&i),
        scaling_derivative: mp.k_from(&i),
        positive_part: mp.h_from(&i),
        grad_l2_sq: i.grad_sq,
        lp1: i.lp1,
        lmc: i.lmc,
        advisory: mp.equation == Equation::E2,
    }
}

/// Gagliardo-Nirenberg quotient
/// `||f||_{2(d+2)/d}^{2(d+2)/d} / (||f||_2^{4/d} ||grad f||_2^2)`.
pub fn gn_quotient<T: Real>(f: &ComplexField<T>) -> Result<T> {
    let d = lit::<T>(f.grid().dim() as f64);
    let m = mass(f);
    let g = grad_l2_sq(f);
    if !(m > T::zero()) || !(g > T::zero()) {
        return Err(Error::InvalidArgument(
            "Gagliardo-Nirenberg quotient needs a nonzero, nonconstant field".into(),
        ));
    }
    let q = lit::<T>(2.0) * (d + lit(2.0)) / d;
    Ok(f.lq_power(q) / (m.powf(lit::<T>(2.0) / d) * g))
}

/// Sharp constant `(d+2)/d * M(Q)^{-2/d}` given the mass-critical ground-state mass.
pub fn gn_sharp_constant<T: Real>(d: usize, q_mass: T) -> T {
    let d = lit::<T>(d as f64);
    (d + lit(2.0)) / d * q_mass.powf(-lit::<T>(2.0) / d)
}

/// Lower coercivity constant: when `K(f) >= 0`,
/// `E(f) >= c (||grad f||^2 + ||f||^{2(d+2)/d}_{2(d+2)/d})` with
/// `c = (d(p-1)-4)/(2d(p-1)) * min(1, d/(d+2))`.
pub fn coercivity_constant<T: Real>(mp: &ModelParams<T>) -> T {
    let d = lit::<T>(mp.d as f64);
    let base = (d * (mp.p - T::one()) - lit(4.0)) / (lit::<T>(2.0) * d * (mp.p - T::one()));
    base * T::one().min(d / (d + lit(2.0)))
}

/// Galilean boost `e^{i x . xi} f`.
pub fn boost<T: Real>(f: &ComplexField<T>, xi: [T; 2]) -> ComplexField<T> {
    f.map_with_position(|x, z| z * Complex::from_polar(T::one(), xi[0] * x[0] + xi[1] * x[1]))
}

//! Spectral renormalization (Petviashvili iteration) on a full periodic grid.
//!
//! Writing the stationary equation as `L Q = N(Q)` with `L = omega - Lap`,
//! the iteration is
//!
//! ```text
//! Q <- s^gamma L^{-1} N(Q),   s = <L Q, Q> / <N(Q), Q>,   gamma = q / (q - 1)
//! ```
//!
//! where `q` is the largest focusing exponent. The stabilizing factor `s`
//! tends to 1 at the fixed point.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::functionals::ModelParams;
use crate::scalar::{lit, pow_real, to_f64, Real};
use crate::spectral::{ComplexField, Direction};

#[derive(Debug, Clone, Copy)]
pub struct RenormOptions<T> {
    /// Stop once the relative sup-norm update falls below this.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for RenormOptions<T> {
    fn default() -> Self {
        Self {
            tol: lit(1e-12),
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenormOutcome<T: Real> {
    pub field: ComplexField<T>,
    pub iterations: usize,
    pub last_change: T,
    /// Final stabilizing factor `s`; equals 1 at an exact fixed point.
    pub stabilizer: T,
}

/// Runs the iteration for the stationary equation of `model`, starting from
/// a real, positive `guess`.
pub fn spectral_renormalization<T: Real>(
    model: &ModelParams<T>,
    guess: &ComplexField<T>,
    opts: &RenormOptions<T>,
) -> Result<RenormOutcome<T>> {
    let grid = guess.grid().clone();
    let (mu_mc, mu_p) = model.couplings();
    let e_mc = model.mc_power() + T::one();
    let e_p = model.p;
    let q_focus = match (mu_mc < T::zero(), mu_p < T::zero()) {
        (_, true) => e_p,
        (true, false) => e_mc,
        (false, false) => {
            return Err(Error::InvalidModel(
                "stationary problem has no focusing term".into(),
            ))
        }
    };
    let gamma = q_focus / (q_focus - T::one());
    let symbol: Vec<T> = (0..grid.len()).map(|i| model.omega + grid.k_squared(i)).collect();

    let nonlinear = |q: T| -> T {
        let a = q.abs();
        let mut s = T::zero();
        if mu_mc != T::zero() {
            s = s - mu_mc * pow_real(a, e_mc - T::one()) * q;
        }
        if mu_p != T::zero() {
            s = s - mu_p * pow_real(a, e_p - T::one()) * q;
        }
        s
    };

    let mut q: Vec<T> = guess.values().iter().map(|z| z.re).collect();
    let mut qh = vec![Complex::default(); grid.len()];
    let mut nh = vec![Complex::default(); grid.len()];
    let mut change = T::infinity();
    for it in 1..=opts.max_iter {
        for i in 0..q.len() {
            qh[i] = Complex::new(q[i], T::zero());
            nh[i] = Complex::new(nonlinear(q[i]), T::zero());
        }
        grid.transform_in_place(&mut qh, Direction::Forward);
        grid.transform_in_place(&mut nh, Direction::Forward);
        let mut lqq = T::zero();
        let mut nq = T::zero();
        for i in 0..q.len() {
            lqq = lqq + symbol[i] * qh[i].norm_sqr();
            nq = nq + (nh[i] * qh[i].conj()).re;
        }
        if !(nq > T::zero()) {
            return Err(Error::NoConvergence {
                method: "spectral renormalization (lost focusing)",
                iterations: it,
                last_change: to_f64(change),
            });
        }
        let stabilizer = lqq / nq;
        let factor = stabilizer.powf(gamma);
        for i in 0..q.len() {
            nh[i] = nh[i] * (factor / symbol[i]);
        }
        grid.transform_in_place(&mut nh, Direction::Inverse);
        let mut diff = T::zero();
        let mut top = T::zero();
        for i in 0..q.len() {
            let v = nh[i].re;
            diff = diff.max((v - q[i]).abs());
            top = top.max(v.abs());
            q[i] = v;
        }
        if !top.is_finite() || top == T::zero() {
            return Err(Error::NonFinite);
        }
        change = diff / top;
        if change < opts.tol {
            let values = q.iter().map(|&v| Complex::new(v, T::zero())).collect();
            return Ok(RenormOutcome {
                field: ComplexField::new(&grid, values)?,
                iterations: it,
                last_change: change,
                stabilizer,
            });
        }
    }
    Err(Error::NoConvergence {
        method: "spectral renormalization",
        iterations: opts.max_iter,
        last_change: to_f64(change),
    })
}

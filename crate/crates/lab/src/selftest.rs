//! Fast built-in checks of the numerical core.

use std::f64::consts::PI;

use num_complex::Complex;

use nls_core::functionals::{boost, integrals, mass, momentum, Equation, ModelParams};
use nls_core::groundstate::{solve_ground_state, GroundStateOptions, Guess, Which};
use nls_core::propagator::{drifts, evolve, Outcome, StepperConfig};
use nls_core::spectral::{make_grid, ComplexField, Direction};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn failed(name: &'static str, e: impl ToString) -> Check {
    check(name, false, e.to_string())
}

fn spectral() -> Check {
    let g = make_grid(2, 64, 8.0).unwrap();
    let f = ComplexField::from_fn(&g, |x: [f64; 2]| {
        Complex::new((x[0] * 1.3).sin() * (-x[1] * x[1] / 4.0).exp(), (x[0] * x[1] / 7.0).cos())
    });
    let back = f.transform(Direction::Forward).transform(Direction::Inverse);
    let err = (back.sub(&f).unwrap().l2_norm_sq() / f.l2_norm_sq()).sqrt();
    check("spectral round trip", err < 1e-12, format!("relative error {err:.1e}"))
}

fn soliton() -> Check {
    let name = "closed-form soliton";
    let mp = match ModelParams::single_power(1, 5.0f64, 1.0) {
        Ok(m) => m,
        Err(e) => return failed(name, e),
    };
    let opts = GroundStateOptions { cross_check: false, ..Default::default() };
    match solve_ground_state(&mp, Which::SinglePower, &Guess::default(), &opts) {
        Ok(gs) => {
            let err = (gs.mass - 3f64.sqrt() * PI / 2.0).abs();
            check(name, err < 1e-6, format!("mass error {err:.1e}"))
        }
        Err(e) => failed(name, e),
    }
}

fn ground_state() -> Check {
    let name = "double ground state";
    let mp = ModelParams::new(1, 7.0f64, 1.0, Equation::E1).unwrap();
    let opts = GroundStateOptions { cross_check: false, ..Default::default() };
    match solve_ground_state(&mp, Which::Double, &Guess::default(), &opts) {
        Ok(gs) => check(
            name,
            gs.residual < 1e-8 && gs.k_value.abs() < 1e-6 && gs.m_omega > 0.0,
            format!("residual {:.1e}, K {:.1e}, m_omega {:.6}", gs.residual, gs.k_value, gs.m_omega),
        ),
        Err(e) => failed(name, e),
    }
}

fn conservation() -> Check {
    let name = "conservation";
    let mp = ModelParams::new(1, 7.0f64, 1.0, Equation::E1).unwrap();
    let g = make_grid(1, 512, 40.0).unwrap();
    let u0 = boost(&ComplexField::from_real_fn(&g, |x: [f64; 2]| 0.5 * (-x[0] * x[0] / 4.0).exp()), [PI / 4.0, 0.0]);
    let cfg = StepperConfig { dt: 1e-3, t_final: 2.0, snapshot_every: 100, ..Default::default() };
    match evolve(&u0, &mp, &cfg) {
        Ok(log) => {
            let d = drifts(&log);
            check(
                name,
                log.outcome == Outcome::Completed && d.mass < 1e-10 && d.energy < 1e-7 && d.momentum < 1e-8,
                format!("mass {:.1e}, energy {:.1e}, momentum {:.1e}", d.mass, d.energy, d.momentum),
            )
        }
        Err(e) => failed(name, e),
    }
}

fn boost_shift() -> Check {
    let mp = ModelParams::new(1, 7.0f64, 1.0, Equation::E1).unwrap();
    let g = make_grid(1, 256, 16.0).unwrap();
    let f = ComplexField::from_fn(&g, |x: [f64; 2]| Complex::from_polar((-x[0] * x[0]).exp(), 0.3 * x[0]));
    let xi = PI * 5.0 / 16.0;
    let k = |u: &ComplexField<f64>| mp.k_from(&integrals(u, &mp));
    let err = (k(&boost(&f, [xi, 0.0])) - k(&f) - xi * xi * mass(&f) - 2.0 * xi * momentum(&f)[0]).abs();
    check("boost shift of K", err < 1e-8, format!("error {err:.1e}"))
}

pub fn run_selftest() -> Vec<Check> {
    vec![spectral(), soliton(), ground_state(), conservation(), boost_shift()]
}

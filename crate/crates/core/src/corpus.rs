//! Seeded corpus of smooth, localized test fields.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functionals::{integrals, ModelParams};
use crate::scalar::{lit, pow_real, Real};
use crate::spectral::{ComplexField, GridSpec};

#[derive(Debug, Clone)]
pub struct CorpusMember<T: Real> {
    pub name: String,
    pub field: ComplexField<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Gaussian,
    Sech,
    SechSquared,
    SuperGaussian,
    TwoBump,
    Rippled,
}

const SHAPES: [Shape; 6] = [
    Shape::Gaussian,
    Shape::Sech,
    Shape::SechSquared,
    Shape::SuperGaussian,
    Shape::TwoBump,
    Shape::Rippled,
];

fn sech<T: Real>(x: T) -> T {
    T::one() / x.cosh()
}

/// `count` fields cycling through six shape families with random amplitude,
/// width, center, boost and phase. Widths scale with the box so every member
/// is well inside it and resolved.
pub fn shape_corpus<T: Real>(grid: &GridSpec<T>, count: usize, seed: u64) -> Vec<CorpusMember<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = crate::scalar::to_f64(grid.half_width());
    let d = grid.dim();
    let kmax = crate::scalar::to_f64(grid.k_max());
    (0..count)
        .map(|i| {
            let shape = SHAPES[i % SHAPES.len()];
            let amp: f64 = rng.gen_range(0.3..2.0);
            let w: f64 = rng.gen_range(0.04..0.12) * l;
            let mut c = [0.0f64; 2];
            let mut xi = [0.0f64; 2];
            for a in 0..d {
                c[a] = rng.gen_range(-0.1..0.1) * l;
                xi[a] = rng.gen_range(-0.05..0.05) * kmax;
            }
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let sep: f64 = rng.gen_range(1.5..3.0) * w;
            let rel: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let ripple_k: f64 = rng.gen_range(0.5..2.0) / w;
            let ripple: f64 = rng.gen_range(0.1..0.4);
            let name = format!("{shape:?}#{i}").to_lowercase();
            let field = ComplexField::from_fn(grid, |x: [T; 2]| {
                let y = [crate::scalar::to_f64(x[0]) - c[0], crate::scalar::to_f64(x[1]) - c[1]];
                let r2 = y[0] * y[0] + y[1] * y[1];
                let r = r2.sqrt();
                let base = match shape {
                    Shape::Gaussian => Complex::new((-r2 / (2.0 * w * w)).exp(), 0.0),
                    Shape::Sech => Complex::new(sech(r / (0.5 * w)), 0.0),
                    Shape::SechSquared => Complex::new(sech(r / (0.7 * w)).powi(2), 0.0),
                    Shape::SuperGaussian => Complex::new((-(r2 / (w * w)).powi(2)).exp(), 0.0),
                    Shape::TwoBump => {
                        let a = (-((y[0] - sep).powi(2) + y[1] * y[1]) / (2.0 * w * w)).exp();
                        let b = (-((y[0] + sep).powi(2) + y[1] * y[1]) / (2.0 * w * w)).exp();
                        Complex::new(a, 0.0) + Complex::from_polar(0.7 * b, rel)
                    }
                    Shape::Rippled => {
                        Complex::new((-r2 / (2.0 * w * w)).exp() * (1.0 + ripple * (ripple_k * y[0]).cos()), 0.0)
                    }
                };
                let z = base * Complex::from_polar(amp, phase + xi[0] * y[0] + xi[1] * y[1]);
                Complex::new(lit(z.re), lit(z.im))
            });
            CorpusMember { name, field }
        })
        .collect()
}

/// `lambda > 0` with `K(lambda f) = 0` under `mp`, for a model whose
/// supercritical term is focusing.
pub fn nehari_amplitude<T: Real>(f: &ComplexField<T>, mp: &ModelParams<T>) -> Result<T> {
    let i = integrals(f, mp);
    let d = lit::<T>(mp.d as f64);
    let two = lit::<T>(2.0);
    let (mu_mc, mu_p) = mp.couplings();
    if !(mu_p < T::zero()) || !(i.grad_sq > T::zero()) {
        return Err(Error::InvalidArgument(
            "Nehari scaling needs a focusing supercritical term and a nonconstant field".into(),
        ));
    }
    let a = mu_mc * d / (d + two) * i.lmc;
    let b = -mu_p * d * (mp.p - T::one()) / (two * (mp.p + T::one())) * i.lp1;
    // K(lambda f) / lambda^2 = g + a lambda^{4/d} - b lambda^{p-1}, one positive root.
    let k = |lam: T| i.grad_sq + a * pow_real(lam, mp.mc_power()) - b * pow_real(lam, mp.p - T::one());
    let (mut lo, mut hi) = (T::one(), T::one());
    while k(lo) <= T::zero() {
        lo = lo * lit(0.5);
    }
    while k(hi) > T::zero() {
        hi = hi * two;
        if hi > lit(1e12) {
            return Err(Error::NoSignChange { lo: crate::scalar::to_f64(lo), hi: crate::scalar::to_f64(hi) });
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if k(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Shape corpus projected into `{K <= 0}`: each member is rescaled to
/// `(1 + s) lambda f` with `K(lambda f) = 0` and `s` drawn from `[0, overshoot]`.
pub fn k_nonpositive_corpus<T: Real>(
    grid: &GridSpec<T>,
    mp: &ModelParams<T>,
    count: usize,
    overshoot: f64,
    seed: u64,
) -> Result<Vec<CorpusMember<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    shape_corpus(grid, count, seed)
        .into_iter()
        .map(|m| {
            let lam = nehari_amplitude(&m.field, mp)?;
            let s: f64 = if overshoot > 0.0 { rng.gen_range(0.0..overshoot) } else { 0.0 };
            Ok(CorpusMember {
                name: format!("{}@K<=0", m.name),
                field: m.field.scale(lam * lit(1.0 + s)),
            })
        })
        .collect()
}

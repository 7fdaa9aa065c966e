//! Localized virial quantities.
//!
//! The weight is `phi_R(x) = psi(|x|)` with
//!
//! ```text
//! psi(r) = r^2 chi(r / R),   chi(rho) = S(2 - rho),
//! S(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})   for 0 < s < 1,
//! ```
//!
//! `S = 0` for `s <= 0` and `S = 1` for `s >= 1`. `S` is `C^inf`, so
//! `phi_R = |x|^2` on `|x| <= R` and `phi_R = 0` on `|x| >= 2R`. Radial
//! derivatives of `psi` up to fourth order come from truncated Taylor
//! arithmetic; on `|x| <= R` the tables hold the exact values `Hess = 2 I`,
//! `Lap = 2d`, `Lap^2 = 0`.
//!
//! For `i u_t + Lap u = sum mu |u|^{a} u` the second derivative is
//!
//! ```text
//! V'' = 4 Re int phi_jk conj(u_j) u_k - int Lap^2 phi |u|^2
//!       + sum mu 2a/(a+2) int Lap phi |u|^{a+2}
//! ```
//!
//! which reduces to `8 K(u)` when `phi = |x|^2` on the support of `u`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{integrals, Equation, ModelParams};
use crate::scalar::{lit, pow_real, to_f64, Real};
use crate::spectral::{ComplexField, FourierMultiplier, GridSpec};

const ORDER: usize = 5;

/// Truncated Taylor series `sum c_k h^k`, `k < 5`.
#[derive(Debug, Clone, Copy)]
struct Jet<T>([T; ORDER]);

impl<T: Real> Jet<T> {
    fn constant(c: T) -> Self {
        let mut a = [T::zero(); ORDER];
        a[0] = c;
        Jet(a)
    }

    fn variable(x: T) -> Self {
        let mut a = [T::zero(); ORDER];
        a[0] = x;
        a[1] = T::one();
        Jet(a)
    }

    fn add(self, o: Self) -> Self {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x = *x + y;
        }
        Jet(a)
    }

    fn scale(self, c: T) -> Self {
        Jet(self.0.map(|x| x * c))
    }

    fn mul(self, o: Self) -> Self {
        let mut a = [T::zero(); ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                a[i + j] = a[i + j] + self.0[i] * o.0[j];
            }
        }
        Jet(a)
    }

    fn recip(self) -> Self {
        let mut r = [T::zero(); ORDER];
        r[0] = T::one() / self.0[0];
        for k in 1..ORDER {
            let mut s = T::zero();
            for j in 1..=k {
                s = s + self.0[j] * r[k - j];
            }
            r[k] = -s * r[0];
        }
        Jet(r)
    }

    fn exp(self) -> Self {
        let mut e = [T::zero(); ORDER];
        e[0] = self.0[0].exp();
        for k in 1..ORDER {
            let mut s = T::zero();
            for j in 1..=k {
                s = s + T::from_usize(j).unwrap() * self.0[j] * e[k - j];
            }
            e[k] = s / T::from_usize(k).unwrap();
        }
        Jet(e)
    }

    /// `f^{(k)}` for `k = 0..5`.
    fn derivatives(self) -> [T; ORDER] {
        let mut f = T::one();
        let mut out = self.0;
        for (k, v) in out.iter_mut().enumerate().skip(1) {
            f = f * T::from_usize(k).unwrap();
            *v = *v * f;
        }
        out
    }
}

/// `S(s)` as a jet.
fn smooth_step<T: Real>(s: Jet<T>) -> Jet<T> {
    let s0 = s.0[0];
    if s0 <= T::zero() {
        return Jet::constant(T::zero());
    }
    if s0 >= T::one() {
        return Jet::constant(T::one());
    }
    let a = s.recip().scale(-T::one()).exp();
    let one_minus = Jet::constant(T::one()).add(s.scale(-T::one()));
    let b = one_minus.recip().scale(-T::one()).exp();
    a.mul(a.add(b).recip())
}

/// `psi^{(k)}(r)`, `k = 0..4`, for the weight with radius `R`.
pub fn radial_profile<T: Real>(r: T, big_r: T) -> [T; ORDER] {
    let x = Jet::variable(r);
    let s = Jet::constant(lit(2.0)).add(x.scale(-T::one() / big_r));
    x.mul(x).mul(smooth_step(s)).derivatives()
}

/// Values of the radial weight and its derivative tables at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWeight<T> {
    pub psi: T,
    pub dpsi: T,
    pub d2psi: T,
    /// `psi'/r`.
    pub dpsi_over_r: T,
    pub lap: T,
    pub bilap: T,
}

/// Radial weight data at `r` in dimension `d`.
pub fn radial_weight<T: Real>(r: T, big_r: T, d: usize) -> RadialWeight<T> {
    let dm1 = lit::<T>((d - 1) as f64);
    let two = lit::<T>(2.0);
    if r <= big_r {
        return RadialWeight {
            psi: r * r,
            dpsi: two * r,
            d2psi: two,
            dpsi_over_r: two,
            lap: two * lit(d as f64),
            bilap: T::zero(),
        };
    }
    if r >= two * big_r {
        return RadialWeight {
            psi: T::zero(),
            dpsi: T::zero(),
            d2psi: T::zero(),
            dpsi_over_r: T::zero(),
            lap: T::zero(),
            bilap: T::zero(),
        };
    }
    let [p0, p1, p2, p3, p4] = radial_profile(r, big_r);
    let lap = p2 + dm1 * p1 / r;
    let g1 = p3 + dm1 * (p2 / r - p1 / (r * r));
    let g2 = p4 + dm1 * (p3 / r - two * p2 / (r * r) + two * p1 / (r * r * r));
    RadialWeight {
        psi: p0,
        dpsi: p1,
        d2psi: p2,
        dpsi_over_r: p1 / r,
        lap,
        bilap: g2 + dm1 * g1 / r,
    }
}

/// Tabulated weight `phi_R` on a grid.
#[derive(Debug, Clone)]
pub struct VirialWeight<T: Real> {
    grid: GridSpec<T>,
    radius: T,
    phi: Vec<T>,
    grad: [Vec<T>; 2],
    hess: [[Vec<T>; 2]; 2],
    lap: Vec<T>,
    bilap: Vec<T>,
    exterior: Vec<bool>,
}

impl<T: Real> VirialWeight<T> {
    pub fn new(grid: &GridSpec<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("virial radius must be positive, got {radius}")));
        }
        let d = grid.dim();
        let n = grid.len();
        let mut w = Self {
            grid: grid.clone(),
            radius,
            phi: vec![T::zero(); n],
            grad: [vec![T::zero(); n], vec![T::zero(); n]],
            hess: [
                [vec![T::zero(); n], vec![T::zero(); n]],
                [vec![T::zero(); n], vec![T::zero(); n]],
            ],
            lap: vec![T::zero(); n],
            bilap: vec![T::zero(); n],
            exterior: vec![false; n],
        };
        for i in 0..n {
            let x = grid.position(i);
            let r = grid.radius(i);
            let rw = radial_weight(r, radius, d);
            w.phi[i] = rw.psi;
            w.lap[i] = rw.lap;
            w.bilap[i] = rw.bilap;
            w.exterior[i] = r >= radius;
            for a in 0..d {
                w.grad[a][i] = rw.dpsi_over_r * x[a];
                for b in 0..d {
                    let delta = if a == b { T::one() } else { T::zero() };
                    w.hess[a][b][i] = if r == T::zero() {
                        rw.d2psi * delta
                    } else {
                        let xx = x[a] * x[b] / (r * r);
                        rw.d2psi * xx + rw.dpsi_over_r * (delta - xx)
                    };
                }
            }
        }
        Ok(w)
    }

    /// Weight with `R` large enough that `phi_R = |x|^2` on the whole box.
    pub fn whole_support(grid: &GridSpec<T>) -> Result<Self> {
        let r = grid.half_width() * lit::<T>(grid.dim() as f64).sqrt() * lit(1.01);
        Self::new(grid, r)
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn laplacian(&self) -> &[T] {
        &self.lap
    }

    pub fn bilaplacian(&self) -> &[T] {
        &self.bilap
    }

    /// Constant `C` with `|A_R| <= C * exterior integrand`, from the tables:
    /// the max of `4 sup ||Hess - 2I||`, `sup R^2 |Lap^2 phi_R|`, and the
    /// potential-term coefficients times `sup |Lap phi_R - 2d|`.
    pub fn bound_constant(&self, mp: &ModelParams<T>) -> T {
        let d = self.grid.dim();
        let two = lit::<T>(2.0);
        let two_d = two * lit(d as f64);
        let mut hess = T::zero();
        let mut bil = T::zero();
        let mut lapdev = T::zero();
        let (mu_mc, mu_p) = mp.couplings();
        let n_samples = 4096;
        for j in 0..=n_samples {
            let r = self.radius * (T::one() + T::from_usize(j).unwrap() / T::from_usize(n_samples).unwrap());
            let rw = radial_weight(r, self.radius, d);
            hess = hess.max((rw.d2psi - two).abs()).max((rw.dpsi_over_r - two).abs());
            bil = bil.max(self.radius * self.radius * rw.bilap.abs());
            lapdev = lapdev.max((rw.lap - two_d).abs());
        }
        let p = mp.p;
        let c_mc = mu_mc.abs() * lit::<T>(4.0) / (lit::<T>(d as f64) + two) * lapdev;
        let c_p = mu_p.abs() * two * (p - T::one()) / (p + T::one()) * lapdev;
        (lit::<T>(4.0) * hess).max(bil).max(c_mc).max(c_p)
    }
}

fn check_grid<T: Real>(u: &ComplexField<T>, w: &VirialWeight<T>) -> Result<()> {
    if u.grid() != w.grid() {
        return Err(Error::GridMismatch("field and virial weight grids differ".into()));
    }
    Ok(())
}

/// `V_R = int phi_R |u|^2`.
pub fn virial_value<T: Real>(u: &ComplexField<T>, w: &VirialWeight<T>) -> Result<T> {
    check_grid(u, w)?;
    let s: T = u.values().iter().zip(&w.phi).map(|(z, &p)| p * z.norm_sqr()).sum();
    Ok(s * u.grid().cell_volume())
}

fn gradient<T: Real>(u: &ComplexField<T>) -> Vec<ComplexField<T>> {
    (0..u.grid().dim())
        .map(|a| {
            FourierMultiplier::derivative(u.grid(), a)
                .apply(u)
                .expect("multiplier built on the field's grid")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirialDerivatives {
    pub v_r: f64,
    pub v1: f64,
    pub v2: f64,
    /// `V'' - 8 K(u)`.
    pub a_r: f64,
    pub k: f64,
    /// `int_{|x| >= R} |grad u|^2 + R^{-2} |u|^2 + |u|^{2(d+2)/d} + |u|^{p+1}`.
    pub exterior: f64,
}

/// `V_R`, `V_R'`, `V_R''` and the remainder `A_R = V_R'' - 8K`.
pub fn virial_derivatives<T: Real>(
    u: &ComplexField<T>,
    mp: &ModelParams<T>,
    w: &VirialWeight<T>,
) -> Result<VirialDerivatives> {
    check_grid(u, w)?;
    let d = u.grid().dim();
    let grads = gradient(u);
    let dv = u.grid().cell_volume();
    let (mu_mc, mu_p) = mp.couplings();
    let a_mc = mp.mc_power();
    let a_p = mp.p - T::one();
    let two = lit::<T>(2.0);
    let c_mc = mu_mc * two * a_mc / (a_mc + two);
    let c_p = mu_p * two * a_p / (a_p + two);
    let half_mc = mp.mc_exponent() * lit(0.5);
    let half_p1 = (mp.p + T::one()) * lit(0.5);
    let r2 = T::one() / (w.radius * w.radius);

    let mut v = T::zero();
    let mut v1 = T::zero();
    let mut kin = T::zero();
    let mut bil = T::zero();
    let mut pot = T::zero();
    let mut ext = T::zero();
    for i in 0..u.grid().len() {
        let z = u.values()[i];
        let rho = z.norm_sqr();
        v = v + w.phi[i] * rho;
        let mut gsq = T::zero();
        for a in 0..d {
            let ga = grads[a].values()[i];
            gsq = gsq + ga.norm_sqr();
            v1 = v1 + w.grad[a][i] * (ga * z.conj()).im;
            for (b, gb) in grads.iter().enumerate().take(d) {
                kin = kin + w.hess[a][b][i] * (ga.conj() * gb.values()[i]).re;
            }
        }
        bil = bil + w.bilap[i] * rho;
        let lmc = pow_real(rho, half_mc);
        let lp1 = pow_real(rho, half_p1);
        pot = pot + w.lap[i] * (c_mc * lmc + c_p * lp1);
        if w.exterior[i] {
            ext = ext + gsq + r2 * rho + lmc + lp1;
        }
    }
    let v2 = (lit::<T>(4.0) * kin - bil + pot) * dv;
    let k = mp.k_from(&integrals(u, mp));
    Ok(VirialDerivatives {
        v_r: to_f64(v * dv),
        v1: to_f64(two * v1 * dv),
        v2: to_f64(v2),
        a_r: to_f64(v2 - lit::<T>(8.0) * k),
        k: to_f64(k),
        exterior: to_f64(ext * dv),
    })
}

/// Whole-space `V''` for `E2`:
/// `8 (||grad u||^2 + d(p-1)/(2(p+1)) ||u||_{p+1}^{p+1} - d/(d+2) ||u||_{2(d+2)/d}^{2(d+2)/d})`.
pub fn whole_space_virial_e2<T: Real>(u: &ComplexField<T>, mp: &ModelParams<T>) -> Result<T> {
    if mp.equation != Equation::E2 {
        return Err(Error::InvalidModel("whole-space E2 virial needs an E2 model".into()));
    }
    let i = integrals(u, mp);
    let d = lit::<T>(mp.d as f64);
    let two = lit::<T>(2.0);
    Ok(lit::<T>(8.0)
        * (i.grad_sq + d * (mp.p - T::one()) / (two * (mp.p + T::one())) * i.lp1 - d / (d + two) * i.lmc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::boost;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn jet_matches_closed_form_derivatives() {
        // exp(1/x) at x = 0.7 against hand derivatives.
        let x = 0.7f64;
        let j = Jet::variable(x).recip().exp().derivatives();
        let e = (1.0 / x).exp();
        assert!((j[0] - e).abs() < 1e-13);
        assert!((j[1] + e / (x * x)).abs() < 1e-12);
        assert!((j[2] - e * (2.0 * x + 1.0) / x.powi(4)).abs() < 1e-11);
    }

    #[test]
    fn radial_derivatives_match_finite_differences() {
        let (r, big) = (1.37f64, 1.0f64);
        let h = 1e-4;
        let f = |r: f64| radial_profile(r, big);
        let d = f(r);
        for k in 0..4 {
            let fd = (f(r + h)[k] - f(r - h)[k]) / (2.0 * h);
            assert!((fd - d[k + 1]).abs() < 1e-5 * (1.0 + d[k + 1].abs()), "order {k}: {fd} vs {}", d[k + 1]);
        }
    }

    #[test]
    fn weight_pieces() {
        for d in [1usize, 2] {
            let w = radial_weight(0.5f64, 1.0, d);
            assert_eq!((w.psi, w.lap, w.bilap), (0.25, 2.0 * d as f64, 0.0));
            let w = radial_weight(2.5f64, 1.0, d);
            assert_eq!((w.psi, w.dpsi, w.lap, w.bilap), (0.0, 0.0, 0.0, 0.0));
            // Continuity at the junctions.
            let a = radial_weight(1.0f64 + 1e-9, 1.0, d);
            assert!((a.psi - 1.0).abs() < 1e-8 && (a.lap - 2.0 * d as f64).abs() < 1e-6);
            let b = radial_weight(2.0f64 - 1e-9, 1.0, d);
            assert!(b.psi.abs() < 1e-8 && b.bilap.abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_second_moment() {
        let g = make_grid(1, 256, 8.0).unwrap();
        let u = ComplexField::from_real_fn(&g, |x: [f64; 2]| (-x[0] * x[0]).exp());
        let w = VirialWeight::new(&g, 10.0).unwrap();
        let v = virial_value(&u, &w).unwrap();
        assert!((v - 0.25 * (PI / 2.0).sqrt()).abs() < 1e-8);
        let w2 = VirialWeight::new(&g, 20.0).unwrap();
        assert!(((virial_value(&u, &w2).unwrap() - v) / v).abs() < 1e-10);
        assert_eq!(virial_value(&ComplexField::zeros(&g), &w).unwrap(), 0.0);
    }

    #[test]
    fn interior_support_gives_eight_k() {
        let g = make_grid(2, 64, 10.0).unwrap();
        let mp = ModelParams::new(2, 4.0, 1.0, Equation::E1).unwrap();
        let u = boost(
            &ComplexField::from_real_fn(&g, |x: [f64; 2]| {
                0.8 * (-((x[0] - 1.5) * (x[0] - 1.5) + x[1] * x[1])).exp()
            }),
            [PI * 2.0 / 10.0, 0.0],
        );
        let w = VirialWeight::new(&g, 12.0).unwrap();
        let vd = virial_derivatives(&u, &mp, &w).unwrap();
        assert!(vd.a_r.abs() < 1e-10, "{vd:?}");
        assert!(vd.v1.abs() > 1e-3);
    }

    #[test]
    fn real_field_has_zero_first_derivative() {
        let g = make_grid(1, 256, 10.0).unwrap();
        let mp = ModelParams::new(1, 7.0, 1.0, Equation::E1).unwrap();
        let u = ComplexField::from_real_fn(&g, |x: [f64; 2]| (-x[0] * x[0]).exp() * (1.0 + 0.3 * x[0]));
        let vd = virial_derivatives(&u, &mp, &VirialWeight::new(&g, 2.0).unwrap()).unwrap();
        assert!(vd.v1.abs() < 1e-12);
    }

    #[test]
    fn remainder_within_analytic_bound() {
        let g = make_grid(1, 512, 16.0).unwrap();
        let mp = ModelParams::new(1, 7.0, 1.0, Equation::E1).unwrap();
        let u = boost(
            &ComplexField::from_real_fn(&g, |x: [f64; 2]| 1.1 * (-(x[0] * x[0]) / 4.0).exp()),
            [PI * 4.0 / 16.0, 0.0],
        );
        for r in [1.0, 2.0, 3.0] {
            let w = VirialWeight::new(&g, r).unwrap();
            let vd = virial_derivatives(&u, &mp, &w).unwrap();
            let c = w.bound_constant(&mp);
            assert!(vd.a_r.abs() <= c * vd.exterior, "R={r}: {vd:?} C={c}");
        }
    }

    #[test]
    fn e2_whole_space() {
        let g = make_grid(1, 256, 10.0).unwrap();
        let mp = ModelParams::new(1, 7.0, 1.0, Equation::E2).unwrap();
        assert_eq!(whole_space_virial_e2(&ComplexField::zeros(&g), &mp).unwrap(), 0.0);
        let u = ComplexField::from_real_fn(&g, |x: [f64; 2]| (-x[0] * x[0]).exp());
        let v = whole_space_virial_e2(&u, &mp).unwrap();
        let w = VirialWeight::whole_support(&g).unwrap();
        let vd = virial_derivatives(&u, &mp, &w).unwrap();
        assert!((vd.v2 - v).abs() < 1e-10 * v.abs());
        assert!(whole_space_virial_e2(&u, &ModelParams::new(1, 7.0, 1.0, Equation::E1).unwrap()).is_err());
    }
}

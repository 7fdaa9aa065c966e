//! Symmetry operators of the linear profile decomposition,
//!
//! ```text
//! T f(x) = e^{i theta} e^{i x.xi} e^{-i t0 Lap} ( h^{-d/2} f((. - x0) / h) )
//! ```
//!
//! applied in that order from the inside out. `x0` and `xi` are snapped to
//! the position and frequency lattices so translation and modulation are
//! exact; scaling uses the band-limited interpolant of `f` (zero outside the
//! box) and reports an error estimate.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::galilean_transform;
use crate::scalar::{lit, to_f64, Real};
use crate::spectral::{ComplexField, FourierMultiplier, GridSpec};

/// Default exponent in the projector `P_{<= h^theta}`.
pub const DEFAULT_PROJECTOR_EXPONENT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryElement<T> {
    pub theta: T,
    pub h: T,
    pub t0: T,
    pub x0: [T; 2],
    pub xi: [T; 2],
}

impl<T: Real> Default for SymmetryElement<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> SymmetryElement<T> {
    pub fn identity() -> Self {
        Self {
            theta: T::zero(),
            h: T::one(),
            t0: T::zero(),
            x0: [T::zero(); 2],
            xi: [T::zero(); 2],
        }
    }

    pub fn phase(theta: T) -> Self {
        Self { theta, ..Self::identity() }
    }

    pub fn boost(xi: [T; 2]) -> Self {
        Self { xi, ..Self::identity() }
    }

    pub fn translation(x0: [T; 2]) -> Self {
        Self { x0, ..Self::identity() }
    }

    pub fn scaling(h: T) -> Self {
        Self { h, ..Self::identity() }
    }

    pub fn free_flow(t0: T) -> Self {
        Self { t0, ..Self::identity() }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.theta, self.h, self.t0, self.x0[0], self.x0[1], self.xi[0], self.xi[1]]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("symmetry parameters must be finite".into()));
        }
        if !(self.h > T::zero()) {
            return Err(Error::InvalidArgument(format!("scale h must be positive, got {}", self.h)));
        }
        Ok(())
    }

    /// Copy with `x0`, `xi` moved to the nearest lattice values and `theta`
    /// reduced to `[0, 2 pi)`.
    pub fn snapped(&self, grid: &GridSpec<T>) -> Self {
        let mut s = *self;
        let tau = lit::<T>(2.0) * T::PI();
        s.theta = self.theta - tau * (self.theta / tau).floor();
        for a in 0..2 {
            if a < grid.dim() {
                s.x0[a] = grid.snap_shift(self.x0[a]).1;
                s.xi[a] = grid.snap_wavenumber(self.xi[a]).1;
            } else {
                s.x0[a] = T::zero();
                s.xi[a] = T::zero();
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryOptions<T> {
    /// Largest admissible mass fraction near the edge after scaling.
    pub edge_mass_max: T,
    pub edge_cells: usize,
}

impl<T: Real> Default for SymmetryOptions<T> {
    fn default() -> Self {
        Self {
            edge_mass_max: lit(1e-10),
            edge_cells: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// Element actually applied, after snapping.
    pub applied: SymmetryElement<f64>,
    /// `sqrt` of the spectral tail fractions before and after scaling;
    /// zero when `h = 1`.
    pub interpolation_error: f64,
    pub edge_mass_fraction: f64,
}

/// Band-limited interpolation matrix from lattice samples to points `y`
/// (row-major `y.len() x n`); rows for `|y| >= L` are zero.
fn interpolation_matrix<T: Real>(grid: &GridSpec<T>, y: &[T]) -> Vec<T> {
    let n = grid.n_per_axis();
    let nf = T::from_usize(n).unwrap();
    let half = lit::<T>(0.5);
    let l = grid.half_width();
    let mut m = vec![T::zero(); y.len() * n];
    for (j, &yj) in y.iter().enumerate() {
        if yj < -l || yj >= l {
            continue;
        }
        for k in 0..n {
            let th = T::PI() * (yj - grid.coordinate(k)) / l;
            let s = (half * th).sin();
            let dirichlet = if th.abs() < lit(1e-14) {
                nf
            } else {
                ((nf - T::one()) * half * th).sin() / s + (nf * half * th).cos()
            };
            m[j * n + k] = dirichlet / nf;
        }
    }
    m
}

/// `h^{-d/2} f(x / h)` on the same lattice.
fn rescale<T: Real>(f: &ComplexField<T>, h: T) -> ComplexField<T> {
    let grid = f.grid();
    let n = grid.n_per_axis();
    let d = grid.dim();
    let y: Vec<T> = (0..n).map(|j| grid.coordinate(j) / h).collect();
    let m = interpolation_matrix(grid, &y);
    let norm = h.powf(-lit::<T>(d as f64) * lit(0.5));
    let src = f.values();
    let mut out = vec![Complex::<T>::default(); src.len()];
    if d == 1 {
        for j in 0..n {
            let row = &m[j * n..(j + 1) * n];
            out[j] = row.iter().zip(src).fold(Complex::default(), |acc, (&w, &z)| acc + z * w);
        }
    } else {
        let mut tmp = vec![Complex::<T>::default(); src.len()];
        // Axis 0 (rows), then axis 1 (columns).
        for j in 0..n {
            let row = &m[j * n..(j + 1) * n];
            for b in 0..n {
                let mut acc = Complex::default();
                for (a, &w) in row.iter().enumerate() {
                    acc = acc + src[a * n + b] * w;
                }
                tmp[j * n + b] = acc;
            }
        }
        for a in 0..n {
            for j in 0..n {
                let row = &m[j * n..(j + 1) * n];
                let mut acc = Complex::default();
                for (b, &w) in row.iter().enumerate() {
                    acc = acc + tmp[a * n + b] * w;
                }
                out[a * n + j] = acc;
            }
        }
    }
    for z in out.iter_mut() {
        *z = *z * norm;
    }
    ComplexField::new(grid, out).expect("same grid")
}

/// Applies `g` to `f`; see the module docs for the order of factors.
pub fn apply_symmetry<T: Real>(f: &ComplexField<T>, g: &SymmetryElement<T>) -> Result<ComplexField<T>> {
    apply_symmetry_with(f, g, &SymmetryOptions::default()).map(|(u, _)| u)
}

pub fn apply_symmetry_with<T: Real>(
    f: &ComplexField<T>,
    g: &SymmetryElement<T>,
    opts: &SymmetryOptions<T>,
) -> Result<(ComplexField<T>, SymmetryReport)> {
    g.validate()?;
    let grid = f.grid();
    let s = g.snapped(grid);

    let mut interpolation_error = 0.0;
    let mut u = if s.h == T::one() {
        f.clone()
    } else {
        let scaled = rescale(f, s.h);
        interpolation_error = to_f64(f.spectral_tail_fraction()).sqrt()
            + to_f64(scaled.spectral_tail_fraction()).sqrt();
        scaled
    };
    let shift = [grid.snap_shift(s.x0[0]).0, grid.snap_shift(s.x0[1]).0];
    if shift != [0, 0] {
        u = u.roll(shift);
    }
    let edge = u.edge_mass_fraction(opts.edge_cells);
    if s.h != T::one() && edge > opts.edge_mass_max {
        return Err(Error::BoxOverflow(to_f64(edge)));
    }
    if s.t0 != T::zero() {
        FourierMultiplier::free_flow(grid, -s.t0).apply_in_place(&mut u)?;
    }
    let theta = s.theta;
    let xi = s.xi;
    if xi != [T::zero(); 2] || theta != T::zero() {
        u = u.map_with_position(|x, z| z * Complex::from_polar(T::one(), theta + xi[0] * x[0] + xi[1] * x[1]));
    }
    let report = SymmetryReport {
        applied: SymmetryElement {
            theta: to_f64(s.theta),
            h: to_f64(s.h),
            t0: to_f64(s.t0),
            x0: s.x0.map(to_f64),
            xi: s.xi.map(to_f64),
        },
        interpolation_error,
        edge_mass_fraction: to_f64(edge),
    };
    Ok((u, report))
}

/// `P_{<= r}`: sharp Fourier cutoff at radius `r`.
pub fn frequency_projector<T: Real>(f: &ComplexField<T>, radius: T) -> ComplexField<T> {
    FourierMultiplier::low_pass(f.grid(), radius)
        .apply(f)
        .expect("multiplier built on the field's grid")
}

/// Large-scale profile datum
/// `e^{i theta} e^{i x.xi} e^{-i t0 Lap} h^{-d/2} (P_{<= h^exponent} phi)((. - x0)/h)`.
pub fn large_scale_profile<T: Real>(
    phi: &ComplexField<T>,
    g: &SymmetryElement<T>,
    exponent: T,
    opts: &SymmetryOptions<T>,
) -> Result<ComplexField<T>> {
    if !(exponent > T::zero() && exponent < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "projector exponent must lie in (0, 1), got {exponent}"
        )));
    }
    g.validate()?;
    apply_symmetry_with(&frequency_projector(phi, g.h.powf(exponent)), g, opts).map(|(u, _)| u)
}

/// `|<T1 f1, T2 f2>|`.
pub fn profile_overlap<T: Real>(
    f1: &ComplexField<T>,
    g1: &SymmetryElement<T>,
    f2: &ComplexField<T>,
    g2: &SymmetryElement<T>,
) -> Result<T> {
    let a = apply_symmetry(f1, g1)?;
    let b = apply_symmetry(f2, g2)?;
    Ok(a.inner_product(&b)?.norm())
}

/// Image of a solution `u(t)` under `g` when `h = 1` and `t0 = 0`:
/// `e^{i theta} e^{i x.xi - i t |xi|^2} u(t, x - x0 - 2 xi t)`.
pub fn transform_solution<T: Real>(u_t: &ComplexField<T>, g: &SymmetryElement<T>, t: T) -> Result<ComplexField<T>> {
    g.validate()?;
    if g.h != T::one() || g.t0 != T::zero() {
        return Err(Error::InvalidArgument(
            "only phase, translation and boost commute with the nonlinear flow".into(),
        ));
    }
    let s = g.snapped(u_t.grid());
    let grid = u_t.grid();
    let shifted = u_t.roll([grid.snap_shift(s.x0[0]).0, grid.snap_shift(s.x0[1]).0]);
    let moved = galilean_transform(&shifted, s.xi, t)?;
    let theta = s.theta;
    Ok(moved.map(|z| z * Complex::from_polar(T::one(), theta)))
}

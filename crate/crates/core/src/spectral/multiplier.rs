use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::field::ComplexField;
use crate::spectral::grid::{Direction, GridSpec};

/// Symbol of a Fourier multiplier tabulated on a grid's frequency lattice.
#[derive(Debug, Clone)]
pub struct FourierMultiplier<T: Real> {
    grid: GridSpec<T>,
    symbol: Vec<Complex<T>>,
    description: String,
}

impl<T: Real> FourierMultiplier<T> {
    /// Tabulates `symbol(k, is_nyquist)` on every spectral index.
    pub fn from_fn(
        grid: &GridSpec<T>,
        description: impl Into<String>,
        mut symbol: impl FnMut([T; 2], bool) -> Complex<T>,
    ) -> Self {
        let symbol = (0..grid.len())
            .map(|i| symbol(grid.wavevector(i), grid.is_nyquist(i)))
            .collect();
        Self {
            grid: grid.clone(),
            symbol,
            description: description.into(),
        }
    }

    /// Real, even symbol `s(|k|)`.
    pub fn radial(grid: &GridSpec<T>, description: impl Into<String>, s: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, description, |k, _| {
            let kk = (k[0] * k[0] + k[1] * k[1]).sqrt();
            Complex::new(s(kk), T::zero())
        })
    }

    pub fn identity(grid: &GridSpec<T>) -> Self {
        Self::radial(grid, "1", |_| T::one())
    }

    /// `|k|^2`, the symbol of `-Laplacian`.
    pub fn neg_laplacian(grid: &GridSpec<T>) -> Self {
        Self::radial(grid, "|k|^2", |k| k * k)
    }

    /// `|k|^s`, the symbol of `|grad|^s`.
    pub fn abs_grad_pow(grid: &GridSpec<T>, s: T) -> Self {
        Self::radial(grid, format!("|k|^{s}"), |k| {
            if k == T::zero() {
                if s == T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            } else {
                k.powf(s)
            }
        })
    }

    /// `1 + |k|^s`, the inhomogeneous derivative `<grad>^s` in the
    /// convention used throughout the crate.
    pub fn japanese_bracket(grid: &GridSpec<T>, s: T) -> Self {
        Self::radial(grid, format!("1+|k|^{s}"), |k| {
            if k == T::zero() {
                T::one()
            } else {
                T::one() + k.powf(s)
            }
        })
    }

    /// `exp(-i t |k|^2)`: the free flow `exp(i t Laplacian)`.
    pub fn free_flow(grid: &GridSpec<T>, t: T) -> Self {
        Self::from_fn(grid, format!("exp(-i {t} |k|^2)"), |k, _| {
            let ph = -t * (k[0] * k[0] + k[1] * k[1]);
            Complex::new(ph.cos(), ph.sin())
        })
    }

    /// `i k_axis`; the Nyquist mode is zeroed because the symbol is odd.
    pub fn derivative(grid: &GridSpec<T>, axis: usize) -> Self {
        Self::from_fn(grid, format!("i k_{axis}"), |k, nyq| {
            if nyq {
                Complex::default()
            } else {
                Complex::new(T::zero(), k[axis])
            }
        })
    }

    /// `exp(-i k . a)`: translation `f(x) -> f(x - a)` for any shift `a`.
    pub fn translation(grid: &GridSpec<T>, shift: [T; 2]) -> Self {
        Self::from_fn(grid, format!("translate {:?}", shift), |k, nyq| {
            let ph = -(k[0] * shift[0] + k[1] * shift[1]);
            if nyq {
                Complex::new(ph.cos(), T::zero())
            } else {
                Complex::new(ph.cos(), ph.sin())
            }
        })
    }

    /// Sharp cutoff keeping `|k| <= radius`.
    pub fn low_pass(grid: &GridSpec<T>, radius: T) -> Self {
        Self::radial(grid, format!("1_{{|k|<={radius}}}"), |k| {
            if k <= radius {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    pub fn symbol(&self) -> &[Complex<T>] {
        &self.symbol
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn is_finite(&self) -> bool {
        self.symbol.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Pointwise product of two symbols (composition of the operators).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("multiplier grids differ".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            symbol: self
                .symbol
                .iter()
                .zip(&other.symbol)
                .map(|(&a, &b)| a * b)
                .collect(),
            description: format!("({})*({})", self.description, other.description),
        })
    }

    /// Multiplies spectral coefficients in place.
    pub fn apply_to_spectrum(&self, spectrum: &mut [Complex<T>]) {
        for (z, s) in spectrum.iter_mut().zip(&self.symbol) {
            *z = *z * *s;
        }
    }

    /// `F^{-1}[ symbol * F[f] ]`.
    pub fn apply(&self, f: &ComplexField<T>) -> Result<ComplexField<T>> {
        let mut out = f.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, f: &mut ComplexField<T>) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("field and multiplier grids differ".into()));
        }
        f.transform_in_place(Direction::Forward);
        self.apply_to_spectrum(f.values_mut());
        f.transform_in_place(Direction::Inverse);
        Ok(())
    }
}

pub fn apply_multiplier<T: Real>(
    f: &ComplexField<T>,
    m: &FourierMultiplier<T>,
) -> Result<ComplexField<T>> {
    m.apply(f)
}

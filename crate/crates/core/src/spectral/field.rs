use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::spectral::grid::{Direction, GridSpec};

/// Complex samples `u(x)` on every lattice site of a [`GridSpec`].
///
/// The same container holds unitary spectral coefficients after
/// [`ComplexField::transform`]; the quadrature weights are identical in both
/// representations, so norms agree (Parseval).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T: Real> {
    grid: GridSpec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: &GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &GridSpec<T>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex::default(); grid.len()],
        }
    }

    /// Samples a function of the site position.
    pub fn from_fn(grid: &GridSpec<T>, mut f: impl FnMut([T; 2]) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples a real function of the site position.
    pub fn from_real_fn(grid: &GridSpec<T>, mut f: impl FnMut([T; 2]) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|z| z * c)
    }

    pub fn map(&self, mut f: impl FnMut(Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Pointwise map that also sees the site position.
    pub fn map_with_position(&self, mut f: impl FnMut([T; 2], Complex<T>) -> Complex<T>) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &z)| f(self.grid.position(i), z))
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    fn zip_map(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Pointwise modulus as a real-valued complex field.
    pub fn modulus(&self) -> Self {
        self.map(|z| Complex::new(z.norm(), T::zero()))
    }

    /// Unitary DFT in the requested direction.
    pub fn transform(&self, dir: Direction) -> Self {
        let mut out = self.clone();
        out.transform_in_place(dir);
        out
    }

    pub fn transform_in_place(&mut self, dir: Direction) {
        let grid = self.grid.clone();
        grid.transform_in_place(&mut self.values, dir);
    }

    /// `sum |f|^q dx^d`, the q-th power of the L^q norm.
    pub fn lq_power(&self, q: T) -> T {
        let half = q * lit(0.5);
        let two = lit::<T>(2.0);
        let s: T = if q == two {
            self.values.iter().map(|z| z.norm_sqr()).sum()
        } else {
            self.values
                .iter()
                .map(|z| crate::scalar::pow_real(z.norm_sqr(), half))
                .sum()
        };
        s * self.grid.cell_volume()
    }

    /// L^q norm by rectangle-rule quadrature.
    pub fn lp_norm(&self, q: T) -> Result<T> {
        lp_norm(self, q)
    }

    pub fn l2_norm_sq(&self) -> T {
        self.lq_power(lit(2.0))
    }

    /// `sum f conj(g) dx^d`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        inner_product(self, other)
    }

    /// Fraction of spectral energy carried by modes with |k_j| above two thirds
    /// of the Nyquist magnitude on some axis.
    pub fn spectral_tail_fraction(&self) -> T {
        let spec = self.transform(Direction::Forward);
        spec.tail_fraction_of_spectrum()
    }

    /// Same as [`Self::spectral_tail_fraction`] for data already in spectral form.
    pub fn tail_fraction_of_spectrum(&self) -> T {
        let cut = self.grid.k_max() * lit(2.0 / 3.0);
        let mut total = T::zero();
        let mut tail = T::zero();
        for (i, z) in self.values.iter().enumerate() {
            let e = z.norm_sqr();
            total = total + e;
            let [a, b] = self.grid.wavevector(i);
            if a.abs() > cut || b.abs() > cut {
                tail = tail + e;
            }
        }
        if total > T::zero() {
            tail / total
        } else {
            T::zero()
        }
    }

    /// Fraction of the mass within `cells` lattice spacings of the box boundary.
    pub fn edge_mass_fraction(&self, cells: usize) -> T {
        let mut total = T::zero();
        let mut edge = T::zero();
        for (i, z) in self.values.iter().enumerate() {
            let e = z.norm_sqr();
            total = total + e;
            if self.grid.is_edge_site(i, cells) {
                edge = edge + e;
            }
        }
        if total > T::zero() {
            edge / total
        } else {
            T::zero()
        }
    }

    /// Largest modulus over the lattice.
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Cyclic shift by whole lattice steps along each axis.
    pub fn roll(&self, shift: [i64; 2]) -> Self {
        let n = self.grid.n_per_axis() as i64;
        let mut out = Self::zeros(&self.grid);
        for (i, &z) in self.values.iter().enumerate() {
            let [a, b] = self.grid.unflatten(i);
            let na = (a as i64 + shift[0]).rem_euclid(n) as usize;
            let nb = if self.grid.dim() == 2 {
                (b as i64 + shift[1]).rem_euclid(n) as usize
            } else {
                0
            };
            out.values[self.grid.flatten([na, nb])] = z;
        }
        out
    }
}

/// `(sum |f|^q dx^d)^(1/q)`; rejects `q < 1`.
pub fn lp_norm<T: Real>(f: &ComplexField<T>, q: T) -> Result<T> {
    if !(q >= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "L^q exponent must be >= 1, got {q}"
        )));
    }
    Ok(f.lq_power(q).powf(q.recip()))
}

pub fn inner_product<T: Real>(f: &ComplexField<T>, g: &ComplexField<T>) -> Result<Complex<T>> {
    f.same_grid(g)?;
    let s = f
        .values
        .iter()
        .zip(&g.values)
        .fold(Complex::default(), |acc, (&a, &b)| acc + a * b.conj());
    Ok(s * f.grid.cell_volume())
}

pub fn transform<T: Real>(f: &ComplexField<T>, dir: Direction) -> ComplexField<T> {
    f.transform(dir)
}

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Transform direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

struct Plans<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Uniform periodic lattice on the box `[-L, L)^d`.
///
/// Sites are stored row-major with axis 0 slowest. Wavenumbers are kept in
/// FFT order: `k_m = pi * m / L` for `m = 0, 1, .., n/2 - 1, -n/2, .., -1`.
#[derive(Clone)]
pub struct GridSpec<T: Real> {
    dim: usize,
    n: usize,
    half_width: T,
    dx: T,
    wavenumbers: Arc<Vec<T>>,
    plans: Arc<Plans<T>>,
}

impl<T: Real> fmt::Debug for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("dim", &self.dim)
            .field("n_per_axis", &self.n)
            .field("half_width", &self.half_width)
            .field("dx", &self.dx)
            .finish()
    }
}

impl<T: Real> PartialEq for GridSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.half_width == other.half_width
    }
}

/// Builds a grid with `n` points per axis on `[-L, L)^d`, `d` in {1, 2}.
pub fn make_grid<T: Real>(dim: usize, n: usize, half_width: T) -> Result<GridSpec<T>> {
    GridSpec::new(dim, n, half_width)
}

impl<T: Real> GridSpec<T> {
    pub fn new(dim: usize, n: usize, half_width: T) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2 for full grids, got {dim}"
            )));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        let nt = T::from_usize(n).unwrap();
        let dx = (half_width + half_width) / nt;
        let base = T::PI() / half_width;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                base * T::from_i64(m).unwrap()
            })
            .collect();
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Self {
            dim,
            n,
            half_width,
            dx,
            wavenumbers: Arc::new(wavenumbers),
            plans: Arc::new(plans),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    /// Number of lattice sites, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `dx^d`.
    pub fn cell_volume(&self) -> T {
        self.dx.powi(self.dim as i32)
    }

    /// Per-axis wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Largest representable |k| per axis (the Nyquist magnitude).
    pub fn k_max(&self) -> T {
        T::PI() / self.dx
    }

    /// Position of index `i` along one axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> T {
        -self.half_width + self.dx * T::from_usize(i).unwrap()
    }

    /// Multi-index of a flat site index; unused axes are zero.
    #[inline]
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    #[inline]
    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.n + idx[1]
        }
    }

    /// Physical coordinates of a site; the unused component is zero.
    #[inline]
    pub fn position(&self, flat: usize) -> [T; 2] {
        let [i, j] = self.unflatten(flat);
        if self.dim == 1 {
            [self.coordinate(i), T::zero()]
        } else {
            [self.coordinate(i), self.coordinate(j)]
        }
    }

    /// Euclidean distance of a site from the origin.
    #[inline]
    pub fn radius(&self, flat: usize) -> T {
        let [x, y] = self.position(flat);
        (x * x + y * y).sqrt()
    }

    /// Wave vector of a spectral index; the unused component is zero.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [T; 2] {
        let [i, j] = self.unflatten(flat);
        if self.dim == 1 {
            [self.wavenumbers[i], T::zero()]
        } else {
            [self.wavenumbers[i], self.wavenumbers[j]]
        }
    }

    #[inline]
    pub fn k_squared(&self, flat: usize) -> T {
        let [a, b] = self.wavevector(flat);
        a * a + b * b
    }

    /// True when the spectral index sits on the unpaired `-n/2` mode of any axis.
    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let [i, j] = self.unflatten(flat);
        i == self.n / 2 || (self.dim == 2 && j == self.n / 2)
    }

    /// Spectral flat index of integer mode numbers `m` (may be negative).
    pub fn mode_index(&self, modes: [i64; 2]) -> usize {
        let n = self.n as i64;
        let wrap = |m: i64| m.rem_euclid(n) as usize;
        self.flatten([wrap(modes[0]), wrap(modes[1])])
    }

    /// Snaps a wavenumber onto the lattice `pi m / L`, returning `(m, k_m)`.
    pub fn snap_wavenumber(&self, k: T) -> (i64, T) {
        let m = (k * self.half_width / T::PI()).round().to_i64().unwrap_or(0);
        let m = m.clamp(-(self.n as i64) / 2 + 1, self.n as i64 / 2 - 1);
        (m, T::PI() * T::from_i64(m).unwrap() / self.half_width)
    }

    /// Snaps a position shift onto a whole number of lattice spacings.
    pub fn snap_shift(&self, a: T) -> (i64, T) {
        let s = (a / self.dx).round().to_i64().unwrap_or(0);
        (s, self.dx * T::from_i64(s).unwrap())
    }

    /// Sites within `cells` spacings of the box boundary.
    pub fn is_edge_site(&self, flat: usize, cells: usize) -> bool {
        let idx = self.unflatten(flat);
        (0..self.dim).any(|a| idx[a] < cells || idx[a] >= self.n - cells)
    }

    /// Unitary in-place DFT of lattice data (`1/sqrt(N)` on both directions).
    pub fn transform_in_place(&self, data: &mut [Complex<T>], dir: Direction) {
        assert_eq!(data.len(), self.len(), "data length does not match grid");
        let plan = match dir {
            Direction::Forward => &self.plans.forward,
            Direction::Inverse => &self.plans.inverse,
        };
        let mut scratch = vec![Complex::default(); plan.get_inplace_scratch_len()];
        // rows (contiguous)
        plan.process_with_scratch(data, &mut scratch);
        if self.dim == 2 {
            let n = self.n;
            let mut t = vec![Complex::default(); data.len()];
            transpose(data, &mut t, n);
            plan.process_with_scratch(&mut t, &mut scratch);
            transpose(&t, data, n);
        }
        let scale = T::one() / T::from_usize(self.len()).unwrap().sqrt();
        for v in data.iter_mut() {
            *v = *v * scale;
        }
    }

    /// Site index closest to the origin.
    pub fn origin_index(&self) -> usize {
        let c = self.n / 2;
        self.flatten([c, if self.dim == 2 { c } else { 0 }])
    }
}

fn transpose<C: Copy>(src: &[C], dst: &mut [C], n: usize) {
    for i in 0..n {
        for j in 0..n {
            dst[j * n + i] = src[i * n + j];
        }
    }
}

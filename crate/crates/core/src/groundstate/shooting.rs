//! Radial shooting for `Q'' + (d-1)/r Q' = F(Q)`.
//!
//! The amplitude `Q(0)` is bisected between an undershoot (the profile turns
//! back up while still positive) and an overshoot (the profile crosses zero).
//! The converged profile is kept until it has decayed to a small fraction of
//! `Q(0)`; the far field is then integrated inward from `r_max`, starting on
//! the decaying asymptote `A e^{-sqrt(omega) r} r^{-(d-1)/2}`, and the
//! amplitude `A` is matched to the outward solution. Inward integration is
//! stable for the decaying branch, so the tail keeps full relative accuracy.

use crate::error::{Error, Result};
use crate::scalar::{lit, pow_real, Real};

/// Right-hand side `F(Q) = omega Q + mu_mc |Q|^{4/d} Q + mu_p |Q|^{p-1} Q`.
#[derive(Debug, Clone, Copy)]
pub struct RadialOde<T> {
    pub d: usize,
    pub omega: T,
    /// `(coupling, exponent q)` pairs for `coupling |Q|^{q-1} Q`.
    pub terms: [(T, T); 2],
}

impl<T: Real> RadialOde<T> {
    #[inline]
    pub fn f(&self, q: T) -> T {
        let a = q.abs();
        let mut s = self.omega * q;
        for &(c, e) in &self.terms {
            if c != T::zero() {
                s = s + c * pow_real(a, e - T::one()) * q;
            }
        }
        s
    }

    #[inline]
    pub fn df(&self, q: T) -> T {
        let a = q.abs();
        let mut s = self.omega;
        for &(c, e) in &self.terms {
            if c != T::zero() {
                s = s + c * e * pow_real(a, e - T::one());
            }
        }
        s
    }

    #[inline]
    pub fn d2f(&self, q: T) -> T {
        let a = q.abs();
        let mut s = T::zero();
        for &(c, e) in &self.terms {
            if c != T::zero() {
                s = s + c * e * (e - T::one()) * pow_real(a, e - lit(3.0)) * q;
            }
        }
        s
    }

    fn dim_minus_one(&self) -> T {
        lit((self.d - 1) as f64)
    }

    #[inline]
    fn deriv(&self, r: T, q: T, dq: T) -> (T, T) {
        (dq, self.f(q) - self.dim_minus_one() / r * dq)
    }

    fn rk4(&self, r: T, q: T, dq: T, h: T) -> (T, T) {
        let half = lit::<T>(0.5);
        let (k1q, k1p) = self.deriv(r, q, dq);
        let (k2q, k2p) = self.deriv(r + half * h, q + half * h * k1q, dq + half * h * k1p);
        let (k3q, k3p) = self.deriv(r + half * h, q + half * h * k2q, dq + half * h * k2p);
        let (k4q, k4p) = self.deriv(r + h, q + h * k3q, dq + h * k3p);
        let sixth = h / lit(6.0);
        (
            q + sixth * (k1q + lit::<T>(2.0) * (k2q + k3q) + k4q),
            dq + sixth * (k1p + lit::<T>(2.0) * (k2p + k3p) + k4p),
        )
    }

    /// Taylor coefficients of `Q` in powers of `r^2` about the origin,
    /// valid while `Q > 0`. Powers of the series use Miller's recurrence.
    fn series(&self, a: T, terms: usize) -> Vec<T> {
        let d = lit::<T>(self.d as f64);
        let mut q = vec![a];
        let mut pows: Vec<Vec<T>> = self
            .terms
            .iter()
            .map(|&(_, e)| vec![pow_real(a, e)])
            .collect();
        for k in 0..terms - 1 {
            let kt = T::from_usize(k).unwrap();
            let mut rhs = self.omega * q[k];
            for (j, &(c, _)) in self.terms.iter().enumerate() {
                rhs = rhs + c * pows[j][k];
            }
            let two = lit::<T>(2.0);
            q.push(rhs / ((two * kt + two) * (two * kt + d)));
            let k1 = k + 1;
            let k1t = T::from_usize(k1).unwrap();
            for (j, &(_, e)) in self.terms.iter().enumerate() {
                let p = &pows[j];
                let mut acc = T::zero();
                for i in 1..=k1 {
                    let it = T::from_usize(i).unwrap();
                    acc = acc + ((e + T::one()) * it - k1t) * q[i] * p[k1 - i];
                }
                pows[j].push(acc / (k1t * a));
            }
        }
        q
    }

    /// Largest radius at which the truncated series is accurate to roundoff.
    fn series_radius(coef: &[T]) -> T {
        let a = coef[0].abs();
        let n = coef.len();
        let mut r = T::infinity();
        for k in [n - 2, n - 1] {
            let c = coef[k].abs();
            if c > T::zero() {
                let kk = lit::<T>(2.0 * k as f64);
                r = r.min((T::epsilon() * lit(0.05) * a / c).powf(T::one() / kk));
            }
        }
        r
    }

    fn series_eval(coef: &[T], r: T) -> (T, T) {
        let x = r * r;
        let mut q = T::zero();
        let mut dq = T::zero();
        for (k, &c) in coef.iter().enumerate().rev() {
            q = q * x + c;
            if k > 0 {
                dq = dq * x + c * lit(2.0 * k as f64);
            }
        }
        // dq accumulated sum_k 2k c_k x^{k-1}; times r gives Q'.
        (q, dq * r)
    }

    /// Decaying far-field shape and its logarithmic derivative.
    fn asymptote(&self, r: T) -> (T, T) {
        let k = self.omega.sqrt();
        let nu = self.dim_minus_one() * lit(0.5);
        let t = (-k * r).exp() * r.powf(-nu);
        (t, -k - nu / r)
    }
}

/// Fate of one shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shot {
    /// Turned back up while positive: amplitude too small.
    Under,
    /// Crossed zero: amplitude too large.
    Over,
}

#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions<T> {
    /// Radial step of the RK4 integrator; `None` means `1 / (400 sqrt(omega))`.
    pub radial_step: Option<T>,
    /// Outer radius; `None` means `30 / sqrt(omega)`.
    pub r_max: Option<T>,
    /// Outward solution is kept until `Q < match_ratio * Q(0)`.
    pub match_ratio: T,
    /// Log-spaced amplitudes sampled when looking for brackets.
    pub scan_points: usize,
    pub max_bisection: usize,
}

impl<T: Real> Default for ShootingOptions<T> {
    fn default() -> Self {
        Self {
            radial_step: None,
            r_max: None,
            match_ratio: lit(1e-3),
            scan_points: 48,
            max_bisection: 200,
        }
    }
}

const SERIES_TERMS: usize = 40;

pub(crate) struct Shooter<T> {
    pub ode: RadialOde<T>,
    pub h: T,
    pub nodes: usize,
    pub opts: ShootingOptions<T>,
}

/// Profile on `r_i = i h`, `i = 0..=nodes`.
#[derive(Debug, Clone)]
pub(crate) struct RadialProfile<T> {
    pub q: Vec<T>,
    pub dq: Vec<T>,
    pub tail_amplitude: T,
    pub match_slope_error: T,
}

impl<T: Real> Shooter<T> {
    pub fn new(ode: RadialOde<T>, opts: ShootingOptions<T>) -> Result<Self> {
        let r_max = opts
            .r_max
            .unwrap_or_else(|| lit::<T>(30.0) / ode.omega.sqrt());
        let step = opts
            .radial_step
            .unwrap_or_else(|| T::one() / (lit::<T>(400.0) * ode.omega.sqrt()));
        if !(step > T::zero()) || !(r_max > step * lit(16.0)) {
            return Err(Error::InvalidArgument(format!(
                "radial step {step} and r_max {r_max} inconsistent"
            )));
        }
        let mut nodes = (r_max / step).ceil().to_usize().unwrap_or(0);
        nodes += nodes % 2;
        let h = r_max / T::from_usize(nodes).unwrap();
        Ok(Self { ode, h, nodes, opts })
    }

    fn r(&self, i: usize) -> T {
        self.h * T::from_usize(i).unwrap()
    }

    /// Nodes `0..=m` filled from the origin series, with `m >= 1` as large
    /// as the series' accuracy allows.
    fn core(&self, a: T) -> Vec<(T, T)> {
        let coef = self.ode.series(a, SERIES_TERMS);
        let rs = RadialOde::series_radius(&coef);
        let m = (rs / self.h)
            .floor()
            .to_usize()
            .unwrap_or(usize::MAX)
            .clamp(1, self.nodes / 4);
        (0..=m).map(|i| RadialOde::series_eval(&coef, self.r(i))).collect()
    }

    /// Integrates outward from amplitude `a` and classifies the shot.
    pub fn shoot(&self, a: T) -> Shot {
        let core = self.core(a);
        for &(q, dq) in &core[1..] {
            if q < T::zero() {
                return Shot::Over;
            }
            if dq > T::zero() {
                return Shot::Under;
            }
        }
        let (mut q, mut dq) = *core.last().unwrap();
        for i in core.len() - 1..self.nodes {
            let (nq, ndq) = self.ode.rk4(self.r(i), q, dq, self.h);
            q = nq;
            dq = ndq;
            if q < T::zero() {
                return Shot::Over;
            }
            if dq > T::zero() {
                return Shot::Under;
            }
        }
        Shot::Under
    }

    /// Scans `[lo, hi]` log-uniformly for undershoot-to-overshoot transitions.
    pub fn brackets(&self, lo: T, hi: T) -> Vec<(T, T)> {
        let n = self.opts.scan_points.max(2);
        let ratio = (hi / lo).ln();
        let pts: Vec<T> = (0..n)
            .map(|i| lo * (ratio * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()).exp())
            .collect();
        let shots: Vec<Shot> = pts.iter().map(|&a| self.shoot(a)).collect();
        pts.windows(2)
            .zip(shots.windows(2))
            .filter(|(_, s)| s[0] == Shot::Under && s[1] == Shot::Over)
            .map(|(p, _)| (p[0], p[1]))
            .collect()
    }

    /// Bisects a bracket down to a few ulps.
    pub fn bisect(&self, mut lo: T, mut hi: T) -> Result<T> {
        for _ in 0..self.opts.max_bisection {
            let mid = lo + (hi - lo) * lit(0.5);
            if mid <= lo || mid >= hi || hi - lo <= T::epsilon() * hi * lit(2.0) {
                return Ok(mid);
            }
            match self.shoot(mid) {
                Shot::Under => lo = mid,
                Shot::Over => hi = mid,
            }
        }
        Err(Error::NoConvergence {
            method: "shooting bisection",
            iterations: self.opts.max_bisection,
            last_change: crate::scalar::to_f64(hi - lo),
        })
    }

    /// Builds the full profile for a converged amplitude.
    pub fn profile(&self, a: T) -> Result<RadialProfile<T>> {
        let n = self.nodes;
        let mut q = vec![T::zero(); n + 1];
        let mut dq = vec![T::zero(); n + 1];
        let core = self.core(a);
        for (i, &(v, dv)) in core.iter().enumerate() {
            q[i] = v;
            dq[i] = dv;
        }
        let threshold = self.opts.match_ratio * a;
        let mut m = None;
        for i in core.len() - 1..n {
            if q[i] <= threshold {
                m = Some(i);
                break;
            }
            let (nq, ndq) = self.ode.rk4(self.r(i), q[i], dq[i], self.h);
            if nq < T::zero() || ndq > T::zero() {
                break;
            }
            q[i + 1] = nq;
            dq[i + 1] = ndq;
        }
        let m = m.ok_or(Error::NoConvergence {
            method: "shooting profile (decay to matching point)",
            iterations: n,
            last_change: crate::scalar::to_f64(self.opts.match_ratio),
        })?;
        if m + 4 >= n {
            return Err(Error::InvalidArgument(
                "matching point too close to r_max; enlarge r_max".into(),
            ));
        }

        let target = q[m];
        let (t_m, _) = self.ode.asymptote(self.r(m));
        let mut amp = target / t_m;
        let mut inner = (T::zero(), T::zero());
        let mut tail_q = vec![T::zero(); n + 1];
        let mut tail_dq = vec![T::zero(); n + 1];
        for _ in 0..40 {
            let (t, logd) = self.ode.asymptote(self.r(n));
            tail_q[n] = amp * t;
            tail_dq[n] = amp * t * logd;
            for i in (m..n).rev() {
                let (nq, ndq) = self.ode.rk4(self.r(i + 1), tail_q[i + 1], tail_dq[i + 1], -self.h);
                tail_q[i] = nq;
                tail_dq[i] = ndq;
            }
            inner = (tail_q[m], tail_dq[m]);
            let rel = (inner.0 - target).abs() / target;
            amp = amp * target / inner.0;
            if rel < T::epsilon() * lit(4.0) {
                break;
            }
        }
        let slope_err = (inner.1 - dq[m]).abs();
        q[m + 1..=n].copy_from_slice(&tail_q[m + 1..=n]);
        dq[m + 1..=n].copy_from_slice(&tail_dq[m + 1..=n]);
        Ok(RadialProfile {
            q,
            dq,
            tail_amplitude: amp,
            match_slope_error: slope_err,
        })
    }
}

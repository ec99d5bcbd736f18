//! Frequency lattice of `T x R_per x T`, the `iota` selector and the
//! spectral field container.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One point `(k, eta, alpha)` of the Fourier dual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub k: i64,
    pub eta: f64,
    pub alpha: i64,
}

impl Frequency {
    pub const ZERO: Frequency = Frequency {
        k: 0,
        eta: 0.0,
        alpha: 0,
    };

    pub fn new(k: i64, eta: f64, alpha: i64) -> Self {
        Frequency { k, eta, alpha }
    }

    /// `|k| + |eta| + |alpha|`.
    pub fn l1_norm(&self) -> f64 {
        self.k.abs() as f64 + self.eta.abs() + self.alpha.abs() as f64
    }

    /// Japanese bracket `sqrt(1 + k^2 + eta^2 + alpha^2)`.
    pub fn bracket(&self) -> f64 {
        let (k, a) = (self.k as f64, self.alpha as f64);
        (1.0 + k * k + self.eta * self.eta + a * a).sqrt()
    }

    /// Euclidean length, the symbol of `|nabla|`.
    pub fn euclid(&self) -> f64 {
        let (k, a) = (self.k as f64, self.alpha as f64);
        (k * k + self.eta * self.eta + a * a).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0 && self.eta == 0.0 && self.alpha == 0
    }

    /// The component of largest modulus, with the tie-breaking of the
    /// weight construction: `eta` wins every tie it is part of, and `alpha`
    /// beats `k` on a tie between the two.
    pub fn iota(&self) -> f64 {
        let (ak, aa, ae) = (self.k.abs() as f64, self.alpha.abs() as f64, self.eta.abs());
        if ae >= ak && ae >= aa {
            self.eta
        } else if ak > ae && ak > aa {
            self.k as f64
        } else {
            self.alpha as f64
        }
    }
}

impl std::ops::Sub for Frequency {
    type Output = Frequency;

    fn sub(self, o: Frequency) -> Frequency {
        Frequency::new(self.k - o.k, self.eta - o.eta, self.alpha - o.alpha)
    }
}

impl std::ops::Neg for Frequency {
    type Output = Frequency;

    fn neg(self) -> Frequency {
        Frequency::new(-self.k, -self.eta, -self.alpha)
    }
}

/// `iota` as a free function.
pub fn iota(f: &Frequency) -> f64 {
    f.iota()
}

/// `E(x) = floor(x)` for `x >= 0`.
pub fn floor_e(x: f64) -> i64 {
    debug_assert!(x >= 0.0);
    x.floor() as i64
}

/// `||iota(f1)| - |iota(f2)|| <= |f1 - f2|_1`.
pub fn iota_lipschitz_check(f1: &Frequency, f2: &Frequency) -> bool {
    let lhs = (f1.iota().abs() - f2.iota().abs()).abs();
    // eta differences carry one rounding each side.
    let rhs = (*f1 - *f2).l1_norm();
    lhs <= rhs * (1.0 + 4.0 * f64::EPSILON)
}

/// Truncated periodic lattice: `nx x ny x nz` modes with the y-direction
/// (the real line in the continuum problem) replaced by a period `ly`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub ly: f64,
}

/// Integer lattice coordinates `(k, j, alpha)` with `eta = j * delta_eta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mode {
    pub k: i64,
    pub j: i64,
    pub alpha: i64,
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice {
            nx: 32,
            ny: 128,
            nz: 32,
            ly: 8.0 * PI,
        }
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn slot(w: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if w >= half || w < -half {
        None
    } else if w >= 0 {
        Some(w as usize)
    } else {
        Some((w + n as i64) as usize)
    }
}

impl Lattice {
    pub fn new(nx: usize, ny: usize, nz: usize, ly: f64) -> Result<Self> {
        let l = Lattice { nx, ny, nz, ly };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny), ("nz", self.nz)] {
            if n < 2 || n % 2 != 0 {
                return Err(Error::invalid(format!("{name} = {n} must be even and >= 2")));
            }
        }
        if !(self.ly.is_finite() && self.ly > 0.0) {
            return Err(Error::invalid(format!("ly = {} must be positive", self.ly)));
        }
        Ok(())
    }

    pub fn delta_eta(&self) -> f64 {
        2.0 * PI / self.ly
    }

    /// Largest resolved `|eta|`.
    pub fn max_eta(&self) -> f64 {
        self.ny as f64 * self.delta_eta() / 2.0
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    /// Row-major flat index, `z` fastest.
    pub fn flat(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.ny + iy) * self.nz + iz
    }

    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let iz = idx % self.nz;
        let r = idx / self.nz;
        (r / self.ny, r % self.ny, iz)
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let (ix, iy, iz) = self.unflat(idx);
        Mode {
            k: wavenumber(ix, self.nx),
            j: wavenumber(iy, self.ny),
            alpha: wavenumber(iz, self.nz),
        }
    }

    pub fn frequency(&self, idx: usize) -> Frequency {
        self.mode_frequency(self.mode(idx))
    }

    pub fn mode_frequency(&self, m: Mode) -> Frequency {
        Frequency::new(m.k, m.j as f64 * self.delta_eta(), m.alpha)
    }

    /// Flat index of a mode; `None` outside the lattice or on a Nyquist
    /// plane (those carry no Hermitian partner and are kept at zero).
    pub fn index_of(&self, m: Mode) -> Option<usize> {
        let ix = slot(m.k, self.nx)?;
        let iy = slot(m.j, self.ny)?;
        let iz = slot(m.alpha, self.nz)?;
        let idx = self.flat(ix, iy, iz);
        if self.is_nyquist(idx) {
            None
        } else {
            Some(idx)
        }
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let (ix, iy, iz) = self.unflat(idx);
        ix == self.nx / 2 || iy == self.ny / 2 || iz == self.nz / 2
    }

    /// Index of the mode `-f`.
    pub fn conj_index(&self, idx: usize) -> usize {
        let (ix, iy, iz) = self.unflat(idx);
        self.flat(
            (self.nx - ix) % self.nx,
            (self.ny - iy) % self.ny,
            (self.nz - iz) % self.nz,
        )
    }

    /// Dealiasing mask: keeps `|w| < fraction * n / 2` on every axis.
    pub fn band(&self, fraction: f64) -> Band {
        let cut = |n: usize| fraction * n as f64 / 2.0;
        Band {
            kx: cut(self.nx),
            ky: cut(self.ny),
            kz: cut(self.nz),
        }
    }

    /// Smallest zero-mode damping rate `alpha^2/(eta^2+alpha^2)^2` over the
    /// band with `alpha != 0`. Decay-rate fits on zero modes stop being
    /// meaningful once `t` exceeds a few multiples of its inverse.
    pub fn min_zero_mode_rate(&self, fraction: f64) -> f64 {
        let band = self.band(fraction);
        let mut best = f64::INFINITY;
        for idx in 0..self.len() {
            let m = self.mode(idx);
            if m.k != 0 || m.alpha == 0 || !band.contains(m) || self.is_nyquist(idx) {
                continue;
            }
            let f = self.mode_frequency(m);
            let a2 = (f.alpha * f.alpha) as f64;
            let d = f.eta * f.eta + a2;
            best = best.min(a2 / (d * d));
        }
        best
    }
}

/// Retained-mode box produced by [`Lattice::band`].
#[derive(Debug, Clone, Copy)]
pub struct Band {
    kx: f64,
    ky: f64,
    kz: f64,
}

impl Band {
    pub fn contains(&self, m: Mode) -> bool {
        (m.k.abs() as f64) < self.kx && (m.j.abs() as f64) < self.ky && (m.alpha.abs() as f64) < self.kz
    }
}

/// Fourier coefficients of a real scalar on a [`Lattice`]:
/// `theta(x, y, z) = sum c(k, j, alpha) exp(i(k x + j dEta y + alpha z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub lattice: Lattice,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(lattice: Lattice) -> Self {
        SpectralField {
            lattice,
            coeffs: vec![Complex64::new(0.0, 0.0); lattice.len()],
        }
    }

    pub fn get(&self, m: Mode) -> Complex64 {
        self.lattice
            .index_of(m)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Sets `c(m) = v` and `c(-m) = conj(v)`; the zero mode is forced real.
    pub fn set_mode(&mut self, m: Mode, v: Complex64) -> Result<()> {
        let idx = self
            .lattice
            .index_of(m)
            .ok_or_else(|| Error::invalid(format!("mode {m:?} is not representable")))?;
        let cj = self.lattice.conj_index(idx);
        if cj == idx {
            self.coeffs[idx] = Complex64::new(v.re, 0.0);
        } else {
            self.coeffs[idx] = v;
            self.coeffs[cj] = v.conj();
        }
        Ok(())
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |c(-f) - conj c(f)| / max |c|`, zero for the zero field.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let l = &self.lattice;
        (0..l.len())
            .map(|i| (self.coeffs[l.conj_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Projects onto the Hermitian-symmetric subspace and clears Nyquist
    /// planes.
    pub fn symmetrize(&mut self) {
        let l = self.lattice;
        for i in 0..l.len() {
            if l.is_nyquist(i) {
                self.coeffs[i] = Complex64::new(0.0, 0.0);
                continue;
            }
            let j = l.conj_index(i);
            if j < i {
                continue;
            }
            if j == i {
                self.coeffs[i].im = 0.0;
            } else {
                let avg = 0.5 * (self.coeffs[i] + self.coeffs[j].conj());
                self.coeffs[i] = avg;
                self.coeffs[j] = avg.conj();
            }
        }
    }

    /// Zeroes every mode outside the dealiasing band.
    pub fn truncate(&mut self, fraction: f64) {
        let band = self.lattice.band(fraction);
        let l = self.lattice;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if l.is_nyquist(i) || !band.contains(l.mode(i)) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Discretization of the periodic box `[0, L)³` with `n` points per axis.
///
/// Spectral arrays use FFT ordering along every axis: position `p` carries
/// the integer mode `m = p` for `p < n/2` and `m = p − n` otherwise, so
/// `m ∈ [−n/2, n/2)` and the physical wavenumber is `k = (2π/L)·m`.
/// Flat index of `(p₁, p₂, p₃)` is `(p₁·n + p₂)·n + p₃`.
///
/// Cloning is cheap; FFT plans and wavenumber tables are shared.
#[derive(Clone)]
pub struct SpectralGrid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    box_length: f64,
    wavenumbers: Vec<f64>,
    k_sq: Vec<f64>,
    plans: Arc<Plans>,
}

pub(crate) struct Plans {
    pub(crate) forward: Arc<dyn Fft<f64>>,
    pub(crate) inverse: Arc<dyn Fft<f64>>,
}

impl SpectralGrid {
    /// Builds the grid. `n` must be even and at least 8; `box_length > 0`.
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n % 2 != 0 || n < 8 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        let mut planner = FftPlanner::new();
        let plans = Arc::new(Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        });
        Self::with_plans(n, box_length, plans)
    }

    fn with_plans(n: usize, box_length: f64, plans: Arc<Plans>) -> Result<Self> {
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        let unit = 2.0 * PI / box_length;
        let wavenumbers: Vec<f64> = (0..n).map(|p| unit * mode_of(p, n) as f64).collect();
        let mut k_sq = Vec::with_capacity(n * n * n);
        for &a in &wavenumbers {
            for &b in &wavenumbers {
                for &c in &wavenumbers {
                    k_sq.push(a * a + b * b + c * c);
                }
            }
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                box_length,
                wavenumbers,
                k_sq,
                plans,
            }),
        })
    }

    /// Same resolution, different box side; FFT plans are reused.
    pub fn with_box_length(&self, box_length: f64) -> Result<Self> {
        Self::with_plans(self.inner.n, box_length, Arc::clone(&self.inner.plans))
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn box_length(&self) -> f64 {
        self.inner.box_length
    }

    /// Total number of points (and modes), `n³`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.inner.box_length / self.inner.n as f64
    }

    /// Quadrature weight of one collocation point, `(L/n)³`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    /// `L³`; Parseval reads `∫|f|² dx = L³ Σ|f̂_k|²`.
    pub fn volume(&self) -> f64 {
        self.inner.box_length.powi(3)
    }

    /// Largest axis wavenumber magnitude, `(n/2)·(2π/L)`.
    pub fn max_axis_wavenumber(&self) -> f64 {
        PI * self.inner.n as f64 / self.inner.box_length
    }

    /// Integer mode carried by FFT position `p`.
    pub fn mode(&self, p: usize) -> i64 {
        mode_of(p, self.inner.n)
    }

    /// Axis wavenumber at FFT position `p`.
    pub fn wavenumber(&self, p: usize) -> f64 {
        self.inner.wavenumbers[p]
    }

    /// Wavenumber used by odd-order symbols: the Nyquist position has no
    /// conjugate partner, so odd symbols vanish there to keep real fields real.
    pub fn odd_wavenumber(&self, p: usize) -> f64 {
        if p == self.inner.n / 2 {
            0.0
        } else {
            self.inner.wavenumbers[p]
        }
    }

    pub fn is_nyquist(&self, p: usize) -> bool {
        p == self.inner.n / 2
    }

    /// `|k|²` for every flat index.
    pub fn k_sq(&self) -> &[f64] {
        &self.inner.k_sq
    }

    /// Splits a flat index into axis positions.
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.inner.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn flatten(&self, p: [usize; 3]) -> usize {
        let n = self.inner.n;
        (p[0] * n + p[1]) * n + p[2]
    }

    /// Flat index of the mode `−k` for the mode at `idx`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let p = self.unflatten(idx);
        self.flatten(p.map(|q| (n - q) % n))
    }

    /// Physical wavevector at `idx` (true wavenumbers, Nyquist included).
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.unflatten(idx).map(|p| self.inner.wavenumbers[p])
    }

    /// Wavevector with the Nyquist components zeroed; used by derivatives,
    /// divergence and the Leray projector.
    pub fn odd_wavevector(&self, idx: usize) -> [f64; 3] {
        self.unflatten(idx).map(|p| self.odd_wavenumber(p))
    }

    /// Integer mode vector at `idx`.
    pub fn mode_vector(&self, idx: usize) -> [i64; 3] {
        self.unflatten(idx).map(|p| self.mode(p))
    }

    /// Flat index of the integer mode `m` (each component taken modulo `n`).
    pub fn index_of_mode(&self, m: [i64; 3]) -> usize {
        let n = self.inner.n as i64;
        self.flatten(m.map(|c| c.rem_euclid(n) as usize))
    }

    /// Physical coordinates of collocation point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let dx = self.dx();
        self.unflatten(idx).map(|p| p as f64 * dx)
    }

    pub(crate) fn plans(&self) -> &Plans {
        &self.inner.plans
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.box_length == other.inner.box_length
    }
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.inner.n)
            .field("box_length", &self.inner.box_length)
            .finish()
    }
}

fn mode_of(p: usize, n: usize) -> i64 {
    if p < n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

/// `(i k)^order` with the odd-order Nyquist convention of
/// [`SpectralGrid::odd_wavenumber`].
pub(crate) fn derivative_factor(grid: &SpectralGrid, p: usize, order: u32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let k = if order % 2 == 1 {
        grid.odd_wavenumber(p)
    } else {
        grid.wavenumber(p)
    };
    Complex64::new(0.0, k).powu(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_contains_unit_mode_once() {
        let grid = SpectralGrid::new(8, 2.0 * PI).unwrap();
        let hits = (0..grid.len())
            .filter(|&i| grid.wavevector(i) == [1.0, 0.0, 0.0])
            .count();
        assert_eq!(hits, 1);
        let zeros = (0..grid.len()).filter(|&i| grid.k_sq()[i] == 0.0).count();
        assert_eq!(zeros, 1);
        assert_eq!(grid.len(), 512);
    }

    #[test]
    fn max_axis_wavenumber_is_half_n() {
        let grid = SpectralGrid::new(32, 2.0 * PI).unwrap();
        assert!((grid.max_axis_wavenumber() - 16.0).abs() < 1e-12);
        let largest = (0..32)
            .map(|p| grid.wavenumber(p).abs())
            .fold(0.0, f64::max);
        assert!((largest - 16.0).abs() < 1e-12);
        let bound = 3f64.sqrt() * PI * 32.0 / (2.0 * PI);
        assert!(grid.k_sq().iter().all(|&k2| k2.sqrt() <= bound + 1e-12));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpectralGrid::new(7, 2.0 * PI).is_err());
        assert!(SpectralGrid::new(6, 2.0 * PI).is_err());
        assert!(SpectralGrid::new(8, 0.0).is_err());
        assert!(SpectralGrid::new(8, -1.0).is_err());
    }

    #[test]
    fn modes_span_half_open_range() {
        let grid = SpectralGrid::new(8, 1.0).unwrap();
        let modes: Vec<i64> = (0..8).map(|p| grid.mode(p)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for idx in [0, 5, 77, 300, 511] {
            assert_eq!(grid.index_of_mode(grid.mode_vector(idx)), idx);
            let c = grid.conjugate_index(idx);
            assert_eq!(grid.conjugate_index(c), idx);
        }
    }
}

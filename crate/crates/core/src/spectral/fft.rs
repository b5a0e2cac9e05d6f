//! Separable 3-D FFT built from rustfft line transforms.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::Fft;

use super::grid::SpectralGrid;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized in-place 3-D transform of one scalar array.
pub(crate) fn fft3(grid: &SpectralGrid, data: &mut [Complex64], direction: Direction) {
    let n = grid.n();
    debug_assert_eq!(data.len(), n * n * n);
    let plan: &dyn Fft<f64> = match direction {
        Direction::Forward => grid.plans().forward.as_ref(),
        Direction::Inverse => grid.plans().inverse.as_ref(),
    };

    // Axis 3 is contiguous.
    data.par_chunks_mut(n * n)
        .for_each(|slab| plan.process(slab));

    // Axis 2: transpose each n×n slab, transform rows, transpose back.
    data.par_chunks_mut(n * n).for_each(|slab| {
        let mut buf = vec![Complex64::default(); n * n];
        transpose(slab, &mut buf, n, n);
        plan.process(&mut buf);
        transpose(&buf, slab, n, n);
    });

    // Axis 1: treat the array as n × n² and transpose to n² × n.
    let mut buf = vec![Complex64::default(); data.len()];
    buf.par_chunks_mut(n).enumerate().for_each(|(col, line)| {
        for (row, out) in line.iter_mut().enumerate() {
            *out = data[row * n * n + col];
        }
    });
    buf.par_chunks_mut(n * n)
        .for_each(|block| plan.process(block));
    data.par_chunks_mut(n * n)
        .enumerate()
        .for_each(|(row, plane)| {
            for (col, out) in plane.iter_mut().enumerate() {
                *out = buf[col * n + row];
            }
        });
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Real samples to normalized coefficients, `f̂_k = n⁻³ Σ_x f(x) e^{−ik·x}`.
pub(crate) fn forward_real(grid: &SpectralGrid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft3(grid, &mut data, Direction::Forward);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}

/// Coefficients back to samples; the imaginary part (roundoff for Hermitian
/// input) is dropped.
pub(crate) fn inverse_real(grid: &SpectralGrid, coefs: &[Complex64]) -> Vec<f64> {
    let mut data = coefs.to_vec();
    fft3(grid, &mut data, Direction::Inverse);
    data.into_iter().map(|c| c.re).collect()
}

//! Discrete Fourier transform over time and the tangential directions.
//!
//! Forward coefficients are averages, `u_hat(k, xi) = mean(u e^{-i(kt + xi.x')})`,
//! so the inverse is a plain sum over modes and `P` keeps exactly the `k = 0` row.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use super::field::{NormalJet, PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Relative tolerance on `u_hat(-k,-xi) = conj u_hat(k,xi)` before an inverse.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// In-place FFT over axis `axis` of a row-major complex array with `shape`.
fn fft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, direction: FftDirection) {
    let len = shape[axis];
    if len == 1 {
        return;
    }
    let stride: usize = shape[axis + 1..].iter().product();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(len, direction);
    data.par_chunks_mut(len * stride).for_each(|chunk| {
        let mut lines = vec![Complex64::default(); len * stride];
        for i in 0..len {
            for s in 0..stride {
                lines[s * len + i] = chunk[i * stride + s];
            }
        }
        fft.process(&mut lines);
        for i in 0..len {
            for s in 0..stride {
                chunk[i * stride + s] = lines[s * len + i];
            }
        }
    });
}

fn block_shape(grid: &Grid) -> Vec<usize> {
    let mut shape = vec![grid.nt()];
    shape.extend(std::iter::repeat_n(grid.tangential(), grid.tdim()));
    shape.push(grid.nz());
    shape
}

fn transform_blocks(data: &mut [Complex64], grid: &Grid, direction: FftDirection) {
    let shape = block_shape(grid);
    data.par_chunks_mut(grid.block()).for_each(|block| {
        for axis in 0..shape.len() - 1 {
            fft_axis(block, &shape, axis, direction);
        }
    });
}

/// Averaged forward transform.
pub fn forward(field: &PhysicalField) -> SpectralField {
    let grid = field.grid().clone();
    let scale = 1.0 / grid.n_modes() as f64;
    let mut data: Vec<Complex64> = field
        .data()
        .iter()
        .map(|&x| Complex64::new(x * scale, 0.0))
        .collect();
    transform_blocks(&mut data, &grid, FftDirection::Forward);
    SpectralField::from_vec(grid, field.components(), data).expect("shape preserved")
}

/// Largest Hermitian defect relative to the largest coefficient, with the
/// offending mode.
pub fn hermitian_defect(field: &SpectralField) -> (f64, usize, usize) {
    let grid = field.grid();
    let n_tan = grid.n_tan();
    let scale = field.max_abs();
    if scale == 0.0 {
        return (0.0, 0, 0);
    }
    let mut worst = (0.0, 0, 0);
    for c in 0..field.components() {
        for mode in 0..grid.n_modes() {
            let (it, jt) = (mode / n_tan, mode % n_tan);
            let (pit, pjt) = grid.partner(it, jt);
            let pm = pit * n_tan + pjt;
            if pm < mode {
                continue;
            }
            let a = field.profile(c, mode);
            let b = field.profile(c, pm);
            let d = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y.conj()).norm())
                .fold(0.0, f64::max)
                / scale;
            if d > worst.0 {
                worst = (d, it, jt);
            }
        }
    }
    worst
}

/// Inverse transform; rejects coefficients that do not describe a real field.
pub fn inverse(field: &SpectralField) -> Result<PhysicalField> {
    let (defect, it, jt) = hermitian_defect(field);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            mode: field.grid().mode_tag(it, jt),
            defect,
        });
    }
    Ok(inverse_real_part(field))
}

/// Inverse transform keeping the real part without the Hermitian check.
pub fn inverse_real_part(field: &SpectralField) -> PhysicalField {
    let grid = field.grid().clone();
    let mut data = field.data().to_vec();
    transform_blocks(&mut data, &grid, FftDirection::Inverse);
    let real = data.into_iter().map(|z| z.re).collect();
    PhysicalField::from_vec(grid, field.components(), real).expect("shape preserved")
}

/// Time-mean part `P u`: keeps the `k = 0` coefficients.
pub fn steady_part(field: &SpectralField) -> SpectralField {
    let grid = field.grid().clone();
    field.map_modes(|it, _| if grid.time_index(it) == 0 { 1.0.into() } else { 0.0.into() })
}

/// Purely oscillatory part `(1 - P) u`.
pub fn oscillatory_part(field: &SpectralField) -> SpectralField {
    let grid = field.grid().clone();
    field.map_modes(|it, _| if grid.time_index(it) == 0 { 0.0.into() } else { 1.0.into() })
}

pub fn steady_part_jet(jet: &NormalJet) -> NormalJet {
    let grid = jet.grid().clone();
    jet.map_modes(|it, _| if grid.time_index(it) == 0 { 1.0.into() } else { 0.0.into() })
}

pub fn oscillatory_part_jet(jet: &NormalJet) -> NormalJet {
    let grid = jet.grid().clone();
    jet.map_modes(|it, _| if grid.time_index(it) == 0 { 0.0.into() } else { 1.0.into() })
}

/// Physical-space time mean, computed through the coefficients.
pub fn time_mean(field: &PhysicalField) -> PhysicalField {
    inverse_real_part(&steady_part(&forward(field)))
}

/// Direction of a spectral derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Time,
    Tangential(usize),
}

/// Multiplier of `d/dt` or `d/dx_j` at storage index `(it, jt)`. Odd
/// tangential derivatives vanish on the Nyquist line.
pub fn derivative_symbol(grid: &Grid, axis: Axis, order: u32, it: usize, jt: usize) -> Complex64 {
    let i = Complex64::i();
    match axis {
        Axis::Time => (i * grid.frequency(it)).powu(order),
        Axis::Tangential(d) => {
            if order % 2 == 1 && grid.tangential_index(jt)[d] == -((grid.tangential() / 2) as i64) {
                return 0.0.into();
            }
            (i * grid.wavevector(jt)[d]).powu(order)
        }
    }
}

pub fn derivative(field: &SpectralField, axis: Axis, order: u32) -> SpectralField {
    let grid = field.grid().clone();
    field.map_modes(|it, jt| derivative_symbol(&grid, axis, order, it, jt))
}

pub fn derivative_jet(jet: &NormalJet, axis: Axis, order: u32) -> NormalJet {
    let grid = jet.grid().clone();
    jet.map_modes(|it, jt| derivative_symbol(&grid, axis, order, it, jt))
}

/// Shift in time by `steps` samples: `u(t) -> u(t + steps tau / nt)`.
pub fn time_shift_jet(jet: &NormalJet, steps: i64) -> NormalJet {
    let grid = jet.grid().clone();
    let dt = grid.tau() * steps as f64 / grid.nt() as f64;
    jet.map_modes(|it, _| Complex64::from_polar(1.0, grid.frequency(it) * dt))
}

/// Zero-pads coefficients onto a finer grid and returns physical samples.
pub fn resampled_physical(field: &SpectralField, target: Arc<Grid>) -> Result<PhysicalField> {
    inverse(&field.resample(target)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::NormalGrid;
    use std::f64::consts::PI;

    fn grid(dim: usize) -> Arc<Grid> {
        let normal = NormalGrid::from_nodes(vec![0.0, 0.3, 1.0]).unwrap();
        Arc::new(Grid::new(2.0 * PI, dim, 3, 8, 2.0 * PI, normal).unwrap())
    }

    #[test]
    fn single_mode_lands_on_its_coefficient() {
        let g = grid(2);
        let f = PhysicalField::from_fn(g.clone(), 1, |_, t, x, _| (2.0 * t + 3.0 * x[0]).cos());
        let s = forward(&f);
        let it = g.time_position(2).unwrap();
        let jt = g.tangential_position(&[3]).unwrap();
        let m = it * g.n_tan() + jt;
        assert!((s.profile(0, m)[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let back = inverse(&s).unwrap();
        let err = back
            .data()
            .iter()
            .zip(f.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn time_derivative_of_sine() {
        let g = grid(3);
        let f = PhysicalField::from_fn(g.clone(), 1, |_, t, x, _| (2.0 * t).sin() * x[1].cos());
        let d = inverse(&derivative(&forward(&f), Axis::Time, 1)).unwrap();
        let exact = PhysicalField::from_fn(g, 1, |_, t, x, _| 2.0 * (2.0 * t).cos() * x[1].cos());
        let err = d
            .data()
            .iter()
            .zip(exact.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = grid(2);
        let mut s = SpectralField::zeros(g.clone(), 1);
        let jt = g.tangential_position(&[1]).unwrap();
        s.profile_mut(0, jt)[0] = Complex64::new(1.0, 0.0);
        assert!(matches!(inverse(&s), Err(Error::NotHermitian { .. })));
    }
}

//! Fourier symbols of the half-space problem: the boundary pressure
//! coefficient, the bounded multipliers, normal profiles and the parabolic
//! dyadic partition.

pub mod audit;
pub mod boundary;
pub mod multipliers;
pub mod partition;

use num_complex::Complex64;

use crate::spectral::grid::Grid;

/// A point `(k, xi)` of the dual lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePoint {
    pub frequency: f64,
    pub wavevector: Vec<f64>,
}

impl ModePoint {
    pub fn new(frequency: f64, wavevector: Vec<f64>) -> Self {
        Self {
            frequency,
            wavevector,
        }
    }

    pub fn from_grid(grid: &Grid, it: usize, jt: usize) -> Self {
        Self::new(grid.frequency(it), grid.wavevector(jt))
    }

    /// `|xi|`.
    pub fn wavenumber(&self) -> f64 {
        self.wavevector.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `sqrt(|xi|^2 + i k)` on the principal branch.
    pub fn decay(&self) -> Complex64 {
        principal_sqrt(self.wavenumber().powi(2), self.frequency)
    }

    /// `lambda - |xi|`, computed without cancellation.
    pub fn decay_gap(&self) -> Complex64 {
        let lam = self.decay();
        Complex64::new(0.0, self.frequency) / (lam + self.wavenumber())
    }
}

/// Principal square root of `a + i b` for `a >= 0`, accurate in both parts.
pub fn principal_sqrt(a: f64, b: f64) -> Complex64 {
    if a == 0.0 && b == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = a.hypot(b);
    if a >= 0.0 {
        let s = ((r + a) * 0.5).sqrt();
        Complex64::new(s, b / (2.0 * s))
    } else {
        let s = ((r - a) * 0.5).sqrt();
        Complex64::new(b.abs() / (2.0 * s), s.copysign(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_sqrt_has_nonnegative_real_part() {
        for &(a, b) in &[(0.0, 1.0), (0.0, -3.0), (4.0, 1e-12), (1e-8, 1e4), (2.0, -7.0)] {
            let z = principal_sqrt(a, b);
            assert!(z.re >= 0.0);
            let sq = z * z;
            assert!((sq - Complex64::new(a, b)).norm() <= 1e-14 * a.hypot(b));
        }
    }

    #[test]
    fn decay_gap_is_lambda_minus_xi() {
        let m = ModePoint::new(3.0, vec![2.0]);
        let direct = m.decay() - 2.0;
        assert!((m.decay_gap() - direct).norm() < 1e-14);
        let far = ModePoint::new(1.0, vec![1e5]);
        assert!((far.decay_gap() - Complex64::new(0.0, 0.5e-5)).norm() < 1e-15);
    }
}

//! Closed-form normal profiles of the homogeneous Stokes problem with
//! prescribed boundary values, one Fourier mode at a time.
//!
//! With `E(x) = e^{-lambda x} - e^{-|xi| x}` the oscillatory profiles read
//! `v = h' e^{-lambda x} + (xi q0 / k) E`, `w = h_n e^{-lambda x} - (|xi| q0 / (i k)) E`,
//! `p = q0 e^{-|xi| x}`. `E` is evaluated through `expm1` so that the
//! near-cancellation for `|xi|^2 >> |k|` costs no accuracy.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::grid::Grid;
use crate::symbols::boundary::{pressure_coefficient, PressureSign};
use crate::symbols::ModePoint;

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let s = (0.5 * b).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * s * s, a.exp() * b.sin())
}

/// Value, first and second normal derivative at one point.
pub type Jet3 = [Complex64; 3];

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Oscillatory {
        lam: Complex64,
        gap: Complex64,
        q0: Complex64,
    },
    /// `k != 0`, `xi = 0`: pure shear layer.
    OscillatoryMean { lam: Complex64 },
    Steady { q: Complex64 },
    /// `k = 0`, `xi = 0`: constant state.
    SteadyMean,
}

/// Boundary solution at one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProfile {
    mode: ModePoint,
    h_tan: Vec<Complex64>,
    h_n: Complex64,
    kind: Kind,
}

/// Profiles sampled at one normal position.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSample {
    /// Velocity jets, tangential components first, normal last.
    pub velocity: Vec<Jet3>,
    /// Pressure value and normal derivative.
    pub pressure: [Complex64; 2],
}

impl BoundaryProfile {
    /// `compat_scale` is the magnitude below which `h_n` at `xi = 0` counts as
    /// zero.
    pub fn new(
        mode: &ModePoint,
        h_tan: &[Complex64],
        h_n: Complex64,
        sign: PressureSign,
        compat_scale: f64,
    ) -> Result<Self> {
        let r = mode.wavenumber();
        let kind = if r == 0.0 {
            if h_n.norm() > compat_scale {
                return Err(Error::untagged_compatibility(
                    "normal boundary datum at xi = 0",
                    h_n.norm(),
                ));
            }
            if mode.frequency == 0.0 {
                Kind::SteadyMean
            } else {
                Kind::OscillatoryMean { lam: mode.decay() }
            }
        } else if mode.frequency == 0.0 {
            let dot: Complex64 = mode.wavevector.iter().zip(h_tan).map(|(x, h)| h * x).sum();
            Kind::Steady {
                q: 2.0 * (r * h_n - Complex64::i() * dot),
            }
        } else {
            Kind::Oscillatory {
                lam: mode.decay(),
                gap: mode.decay_gap(),
                q0: pressure_coefficient(mode, h_tan, h_n, sign)?.total(),
            }
        };
        Ok(Self {
            mode: mode.clone(),
            h_tan: h_tan.to_vec(),
            h_n,
            kind,
        })
    }

    /// Coefficient of `e^{-|xi| x}` in the pressure.
    pub fn pressure_coefficient(&self) -> Complex64 {
        match self.kind {
            Kind::Oscillatory { q0, .. } => q0,
            Kind::Steady { q } => q,
            _ => Complex64::default(),
        }
    }

    pub fn eval(&self, x: f64) -> ProfileSample {
        let r = self.mode.wavenumber();
        let k = self.mode.frequency;
        let i = Complex64::i();
        let zero = Complex64::default();
        match self.kind {
            Kind::Oscillatory { lam, gap, q0 } => {
                let el = (-lam * x).exp();
                let er = (-r * x).exp();
                let e = expm1(-gap * x) * er;
                let de = -lam * e - gap * er;
                let dde = lam * lam * e + i * k * er;
                let heat = [el, -lam * el, lam * lam * el];
                let diff = [e, de, dde];
                let mut velocity: Vec<Jet3> = self
                    .mode
                    .wavevector
                    .iter()
                    .zip(&self.h_tan)
                    .map(|(&xi, &h)| {
                        let c = q0 * (xi / k);
                        std::array::from_fn(|d| h * heat[d] + c * diff[d])
                    })
                    .collect();
                let cw = q0 * r / (i * k);
                velocity.push(std::array::from_fn(|d| self.h_n * heat[d] - cw * diff[d]));
                ProfileSample {
                    velocity,
                    pressure: [q0 * er, -r * q0 * er],
                }
            }
            Kind::OscillatoryMean { lam } => {
                let el = (-lam * x).exp();
                let mut velocity: Vec<Jet3> = self
                    .h_tan
                    .iter()
                    .map(|&h| [h * el, -lam * h * el, lam * lam * h * el])
                    .collect();
                velocity.push([zero; 3]);
                ProfileSample {
                    velocity,
                    pressure: [zero; 2],
                }
            }
            Kind::Steady { q } => {
                let er = (-r * x).exp();
                // (a + b x) e^{-r x} and its first two derivatives.
                let linear = |a: Complex64, b: Complex64| -> Jet3 {
                    let y = a + b * x;
                    [y * er, (b - r * y) * er, (r * r * y - 2.0 * r * b) * er]
                };
                let mut velocity: Vec<Jet3> = self
                    .mode
                    .wavevector
                    .iter()
                    .zip(&self.h_tan)
                    .map(|(&xi, &h)| linear(h, -i * xi * q / (2.0 * r)))
                    .collect();
                velocity.push(linear(self.h_n, 0.5 * q));
                ProfileSample {
                    velocity,
                    pressure: [q * er, -r * q * er],
                }
            }
            Kind::SteadyMean => {
                let mut velocity: Vec<Jet3> = self.h_tan.iter().map(|&h| [h, zero, zero]).collect();
                velocity.push([zero; 3]);
                ProfileSample {
                    velocity,
                    pressure: [zero; 2],
                }
            }
        }
    }
}

/// Boundary data at storage mode `(it, jt)` of a boundary field stored as
/// `n` components.
pub fn boundary_values(h: &crate::spectral::SpectralField, mode: usize) -> (Vec<Complex64>, Complex64) {
    let n = h.components();
    let tan = (0..n - 1).map(|c| h.profile(c, mode)[0]).collect();
    (tan, h.profile(n - 1, mode)[0])
}

pub fn mode_point(grid: &Grid, mode: usize) -> ModePoint {
    let n_tan = grid.n_tan();
    ModePoint::from_grid(grid, mode / n_tan, mode % n_tan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residuals(p: &BoundaryProfile, x: f64) -> f64 {
        let s = p.eval(x);
        let m = &p.mode;
        let r2 = m.wavenumber().powi(2);
        let i = Complex64::i();
        let k = m.frequency;
        let n = s.velocity.len();
        let mut worst: f64 = 0.0;
        for (d, xi) in m.wavevector.iter().enumerate() {
            let u = s.velocity[d];
            let res = i * k * u[0] + r2 * u[0] - u[2] + i * xi * s.pressure[0];
            worst = worst.max(res.norm());
        }
        let w = s.velocity[n - 1];
        worst = worst.max((i * k * w[0] + r2 * w[0] - w[2] + s.pressure[1]).norm());
        let div: Complex64 = m
            .wavevector
            .iter()
            .enumerate()
            .map(|(d, xi)| i * xi * s.velocity[d][0])
            .sum::<Complex64>()
            + w[1];
        worst.max(div.norm())
    }

    #[test]
    fn profiles_solve_the_mode_equations() {
        let h_tan = [Complex64::new(0.4, -0.2), Complex64::new(-1.0, 0.5)];
        let h_n = Complex64::new(0.7, 0.1);
        for &(k, xi) in &[(1.0, [1.0, 0.0]), (-5.0, [2.0, -3.0]), (0.0, [1.0, 1.0]), (16.0, [40.0, 9.0])] {
            let mode = ModePoint::new(k, xi.to_vec());
            let p = BoundaryProfile::new(&mode, &h_tan, h_n, PressureSign::Correct, 0.0).unwrap();
            let s0 = p.eval(0.0);
            assert!((s0.velocity[0][0] - h_tan[0]).norm() < 1e-15);
            assert!((s0.velocity[2][0] - h_n).norm() < 1e-15);
            for &x in &[0.0, 1e-3, 0.1, 0.7, 3.0] {
                let scale = 1.0 + mode.decay().norm().powi(2);
                assert!(residuals(&p, x) < 1e-12 * scale, "k={k} xi={xi:?} x={x}");
            }
        }
    }

    #[test]
    fn mean_mode_needs_zero_normal_datum() {
        let mode = ModePoint::new(2.0, vec![0.0]);
        let r = BoundaryProfile::new(&mode, &[1.0.into()], 0.5.into(), PressureSign::Correct, 1e-12);
        assert!(matches!(r, Err(Error::Compatibility { .. })));
    }

    #[test]
    fn expm1_small_argument() {
        let z = Complex64::new(1e-10, -2e-10);
        assert!((expm1(z) - z).norm() < 1e-19);
    }
}

//! Boundary pressure coefficient of the oscillatory boundary problem.
//!
//! For boundary data `(h', h_n)` at a mode with `xi != 0` the pressure is
//! `q0 e^{-|xi| x_n}` with
//!
//! `q0 = -i (|xi| + lambda) (xi/|xi|).h' + (lambda + |xi| + i k/|xi|) h_n`.

use num_complex::Complex64;

use super::ModePoint;
use crate::error::{Error, ModeTag, Result};

/// Which sign the tangential term of `q0` carries. `Flipped` is a fault
/// injection used to check that the verification suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PressureSign {
    #[default]
    Correct,
    Flipped,
}

/// `q0` split into the part that stays bounded as `k -> 0` and the part
/// carrying the time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureCoefficient {
    pub bounded: Complex64,
    pub time: Complex64,
}

impl PressureCoefficient {
    pub fn total(&self) -> Complex64 {
        self.bounded + self.time
    }
}

fn untagged() -> ModeTag {
    ModeTag {
        time: 0,
        tangential: Vec::new(),
    }
}

pub fn pressure_coefficient(
    mode: &ModePoint,
    h_tan: &[Complex64],
    h_n: Complex64,
    sign: PressureSign,
) -> Result<PressureCoefficient> {
    let r = mode.wavenumber();
    if r == 0.0 {
        return Err(Error::Singular {
            mode: untagged(),
            what: "boundary pressure needs xi != 0",
        });
    }
    if h_tan.len() != mode.wavevector.len() {
        return Err(Error::Shape(format!(
            "{} tangential data components for a {}-dimensional wavevector",
            h_tan.len(),
            mode.wavevector.len()
        )));
    }
    let lam = mode.decay();
    let i = Complex64::i();
    let xi_dot_h: Complex64 = mode
        .wavevector
        .iter()
        .zip(h_tan)
        .map(|(x, h)| h * (x / r))
        .sum();
    let tangential = -i * (r + lam) * xi_dot_h;
    let tangential = match sign {
        PressureSign::Correct => tangential,
        PressureSign::Flipped => -tangential,
    };
    Ok(PressureCoefficient {
        bounded: tangential + (lam + r) * h_n,
        time: i * (mode.frequency / r) * h_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Imposes the boundary values and the divergence constraint on the
    /// general decaying solution and solves the resulting system directly.
    fn oracle_q0(mode: &ModePoint, h_tan: Complex64, h_n: Complex64) -> Complex64 {
        let r = mode.wavenumber();
        let xi = mode.wavevector[0];
        let k = mode.frequency;
        let lam = mode.decay();
        let i = Complex64::i();
        // Unknowns (a, b, c): p = a e^{-r x}, v = -(xi a / k) e^{-r x} + b e^{-lam x},
        // w = (r a / (i k)) e^{-r x} + c e^{-lam x}.
        let mut m = [
            [-Complex64::from(xi / k), 1.0.into(), 0.0.into(), h_tan],
            [r / (i * k), 0.0.into(), 1.0.into(), h_n],
            [0.0.into(), i * xi, -lam, 0.0.into()],
        ];
        for col in 0..3 {
            let piv = (col..3).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())).unwrap();
            m.swap(col, piv);
            for row in 0..3 {
                if row != col {
                    let f = m[row][col] / m[col][col];
                    for c in 0..4 {
                        let t = m[col][c];
                        m[row][c] -= f * t;
                    }
                }
            }
        }
        m[0][3] / m[0][0]
    }

    #[test]
    fn matches_linear_solve_of_boundary_conditions() {
        for &(k, xi) in &[(1.0, 1.0), (-3.0, 2.0), (7.0, -5.0), (0.25, 0.5), (-16.0, 31.0)] {
            let mode = ModePoint::new(k, vec![xi]);
            let (ht, hn) = (Complex64::new(0.3, -1.1), Complex64::new(-0.7, 0.2));
            let q = pressure_coefficient(&mode, &[ht], hn, PressureSign::Correct)
                .unwrap()
                .total();
            let o = oracle_q0(&mode, ht, hn);
            assert!((q - o).norm() <= 1e-12 * o.norm(), "k={k} xi={xi}: {q} vs {o}");
        }
    }

    #[test]
    fn reduces_to_factored_form() {
        let mode = ModePoint::new(2.0, vec![1.0, -3.0]);
        let ht = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)];
        let hn = Complex64::new(0.0, 1.5);
        let q = pressure_coefficient(&mode, &ht, hn, PressureSign::Correct).unwrap();
        let r = mode.wavenumber();
        let lam = mode.decay();
        let dot: Complex64 = ht.iter().zip(&mode.wavevector).map(|(h, x)| h * x).sum();
        let factored = (r + lam) / r * (lam * hn - Complex64::i() * dot);
        assert!((q.total() - factored).norm() < 1e-13);
        assert!((q.time - Complex64::i() * 2.0 / r * hn).norm() < 1e-15);
    }

    #[test]
    fn flipped_sign_changes_only_the_tangential_term() {
        let mode = ModePoint::new(1.0, vec![2.0]);
        let a = pressure_coefficient(&mode, &[1.0.into()], 0.0.into(), PressureSign::Correct).unwrap();
        let b = pressure_coefficient(&mode, &[1.0.into()], 0.0.into(), PressureSign::Flipped).unwrap();
        assert!((a.total() + b.total()).norm() < 1e-15);
        let c = pressure_coefficient(&mode, &[0.0.into()], 1.0.into(), PressureSign::Flipped).unwrap();
        let d = pressure_coefficient(&mode, &[0.0.into()], 1.0.into(), PressureSign::Correct).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn zero_wavevector_is_singular() {
        let mode = ModePoint::new(1.0, vec![0.0]);
        assert!(pressure_coefficient(&mode, &[0.0.into()], 0.0.into(), PressureSign::Correct).is_err());
    }
}

//! Bounded multipliers arising in the boundary solution and normal profiles.

use num_complex::Complex64;

use super::principal_sqrt;
use crate::error::{Error, ModeTag, Result};

fn singular(what: &'static str) -> Error {
    Error::Singular {
        mode: ModeTag {
            time: 0,
            tangential: Vec::new(),
        },
        what,
    }
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|xi| / sqrt(|xi|^2 + i eta)`.
pub fn ratio_m(eta: f64, xi: &[f64]) -> Result<Complex64> {
    let r = norm(xi);
    if r == 0.0 && eta == 0.0 {
        return Err(singular("ratio undefined at the origin"));
    }
    Ok(r / principal_sqrt(r * r, eta))
}

/// `sqrt(|xi|^2 + i eta) / (|xi| + |eta|^{1/2}) * xi / |xi|`, one entry per
/// tangential direction.
pub fn ratio_m1(eta: f64, xi: &[f64]) -> Result<Vec<Complex64>> {
    let r = norm(xi);
    if r == 0.0 {
        return Err(singular("direction xi/|xi| undefined at xi = 0"));
    }
    let s = ratio_m2(eta, xi)?;
    Ok(xi.iter().map(|x| s * (x / r)).collect())
}

/// `sqrt(|xi|^2 + i eta) / (|xi| + |eta|^{1/2})`.
pub fn ratio_m2(eta: f64, xi: &[f64]) -> Result<Complex64> {
    let r = norm(xi);
    let d = r + eta.abs().sqrt();
    if d == 0.0 {
        return Err(singular("ratio undefined at the origin"));
    }
    Ok(principal_sqrt(r * r, eta) / d)
}

/// `(lambda x)^power e^{-lambda x}` with `lambda = sqrt(|xi|^2 + i eta)`.
pub fn heat_profile(eta: f64, xi: &[f64], x: f64, power: u32) -> Complex64 {
    let r = norm(xi);
    let z = principal_sqrt(r * r, eta) * x;
    z.powu(power) * (-z).exp()
}

/// `(|xi| x)^power e^{-|xi| x}`.
pub fn tangential_profile(xi: &[f64], x: f64, power: u32) -> f64 {
    let z = norm(xi) * x;
    z.powi(power as i32) * (-z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_m_is_contractive() {
        for &eta in &[-50.0, -1.0, 0.0, 0.3, 12.0] {
            for &x in &[0.1, 1.0, 7.0] {
                let m = ratio_m(eta, &[x, -0.5 * x]).unwrap();
                assert!(m.norm() <= 1.0 + 1e-15);
            }
        }
        assert!((ratio_m(0.0, &[2.0]).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn ratios_reject_the_origin() {
        assert!(ratio_m(0.0, &[0.0]).is_err());
        assert!(ratio_m1(3.0, &[0.0]).is_err());
        assert!(ratio_m2(0.0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn profiles_at_boundary() {
        assert_eq!(heat_profile(1.0, &[1.0], 0.0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(tangential_profile(&[3.0], 0.0, 1), 0.0);
    }
}

//! Smooth dyadic partition of unity in the parabolic scale
//! `<eta, xi> = (eta^2 + |xi|^{4m})^{1/(4m)}`.

use crate::error::{Error, Result};

/// Anisotropic homogeneous scale with time weight `m` (`m = 1` is parabolic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicScale {
    m: u32,
}

impl ParabolicScale {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::NormSpec("parabolic weight m must be >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn parabolic() -> Self {
        Self { m: 1 }
    }

    pub fn weight(&self) -> u32 {
        self.m
    }

    pub fn eval(&self, eta: f64, xi: &[f64]) -> f64 {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        let p = 2 * self.m as i32;
        let a = eta.abs();
        let b = r2.powi(self.m as i32);
        // (a^2 + b^2)^{1/(4m)} with b = |xi|^{2m}, scaled to avoid overflow.
        let big = a.max(b);
        if big == 0.0 {
            return 0.0;
        }
        let (sa, sb) = (a / big, b / big);
        big.powf(1.0 / p as f64) * (sa * sa + sb * sb).powf(1.0 / (2 * p) as f64)
    }
}

/// Compactly supported bump on `1/2 < |y| < 2`.
pub fn bump(y: f64) -> f64 {
    let a = y.abs();
    if a <= 0.5 || a >= 2.0 {
        return 0.0;
    }
    (-1.0 / ((a - 0.5) * (2.0 - a))).exp()
}

fn shells_near(rho: f64) -> std::ops::RangeInclusive<i32> {
    let c = rho.log2().floor() as i32;
    (c - 1)..=(c + 2)
}

/// `sum_j bump(2^{-j} rho)` over all integers `j`.
pub fn bump_sum(rho: f64) -> f64 {
    if !(rho > 0.0) || !rho.is_finite() {
        return 0.0;
    }
    shells_near(rho).map(|j| bump(rho * 2f64.powi(-j))).sum()
}

/// Partition function `phi_l(rho) = bump(2^{-l} rho) / sum_j bump(2^{-j} rho)`.
pub fn shell_weight(l: i32, rho: f64) -> f64 {
    let b = bump(rho * 2f64.powi(-l));
    if b == 0.0 {
        return 0.0;
    }
    b / bump_sum(rho)
}

/// Shell indices `l` whose support may meet `[rho_min, rho_max]`.
pub fn shell_range(rho_min: f64, rho_max: f64) -> std::ops::RangeInclusive<i32> {
    let lo = if rho_min > 0.0 {
        (rho_min.log2().floor() as i32 - 1).min(0)
    } else {
        0
    };
    let hi = (rho_max.max(1.0).log2().ceil() as i32) + 1;
    lo..=hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_scale_is_homogeneous() {
        let s = ParabolicScale::parabolic();
        let (eta, xi) = (3.0, [1.5, -0.5]);
        let base = s.eval(eta, &xi);
        for &lam in &[0.25, 2.0, 16.0] {
            let scaled = s.eval(lam * lam * eta, &[lam * xi[0], lam * xi[1]]);
            assert!((scaled - lam * base).abs() < 1e-13 * scaled);
        }
        assert!((s.eval(4.0, &[0.0]) - 2.0).abs() < 1e-15);
        assert!((s.eval(0.0, &[3.0, 4.0]) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn partition_sums_to_one() {
        let mut rho = 1e-3;
        while rho < 1e4 {
            let total: f64 = (-12..=16).map(|l| shell_weight(l, rho)).sum();
            assert!((total - 1.0).abs() < 1e-14, "rho = {rho}");
            rho *= 1.0137;
        }
    }

    #[test]
    fn bump_support() {
        assert_eq!(bump(0.5), 0.0);
        assert_eq!(bump(2.0), 0.0);
        assert!(bump(1.0) > 0.0);
        assert_eq!(bump(-1.0), bump(1.0));
    }
}

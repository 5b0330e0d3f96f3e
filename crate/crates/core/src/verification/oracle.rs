//! Finite-difference reference solution of the per-mode boundary value
//! problem, independent of the closed-form profiles.
//!
//! The system `lam^2 v - v'' + i xi p = 0`, `lam^2 w - w'' + p' = 0`,
//! `i xi . v + w' = 0` splits into the transverse tangential velocity, which
//! solves `(d^2 - lam^2) v = 0`, and the pair `(s, w)` with `s = xi . v / |xi|`,
//! where `w` satisfies `(d^2 - |xi|^2)(d^2 - lam^2) w = 0`. The fourth-order
//! problem is factored through `z = (d^2 - lam^2) w`, each factor is a
//! second-order problem discretized with central differences on an
//! exponentially mapped grid, and `s`, `p` are read off by differencing:
//! `s = i w' / |xi|`, `p = z' / |xi|^2`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfspace::boundary::BoundaryProfile;
use crate::symbols::boundary::PressureSign;
use crate::symbols::ModePoint;

/// Oracle discretization: `cells` intervals of the mapped coordinate on
/// `[0, x_max]`, truncated earlier when every branch has decayed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    pub cells: usize,
    pub x_max: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            cells: 1024,
            x_max: 20.0,
        }
    }
}

/// Decay lengths beyond which the domain is cut.
const DECAY_LENGTHS: f64 = 40.0;

/// Oracle profiles on its own nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleProfiles {
    pub nodes: Vec<f64>,
    /// Velocity, tangential components first, normal last.
    pub velocity: Vec<Vec<Complex64>>,
    pub pressure: Vec<Complex64>,
}

/// `x(s) = c (e^{a s} - 1)` for `s` in `[0, 1]`, or uniform when `a = 0`.
#[derive(Debug, Clone, Copy)]
struct Map {
    a: f64,
    c: f64,
    x_end: f64,
}

impl Map {
    /// Spacing proportional to `x + 1/fast`, so every decay length is
    /// resolved by the same number of cells.
    fn new(x_end: f64, fast: f64) -> Self {
        let a = (x_end * fast).ln_1p();
        if a < 1e-6 {
            return Self { a: 0.0, c: x_end, x_end };
        }
        Self { a, c: x_end / a.exp_m1(), x_end }
    }

    fn x(&self, s: f64) -> f64 {
        if self.a == 0.0 {
            self.x_end * s
        } else {
            self.c * (self.a * s).exp_m1()
        }
    }

    /// `dx/ds` and `d^2x/ds^2`.
    fn jac(&self, s: f64) -> (f64, f64) {
        if self.a == 0.0 {
            (self.x_end, 0.0)
        } else {
            let e = self.c * (self.a * s).exp();
            (self.a * e, self.a * self.a * e)
        }
    }
}

/// Solves `u'' - kappa2 u = rhs` with `u(0) = u0` and the far condition
/// `u' + beta u + gamma = 0` at the last node, by Thomas elimination on the
/// mapped grid. Returns the nodal values.
fn second_order(
    map: &Map,
    cells: usize,
    kappa2: Complex64,
    rhs: &[Complex64],
    u0: Complex64,
    beta: Complex64,
    gamma: Complex64,
) -> Result<Vec<Complex64>> {
    let ds = 1.0 / cells as f64;
    let n = cells + 1;
    // Row i: lo u_{i-1} + di u_i + up u_{i+1} = b_i.
    let mut lo = vec![Complex64::default(); n];
    let mut di = vec![Complex64::default(); n];
    let mut up = vec![Complex64::default(); n];
    let mut b = vec![Complex64::default(); n];
    di[0] = 1.0.into();
    b[0] = u0;
    for i in 1..n {
        let (j1, j2) = map.jac(i as f64 * ds);
        // u_xx = (u_ss - (j2 / j1) u_s) / j1^2.
        let cm = (1.0 / (ds * ds) + j2 / j1 / (2.0 * ds)) / (j1 * j1);
        let cp = (1.0 / (ds * ds) - j2 / j1 / (2.0 * ds)) / (j1 * j1);
        let c0 = -2.0 / (ds * ds * j1 * j1);
        lo[i] = cm.into();
        di[i] = c0 - kappa2;
        up[i] = cp.into();
        b[i] = rhs[i];
        if i == n - 1 {
            // Ghost value from the far condition:
            // (u_{n} - u_{n-2}) / (2 ds j1) + beta u_{n-1} + gamma = 0.
            let g = 2.0 * ds * j1;
            lo[i] += up[i];
            di[i] -= up[i] * beta * g;
            b[i] += up[i] * gamma * g;
            up[i] = Complex64::default();
        }
    }
    for i in 1..n {
        if di[i - 1].norm() == 0.0 {
            return Err(Error::Oracle("singular finite-difference system".into()));
        }
        let f = lo[i] / di[i - 1];
        di[i] -= f * up[i - 1];
        let bp = b[i - 1];
        b[i] -= f * bp;
    }
    let mut u = vec![Complex64::default(); n];
    u[n - 1] = b[n - 1] / di[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = (b[i] - up[i] * u[i + 1]) / di[i];
    }
    if u.iter().any(|z| !z.is_finite()) {
        return Err(Error::Oracle("non-finite oracle profile".into()));
    }
    Ok(u)
}

/// Second-order `du/dx` at every node: central inside, one-sided at the ends.
fn derivative(map: &Map, cells: usize, u: &[Complex64]) -> Vec<Complex64> {
    let ds = 1.0 / cells as f64;
    let n = u.len();
    (0..n)
        .map(|i| {
            let us = if i == 0 {
                (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * ds)
            } else if i == n - 1 {
                (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * ds)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * ds)
            };
            us / map.jac(i as f64 * ds).0
        })
        .collect()
}

/// Finite-difference solution for boundary data `(h_tan, h_n)` at `mode`.
pub fn bvp_oracle(mode: &ModePoint, h_tan: &[Complex64], h_n: Complex64, grid: OracleGrid) -> Result<OracleProfiles> {
    if grid.cells < 8 {
        return Err(Error::Oracle("oracle needs at least 8 cells".into()));
    }
    let r = mode.wavenumber();
    let lam = mode.decay();
    let lam2 = Complex64::new(r * r, mode.frequency);
    if r == 0.0 && mode.frequency == 0.0 {
        return Err(Error::Oracle("no decaying solution at k = 0, xi = 0".into()));
    }
    if r == 0.0 && h_n.norm() > 0.0 {
        return Err(Error::Oracle("normal boundary datum must vanish at xi = 0".into()));
    }
    let slow = if r > 0.0 { r.min(lam.re) } else { lam.re };
    let fast = r.max(lam.norm());
    let x_end = grid.x_max.min(DECAY_LENGTHS / slow);
    let map = Map::new(x_end, fast);
    let cells = grid.cells;
    let nodes: Vec<f64> = (0..=cells).map(|i| map.x(i as f64 / cells as f64)).collect();
    let zero = vec![Complex64::default(); cells + 1];
    let nt = h_tan.len();

    let zc = Complex64::default();
    if r == 0.0 {
        let mut velocity = Vec::with_capacity(nt + 1);
        for &h in h_tan {
            velocity.push(second_order(&map, cells, lam2, &zero, h, lam, zc)?);
        }
        velocity.push(zero.clone());
        return Ok(OracleProfiles {
            nodes,
            velocity,
            pressure: zero,
        });
    }

    // Longitudinal and transverse parts of the tangential datum.
    let unit: Vec<f64> = mode.wavevector.iter().map(|x| x / r).collect();
    let h_s: Complex64 = unit.iter().zip(h_tan).map(|(e, h)| h * e).sum();

    let z1 = second_order(&map, cells, (r * r).into(), &zero, 1.0.into(), r.into(), zc)?;
    let w0 = second_order(&map, cells, lam2, &zero, h_n, lam, zc)?;
    // The decaying solution forced by z1 satisfies w1' + lam w1 = -z1 / (lam + |xi|).
    let w1 = second_order(&map, cells, lam2, &z1, zc, lam, z1[cells] / (lam + r))?;
    let dw0 = derivative(&map, cells, &w0);
    let dw1 = derivative(&map, cells, &w1);
    // w'(0) = -i |xi| s(0) fixes the amplitude of z.
    let target = -Complex64::i() * r * h_s;
    if dw1[0].norm() == 0.0 {
        return Err(Error::Oracle("singular amplitude condition".into()));
    }
    let c = (target - dw0[0]) / dw1[0];
    let w: Vec<Complex64> = w0.iter().zip(&w1).map(|(a, b)| a + c * b).collect();
    let dw: Vec<Complex64> = dw0.iter().zip(&dw1).map(|(a, b)| a + c * b).collect();
    let s: Vec<Complex64> = dw.iter().map(|d| Complex64::i() * d / r).collect();
    let dz1 = derivative(&map, cells, &z1);
    let pressure: Vec<Complex64> = dz1.iter().map(|d| c * d / (r * r)).collect();

    let mut velocity = Vec::with_capacity(nt + 1);
    for (d, &h) in h_tan.iter().enumerate() {
        let transverse = h - h_s * unit[d];
        let vt = if transverse.norm() > 0.0 {
            second_order(&map, cells, lam2, &zero, transverse, lam, zc)?
        } else {
            zero.clone()
        };
        velocity.push(vt.iter().zip(&s).map(|(a, b)| a + unit[d] * b).collect());
    }
    velocity.push(w);
    Ok(OracleProfiles {
        nodes,
        velocity,
        pressure,
    })
}

/// Oracle at `cells` and `2 cells` combined by Richardson extrapolation,
/// sampled on the coarse nodes.
pub fn extrapolated_oracle(
    mode: &ModePoint,
    h_tan: &[Complex64],
    h_n: Complex64,
    grid: OracleGrid,
) -> Result<OracleProfiles> {
    let coarse = bvp_oracle(mode, h_tan, h_n, grid)?;
    let fine = bvp_oracle(mode, h_tan, h_n, OracleGrid { cells: 2 * grid.cells, ..grid })?;
    let mix = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
        a.iter().enumerate().map(|(i, c)| (4.0 * b[2 * i] - c) / 3.0).collect()
    };
    Ok(OracleProfiles {
        nodes: coarse.nodes.clone(),
        velocity: coarse.velocity.iter().zip(&fine.velocity).map(|(a, b)| mix(a, b)).collect(),
        pressure: mix(&coarse.pressure, &fine.pressure),
    })
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Relative max-norm distance of two profile sets on the same nodes; the
/// velocity and pressure are each scaled by their own size.
fn profile_distance(a: &OracleProfiles, b: &OracleProfiles) -> f64 {
    let vel_scale = a.velocity.iter().map(|c| max_abs(c)).fold(0.0, f64::max);
    let vel = a
        .velocity
        .iter()
        .zip(&b.velocity)
        .map(|(x, y)| max_abs_diff(x, y))
        .fold(0.0, f64::max);
    let p_scale = max_abs(&a.pressure);
    let pres = max_abs_diff(&a.pressure, &b.pressure);
    let rel = |d: f64, s: f64| if s > 0.0 { d / s } else { d };
    rel(vel, vel_scale).max(rel(pres, p_scale.max(vel_scale)))
}

/// Closed-form profiles sampled on the oracle's nodes.
pub fn analytic_profiles(
    mode: &ModePoint,
    h_tan: &[Complex64],
    h_n: Complex64,
    sign: PressureSign,
    nodes: &[f64],
) -> Result<OracleProfiles> {
    let profile = BoundaryProfile::new(mode, h_tan, h_n, sign, 0.0)?;
    let n = h_tan.len() + 1;
    let mut velocity = vec![Vec::with_capacity(nodes.len()); n];
    let mut pressure = Vec::with_capacity(nodes.len());
    for &x in nodes {
        let s = profile.eval(x);
        for (c, jet) in s.velocity.iter().enumerate() {
            velocity[c].push(jet[0]);
        }
        pressure.push(s.pressure[0]);
    }
    Ok(OracleProfiles {
        nodes: nodes.to_vec(),
        velocity,
        pressure,
    })
}

/// One mode's comparison of the closed-form and finite-difference profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub frequency: f64,
    pub wavevector: Vec<f64>,
    /// Relative distance between closed form and extrapolated oracle.
    pub relative_error: f64,
    /// Observed order of the raw oracle from three successive grids.
    pub order: f64,
}

/// Compares the closed-form profiles (with the given pressure sign) against
/// the oracle at one mode.
pub fn compare_mode(
    mode: &ModePoint,
    h_tan: &[Complex64],
    h_n: Complex64,
    sign: PressureSign,
    grid: OracleGrid,
) -> Result<OracleComparison> {
    let reference = extrapolated_oracle(mode, h_tan, h_n, grid)?;
    let analytic = analytic_profiles(mode, h_tan, h_n, sign, &reference.nodes)?;
    let relative_error = profile_distance(&analytic, &reference);
    let order = convergence_order(mode, h_tan, h_n, grid)?;
    Ok(OracleComparison {
        frequency: mode.frequency,
        wavevector: mode.wavevector.clone(),
        relative_error,
        order,
    })
}

/// `log2` of the ratio of successive differences on `cells`, `2 cells` and
/// `4 cells`, each restricted to the coarse nodes.
pub fn convergence_order(mode: &ModePoint, h_tan: &[Complex64], h_n: Complex64, grid: OracleGrid) -> Result<f64> {
    let runs: Vec<OracleProfiles> = [1, 2, 4]
        .iter()
        .map(|f| bvp_oracle(mode, h_tan, h_n, OracleGrid { cells: f * grid.cells, ..grid }))
        .collect::<Result<_>>()?;
    let restrict = |p: &OracleProfiles, step: usize| OracleProfiles {
        nodes: p.nodes.iter().step_by(step).copied().collect(),
        velocity: p.velocity.iter().map(|c| c.iter().step_by(step).copied().collect()).collect(),
        pressure: p.pressure.iter().step_by(step).copied().collect(),
    };
    let d1 = profile_distance(&runs[0], &restrict(&runs[1], 2));
    let d2 = profile_distance(&restrict(&runs[1], 2), &restrict(&runs[2], 4));
    if d1 == 0.0 && d2 == 0.0 {
        return Ok(f64::NAN);
    }
    Ok((d1 / d2).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_data_gives_zero_profiles() {
        let m = ModePoint::new(1.0, vec![1.0]);
        let p = bvp_oracle(&m, &[c(0.0, 0.0)], c(0.0, 0.0), OracleGrid::default()).unwrap();
        assert!(p.velocity.iter().flatten().chain(&p.pressure).all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn agrees_with_closed_form_at_a_low_mode() {
        let m = ModePoint::new(2.0 * PI / (2.0 * PI), vec![1.0]);
        let cmp = compare_mode(&m, &[c(1.0, 0.0)], c(0.0, 0.0), PressureSign::Correct, OracleGrid::default()).unwrap();
        assert!(cmp.relative_error < 1e-6, "{cmp:?}");
        assert!((cmp.order - 2.0).abs() < 0.2, "{cmp:?}");
    }

    #[test]
    fn agrees_in_the_steady_and_mean_cases() {
        let grid = OracleGrid::default();
        let steady = ModePoint::new(0.0, vec![3.0]);
        let cmp = compare_mode(&steady, &[c(0.5, -1.0)], c(0.3, 0.2), PressureSign::Correct, grid).unwrap();
        assert!(cmp.relative_error < 1e-6, "{cmp:?}");
        let mean = ModePoint::new(-4.0, vec![0.0]);
        let cmp = compare_mode(&mean, &[c(0.5, -1.0)], c(0.0, 0.0), PressureSign::Correct, grid).unwrap();
        assert!(cmp.relative_error < 1e-6, "{cmp:?}");
    }

    #[test]
    fn detects_a_flipped_pressure_sign() {
        let m = ModePoint::new(3.0, vec![2.0]);
        let cmp = compare_mode(&m, &[c(1.0, 0.5)], c(0.2, 0.0), PressureSign::Flipped, OracleGrid::default()).unwrap();
        assert!(cmp.relative_error > 1e-2, "{cmp:?}");
    }
}

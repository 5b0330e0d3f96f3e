//! The three building blocks of the solution operator: the Dirichlet heat
//! lift of the force, the divergence corrector, and the boundary solve.

use std::sync::Arc;

use num_complex::Complex64;

use super::boundary::{boundary_values, mode_point, BoundaryProfile};
use super::halfline::{HalfLine, Reflection};
use super::ops::divergence;
use super::{assemble, mode_is_zero, ModeBlocks, ModeSet};
use crate::error::{Error, Result};
use crate::spectral::{Grid, NormalJet, SpectralField};
use crate::symbols::boundary::PressureSign;
use crate::symbols::ModePoint;

/// Solves `d_t v - Delta v = f` in the half-space on the selected modes by
/// reflecting `f` through the image chosen per mode; returns the velocity
/// jet `[v, d_n v, d_n^2 v]`.
pub fn heat_lift<R>(force: &SpectralField, line: &HalfLine, modes: ModeSet, image: R) -> Result<NormalJet>
where
    R: Fn(&ModePoint) -> Reflection + Sync,
{
    let grid = force.grid().clone();
    let nc = force.components();
    let out = assemble(&grid, &[(nc, 3)], |m| {
        if !modes.contains(&grid, m) || mode_is_zero(&[force], m) {
            return Ok(None);
        }
        let mode = mode_point(&grid, m);
        let lam = mode.decay();
        if lam.norm() == 0.0 {
            return Err(Error::Singular {
                mode: grid.mode_tag(m / grid.n_tan(), m % grid.n_tan()),
                what: "heat lift at k = 0, xi = 0",
            });
        }
        let refl = image(&mode);
        let mut block = vec![vec![Vec::new(); nc]; 3];
        for c in 0..nc {
            let [v, dv, ddv] = line.resolvent(force.profile(c, m), lam, refl);
            block[0][c] = v;
            block[1][c] = dv;
            block[2][c] = ddv;
        }
        Ok(Some(vec![block]))
    })?;
    Ok(out.into_iter().next().unwrap())
}

/// Default image for the lift: odd everywhere.
pub fn odd_image(_: &ModePoint) -> Reflection {
    Reflection::Odd
}

/// Mean-free velocity `w` with `div w = G` and `w_n = 0` on the boundary,
/// together with the pressure `pi` for which `d_t w - Delta w + grad pi = 0`,
/// where `G = g - div v`.
///
/// `g` holds the datum and its normal derivative; `lift` is a vector jet `v`
/// with two normal derivatives, or `None` for `v = 0`. At `xi = 0`,
/// `div v = d_n v_n` is integrated exactly, and the construction needs
/// `int_0^inf G = 0`, checked against `compat_tol` relative to the larger of
/// `reference` and the largest `int |g|` over all modes.
pub fn divergence_corrector(
    g: &NormalJet,
    lift: Option<&NormalJet>,
    line: &HalfLine,
    modes: ModeSet,
    compat_tol: f64,
    reference: f64,
) -> Result<(NormalJet, NormalJet)> {
    if g.levels().len() < 2 || g.components() != 1 {
        return Err(Error::Shape("corrector needs a scalar jet with one normal derivative".into()));
    }
    let grid = g.grid().clone();
    let n = grid.dim();
    let residual = match lift {
        Some(v) => {
            if v.levels().len() < 3 || v.components() != n {
                return Err(Error::Shape("corrector lift needs n components and two normal derivatives".into()));
            }
            g.truncated(1).sub(&divergence(v)?)?
        }
        None => g.truncated(1),
    };
    let g0 = &residual.levels()[0];
    let g1 = &residual.levels()[1];
    let abs_scale = (0..grid.n_modes())
        .map(|m| line.abs_integral(g.levels()[0].profile(0, m)))
        .fold(reference, f64::max);
    let out = assemble(&grid, &[(n, 3), (1, 2)], |m| {
        if !modes.contains(&grid, m) || mode_is_zero(&[g0, g1], m) {
            return Ok(None);
        }
        let mode = mode_point(&grid, m);
        let r = mode.wavenumber();
        let gm = g0.profile(0, m);
        let dg = g1.profile(0, m);
        let (psi, dpsi, ddpsi) = if r > 0.0 {
            let [v, dv, ddv] = line.resolvent(gm, Complex64::from(r), Reflection::Even);
            let neg = |x: Vec<Complex64>| -> Vec<Complex64> { x.into_iter().map(|z| -z).collect() };
            (neg(v), neg(dv), neg(ddv))
        } else {
            // psi' = int_0^x g - (v_n - v_n(0)); v_n decays, so the far
            // value of psi' is int g + v_n(0).
            let (mut a, _) = line.cumulative(g.levels()[0].profile(0, m));
            let mut total = *a.last().unwrap();
            if let Some(v) = lift {
                let vn = v.levels()[0].profile(n - 1, m);
                a.iter_mut().zip(vn).for_each(|(z, w)| *z -= w - vn[0]);
                total += vn[0];
            }
            if total.norm() > compat_tol * abs_scale {
                return Err(Error::untagged_compatibility(
                    "integral of the divergence datum over x_n at xi = 0",
                    total.norm(),
                ));
            }
            let (_, tail) = line.cumulative(&a);
            let psi: Vec<Complex64> = tail.into_iter().map(|z| -z).collect();
            (psi, a, gm.to_vec())
        };
        let r2 = r * r;
        let dddpsi: Vec<Complex64> = dpsi.iter().zip(dg).map(|(p, d)| r2 * p + d).collect();
        let i = Complex64::i();
        let mut w = vec![vec![Vec::new(); n]; 3];
        for (d, &xi) in mode.wavevector.iter().enumerate() {
            let s = i * xi;
            w[0][d] = psi.iter().map(|z| s * z).collect();
            w[1][d] = dpsi.iter().map(|z| s * z).collect();
            w[2][d] = ddpsi.iter().map(|z| s * z).collect();
        }
        w[0][n - 1] = dpsi.clone();
        w[0][n - 1][0] = Complex64::default();
        w[1][n - 1] = ddpsi.clone();
        w[2][n - 1] = dddpsi;
        let ik = i * mode.frequency;
        let pi0: Vec<Complex64> = psi.iter().zip(gm).map(|(p, gv)| -ik * p + gv).collect();
        let pi1: Vec<Complex64> = dpsi.iter().zip(dg).map(|(p, gv)| -ik * p + gv).collect();
        Ok(Some(vec![w, vec![vec![pi0], vec![pi1]]]))
    })?;
    let mut it = out.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

/// Homogeneous Stokes solution with boundary velocity `h` on the selected
/// modes; returns the velocity jet (three levels) and pressure jet (two).
/// The `xi = 0` condition `h_n = 0` is judged relative to the larger of
/// `|h|` and `reference`.
pub fn boundary_solve(
    boundary: &SpectralField,
    grid: &Arc<Grid>,
    modes: ModeSet,
    sign: PressureSign,
    compat_tol: f64,
    reference: f64,
) -> Result<(NormalJet, NormalJet)> {
    if *boundary.grid().as_ref() != grid.boundary() || boundary.components() != grid.dim() {
        return Err(Error::Shape("boundary data must be n components on the boundary grid".into()));
    }
    let n = grid.dim();
    let compat_scale = compat_tol * boundary.max_abs().max(reference);
    let nodes = grid.normal().nodes().to_vec();
    let out = assemble(grid, &[(n, 3), (1, 2)], |m| {
        if !modes.contains(grid, m) || mode_is_zero(&[boundary], m) {
            return Ok(None);
        }
        let (h_tan, h_n) = boundary_values(boundary, m);
        let profile = BoundaryProfile::new(&mode_point(grid, m), &h_tan, h_n, sign, compat_scale)?;
        Ok(Some(sample_profile(&profile, &nodes, n)))
    })?;
    let mut it = out.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

fn sample_profile(profile: &BoundaryProfile, nodes: &[f64], n: usize) -> ModeBlocks {
    let nz = nodes.len();
    let mut u = vec![vec![vec![Complex64::default(); nz]; n]; 3];
    let mut p = vec![vec![vec![Complex64::default(); nz]; 1]; 2];
    for (iz, &x) in nodes.iter().enumerate() {
        let s = profile.eval(x);
        for (c, jet) in s.velocity.iter().enumerate() {
            for l in 0..3 {
                u[l][c][iz] = jet[l];
            }
        }
        p[0][0][iz] = s.pressure[0];
        p[1][0][iz] = s.pressure[1];
    }
    vec![u, p]
}

//! The `k = 0, xi = 0` mode, which reduces to ordinary differential
//! equations in `x_n` solved by direct integration.
//!
//! `-v'' = f'` with `v'(0) = h'` gives the bounded solution
//! `v = h' + int_0^x y f' dy + x int_x^inf f' dy`; `w' = g` with `w(0) = h_n`
//! decays only if `h_n + int_0^inf g = 0`; the pressure is normalised to
//! vanish far from the boundary.

use num_complex::Complex64;

use super::halfline::HalfLine;
use super::StokesData;
use crate::error::{Error, Result};
use crate::spectral::{NormalJet, SpectralField};

/// Storage index of `(k, xi) = (0, 0)`.
pub const MEAN_MODE: usize = 0;

/// Copy of the data with the `(0, 0)` mode removed.
pub fn without_mean_mode(data: &StokesData) -> StokesData {
    let clear = |f: &SpectralField| -> SpectralField {
        let mut f = f.clone();
        for c in 0..f.components() {
            f.profile_mut(c, MEAN_MODE).fill(Complex64::default());
        }
        f
    };
    let clear_jet = |j: &NormalJet| NormalJet::new(j.levels().iter().map(clear).collect()).unwrap();
    StokesData {
        force: clear_jet(&data.force),
        divergence: clear_jet(&data.divergence),
        boundary: clear(&data.boundary),
    }
}

/// Size against which the `xi = 0` compatibility defects are judged: the
/// largest force and boundary values and the largest `int |g|` over all
/// modes.
pub fn compat_scale(data: &StokesData, line: &HalfLine) -> f64 {
    let g = data.divergence.value();
    (0..data.grid().n_modes())
        .map(|m| line.abs_integral(g.profile(0, m)))
        .fold(data.boundary.max_abs().max(data.force.value().max_abs()), f64::max)
}

/// Velocity (three levels) and pressure (two levels) of the `(0, 0)` mode;
/// all other modes are zero. The compatibility defect is measured against
/// the larger of this datum's own scale and `reference`.
pub fn mean_mode(
    data: &StokesData,
    line: &HalfLine,
    compat_tol: f64,
    reference: f64,
) -> Result<(NormalJet, NormalJet)> {
    let grid = data.grid().clone();
    let n = grid.dim();
    let x = grid.normal().nodes();
    let mut u = NormalJet::zeros(grid.clone(), n, 2);
    let mut p = NormalJet::zeros(grid.clone(), 1, 1);
    let f = data.force.value();
    for d in 0..n - 1 {
        let fd = f.profile(d, MEAN_MODE);
        let h = data.boundary.profile(d, MEAN_MODE)[0];
        let (_, tail) = line.cumulative(fd);
        let yf: Vec<Complex64> = fd.iter().zip(x).map(|(v, &xi)| v * xi).collect();
        let (moment, _) = line.cumulative(&yf);
        let value: Vec<Complex64> = (0..x.len()).map(|i| h + moment[i] + tail[i] * x[i]).collect();
        let second: Vec<Complex64> = fd.iter().map(|v| -v).collect();
        let levels = u.levels_mut();
        levels[0].profile_mut(d, MEAN_MODE).copy_from_slice(&value);
        levels[1].profile_mut(d, MEAN_MODE).copy_from_slice(&tail);
        levels[2].profile_mut(d, MEAN_MODE).copy_from_slice(&second);
    }
    let g = data.divergence.levels()[0].profile(0, MEAN_MODE);
    let dg = data.divergence.levels()[1].profile(0, MEAN_MODE);
    let h_n = data.boundary.profile(n - 1, MEAN_MODE)[0];
    let (int_g, _) = line.cumulative(g);
    let scale = compat_scale(data, line).max(reference);
    let far = h_n + *int_g.last().unwrap();
    if far.norm() > compat_tol * scale {
        return Err(Error::Compatibility {
            mode: grid.mode_tag(0, 0),
            what: "normal boundary datum plus integral of the divergence datum at k = 0, xi = 0",
            magnitude: far.norm(),
        });
    }
    let w: Vec<Complex64> = int_g.iter().map(|a| h_n + a).collect();
    let levels = u.levels_mut();
    levels[0].profile_mut(n - 1, MEAN_MODE).copy_from_slice(&w);
    levels[1].profile_mut(n - 1, MEAN_MODE).copy_from_slice(g);
    levels[2].profile_mut(n - 1, MEAN_MODE).copy_from_slice(dg);

    let fn_ = f.profile(n - 1, MEAN_MODE);
    let s: Vec<Complex64> = fn_.iter().zip(dg).map(|(a, b)| a + b).collect();
    let (_, tail) = line.cumulative(&s);
    let pv: Vec<Complex64> = tail.iter().map(|z| -z).collect();
    let levels = p.levels_mut();
    levels[0].profile_mut(0, MEAN_MODE).copy_from_slice(&pv);
    levels[1].profile_mut(0, MEAN_MODE).copy_from_slice(&s);
    Ok((u, p))
}

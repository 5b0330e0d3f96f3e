//! Differential operators on jets of mode profiles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::transform::{derivative_symbol, Axis};
use crate::spectral::{NormalJet, SpectralField};

fn need_levels(jet: &NormalJet, levels: usize) -> Result<()> {
    if jet.levels().len() < levels {
        return Err(Error::Shape(format!(
            "jet has {} levels, operator needs {levels}",
            jet.levels().len()
        )));
    }
    Ok(())
}

/// Divergence `i xi . v' + d_n v_n`; one level fewer than the input.
pub fn divergence(v: &NormalJet) -> Result<NormalJet> {
    need_levels(v, 2)?;
    let grid = v.grid().clone();
    let n = grid.dim();
    if v.components() != n {
        return Err(Error::Shape(format!("divergence of {} components in dimension {n}", v.components())));
    }
    let mut levels = Vec::new();
    for l in 0..v.levels().len() - 1 {
        let mut acc = v.levels()[l + 1].select(&[n - 1]);
        for d in 0..n - 1 {
            let g = grid.clone();
            let part = v.levels()[l]
                .select(&[d])
                .map_modes(|it, jt| derivative_symbol(&g, Axis::Tangential(d), 1, it, jt));
            acc = acc.add(&part)?;
        }
        levels.push(acc);
    }
    NormalJet::new(levels)
}

/// Gradient of a scalar jet; one level fewer than the input.
pub fn gradient(p: &NormalJet) -> Result<NormalJet> {
    need_levels(p, 2)?;
    let grid = p.grid().clone();
    let n = grid.dim();
    let mut levels = Vec::new();
    for l in 0..p.levels().len() - 1 {
        let mut parts: Vec<SpectralField> = (0..n - 1)
            .map(|d| {
                let g = grid.clone();
                p.levels()[l].map_modes(|it, jt| derivative_symbol(&g, Axis::Tangential(d), 1, it, jt))
            })
            .collect();
        parts.push(p.levels()[l + 1].clone());
        let refs: Vec<&SpectralField> = parts.iter().collect();
        levels.push(SpectralField::stack(&refs)?);
    }
    NormalJet::new(levels)
}

/// `d_t u - Delta u` for a jet with at least three levels.
pub fn heat_operator(u: &NormalJet) -> Result<SpectralField> {
    need_levels(u, 3)?;
    let grid = u.grid().clone();
    let g = grid.clone();
    let symbol = move |it: usize, jt: usize| -> Complex64 {
        let k = g.frequency(it);
        let r2: f64 = (0..g.tdim())
            .map(|d| -derivative_symbol(&g, Axis::Tangential(d), 2, it, jt).re)
            .sum();
        Complex64::new(r2, k)
    };
    u.levels()[0].map_modes(symbol).sub(&u.levels()[2])
}

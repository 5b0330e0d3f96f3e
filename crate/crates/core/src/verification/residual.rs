//! Residuals of a candidate solution: momentum, divergence and trace, each
//! in `L^q`, absolute and relative to the size of the terms involved.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::halfspace::ops::{divergence, gradient, heat_operator};
use crate::halfspace::{StokesData, StokesSolution};
use crate::spectral::norms::lq_norm_pieces;
use crate::spectral::transform::{derivative_symbol, Axis};
use crate::spectral::{Grid, NormalJet, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
}

impl Residual {
    fn new(absolute: f64, scale: f64) -> Self {
        Self {
            absolute,
            relative: if scale > 0.0 { absolute / scale } else { absolute },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub q: f64,
    pub momentum: Residual,
    pub divergence: Residual,
    pub trace: Residual,
}

impl ResidualReport {
    pub fn max_relative(&self) -> f64 {
        self.momentum
            .relative
            .max(self.divergence.relative)
            .max(self.trace.relative)
    }
}

fn norm(f: &SpectralField, q: f64) -> Result<f64> {
    lq_norm_pieces(std::slice::from_ref(f), q)
}

/// `d_j u_j` without summation.
pub(crate) fn divergence_term(velocity: &NormalJet, j: usize) -> Result<SpectralField> {
    let grid = velocity.grid().clone();
    if j + 1 == grid.dim() {
        return Ok(velocity.levels()[1].select(&[j]));
    }
    Ok(velocity
        .value()
        .select(&[j])
        .map_modes(|it, jt| derivative_symbol(&grid, Axis::Tangential(j), 1, it, jt)))
}

/// Residuals of `(velocity, pressure)` against `data`.
pub fn residuals(velocity: &NormalJet, pressure: &NormalJet, data: &StokesData, q: f64) -> Result<ResidualReport> {
    let heat = heat_operator(velocity)?;
    let grad_p = gradient(pressure)?.levels()[0].clone();
    let f = data.force.value();
    let momentum = heat.add(&grad_p)?.sub(f)?;
    let momentum_scale = norm(&heat, q)? + norm(&grad_p, q)? + norm(f, q)?;

    let div = divergence(velocity)?.levels()[0].clone();
    let g = data.divergence.value();
    let div_res = div.sub(g)?;
    // Sum over the individual terms of the divergence, which stays meaningful
    // when both `div u` and `g` vanish.
    let mut div_scale = norm(g, q)?;
    for j in 0..velocity.components() {
        div_scale += norm(&divergence_term(velocity, j)?, q)?;
    }

    let trace = velocity.value().trace();
    let trace_res = trace.sub(&data.boundary)?;
    let trace_scale = norm(&trace, q)? + norm(&data.boundary, q)?;

    Ok(ResidualReport {
        q,
        momentum: Residual::new(norm(&momentum, q)?, momentum_scale),
        divergence: Residual::new(norm(&div_res, q)?, div_scale),
        trace: Residual::new(norm(&trace_res, q)?, trace_scale),
    })
}

pub fn residual_check(solution: &StokesSolution, data: &StokesData, q: f64) -> Result<ResidualReport> {
    residuals(&solution.velocity, &solution.pressure, data, q)
}

/// Residuals of a solution computed at a coarse resolution, measured
/// against data sampled on `reference` (same domain and normal grid) after
/// zero-padding the solution's coefficients.
pub fn residual_on(
    solution: &StokesSolution,
    reference: &StokesData,
    q: f64,
) -> Result<ResidualReport> {
    let target: Arc<Grid> = reference.grid().clone();
    residuals(
        &solution.velocity.resample(target.clone())?,
        &solution.pressure.resample(target)?,
        reference,
        q,
    )
}

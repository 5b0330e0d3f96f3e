//! Solvers for the half-space problem, assembled mode by mode from exact
//! normal profiles and exponentially weighted quadrature.

pub mod boundary;
pub mod data;
pub mod halfline;
pub mod ops;
pub mod pipeline;
pub mod stages;
pub mod steady;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::spectral::{Grid, NormalJet, SpectralField};

pub use data::StokesData;
pub use pipeline::{solve, LiftPath, SolverOptions, StokesSolution};

/// Which time frequencies a stage acts on. Tangential Nyquist lines are
/// never included: the data there is checked to be negligible and the
/// solution is left zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSet {
    /// `k != 0`.
    Oscillatory,
    /// `k = 0`.
    Steady,
}

impl ModeSet {
    pub fn contains(&self, grid: &Grid, mode: usize) -> bool {
        let k0 = grid.time_index(mode / grid.n_tan()) == 0;
        if grid.is_nyquist(mode % grid.n_tan()) {
            return false;
        }
        match self {
            ModeSet::Oscillatory => !k0,
            ModeSet::Steady => k0,
        }
    }
}

/// Profiles produced at one mode: `[jet][level][component]`.
pub(crate) type ModeBlocks = Vec<Vec<Vec<Vec<Complex64>>>>;

/// Runs `solve` on all modes in parallel and scatters the profiles into jets
/// of the given `(components, levels)` shapes. `None` means all zero.
pub(crate) fn assemble<F>(grid: &Arc<Grid>, shapes: &[(usize, usize)], solve: F) -> Result<Vec<NormalJet>>
where
    F: Fn(usize) -> Result<Option<ModeBlocks>> + Sync,
{
    let n_tan = grid.n_tan();
    let results: Vec<Option<ModeBlocks>> = (0..grid.n_modes())
        .into_par_iter()
        .map(|m| solve(m).map_err(|e| e.at_mode(grid.mode_tag(m / n_tan, m % n_tan))))
        .collect::<Result<_>>()?;
    let mut jets: Vec<NormalJet> = shapes
        .iter()
        .map(|&(c, l)| NormalJet::zeros(grid.clone(), c, l - 1))
        .collect();
    for (m, r) in results.into_iter().enumerate() {
        let Some(blocks) = r else { continue };
        for (jet, block) in jets.iter_mut().zip(blocks) {
            for (level, comps) in jet.levels_mut().iter_mut().zip(block) {
                for (c, prof) in comps.into_iter().enumerate() {
                    level.profile_mut(c, m).copy_from_slice(&prof);
                }
            }
        }
    }
    Ok(jets)
}

/// True when every listed field vanishes identically at `mode`.
pub(crate) fn mode_is_zero(fields: &[&SpectralField], mode: usize) -> bool {
    fields.iter().all(|f| {
        (0..f.components()).all(|c| f.profile(c, mode).iter().all(|z| *z == Complex64::default()))
    })
}

//! Right-hand sides `(f, g, h)` of the inhomogeneous problem.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::normal::jet_from_samples;
use crate::spectral::transform::{forward, oscillatory_part_jet, steady_part_jet, time_shift_jet};
use crate::spectral::{Grid, NormalJet, PhysicalField, SpectralField};

/// Relative size of tangential Nyquist content that solvers reject.
pub const NYQUIST_TOL: f64 = 1e-12;

/// Force `f` (n components), divergence `g` (value and normal derivative)
/// and boundary velocity `h` (n components on the boundary grid).
#[derive(Debug, Clone, PartialEq)]
pub struct StokesData {
    pub force: NormalJet,
    pub divergence: NormalJet,
    pub boundary: SpectralField,
}

impl StokesData {
    pub fn new(force: NormalJet, divergence: NormalJet, boundary: SpectralField) -> Result<Self> {
        let grid = force.grid().clone();
        let n = grid.dim();
        if force.components() != n || boundary.components() != n {
            return Err(Error::Shape(format!(
                "force and boundary data need {n} components, got {} and {}",
                force.components(),
                boundary.components()
            )));
        }
        if divergence.components() != 1 || divergence.levels().len() < 2 {
            return Err(Error::Shape(
                "divergence data needs one component with its normal derivative".into(),
            ));
        }
        if **divergence.grid() != *grid {
            return Err(Error::Shape("force and divergence data on different grids".into()));
        }
        if *boundary.grid().as_ref() != grid.boundary() {
            return Err(Error::Shape("boundary data must live on the boundary of the solution grid".into()));
        }
        if grid.nz() < 8 {
            return Err(Error::Grid("solution grid needs at least 8 normal nodes".into()));
        }
        Ok(Self {
            force,
            divergence,
            boundary,
        })
    }

    /// Builds data from samples, differentiating `g` in `x_n` by finite
    /// differences.
    pub fn from_physical(f: &PhysicalField, g: &PhysicalField, h: &PhysicalField) -> Result<Self> {
        let gs = forward(g);
        Self::new(
            NormalJet::value_only(forward(f)),
            jet_from_samples(&gs, 1)?,
            forward(h),
        )
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.dim();
        Self {
            force: NormalJet::zeros(grid.clone(), n, 0),
            divergence: NormalJet::zeros(grid.clone(), 1, 1),
            boundary: SpectralField::zeros(Arc::new(grid.boundary()), n),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.force.grid()
    }

    pub fn steady_part(&self) -> Self {
        Self {
            force: steady_part_jet(&self.force),
            divergence: steady_part_jet(&self.divergence),
            boundary: steady_part_jet(&NormalJet::value_only(self.boundary.clone())).value().clone(),
        }
    }

    pub fn oscillatory_part(&self) -> Self {
        Self {
            force: oscillatory_part_jet(&self.force),
            divergence: oscillatory_part_jet(&self.divergence),
            boundary: oscillatory_part_jet(&NormalJet::value_only(self.boundary.clone())).value().clone(),
        }
    }

    /// Shift by `steps` time samples.
    pub fn time_shifted(&self, steps: i64) -> Self {
        Self {
            force: time_shift_jet(&self.force, steps),
            divergence: time_shift_jet(&self.divergence, steps),
            boundary: time_shift_jet(&NormalJet::value_only(self.boundary.clone()), steps)
                .value()
                .clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            force: self.force.scaled(s),
            divergence: self.divergence.scaled(s),
            boundary: self.boundary.scaled(s),
        }
    }

    pub fn resample(&self, target: Arc<Grid>) -> Result<Self> {
        Self::new(
            self.force.resample(target.clone())?,
            self.divergence.resample(target.clone())?,
            self.boundary.resample(Arc::new(target.boundary()))?,
        )
    }

    /// Spectral truncation onto another resolution: shared modes are kept
    /// and the target's tangential Nyquist lines are cleared.
    pub fn truncated(&self, target: Arc<Grid>) -> Result<Self> {
        let mut out = self.resample(target)?;
        let levels = out.force.levels_mut().iter_mut().chain(out.divergence.levels_mut());
        for f in levels.chain(std::iter::once(&mut out.boundary)) {
            clear_nyquist(f);
        }
        Ok(out)
    }

    /// Rejects content on the tangential Nyquist line.
    pub fn check_nyquist(&self) -> Result<()> {
        let fields: Vec<&SpectralField> = self
            .force
            .levels()
            .iter()
            .chain(self.divergence.levels())
            .chain(std::iter::once(&self.boundary))
            .collect();
        let scale = fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
        let grid = self.grid();
        let n_tan = grid.n_tan();
        for f in fields {
            for m in 0..grid.n_modes() {
                if !grid.is_nyquist(m % n_tan) {
                    continue;
                }
                for c in 0..f.components() {
                    let mag = f.profile(c, m).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if mag > NYQUIST_TOL * scale {
                        return Err(Error::NyquistContent {
                            mode: grid.mode_tag(m / n_tan, m % n_tan),
                            magnitude: mag,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn clear_nyquist(f: &mut SpectralField) {
    let grid = f.grid().clone();
    let n_tan = grid.n_tan();
    for c in 0..f.components() {
        for m in (0..grid.n_modes()).filter(|m| grid.is_nyquist(m % n_tan)) {
            f.profile_mut(c, m).fill(Default::default());
        }
    }
}

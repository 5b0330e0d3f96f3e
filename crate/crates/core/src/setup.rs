//! Problem geometry and resolution shared by the verification suites and
//! the command line.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, NormalGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Problem {
    /// Time period.
    pub tau: f64,
    /// Spatial dimension, 2 or 3.
    pub n: usize,
    /// Integrability exponents the norms are evaluated at.
    pub q: Vec<f64>,
    /// Time modes `K`: frequencies `-K..=K`.
    pub time_modes: usize,
    /// Tangential samples per direction `N`.
    pub tangential: usize,
    /// Tangential box length `L`.
    pub box_length: f64,
    pub x_max: f64,
    pub normal_nodes: usize,
    /// Ratio of successive cells of the graded normal grid.
    pub grading: f64,
    pub first_cell: f64,
}

impl Default for Problem {
    fn default() -> Self {
        Self {
            tau: 2.0 * PI,
            n: 2,
            q: vec![2.0, 4.0],
            time_modes: 16,
            tangential: 64,
            box_length: 2.0 * PI,
            x_max: 20.0,
            normal_nodes: 128,
            grading: 1.08,
            first_cell: 2e-3,
        }
    }
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        if self.q.is_empty() || self.q.iter().any(|&q| !(q >= 1.0 && q.is_finite())) {
            return Err(Error::Config(format!("q values must be finite and >= 1, got {:?}", self.q)));
        }
        if self.time_modes == 0 {
            return Err(Error::Config("time_modes must be positive".into()));
        }
        self.grid().map(|_| ())
    }

    pub fn normal_grid(&self) -> Result<NormalGrid> {
        NormalGrid::graded(self.x_max, self.normal_nodes, self.grading, self.first_cell)
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        self.grid_at(self.time_modes, self.tangential)
    }

    /// Same domain and normal grid at another `(K, N)`.
    pub fn grid_at(&self, time_modes: usize, tangential: usize) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::new(
            self.tau,
            self.n,
            time_modes,
            tangential,
            self.box_length,
            self.normal_grid()?,
        )?))
    }

    /// `K` and `N` multiplied by `factor`; `N` is kept even.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Config(format!("resolution scale must be positive, got {factor}")));
        }
        let k = (self.time_modes as f64 * factor).round().max(1.0) as usize;
        let half = (self.tangential as f64 * factor / 2.0).round().max(1.0) as usize;
        Ok(Self {
            time_modes: k,
            tangential: 2 * half,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_the_reference_resolution() {
        let g = Problem::default().grid().unwrap();
        assert_eq!((g.time_modes(), g.tangential(), g.nz()), (16, 64, 128));
        assert!((g.normal().x_max() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn rescaling_keeps_tangential_even() {
        let p = Problem::default().rescaled(0.3).unwrap();
        assert_eq!(p.tangential % 2, 0);
        assert!(Problem::default().rescaled(0.0).is_err());
    }
}

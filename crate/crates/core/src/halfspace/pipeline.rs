//! Full solution operator: steady part plus the oscillatory composition
//! `u = U + w + v`, `p = P + pi`.

use std::sync::Arc;

use super::halfline::{HalfLine, Reflection};
use super::stages::{boundary_solve, divergence_corrector, heat_lift};
use super::steady::{compat_scale, mean_mode, without_mean_mode};
use super::{ModeSet, StokesData};
use crate::error::{Error, Result};
use crate::spectral::{Grid, NormalJet};
use crate::symbols::boundary::PressureSign;
use crate::symbols::ModePoint;

/// Image used in the heat lift. Both give the same solution; comparing them
/// is a uniqueness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiftPath {
    #[default]
    Odd,
    /// Even image wherever `xi != 0`, odd at `xi = 0`.
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub pressure_sign: PressureSign,
    pub lift: LiftPath,
    /// Relative tolerance of the compatibility checks at `xi = 0`.
    pub compat_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            pressure_sign: PressureSign::Correct,
            lift: LiftPath::Odd,
            compat_tol: 1e-8,
        }
    }
}

/// One additive piece of the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub velocity: NormalJet,
    pub pressure: NormalJet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StokesSolution {
    /// Velocity with two normal derivatives.
    pub velocity: NormalJet,
    /// Pressure with one normal derivative.
    pub pressure: NormalJet,
    pub stages: Vec<Stage>,
}

impl StokesSolution {
    fn from_stages(grid: &Arc<Grid>, stages: Vec<Stage>) -> Result<Self> {
        let mut velocity = NormalJet::zeros(grid.clone(), grid.dim(), 2);
        let mut pressure = NormalJet::zeros(grid.clone(), 1, 1);
        for s in &stages {
            velocity = velocity.add(&s.velocity)?;
            pressure = pressure.add(&s.pressure)?;
        }
        Ok(Self {
            velocity,
            pressure,
            stages,
        })
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

fn three_stage(
    data: &StokesData,
    line: &HalfLine,
    modes: ModeSet,
    opts: &SolverOptions,
    reference: f64,
) -> Result<Vec<Stage>> {
    let grid = data.grid().clone();
    let lift = opts.lift;
    let image = move |m: &ModePoint| match lift {
        LiftPath::Even if m.wavenumber() > 0.0 => Reflection::Even,
        _ => Reflection::Odd,
    };
    let v = heat_lift(data.force.value(), line, modes, image)?;
    let (w, pi) = divergence_corrector(&data.divergence, Some(&v), line, modes, opts.compat_tol, reference)?;
    let h_res = data
        .boundary
        .sub(&v.value().trace())?
        .sub(&w.value().trace())?;
    let (ub, pb) = boundary_solve(&h_res, &grid, modes, opts.pressure_sign, opts.compat_tol, reference)?;
    Ok(vec![
        Stage {
            name: "heat_lift",
            velocity: v,
            pressure: NormalJet::zeros(grid.clone(), 1, 1),
        },
        Stage {
            name: "corrector",
            velocity: w,
            pressure: pi,
        },
        Stage {
            name: "boundary",
            velocity: ub,
            pressure: pb,
        },
    ])
}

fn steady_magnitude(data: &StokesData) -> f64 {
    let s = data.steady_part();
    let mut m: f64 = 0.0;
    for f in s.force.levels().iter().chain(s.divergence.levels()) {
        m = m.max(f.max_abs());
    }
    m.max(s.boundary.max_abs())
}

fn prefixed(stages: Vec<Stage>, names: [&'static str; 3]) -> Vec<Stage> {
    stages
        .into_iter()
        .zip(names)
        .map(|(s, name)| Stage { name, ..s })
        .collect()
}

/// Solves the problem for purely oscillatory data (`P f = P g = P h = 0`).
pub fn solve_oscillatory(data: &StokesData, opts: &SolverOptions) -> Result<StokesSolution> {
    data.check_nyquist()?;
    let steady = steady_magnitude(data);
    let scale = data.force.value().max_abs().max(data.boundary.max_abs()).max(data.divergence.value().max_abs());
    if steady > 1e-12 * scale {
        return Err(Error::NotOscillatory { magnitude: steady });
    }
    let line = HalfLine::new(data.grid().normal().nodes())?;
    let stages = three_stage(data, &line, ModeSet::Oscillatory, opts, compat_scale(data, &line))?;
    StokesSolution::from_stages(data.grid(), stages)
}

/// Solves the time-independent problem for the `k = 0` part of the data.
pub fn solve_steady(data: &StokesData, opts: &SolverOptions) -> Result<StokesSolution> {
    data.check_nyquist()?;
    let line = HalfLine::new(data.grid().normal().nodes())?;
    let reference = compat_scale(data, &line);
    let steady = data.steady_part();
    StokesSolution::from_stages(data.grid(), steady_stages(&steady, &line, opts, reference)?)
}

fn steady_stages(steady: &StokesData, line: &HalfLine, opts: &SolverOptions, reference: f64) -> Result<Vec<Stage>> {
    let (um, pm) = mean_mode(steady, line, opts.compat_tol, reference)?;
    let mut stages = prefixed(
        three_stage(&without_mean_mode(steady), line, ModeSet::Steady, opts, reference)?,
        ["steady_lift", "steady_corrector", "steady_boundary"],
    );
    stages.push(Stage {
        name: "steady_mean",
        velocity: um,
        pressure: pm,
    });
    Ok(stages)
}

/// Solves the full problem: the steady part and the oscillatory part are
/// computed independently and added.
pub fn solve(data: &StokesData, opts: &SolverOptions) -> Result<StokesSolution> {
    data.check_nyquist()?;
    let line = HalfLine::new(data.grid().normal().nodes())?;
    let reference = compat_scale(data, &line);
    let mut stages = steady_stages(&data.steady_part(), &line, opts, reference)?;
    stages.extend(three_stage(&data.oscillatory_part(), &line, ModeSet::Oscillatory, opts, reference)?);
    StokesSolution::from_stages(data.grid(), stages)
}

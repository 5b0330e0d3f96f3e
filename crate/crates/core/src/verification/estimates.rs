//! Empirical constants of the maximal-regularity estimates: solution norms
//! over data norms, for the steady and the purely oscillatory parts.
//!
//! Fractional boundary norms are anisotropic Besov sums in the parabolic
//! scale; the negative-order norm of `g` is the `L^q` size of the
//! gradient potential `w` with `div w = g` built by the divergence
//! corrector, and that of `h_n` uses the homogeneous tangential weight.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::manufactured::ExpPoly;
use crate::error::{Error, Result};
use crate::halfspace::halfline::HalfLine;
use crate::halfspace::stages::divergence_corrector;
use crate::halfspace::{solve, ModeSet, SolverOptions, StokesData, StokesSolution};
use crate::spectral::norms::{
    besov_shells, homogeneous_norm, steady_besov_norm, Magnitude,
};
use crate::spectral::transform::{derivative_symbol, oscillatory_part_jet, steady_part_jet, Axis};
use crate::spectral::{Grid, NormalJet, SpectralField};
use crate::symbols::partition::ParabolicScale;

/// Sizes below this fraction of the data scale count as zero in a ratio.
const ZERO_RATIO_TOL: f64 = 1e-13;

/// Shell share above which a Besov norm is flagged as under-resolved.
pub const TOP_SHELL_FLAG: f64 = 0.01;

/// The data-side terms of the oscillatory estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatoryRhs {
    pub force: f64,
    /// `L^q(T; W^{1,q})` part of the divergence norm.
    pub divergence: f64,
    /// `W^{1,q}(T; W^{-1,q})` part.
    pub divergence_negative: f64,
    /// Anisotropic Besov norm of order `2 - 1/q` of `h`.
    pub boundary: f64,
    /// Share of the dyadic shell at the lattice edge in the Besov norm of `h`.
    pub boundary_top_shell: f64,
    /// `W^{1,q}(T; W^{-1/q,q})` norm of `h_n`.
    pub boundary_normal: f64,
}

impl OscillatoryRhs {
    pub fn total(&self) -> f64 {
        self.force + self.divergence + self.divergence_negative + self.boundary + self.boundary_normal
    }
}

fn norms_at(parts: &[Magnitude], qs: &[f64]) -> Result<Vec<f64>> {
    qs.iter()
        .map(|&q| parts.iter().map(|m| m.lq(q)).sum())
        .collect()
}

/// `||u|| + ||d_t u|| + ||grad u|| + ||grad^2 u|| + ||grad p||` of the
/// oscillatory part, for each `q`.
pub fn oscillatory_lhs(solution: &StokesSolution, qs: &[f64]) -> Result<Vec<f64>> {
    let u = oscillatory_part_jet(&solution.velocity);
    let p = oscillatory_part_jet(&solution.pressure);
    let parts = [
        Magnitude::of_derivatives(&u, 0, 0)?,
        Magnitude::of_derivatives(&u, 1, 0)?,
        Magnitude::of_derivatives(&u, 0, 1)?,
        Magnitude::of_derivatives(&u, 0, 2)?,
        Magnitude::of_derivatives(&p, 0, 1)?,
    ];
    norms_at(&parts, qs)
}

/// `||grad^2 u|| + ||grad p||` of the steady part, for each `q`.
pub fn steady_lhs(solution: &StokesSolution, qs: &[f64]) -> Result<Vec<f64>> {
    let u = steady_part_jet(&solution.velocity);
    let p = steady_part_jet(&solution.pressure);
    let parts = [Magnitude::of_derivatives(&u, 0, 2)?, Magnitude::of_derivatives(&p, 0, 1)?];
    norms_at(&parts, qs)
}

fn time_derivative(f: &SpectralField) -> SpectralField {
    let grid = f.grid().clone();
    f.map_modes(|it, jt| derivative_symbol(&grid, Axis::Time, 1, it, jt))
}

/// Data norms of the oscillatory estimate for the oscillatory part of
/// `data`, for each `q`.
pub fn oscillatory_rhs(data: &StokesData, qs: &[f64]) -> Result<Vec<OscillatoryRhs>> {
    let osc = data.oscillatory_part();
    let grid = osc.grid().clone();
    let n = grid.dim();
    let force = Magnitude::of(std::slice::from_ref(osc.force.value()));
    let g = osc.divergence.truncated(1);
    let divergence = [Magnitude::of_derivatives(&g, 0, 0)?, Magnitude::of_derivatives(&g, 0, 1)?];
    let line = HalfLine::new(grid.normal().nodes())?;
    let (w, _) = divergence_corrector(&g, None, &line, ModeSet::Oscillatory, 1e-8, 0.0)?;
    let w0 = w.value();
    let divergence_negative = [
        Magnitude::of(std::slice::from_ref(w0)),
        Magnitude::of(&[time_derivative(w0)]),
    ];
    let normal = osc.boundary.select(&[n - 1]);
    qs.iter()
        .map(|&q| {
            let s = 2.0 - 1.0 / q;
            let shells = besov_shells(&osc.boundary, s, q, ParabolicScale::parabolic())?;
            let total_q: f64 = shells.iter().map(|(_, t)| t.powf(q)).sum();
            // The last shell is the one reaching the edge of the lattice.
            let boundary_top_shell = match shells.last() {
                Some((_, t)) if total_q > 0.0 => t.powf(q) / total_q,
                _ => 0.0,
            };
            Ok(OscillatoryRhs {
                force: force.lq(q)?,
                divergence: norms_at(&divergence, &[q])?[0],
                divergence_negative: norms_at(&divergence_negative, &[q])?[0],
                boundary: total_q.powf(1.0 / q),
                boundary_top_shell,
                boundary_normal: homogeneous_norm(&normal, 1.0, -1.0 / q, q)?,
            })
        })
        .collect()
}

/// Data norms of the steady estimate, `||f|| + ||g||_{W^{1,q}} +
/// ||h||_{W^{2-1/q,q}}`, for each `q`.
pub fn steady_rhs(data: &StokesData, qs: &[f64]) -> Result<Vec<f64>> {
    let s = data.steady_part();
    let g = s.divergence.truncated(1);
    let bulk = [
        Magnitude::of(std::slice::from_ref(s.force.value())),
        Magnitude::of_derivatives(&g, 0, 0)?,
        Magnitude::of_derivatives(&g, 0, 1)?,
    ];
    let bulk = norms_at(&bulk, qs)?;
    qs.iter()
        .zip(bulk)
        .map(|(&q, b)| Ok(b + steady_besov_norm(&s.boundary, 2.0 - 1.0 / q, q)?))
        .collect()
}

/// One side-by-side evaluation of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ratio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `None` for a degenerate `0 / 0`; an error when only the data side vanishes.
fn ratio(lhs: f64, rhs: f64, scale: f64) -> Result<Option<Ratio>> {
    let tiny = ZERO_RATIO_TOL * scale;
    if rhs <= tiny {
        if lhs <= tiny {
            return Ok(None);
        }
        return Err(Error::Degenerate(format!(
            "data norm vanishes ({rhs:e}) while the solution norm is {lhs:e}"
        )));
    }
    if !(lhs.is_finite() && rhs.is_finite()) {
        return Err(Error::NonFinite("estimate norms".into()));
    }
    Ok(Some(Ratio { lhs, rhs, ratio: lhs / rhs }))
}

/// Estimate ratios of one data bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRatios {
    pub trial: usize,
    pub label: String,
    pub oscillatory: Option<Ratio>,
    pub steady: Option<Ratio>,
    /// More than `TOP_SHELL_FLAG` of the boundary Besov norm sits in the
    /// shell at the lattice edge.
    pub top_shell_flag: bool,
    /// Both parts are `0 / 0`.
    pub degenerate: bool,
}

fn data_scale(data: &StokesData) -> f64 {
    data.force
        .value()
        .max_abs()
        .max(data.divergence.value().max_abs())
        .max(data.boundary.max_abs())
}

/// Both estimates of one bundle at every `q`, from a single solve.
pub fn trial_ratios(
    trial: usize,
    label: &str,
    data: &StokesData,
    qs: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<TrialRatios>> {
    let sol = solve(data, opts)?;
    let scale = data_scale(data);
    let osc_lhs = oscillatory_lhs(&sol, qs)?;
    let osc_rhs = oscillatory_rhs(data, qs)?;
    let st_lhs = steady_lhs(&sol, qs)?;
    let st_rhs = steady_rhs(data, qs)?;
    (0..qs.len())
        .map(|i| {
            let oscillatory = ratio(osc_lhs[i], osc_rhs[i].total(), scale)?;
            let steady = ratio(st_lhs[i], st_rhs[i], scale)?;
            Ok(TrialRatios {
                trial,
                label: label.to_string(),
                degenerate: oscillatory.is_none() && steady.is_none(),
                oscillatory,
                steady,
                top_shell_flag: osc_rhs[i].boundary_top_shell > TOP_SHELL_FLAG,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub count: usize,
    pub max: f64,
    pub median: f64,
}

fn stats(values: &[f64]) -> Option<EnsembleStats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) };
    Some(EnsembleStats {
        count: v.len(),
        max: v[v.len() - 1],
        median,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub time_modes: usize,
    pub tangential: usize,
    pub normal_nodes: usize,
}

impl Resolution {
    pub fn of(grid: &Grid) -> Self {
        Self {
            time_modes: grid.time_modes(),
            tangential: grid.tangential(),
            normal_nodes: grid.nz(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRatioReport {
    pub q: f64,
    pub resolution: Resolution,
    pub trials: Vec<TrialRatios>,
    pub oscillatory: Option<EnsembleStats>,
    pub steady: Option<EnsembleStats>,
}

impl EstimateRatioReport {
    pub fn all_finite(&self) -> bool {
        self.trials.iter().all(|t| {
            [t.oscillatory, t.steady]
                .iter()
                .flatten()
                .all(|r| r.ratio.is_finite() && r.lhs.is_finite() && r.rhs.is_finite())
        })
    }
}

/// Estimate ratios over an ensemble for each `q`, evaluated in parallel and
/// reported in input order.
pub fn estimate_sweep(
    ensemble: &[(String, StokesData)],
    qs: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<EstimateRatioReport>> {
    let Some((_, first)) = ensemble.first() else {
        return Err(Error::Degenerate("empty ensemble".into()));
    };
    let grid = first.grid().clone();
    let per_trial: Vec<Vec<TrialRatios>> = ensemble
        .par_iter()
        .enumerate()
        .map(|(i, (label, data))| trial_ratios(i, label, data, qs, opts))
        .collect::<Result<_>>()?;
    Ok(qs
        .iter()
        .enumerate()
        .map(|(iq, &q)| {
            let trials: Vec<TrialRatios> = per_trial.iter().map(|t| t[iq].clone()).collect();
            let osc: Vec<f64> = trials.iter().filter_map(|t| t.oscillatory.map(|r| r.ratio)).collect();
            let st: Vec<f64> = trials.iter().filter_map(|t| t.steady.map(|r| r.ratio)).collect();
            EstimateRatioReport {
                q,
                resolution: Resolution::of(&grid),
                oscillatory: stats(&osc),
                steady: stats(&st),
                trials,
            }
        })
        .collect())
}

/// Which datum a random mode feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DataSlot {
    Force(usize),
    Divergence,
    Boundary(usize),
}

/// One lattice mode of random data: `amplitude * P(x_n)` at `(k, xi)` and
/// its conjugate at `(-k, -xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMode {
    pub slot: DataSlot,
    pub time: i64,
    pub tangential: Vec<i64>,
    pub amplitude: Complex64,
    pub profile: ExpPoly,
}

/// A few-mode data bundle given by its lattice modes, so it can be placed
/// on any grid containing them.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBundle {
    pub modes: Vec<DataMode>,
}

impl ModeBundle {
    /// Largest time and tangential index used.
    pub fn extent(&self) -> (i64, i64) {
        self.modes.iter().fold((0, 0), |(t, x), m| {
            (t.max(m.time.abs()), m.tangential.iter().fold(x, |a, j| a.max(j.abs())))
        })
    }

    pub fn data(&self, grid: Arc<Grid>) -> Result<StokesData> {
        let n = grid.dim();
        let boundary_grid = Arc::new(grid.boundary());
        let mut f = SpectralField::zeros(grid.clone(), n);
        let mut g = SpectralField::zeros(grid.clone(), 1);
        let mut dg = SpectralField::zeros(grid.clone(), 1);
        let mut h = SpectralField::zeros(boundary_grid, n);
        let x = grid.normal().nodes().to_vec();
        let line = HalfLine::new(&x)?;
        let integral = |p: &ExpPoly| -> f64 {
            let v: Vec<Complex64> = x.iter().map(|&xv| Complex64::from(p.eval(xv))).collect();
            line.cumulative(&v).0.last().unwrap().re
        };
        for m in &self.modes {
            if m.tangential.len() != grid.tdim() {
                return Err(Error::Shape("mode index has the wrong tangential dimension".into()));
            }
            let (Some(it), Some(jt)) = (grid.time_position(m.time), grid.tangential_position(&m.tangential)) else {
                return Err(Error::Grid(format!(
                    "mode ({}, {:?}) is outside the lattice",
                    m.time, m.tangential
                )));
            };
            if grid.is_nyquist(jt) {
                return Err(Error::Grid("random modes must avoid the Nyquist line".into()));
            }
            let (pit, pjt) = grid.partner(it, jt);
            let (mode, partner) = (it * grid.n_tan() + jt, pit * grid.n_tan() + pjt);
            let mut profile = m.profile.clone();
            if m.slot == DataSlot::Divergence && m.tangential.iter().all(|&j| j == 0) {
                // Remove the quadrature's view of the mean so the discrete
                // compatibility condition holds exactly.
                let bump = ExpPoly::new(profile.rate, &[1.0]);
                let shift = integral(&profile) / integral(&bump);
                profile.coeffs[0] -= shift;
            }
            let d = profile.derivative();
            let put = |field: &mut SpectralField, c: usize, values: &dyn Fn(f64) -> f64, xs: &[f64]| {
                for (idx, amp) in [(mode, m.amplitude), (partner, m.amplitude.conj())] {
                    let amp = if mode == partner { Complex64::from(amp.re) } else { amp };
                    for (z, &xv) in field.profile_mut(c, idx).iter_mut().zip(xs) {
                        *z += amp * values(xv);
                    }
                }
            };
            match m.slot {
                DataSlot::Force(c) => put(&mut f, c, &|xv| profile.eval(xv), &x),
                DataSlot::Divergence => {
                    put(&mut g, 0, &|xv| profile.eval(xv), &x);
                    put(&mut dg, 0, &|xv| d.eval(xv), &x);
                }
                DataSlot::Boundary(c) => put(&mut h, c, &|xv| profile.eval(xv), &[0.0]),
            }
        }
        StokesData::new(NormalJet::value_only(f), NormalJet::new(vec![g, dg])?, h)
    }
}

/// Seeded generator of compatible random few-mode bundles.
#[derive(Debug, Clone)]
pub struct BundleGenerator {
    rng: ChaCha8Rng,
    dim: usize,
    max_time: i64,
    max_tangential: i64,
}

impl BundleGenerator {
    pub fn new(seed: u64, dim: usize, max_time: i64, max_tangential: i64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            max_time,
            max_tangential,
        }
    }

    fn profile(&mut self, zero_mean: bool) -> ExpPoly {
        let rate = self.rng.random_range(1.5..3.0);
        if zero_mean {
            // int_0^inf (1 - r x) e^{-r x} dx = 0.
            let c = self.rng.random_range(0.5..1.5);
            return ExpPoly::new(rate, &[c, -c * rate]);
        }
        let degree = self.rng.random_range(0..3usize);
        let coeffs: Vec<f64> = (0..=degree).map(|_| self.rng.random_range(-1.0..1.0)).collect();
        ExpPoly::new(rate, &coeffs)
    }

    fn mode(&mut self) -> DataMode {
        let n = self.dim;
        let time = self.rng.random_range(-self.max_time..=self.max_time);
        let tangential: Vec<i64> = (0..n - 1)
            .map(|_| self.rng.random_range(-self.max_tangential..=self.max_tangential))
            .collect();
        let flat = tangential.iter().all(|&j| j == 0);
        let mut slot = match self.rng.random_range(0..3) {
            0 => DataSlot::Force(self.rng.random_range(0..n)),
            1 => DataSlot::Divergence,
            _ => DataSlot::Boundary(self.rng.random_range(0..n)),
        };
        // At xi = 0 the normal boundary datum must vanish.
        if flat && slot == DataSlot::Boundary(n - 1) {
            slot = DataSlot::Boundary(0);
        }
        let profile = match slot {
            DataSlot::Divergence => self.profile(flat),
            _ => self.profile(false),
        };
        let amplitude = Complex64::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0));
        DataMode {
            slot,
            time,
            tangential,
            amplitude,
            profile,
        }
    }

    /// A bundle of one to four modes.
    pub fn bundle(&mut self) -> ModeBundle {
        let count = self.rng.random_range(1..=4);
        ModeBundle {
            modes: (0..count).map(|_| self.mode()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::NormalGrid;
    use std::f64::consts::PI;

    fn grid(k: usize, n: usize) -> Arc<Grid> {
        let normal = NormalGrid::graded(20.0, 64, 1.12, 4e-3).unwrap();
        Arc::new(Grid::new(2.0 * PI, 2, k, n, 2.0 * PI, normal).unwrap())
    }

    #[test]
    fn zero_data_is_degenerate() {
        let data = StokesData::zeros(grid(2, 8));
        let t = trial_ratios(0, "zero", &data, &[2.0], &SolverOptions::default()).unwrap();
        assert!(t[0].degenerate);
    }

    #[test]
    fn random_bundles_are_real_and_solvable() {
        let mut gen = BundleGenerator::new(7, 2, 2, 2);
        for _ in 0..5 {
            let data = gen.bundle().data(grid(3, 8)).unwrap();
            for f in [data.force.value(), data.divergence.value(), &data.boundary] {
                assert!(crate::spectral::transform::hermitian_defect(f).0 < 1e-15);
            }
            solve(&data, &SolverOptions::default()).unwrap();
        }
    }

    #[test]
    fn ratios_are_invariant_under_scaling() {
        let mut gen = BundleGenerator::new(11, 2, 2, 2);
        let data = gen.bundle().data(grid(3, 8)).unwrap();
        let opts = SolverOptions::default();
        let a = trial_ratios(0, "a", &data, &[2.0, 4.0], &opts).unwrap();
        let b = trial_ratios(0, "b", &data.scaled(7.0), &[2.0, 4.0], &opts).unwrap();
        let pairs = a.iter().zip(&b).flat_map(|(a, b)| [(a.oscillatory, b.oscillatory), (a.steady, b.steady)]);
        for (x, y) in pairs {
            if let (Some(x), Some(y)) = (x, y) {
                assert!((x.ratio - y.ratio).abs() <= 1e-12 * x.ratio);
            }
        }
    }
}

//! Verification suites. Each runs one family of checks and reports every
//! measured quantity next to the limit it must respect.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimates::{estimate_sweep, BundleGenerator, EstimateRatioReport, TrialRatios};
use super::manufactured::{catalogue_for, manufactured, recipe};
use super::oracle::{compare_mode, OracleGrid};
use super::residual::{divergence_term, residual_check, residual_on};
use crate::error::{Error, Result};
use crate::halfspace::ops::{divergence, gradient, heat_operator};
use crate::halfspace::stages::boundary_solve;
use crate::halfspace::{solve, LiftPath, ModeSet, SolverOptions, StokesData, StokesSolution};
use crate::setup::Problem;
use crate::spectral::norms::{besov_norm, lq_norm_pieces};
use crate::spectral::transform::{forward, inverse, oscillatory_part, steady_part, time_mean};
use crate::spectral::{Grid, NormalJet, PhysicalField, SpectralField};
use crate::symbols::audit::{marcinkiewicz_audit, standard_symbols, unbounded_example, AuditLattice};
use crate::symbols::boundary::PressureSign;
use crate::symbols::multipliers::ratio_m;
use crate::symbols::partition::{shell_weight, ParabolicScale};
use crate::symbols::ModePoint;

/// Floor below which residuals no longer have to drop under refinement.
pub const RESIDUAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Transforms,
    Partition,
    Oracle,
    Identities,
    Manufactured,
    Uniqueness,
    Estimates,
    Audits,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Transforms,
        Suite::Partition,
        Suite::Oracle,
        Suite::Identities,
        Suite::Manufactured,
        Suite::Uniqueness,
        Suite::Estimates,
        Suite::Audits,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Transforms => "transforms",
            Suite::Partition => "partition",
            Suite::Oracle => "oracle",
            Suite::Identities => "identities",
            Suite::Manufactured => "manufactured",
            Suite::Uniqueness => "uniqueness",
            Suite::Estimates => "estimates",
            Suite::Audits => "audits",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// One measured quantity. A check passes when `value <= limit`, or
/// `value >= limit` for lower bounds; NaN never passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub lower_bound: bool,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            lower_bound: false,
            passed: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            lower_bound: true,
            passed: value >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub sign: PressureSign,
    /// Bundles in the estimate ensemble.
    pub trials: usize,
    /// Lattice modes compared against the oracle.
    pub oracle_modes: usize,
    pub compat_tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 2024,
            sign: PressureSign::Correct,
            trials: 50,
            oracle_modes: 200,
            compat_tol: SolverOptions::default().compat_tol,
        }
    }
}

impl SuiteOptions {
    fn solver(&self, lift: LiftPath) -> SolverOptions {
        SolverOptions {
            pressure_sign: self.sign,
            lift,
            compat_tol: self.compat_tol,
        }
    }

    /// Independent stream per suite, so suites can run in any order.
    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(suite as u64);
        rng
    }
}

pub fn run_suite(suite: Suite, problem: &Problem, opts: &SuiteOptions) -> Result<SuiteReport> {
    problem.validate()?;
    let checks = match suite {
        Suite::Transforms => transforms(problem, opts)?,
        Suite::Partition => partition(problem, opts)?,
        Suite::Oracle => oracle(problem, opts)?,
        Suite::Identities => identities(problem, opts)?,
        Suite::Manufactured => manufactured_recovery(problem, opts)?,
        Suite::Uniqueness => uniqueness(problem, opts)?,
        Suite::Estimates => estimates(problem, opts)?,
        Suite::Audits => audits(problem)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn transforms(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let grid = problem.grid()?;
    let mut rng = opts.rng(Suite::Transforms);
    let comps = grid.dim();
    let samples: Vec<f64> = (0..grid.block() * comps).map(|_| rng.random_range(-1.0..1.0)).collect();
    let u = PhysicalField::from_vec(grid.clone(), comps, samples)?;
    let spec = forward(&u);
    let back = inverse(&spec)?;
    let round_trip = relative(back.sub(&u)?.max_abs(), u.max_abs());

    let mean = steady_part(&spec);
    let rest = oscillatory_part(&spec);
    let idempotent = steady_part(&mean).sub(&mean)?.max_abs() + oscillatory_part(&rest).sub(&rest)?.max_abs();
    let complement = mean.add(&rest)?.sub(&spec)?.max_abs();
    let annihilate = steady_part(&rest).max_abs() + oscillatory_part(&mean).max_abs();
    let mean_physical = relative(inverse(&mean)?.sub(&time_mean(&u))?.max_abs(), u.max_abs());
    // The time mean computed directly from the samples.
    let nt = grid.nt();
    let per_time = grid.n_tan() * grid.nz();
    let mut direct = vec![0.0; per_time * comps];
    for c in 0..comps {
        let comp = u.component(c);
        for t in 0..nt {
            for (d, v) in direct[c * per_time..(c + 1) * per_time].iter_mut().zip(&comp[t * per_time..]) {
                *d += v / nt as f64;
            }
        }
    }
    let projected = inverse(&mean)?;
    let mut mean_direct: f64 = 0.0;
    for c in 0..comps {
        let comp = projected.component(c);
        for t in 0..nt {
            for (d, v) in direct[c * per_time..(c + 1) * per_time].iter().zip(&comp[t * per_time..]) {
                mean_direct = mean_direct.max((d - v).abs());
            }
        }
    }
    Ok(vec![
        Check::at_most("round trip, max relative error", round_trip, 1e-12),
        Check::at_most("projection mean vs time-averaged samples", relative(mean_direct, u.max_abs()), 1e-12),
        Check::at_most("projection mean vs time_mean", mean_physical, 1e-12),
        Check::at_most("projections idempotent (exact)", idempotent, 0.0),
        Check::at_most("projections sum to identity (exact)", complement, 0.0),
        Check::at_most("projections annihilate each other (exact)", annihilate, 0.0),
    ])
}

/// Random points with log-uniform coordinates of random sign.
fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    let v = 2f64.powf(rng.random_range(-10.0..10.0));
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

/// A field on a fixed `2 pi` by `2 pi` grid whose only modes are `k = ±4^l`
/// at `xi = 0`, so its parabolic scale is exactly `2^l`.
fn single_shell_field(problem: &Problem, l: u32, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let k = 4usize.pow(l);
    let grid = Arc::new(Grid::new(2.0 * PI, problem.n, k, 4, 2.0 * PI, problem.normal_grid()?)?);
    let mut f = SpectralField::zeros(grid.clone(), 1);
    let it = grid.time_position(k as i64).expect("frequency on the lattice");
    let (pit, pjt) = grid.partner(it, 0);
    let values: Vec<Complex64> = (0..grid.nz()).map(|_| random_complex(rng)).collect();
    f.profile_mut(0, it * grid.n_tan()).copy_from_slice(&values);
    let conj: Vec<Complex64> = values.iter().map(|z| z.conj()).collect();
    f.profile_mut(0, pit * grid.n_tan() + pjt).copy_from_slice(&conj);
    Ok(f)
}

fn partition(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut rng = opts.rng(Suite::Partition);
    let scale = ParabolicScale::parabolic();
    let tdim = problem.n - 1;
    let points = 10_000;
    let (mut sum_err, mut support, mut sign) = (0.0_f64, 0usize, 0usize);
    for i in 0..points {
        let eta = if i % 10 == 0 { 0.0 } else { log_uniform(&mut rng) };
        let xi: Vec<f64> = (0..tdim).map(|_| log_uniform(&mut rng)).collect();
        let rho = scale.eval(eta, &xi);
        let c = rho.log2().floor() as i32;
        let mut sum = 0.0;
        for l in c - 3..=c + 3 {
            let w = shell_weight(l, rho);
            let y = rho * 2f64.powi(-l);
            sum += w;
            if !(0.5 < y && y < 2.0) && w != 0.0 {
                support += 1;
            }
            // Strictly positive wherever the bump does not underflow.
            if w < 0.0 || (0.51 < y && y < 1.99 && w <= 0.0) {
                sign += 1;
            }
        }
        sum_err = sum_err.max((sum - 1.0).abs());
    }

    let mut besov_err: f64 = 0.0;
    for l in 0..=2u32 {
        let f = single_shell_field(problem, l, &mut rng)?;
        for &q in &problem.q {
            for s in [0.5, 1.0 - 0.5 / q, 2.0 - 1.0 / q] {
                let expect = 2f64.powf(s * l as f64) * lq_norm_pieces(std::slice::from_ref(&f), q)?;
                let got = besov_norm(&f, s, q, scale)?;
                besov_err = besov_err.max((got - expect).abs() / expect);
            }
        }
    }
    Ok(vec![
        Check::at_most("max |sum phi_l - 1| over 1e4 points", sum_err, 1e-12),
        Check::at_most("weights outside their shell", support as f64, 0.0),
        Check::at_most("negative or vanishing weights inside their shell", sign as f64, 0.0),
        Check::at_most("single-shell Besov norm vs 2^{sl} L^q norm", besov_err, 1e-12),
    ])
}

/// Distinct nonzero lattice modes `(k, j)` off the Nyquist line.
fn sample_lattice(rng: &mut ChaCha8Rng, count: usize, k_max: i64, j_max: i64, tdim: usize) -> Vec<(i64, Vec<i64>)> {
    let available = (2 * k_max + 1) as usize * (2 * j_max + 1).pow(tdim as u32) as usize - 1;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count.min(available) {
        let k = rng.random_range(-k_max..=k_max);
        let j: Vec<i64> = (0..tdim).map(|_| rng.random_range(-j_max..=j_max)).collect();
        if k == 0 && j.iter().all(|&x| x == 0) {
            continue;
        }
        if seen.insert((k, j.clone())) {
            out.push((k, j));
        }
    }
    out
}

struct OracleCase {
    mode: ModePoint,
    edge: bool,
    h_tan: Vec<Complex64>,
    h_n: Complex64,
}

fn oracle_cases(problem: &Problem, dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<OracleCase> {
    let k_max = problem.time_modes as i64;
    let j_max = (problem.tangential / 2) as i64 - 1;
    sample_lattice(rng, count, k_max, j_max, dim - 1)
        .into_iter()
        .map(|(k, j)| {
            let mode = ModePoint::new(
                2.0 * PI * k as f64 / problem.tau,
                j.iter().map(|&x| 2.0 * PI * x as f64 / problem.box_length).collect(),
            );
            let h_tan = (0..dim - 1).map(|_| random_complex(rng)).collect();
            let h_n = random_complex(rng);
            let h_n = if mode.wavenumber() == 0.0 { Complex64::default() } else { h_n };
            OracleCase {
                mode,
                edge: k.abs() == k_max,
                h_tan,
                h_n,
            }
        })
        .collect()
}

/// Smoke modes in the other spatial dimension.
const SMOKE_MODES: usize = 20;

fn oracle(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut rng = opts.rng(Suite::Oracle);
    let cases = oracle_cases(problem, problem.n, opts.oracle_modes, &mut rng);
    let other = if problem.n == 2 { 3 } else { 2 };
    let smoke = oracle_cases(problem, other, SMOKE_MODES, &mut rng);
    let grid = OracleGrid::default();
    let compare = |c: &OracleCase| compare_mode(&c.mode, &c.h_tan, c.h_n, opts.sign, grid);
    let results: Vec<_> = cases.par_iter().map(compare).collect::<Result<_>>()?;
    let smoke_results: Vec<_> = smoke.par_iter().map(compare).collect::<Result<_>>()?;

    let worst = |edge: bool| {
        cases
            .iter()
            .zip(&results)
            .filter(|(c, _)| c.edge == edge)
            .map(|(_, r)| r.relative_error)
            .fold(0.0, f64::max)
    };
    let order_dev = results.iter().chain(&smoke_results).map(|r| (r.order - 2.0).abs()).fold(0.0, f64::max);
    let smoke_err = smoke_results.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(vec![
        Check::at_least("modes compared", results.len() as f64, 200.0),
        Check::at_most("max relative error, |k| < K", worst(false), 1e-6),
        Check::at_most("max relative error, |k| = K", worst(true), 1e-6),
        Check::at_most(format!("max relative error, {other}-d smoke modes"), smoke_err, 1e-6),
        Check::at_most("max |order - 2|", order_dev, 0.2),
    ])
}

/// Random Hermitian boundary data on the oscillatory or the steady modes,
/// zero on the Nyquist lines and with `h_n = 0` at `xi = 0`.
fn random_boundary(grid: &Arc<Grid>, steady: bool, rng: &mut ChaCha8Rng) -> SpectralField {
    let n = grid.dim();
    let n_tan = grid.n_tan();
    let mut h = SpectralField::zeros(Arc::new(grid.boundary()), n);
    for it in 0..grid.nt() {
        if (grid.time_index(it) == 0) != steady {
            continue;
        }
        for jt in 0..n_tan {
            let flat = grid.wavevector(jt).iter().all(|&x| x == 0.0);
            let (pit, pjt) = grid.partner(it, jt);
            let (m, pm) = (it * n_tan + jt, pit * n_tan + pjt);
            if grid.is_nyquist(jt) || (steady && flat) || pm < m {
                continue;
            }
            for c in 0..n {
                let z = if flat && c == n - 1 { Complex64::default() } else { random_complex(rng) };
                h.profile_mut(c, m)[0] = z;
                h.profile_mut(c, pm)[0] = z.conj();
            }
        }
    }
    h
}

fn mode_peak(fields: &[&SpectralField], mode: usize) -> f64 {
    fields
        .iter()
        .flat_map(|f| (0..f.components()).flat_map(move |c| f.profile(c, mode).iter()))
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Largest over modes of `|residual|` relative to the largest of the terms
/// that make it up at that mode.
fn per_mode_relative(residual: &SpectralField, terms: &[&SpectralField]) -> f64 {
    (0..residual.mode_count())
        .map(|m| {
            let scale = mode_peak(terms, m);
            if scale > 0.0 {
                mode_peak(&[residual], m) / scale
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

fn boundary_identities(u: &NormalJet, p: &NormalJet, h: &SpectralField) -> Result<[f64; 3]> {
    let div = divergence(u)?.levels()[0].clone();
    let terms: Vec<SpectralField> = (0..u.components()).map(|j| divergence_term(u, j)).collect::<Result<_>>()?;
    let div_rel = per_mode_relative(&div, &terms.iter().collect::<Vec<_>>());

    let heat = heat_operator(u)?;
    let grad_p = gradient(p)?.levels()[0].clone();
    let momentum = heat.add(&grad_p)?;
    let zeroth = heat.add(&u.levels()[2])?;
    let mom_rel = per_mode_relative(&momentum, &[&zeroth, &u.levels()[2], &grad_p]);

    let trace = relative(u.value().trace().sub(h)?.max_abs(), h.max_abs());
    Ok([div_rel, mom_rel, trace])
}

fn identities(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let grid = problem.grid()?;
    let mut rng = opts.rng(Suite::Identities);
    let mut checks = Vec::new();
    for (label, steady, modes) in [("oscillatory", false, ModeSet::Oscillatory), ("steady", true, ModeSet::Steady)] {
        let h = random_boundary(&grid, steady, &mut rng);
        let (u, p) = boundary_solve(&h, &grid, modes, opts.sign, opts.compat_tol, 0.0)?;
        let [div, mom, trace] = boundary_identities(&u, &p, &h)?;
        checks.push(Check::at_most(format!("{label}: divergence, per-mode relative"), div, 1e-12));
        checks.push(Check::at_most(format!("{label}: momentum, per-mode relative"), mom, 1e-12));
        checks.push(Check::at_most(format!("{label}: trace - H, relative"), trace, 1e-14));
    }
    Ok(checks)
}

fn lq(f: &SpectralField, q: f64) -> Result<f64> {
    lq_norm_pieces(std::slice::from_ref(f), q)
}

/// Relative `L^q` distances of velocities and pressure gradients, maximized
/// over `qs`.
fn solution_distance(a: (&NormalJet, &NormalJet), b: (&NormalJet, &NormalJet), qs: &[f64]) -> Result<(f64, f64)> {
    let du = a.0.value().sub(b.0.value())?;
    let ga = gradient(a.1)?.levels()[0].clone();
    let gb = gradient(b.1)?.levels()[0].clone();
    let dg = ga.sub(&gb)?;
    let (mut eu, mut ep) = (0.0_f64, 0.0_f64);
    for &q in qs {
        eu = eu.max(relative(lq(&du, q)?, lq(a.0.value(), q)?));
        ep = ep.max(relative(lq(&dg, q)?, lq(&ga, q)?));
    }
    Ok((eu, ep))
}

fn max_residual(sol: &StokesSolution, data: &StokesData, qs: &[f64], on_reference: bool) -> Result<f64> {
    qs.iter()
        .map(|&q| {
            let r = if on_reference {
                residual_on(sol, data, q)?
            } else {
                residual_check(sol, data, q)?
            };
            Ok(r.max_relative())
        })
        .try_fold(0.0_f64, |a, r: Result<f64>| Ok(a.max(r?)))
}

/// Resolutions `(K/4, N/4)`, `(K/2, N/2)`, `(K, N)`, coarsest first.
fn refinement_levels(problem: &Problem) -> Vec<(usize, usize)> {
    [4, 2, 1]
        .iter()
        .map(|&d| ((problem.time_modes / d).max(1), (problem.tangential / d).max(2) / 2 * 2))
        .collect()
}

fn manufactured_recovery(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let grid = problem.grid()?;
    let solver = opts.solver(LiftPath::Odd);
    let qs = &problem.q;
    let mut checks = Vec::new();
    for r in catalogue_for(problem.n) {
        let bundle = manufactured(&r, grid.clone())?;
        let exact = StokesSolution {
            velocity: bundle.velocity.clone(),
            pressure: bundle.pressure.clone(),
            stages: Vec::new(),
        };
        let self_limit = if r.name == "swirl" { 1e-12 } else { RESIDUAL_FLOOR };
        checks.push(Check::at_most(
            format!("{}: residual of the exact solution", r.name),
            max_residual(&exact, &bundle.data, qs, false)?,
            self_limit,
        ));

        let mut previous: Option<f64> = None;
        for (k, n) in refinement_levels(problem) {
            let level_grid = problem.grid_at(k, n)?;
            let sol = if k == problem.time_modes && n == problem.tangential {
                let sol = solve(&bundle.data, &solver)?;
                let (eu, ep) = solution_distance(
                    (&bundle.velocity, &bundle.pressure),
                    (&sol.velocity, &sol.pressure),
                    qs,
                )?;
                checks.push(Check::at_most(format!("{}: velocity error", r.name), eu, 1e-6));
                checks.push(Check::at_most(format!("{}: pressure gradient error", r.name), ep, 1e-6));
                sol
            } else {
                solve(&bundle.data.truncated(level_grid)?, &solver)?
            };
            let res = max_residual(&sol, &bundle.data, qs, true)?;
            if let Some(prev) = previous {
                // Zero once the floor is reached, otherwise the drop factor.
                let shortfall = if res <= RESIDUAL_FLOOR { 0.0 } else { res / prev };
                checks.push(Check::at_most(
                    format!("{}: residual ratio from (K, N) = ({}, {})", r.name, k / 2, n / 2),
                    shortfall,
                    0.1,
                ));
            }
            previous = Some(res);
        }
    }
    if problem.n == 2 {
        // Three-dimensional smoke run at quarter resolution.
        let smoke = Problem {
            n: 3,
            time_modes: (problem.time_modes / 4).max(4),
            tangential: (problem.tangential / 4).max(16),
            ..problem.clone()
        };
        let r = recipe("oblique_3d").ok_or_else(|| Error::Manufactured("missing 3-d recipe".into()))?;
        let bundle = manufactured(&r, smoke.grid()?)?;
        let sol = solve(&bundle.data, &solver)?;
        let (eu, ep) = solution_distance((&bundle.velocity, &bundle.pressure), (&sol.velocity, &sol.pressure), qs)?;
        checks.push(Check::at_most("oblique_3d (3-d smoke): velocity error", eu, 1e-6));
        checks.push(Check::at_most("oblique_3d (3-d smoke): pressure gradient error", ep, 1e-6));
    }
    Ok(checks)
}

fn data_size(d: &StokesData) -> f64 {
    d.force.value().max_abs().max(d.divergence.value().max_abs()).max(d.boundary.max_abs())
}

/// Random bundles used by the uniqueness suite next to the catalogue.
const UNIQUENESS_BUNDLES: usize = 5;

fn uniqueness(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let grid = problem.grid()?;
    let mut cases: Vec<(String, StokesData)> = Vec::new();
    for r in catalogue_for(problem.n) {
        cases.push((r.name.clone(), manufactured(&r, grid.clone())?.data.oscillatory_part()));
    }
    let mut gen = bundle_generator(problem, opts.seed ^ 0x5eed);
    for i in 0..UNIQUENESS_BUNDLES {
        cases.push((format!("bundle {i}"), gen.bundle().data(grid.clone())?.oscillatory_part()));
    }
    let mut checks = Vec::new();
    let scale = cases.iter().map(|(_, d)| data_size(d)).fold(0.0, f64::max);
    for (label, data) in &cases {
        // Recipes without time dependence leave only roundoff here.
        if data_size(data) <= 1e-12 * scale {
            continue;
        }
        let a = solve(data, &opts.solver(LiftPath::Odd))?;
        let b = solve(data, &opts.solver(LiftPath::Even))?;
        let (du, dp) = solution_distance((&a.velocity, &a.pressure), (&b.velocity, &b.pressure), &problem.q)?;
        checks.push(Check::at_most(format!("{label}: velocity difference"), du, 1e-8));
        checks.push(Check::at_most(format!("{label}: pressure gradient difference"), dp, 1e-8));
    }
    Ok(checks)
}

/// Bundles with modes in `|k| <= K/4`, `|xi index| <= N/16`, which sit well
/// inside both resolutions of the sweep.
pub fn bundle_generator(problem: &Problem, seed: u64) -> BundleGenerator {
    let max_time = (problem.time_modes / 4).max(1) as i64;
    let max_tangential = (problem.tangential / 16).max(1) as i64;
    BundleGenerator::new(seed, problem.n, max_time, max_tangential)
}

fn ratio_change(a: &[TrialRatios], b: &[TrialRatios]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| [(x.oscillatory, y.oscillatory), (x.steady, y.steady)])
        .map(|pair| match pair {
            (Some(x), Some(y)) => (y.ratio / x.ratio - 1.0).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn max_change(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => (b / a - 1.0).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

fn estimates(problem: &Problem, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let coarse = problem.grid_at((problem.time_modes / 2).max(1), (problem.tangential / 2).max(2) / 2 * 2)?;
    let fine = problem.grid()?;
    let mut gen = bundle_generator(problem, opts.seed);
    let bundles: Vec<_> = (0..opts.trials).map(|_| gen.bundle()).collect();
    let place = |grid: &Arc<Grid>| -> Result<Vec<(String, StokesData)>> {
        bundles
            .iter()
            .enumerate()
            .map(|(i, b)| Ok((format!("bundle {i}"), b.data(grid.clone())?)))
            .collect()
    };
    let base = place(&coarse)?;
    let shift = (coarse.nt() / 3) as i64;
    let scaled: Vec<_> = base.iter().map(|(l, d)| (l.clone(), d.scaled(7.0))).collect();
    let shifted: Vec<_> = base.iter().map(|(l, d)| (l.clone(), d.time_shifted(shift))).collect();
    let solver = opts.solver(LiftPath::Odd);
    let sweep = |ens: &[(String, StokesData)]| estimate_sweep(ens, &problem.q, &solver);
    let coarse_reports: Vec<EstimateRatioReport> = sweep(&base)?;
    let fine_reports = sweep(&place(&fine)?)?;
    let scaled_reports = sweep(&scaled)?;
    let shifted_reports = sweep(&shifted)?;

    let mut checks = Vec::new();
    for (i, &q) in problem.q.iter().enumerate() {
        let (c, f) = (&coarse_reports[i], &fine_reports[i]);
        let finite = c.all_finite() && f.all_finite();
        checks.push(Check::at_least(format!("q = {q}: bundles"), c.trials.len() as f64, 50.0));
        checks.push(Check::at_least(
            format!("q = {q}: all ratios finite"),
            if finite { 1.0 } else { 0.0 },
            1.0,
        ));
        checks.push(Check::at_most(
            format!("q = {q}: oscillatory max ratio, change under doubling"),
            max_change(c.oscillatory.map(|s| s.max), f.oscillatory.map(|s| s.max)),
            0.1,
        ));
        checks.push(Check::at_most(
            format!("q = {q}: steady max ratio, change under doubling"),
            max_change(c.steady.map(|s| s.max), f.steady.map(|s| s.max)),
            0.1,
        ));
        checks.push(Check::at_most(
            format!("q = {q}: ratio change under scaling by 7"),
            ratio_change(&c.trials, &scaled_reports[i].trials),
            1e-12,
        ));
        checks.push(Check::at_most(
            format!("q = {q}: ratio change under a time shift of {shift} samples"),
            ratio_change(&c.trials, &shifted_reports[i].trials),
            1e-12,
        ));
    }
    Ok(checks)
}

fn audits(problem: &Problem) -> Result<Vec<Check>> {
    let tdim = problem.n - 1;
    let base = AuditLattice {
        per_octave: 2,
        ..AuditLattice::default()
    };
    let refined = AuditLattice { per_octave: 4, ..base };
    let mut checks = Vec::new();
    let mut m_sup: f64 = 0.0;
    for (name, symbol) in standard_symbols() {
        let a = marcinkiewicz_audit(&name, tdim, &symbol, &base)?;
        let b = marcinkiewicz_audit(&name, tdim, &symbol, &refined)?;
        let finite = a.rows.iter().chain(&b.rows).all(|r| r.sup.is_finite()) && !a.divergent && !b.divergent;
        let change = a
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(x, y)| max_change(Some(x.sup).filter(|s| *s > 0.0), Some(y.sup).filter(|s| *s > 0.0)))
            .fold(0.0, f64::max);
        checks.push(Check::at_least(format!("{name}: bounded"), if finite { 1.0 } else { 0.0 }, 1.0));
        checks.push(Check::at_most(format!("{name}: sup change under refinement"), change, 0.05));
        if name == "ratio_m" {
            m_sup = m_sup.max(a.rows[0].sup).max(b.rows[0].sup);
        }
    }
    // |M| on random points in addition to the lattices.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10_000 {
        let eta = log_uniform(&mut rng);
        let xi: Vec<f64> = (0..tdim).map(|_| log_uniform(&mut rng)).collect();
        m_sup = m_sup.max(ratio_m(eta, &xi)?.norm());
    }
    checks.push(Check::at_most("sup |ratio_m|", m_sup, 1.0 + 1e-12));
    let control = marcinkiewicz_audit("inverse wavenumber", tdim, &unbounded_example(), &base)?;
    checks.push(Check::at_least(
        "inverse wavenumber flagged divergent",
        if control.divergent { 1.0 } else { 0.0 },
        1.0,
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Problem {
        Problem {
            time_modes: 4,
            tangential: 16,
            normal_nodes: 96,
            grading: 1.1,
            first_cell: 3e-3,
            ..Problem::default()
        }
    }

    #[test]
    fn checks_treat_nan_as_failure() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(!Check::at_least("x", f64::NAN, 1.0).passed);
        assert!(Check::at_most("x", 0.0, 0.0).passed);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
    }

    #[test]
    fn boundary_identities_hold_on_a_small_grid() {
        let r = run_suite(Suite::Identities, &small(), &SuiteOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn flipped_sign_breaks_the_identities() {
        let opts = SuiteOptions {
            sign: PressureSign::Flipped,
            ..SuiteOptions::default()
        };
        assert!(!run_suite(Suite::Identities, &small(), &opts).unwrap().passed());
    }

    #[test]
    fn lattice_sampling_is_distinct_and_avoids_the_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let modes = sample_lattice(&mut rng, 50, 4, 3, 1);
        let set: BTreeSet<_> = modes.iter().cloned().collect();
        assert_eq!(set.len(), 50);
        assert!(!set.contains(&(0, vec![0])));
        assert_eq!(sample_lattice(&mut rng, 500, 1, 1, 1).len(), 8);
    }
}

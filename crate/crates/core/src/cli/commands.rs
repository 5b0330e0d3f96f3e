//! The subcommands. Each writes its artifacts and reports whether its
//! own acceptance condition held.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use super::artifacts::{num, Artifacts, Table};
use super::config::{bundle_of, Action, Generator, RunConfig};
use crate::error::{Error, Result};
use crate::halfspace::ops::gradient;
use crate::halfspace::{solve, LiftPath, SolverOptions, StokesData, StokesSolution};
use crate::spectral::io::{encode_field, read_field};
use crate::spectral::norms::{besov_shells, lq_norm_pieces, steady_besov_norm};
use crate::spectral::transform::{inverse, oscillatory_part, steady_part};
use crate::spectral::{Grid, PhysicalField, SpectralField};
use crate::symbols::audit::{marcinkiewicz_audit, standard_symbols, unbounded_example, SymbolFn};
use crate::symbols::boundary::PressureSign;
use crate::symbols::partition::ParabolicScale;
use crate::verification::estimates::{estimate_sweep, DataMode, DataSlot, EstimateRatioReport, ModeBundle};
use crate::verification::manufactured::{manufactured, recipe, ExpPoly, ManufacturedBundle};
use crate::verification::residual::{residual_check, ResidualReport};
use crate::verification::suites::{bundle_generator, run_suite, Suite, SuiteOptions, SuiteReport};

/// Name of the control symbol with no uniform bound.
pub const CONTROL_SYMBOL: &str = "inverse_wavenumber";

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    /// One line per item, printed to standard output.
    pub lines: Vec<String>,
}

pub struct Run<'a> {
    pub config: &'a RunConfig,
    pub sign: PressureSign,
    pub out: &'a mut Artifacts,
}

impl Run<'_> {
    fn solver(&self) -> SolverOptions {
        SolverOptions {
            pressure_sign: self.sign,
            lift: LiftPath::Odd,
            compat_tol: self.config.tolerances.compat,
        }
    }

    pub fn execute(&mut self, action: Action) -> Result<Outcome> {
        match action {
            Action::Solve => self.solve(),
            Action::Verify => self.verify(),
            Action::Sweep => self.sweep(),
            Action::Besov => self.besov(),
            Action::SymbolsAudit => self.audit(),
        }
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self)?;
        self.out.time(label, start.elapsed().as_secs_f64());
        Ok(out)
    }

    fn solve(&mut self) -> Result<Outcome> {
        let input = self.timed("data", |r| single_input(r.config))?;
        let sol = self.timed("solve", |r| solve(&input.data, &r.solver()))?;
        let qs = self.config.problem.q.clone();
        let reports: Vec<ResidualReport> = qs
            .iter()
            .map(|&q| residual_check(&sol, &input.data, q))
            .collect::<Result<_>>()?;

        self.out.write("velocity.field", &encode_field(&inverse(sol.velocity.value())?))?;
        self.out.write("pressure.field", &encode_field(&inverse(sol.pressure.value())?))?;
        self.out.json("stages.json", &stage_summary(&sol, &qs)?)?;
        self.out.json("residuals.json", &reports)?;
        let mut table = Table::new(&["q", "quantity", "absolute", "relative"]);
        for r in &reports {
            for (name, v) in [("momentum", r.momentum), ("divergence", r.divergence), ("trace", r.trace)] {
                table.row([num(r.q), name.to_string(), num(v.absolute), num(v.relative)]);
            }
        }
        self.out.csv("residuals.csv", table)?;
        self.out.csv("profile.csv", profile_slice(&sol)?)?;

        let mut lines: Vec<String> = reports
            .iter()
            .map(|r| format!("q = {}: max relative residual {:.3e}", r.q, r.max_relative()))
            .collect();
        if let Some(exact) = &input.exact {
            let rec = recovery(&sol, exact, &qs)?;
            for r in &rec {
                lines.push(format!(
                    "q = {}: recovery error velocity {:.3e}, pressure gradient {:.3e}",
                    r.q, r.velocity, r.pressure_gradient
                ));
            }
            self.out.json("recovery.json", &rec)?;
        }
        let tol = self.config.tolerances.residual;
        let passed = reports.iter().all(|r| r.max_relative() <= tol);
        lines.push(format!("residual tolerance {tol:e}: {}", if passed { "met" } else { "exceeded" }));
        Ok(Outcome { passed, lines })
    }

    fn verify(&mut self) -> Result<Outcome> {
        let cfg = self.config;
        let suites: Vec<Suite> = if cfg.verify.suites.is_empty() { Suite::ALL.to_vec() } else { cfg.verify.suites.clone() };
        let opts = SuiteOptions {
            seed: cfg.seed,
            sign: self.sign,
            trials: cfg.verify.trials,
            oracle_modes: cfg.verify.oracle_modes,
            compat_tol: cfg.tolerances.compat,
        };
        let mut reports: Vec<SuiteReport> = Vec::new();
        let mut lines = Vec::new();
        for s in suites {
            let r = self.timed(s.name(), |_| run_suite(s, &cfg.problem, &opts))?;
            lines.push(format!("{} {}", if r.passed() { "PASS" } else { "FAIL" }, s.name()));
            for c in r.failures() {
                lines.push(format!("    {}: {:e} (limit {:e})", c.name, c.value, c.limit));
            }
            reports.push(r);
        }
        let passed = reports.iter().all(SuiteReport::passed);
        let mut table = Table::new(&["suite", "check", "value", "limit", "bound", "passed"]);
        for r in &reports {
            for c in &r.checks {
                table.row([
                    r.suite.name().to_string(),
                    c.name.clone(),
                    num(c.value),
                    num(c.limit),
                    if c.lower_bound { "lower" } else { "upper" }.to_string(),
                    c.passed.to_string(),
                ]);
            }
        }
        self.out.csv("verify.csv", table)?;
        #[derive(Serialize)]
        struct Summary<'a> {
            config_hash: String,
            perturbed: bool,
            passed: bool,
            suites: Vec<SuiteEntry<'a>>,
        }
        #[derive(Serialize)]
        struct SuiteEntry<'a> {
            passed: bool,
            #[serde(flatten)]
            report: &'a SuiteReport,
        }
        self.out.json(
            "verify.json",
            &Summary {
                config_hash: super::config_hash(cfg),
                perturbed: self.sign == PressureSign::Flipped,
                passed,
                suites: reports.iter().map(|r| SuiteEntry { passed: r.passed(), report: r }).collect(),
            },
        )?;
        Ok(Outcome { passed, lines })
    }

    fn sweep(&mut self) -> Result<Outcome> {
        let cfg = self.config;
        let ensemble = self.timed("data", |_| ensemble(cfg))?;
        let solver = self.solver();
        let fine = self.timed("sweep", |_| estimate_sweep(&ensemble, &cfg.problem.q, &solver))?;
        let mut all = fine.clone();
        let mut lines = Vec::new();
        if cfg.sweep.two_resolutions {
            let g = ensemble[0].1.grid();
            let coarse_grid = Arc::new(g.with_resolution((g.time_modes() / 2).max(1), (g.tangential() / 4).max(1) * 2)?);
            let coarse: Vec<(String, StokesData)> = ensemble
                .iter()
                .map(|(l, d)| Ok((l.clone(), d.truncated(coarse_grid.clone())?)))
                .collect::<Result<_>>()?;
            let coarse = self.timed("sweep coarse", |_| estimate_sweep(&coarse, &cfg.problem.q, &solver))?;
            for (c, f) in coarse.iter().zip(&fine) {
                lines.push(format!(
                    "q = {}: max oscillatory ratio {} -> {}, steady {} -> {}",
                    f.q,
                    fmt_max(c.oscillatory.map(|s| s.max)),
                    fmt_max(f.oscillatory.map(|s| s.max)),
                    fmt_max(c.steady.map(|s| s.max)),
                    fmt_max(f.steady.map(|s| s.max)),
                ));
            }
            all.extend(coarse);
        } else {
            for f in &fine {
                lines.push(format!(
                    "q = {}: max oscillatory ratio {}, steady {}",
                    f.q,
                    fmt_max(f.oscillatory.map(|s| s.max)),
                    fmt_max(f.steady.map(|s| s.max))
                ));
            }
        }
        let degenerate = all.iter().flat_map(|r| &r.trials).filter(|t| t.degenerate).count();
        if degenerate > 0 {
            lines.push(format!("{degenerate} degenerate rows (0 / 0)"));
        }
        self.out.csv("sweep.csv", sweep_table(&all))?;
        self.out.json("sweep.json", &all)?;
        let passed = all.iter().all(EstimateRatioReport::all_finite);
        Ok(Outcome { passed, lines })
    }

    fn besov(&mut self) -> Result<Outcome> {
        let cfg = self.config;
        let input = self.timed("data", |_| single_input(cfg))?;
        let d = &input.data;
        let fields: [(&str, &SpectralField); 3] = [
            ("force", d.force.value()),
            ("divergence", d.divergence.value()),
            ("boundary", &d.boundary),
        ];
        let mut table = Table::new(&["field", "part", "q", "s", "shell", "value", "ratio_to_lq"]);
        let mut lines = Vec::new();
        let mut rows: Vec<BesovRow> = Vec::new();
        for &q in &cfg.problem.q {
            let mut orders = cfg.besov.s.clone();
            orders.push(2.0 - 1.0 / q);
            for &s in &orders {
                for (name, f) in fields {
                    let osc = oscillatory_part(f);
                    let lq = lq_norm_pieces(std::slice::from_ref(&osc), q)?;
                    let shells = besov_shells(&osc, s, q, ParabolicScale::parabolic())?;
                    let total = shells.iter().map(|(_, v)| v.powf(q)).sum::<f64>().powf(1.0 / q);
                    for (l, v) in &shells {
                        rows.push(BesovRow::new(name, "oscillatory", q, s, Some(*l), *v, lq));
                    }
                    rows.push(BesovRow::new(name, "oscillatory", q, s, None, total, lq));
                    let st = steady_part(f);
                    let st_lq = lq_norm_pieces(std::slice::from_ref(&st), q)?;
                    rows.push(BesovRow::new(name, "steady", q, s, None, steady_besov_norm(&st, s, q)?, st_lq));
                    if name == "boundary" {
                        lines.push(format!("q = {q}, s = {s}: boundary oscillatory Besov norm {total:.6e} (L^q {lq:.6e})"));
                    }
                }
            }
        }
        for r in &rows {
            table.row([
                r.field.to_string(),
                r.part.to_string(),
                num(r.q),
                num(r.s),
                r.shell.map_or("total".to_string(), |l| l.to_string()),
                num(r.value),
                num(r.ratio_to_lq),
            ]);
        }
        self.out.csv("besov.csv", table)?;
        self.out.json("besov.json", &rows)?;
        Ok(Outcome { passed: true, lines })
    }

    fn audit(&mut self) -> Result<Outcome> {
        let cfg = self.config;
        let mut symbols: Vec<(String, SymbolFn)> = standard_symbols();
        symbols.push((CONTROL_SYMBOL.to_string(), unbounded_example()));
        if !cfg.audit.symbols.is_empty() {
            for name in &cfg.audit.symbols {
                if !symbols.iter().any(|(s, _)| s == name) {
                    return Err(Error::Config(format!("unknown symbol {name:?}")));
                }
            }
            symbols.retain(|(s, _)| cfg.audit.symbols.contains(s));
        } else {
            symbols.retain(|(s, _)| s != CONTROL_SYMBOL);
        }
        let lattice = cfg.audit.lattice();
        let tdim = cfg.problem.n - 1;
        let mut table = Table::new(&["symbol", "mask", "sup", "per_octave"]);
        let mut summary = Vec::new();
        let mut lines = Vec::new();
        let mut passed = true;
        for (name, f) in &symbols {
            let r = self.timed(name, |_| marcinkiewicz_audit(name, tdim, f, &lattice))?;
            for row in &r.rows {
                table.row([name.clone(), row.mask_label(r.coords), num(row.sup), row.per_octave.to_string()]);
            }
            let status = if r.divergent { "divergent" } else { "bounded" };
            lines.push(format!("{name}: max sup {:.6e}, growth {:.4}, {status}", r.max_sup(), r.growth));
            if name != CONTROL_SYMBOL {
                passed &= !r.divergent;
            }
            summary.push(AuditSummary {
                symbol: name.clone(),
                max_sup: r.max_sup(),
                growth: r.growth,
                divergent: r.divergent,
            });
        }
        self.out.csv("audit.csv", table)?;
        self.out.json("audit.json", &summary)?;
        Ok(Outcome { passed, lines })
    }
}

#[derive(Debug, Serialize)]
struct AuditSummary {
    symbol: String,
    max_sup: f64,
    growth: f64,
    divergent: bool,
}

#[derive(Debug, Serialize)]
struct BesovRow {
    field: &'static str,
    part: &'static str,
    q: f64,
    s: f64,
    /// `None` for the full norm.
    shell: Option<i32>,
    value: f64,
    ratio_to_lq: f64,
}

impl BesovRow {
    fn new(field: &'static str, part: &'static str, q: f64, s: f64, shell: Option<i32>, value: f64, lq: f64) -> Self {
        Self {
            field,
            part,
            q,
            s,
            shell,
            value,
            ratio_to_lq: if lq > 0.0 { value / lq } else { 0.0 },
        }
    }
}

fn fmt_max(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.6}"))
}

/// Data to solve, with the exact solution when it is known.
pub struct Input {
    pub data: StokesData,
    pub exact: Option<ManufacturedBundle>,
}

fn placed(bundle: &ModeBundle, grid: Arc<Grid>) -> Result<StokesData> {
    bundle.data(grid).map_err(|e| match e {
        Error::Grid(m) => Error::Config(m),
        other => other,
    })
}

/// A tangential boundary datum at time frequency `4^level`.
fn single_shell(level: u32, grid: &Grid) -> Result<ModeBundle> {
    let target = 4f64.powi(level as i32);
    let index = target * grid.tau() / (2.0 * PI);
    if (index - index.round()).abs() > 1e-9 || index.round() as usize > grid.time_modes() {
        return Err(Error::Config(format!(
            "frequency {target} is not on the time lattice of period {} with K = {}",
            grid.tau(),
            grid.time_modes()
        )));
    }
    Ok(ModeBundle {
        modes: vec![DataMode {
            slot: DataSlot::Boundary(0),
            time: index.round() as i64,
            tangential: vec![0; grid.tdim()],
            amplitude: Complex64::new(1.0, 0.0),
            profile: ExpPoly::new(1.0, &[1.0]),
        }],
    })
}

fn read_files(cfg: &RunConfig) -> Result<StokesData> {
    let d = &cfg.data;
    let load = |p: &Option<std::path::PathBuf>| -> Result<PhysicalField> {
        read_field(p.as_ref().ok_or_else(|| Error::Config("missing field path".into()))?)
    };
    let (f, g, h) = (load(&d.force)?, load(&d.divergence)?, load(&d.boundary)?);
    StokesData::from_physical(&f, &g, &h)
}

pub fn single_input(cfg: &RunConfig) -> Result<Input> {
    let grid = cfg.problem.grid()?;
    let d = &cfg.data;
    let data = match d.generator {
        Generator::Zero => StokesData::zeros(grid),
        Generator::Manufactured => {
            let name = d.recipe.as_deref().unwrap_or_default();
            let r = recipe(name).ok_or_else(|| Error::Config(format!("unknown recipe {name:?}")))?;
            let bundle = manufactured(&r, grid)?;
            return Ok(Input {
                data: bundle.data.clone(),
                exact: Some(bundle),
            });
        }
        Generator::Bundle => placed(&bundle_generator(&cfg.problem, cfg.seed).bundle(), grid)?,
        Generator::Modes => placed(&bundle_of(&d.modes), grid)?,
        Generator::SingleShell => placed(&single_shell(d.level, &grid)?, grid)?,
        Generator::Files => read_files(cfg)?,
    };
    Ok(Input { data, exact: None })
}

pub fn ensemble(cfg: &RunConfig) -> Result<Vec<(String, StokesData)>> {
    let grid = cfg.problem.grid()?;
    match cfg.data.generator {
        Generator::Bundle => {
            let mut gen = bundle_generator(&cfg.problem, cfg.seed);
            (0..cfg.sweep.trials)
                .map(|i| Ok((format!("bundle {i}"), placed(&gen.bundle(), grid.clone())?)))
                .collect()
        }
        Generator::Zero => Ok((0..cfg.sweep.trials)
            .map(|i| (format!("zero {i}"), StokesData::zeros(grid.clone())))
            .collect()),
        other => {
            let label = match other {
                Generator::Manufactured => cfg.data.recipe.clone().unwrap_or_default(),
                _ => format!("{other:?}").to_lowercase(),
            };
            Ok(vec![(label, single_input(cfg)?.data)])
        }
    }
}

#[derive(Debug, Serialize)]
struct StageNorms {
    name: &'static str,
    q: f64,
    velocity: f64,
    pressure_gradient: f64,
}

fn stage_summary(sol: &StokesSolution, qs: &[f64]) -> Result<Vec<StageNorms>> {
    let mut out = Vec::new();
    for s in &sol.stages {
        let gp = gradient(&s.pressure)?.levels()[0].clone();
        for &q in qs {
            out.push(StageNorms {
                name: s.name,
                q,
                velocity: lq_norm_pieces(std::slice::from_ref(s.velocity.value()), q)?,
                pressure_gradient: lq_norm_pieces(std::slice::from_ref(&gp), q)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct Recovery {
    pub q: f64,
    pub velocity: f64,
    pub pressure_gradient: f64,
}

fn recovery(sol: &StokesSolution, exact: &ManufacturedBundle, qs: &[f64]) -> Result<Vec<Recovery>> {
    let du = sol.velocity.value().sub(exact.velocity.value())?;
    let g_exact = gradient(&exact.pressure)?.levels()[0].clone();
    let dg = gradient(&sol.pressure)?.levels()[0].sub(&g_exact)?;
    let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    qs.iter()
        .map(|&q| {
            let n = |f: &SpectralField| lq_norm_pieces(std::slice::from_ref(f), q);
            Ok(Recovery {
                q,
                velocity: rel(n(&du)?, n(exact.velocity.value())?),
                pressure_gradient: rel(n(&dg)?, n(&g_exact)?),
            })
        })
        .collect()
}

/// Velocity and pressure along `x_n` at `t = 0`, `x' = 0`.
fn profile_slice(sol: &StokesSolution) -> Result<Table> {
    let u = inverse(sol.velocity.value())?;
    let p = inverse(sol.pressure.value())?;
    let grid = u.grid().clone();
    let n = grid.dim();
    let mut header: Vec<String> = vec!["x_n".into()];
    header.extend((0..n).map(|c| format!("u{c}")));
    header.push("p".into());
    let mut table = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for (iz, &x) in grid.normal().nodes().iter().enumerate() {
        let mut row = vec![num(x)];
        row.extend((0..n).map(|c| num(u.component(c)[iz])));
        row.push(num(p.component(0)[iz]));
        table.row(row);
    }
    Ok(table)
}

fn sweep_table(reports: &[EstimateRatioReport]) -> Table {
    let mut table = Table::new(&[
        "time_modes",
        "tangential",
        "q",
        "trial",
        "label",
        "oscillatory_lhs",
        "oscillatory_rhs",
        "oscillatory_ratio",
        "steady_lhs",
        "steady_rhs",
        "steady_ratio",
        "top_shell_flag",
        "degenerate",
    ]);
    let cell = |v: Option<f64>| v.map_or(String::new(), num);
    for r in reports {
        for t in &r.trials {
            table.row([
                r.resolution.time_modes.to_string(),
                r.resolution.tangential.to_string(),
                num(r.q),
                t.trial.to_string(),
                t.label.clone(),
                cell(t.oscillatory.map(|x| x.lhs)),
                cell(t.oscillatory.map(|x| x.rhs)),
                cell(t.oscillatory.map(|x| x.ratio)),
                cell(t.steady.map(|x| x.lhs)),
                cell(t.steady.map(|x| x.rhs)),
                cell(t.steady.map(|x| x.ratio)),
                t.top_shell_flag.to_string(),
                t.degenerate.to_string(),
            ]);
        }
    }
    table
}

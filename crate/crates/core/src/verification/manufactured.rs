//! Manufactured solutions: closed-form `(u*, p*)` built from separable terms,
//! with `(f, g, h)` evaluated analytically.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::halfspace::StokesData;
use crate::spectral::transform::forward;
use crate::spectral::{Grid, NormalJet, PhysicalField};

/// Largest allowed relative size of a normal profile and its first three
/// derivatives at the far end of the grid.
pub const TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum TimeFactor {
    One,
    /// `cos(m w t + phase)` with `w = 2 pi / tau`.
    Harmonic { index: i64, phase: f64 },
    /// `exp(beta cos(w t))`, not band-limited.
    ExpCos { beta: f64 },
}

impl TimeFactor {
    /// Value and time derivative.
    fn eval(&self, t: f64, tau: f64) -> (f64, f64) {
        let w = 2.0 * PI / tau;
        match *self {
            TimeFactor::One => (1.0, 0.0),
            TimeFactor::Harmonic { index, phase } => {
                let a = index as f64 * w;
                let th = a * t + phase;
                (th.cos(), -a * th.sin())
            }
            TimeFactor::ExpCos { beta } => {
                let v = (beta * (w * t).cos()).exp();
                (v, -beta * w * (w * t).sin() * v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlaneFactor {
    One,
    /// `cos(xi . x' + phase)` with `xi = 2 pi index / L`.
    Wave { index: Vec<i64>, phase: f64 },
    /// `exp(beta sin(2 pi x_dim / L))`, not band-limited.
    ExpSin { dim: usize, beta: f64 },
}

/// Value, gradient and Laplacian of a tangential factor.
struct PlaneSample {
    value: f64,
    grad: Vec<f64>,
    laplacian: f64,
}

impl PlaneFactor {
    fn eval(&self, x: &[f64], length: f64) -> PlaneSample {
        let tdim = x.len();
        let kappa = 2.0 * PI / length;
        match self {
            PlaneFactor::One => PlaneSample {
                value: 1.0,
                grad: vec![0.0; tdim],
                laplacian: 0.0,
            },
            PlaneFactor::Wave { index, phase } => {
                let xi: Vec<f64> = (0..tdim)
                    .map(|d| kappa * index.get(d).copied().unwrap_or(0) as f64)
                    .collect();
                let th: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phase;
                let r2: f64 = xi.iter().map(|a| a * a).sum();
                PlaneSample {
                    value: th.cos(),
                    grad: xi.iter().map(|a| -a * th.sin()).collect(),
                    laplacian: -r2 * th.cos(),
                }
            }
            PlaneFactor::ExpSin { dim, beta } => {
                let y = kappa * x[*dim];
                let v = (beta * y.sin()).exp();
                let d1 = beta * kappa * y.cos();
                let mut grad = vec![0.0; tdim];
                grad[*dim] = d1 * v;
                PlaneSample {
                    value: v,
                    grad,
                    laplacian: (d1 * d1 - beta * kappa * kappa * y.sin()) * v,
                }
            }
        }
    }

    fn max_dim(&self) -> usize {
        match self {
            PlaneFactor::One => 0,
            PlaneFactor::Wave { index, .. } => {
                index.iter().rposition(|&j| j != 0).map_or(0, |p| p + 1)
            }
            PlaneFactor::ExpSin { dim, .. } => dim + 1,
        }
    }
}

/// `sum_j c_j x^j e^{-rate x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    pub rate: f64,
    pub coeffs: Vec<f64>,
}

impl ExpPoly {
    pub fn new(rate: f64, coeffs: &[f64]) -> Self {
        Self {
            rate,
            coeffs: coeffs.to_vec(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        poly * (-self.rate * x).exp()
    }

    pub fn derivative(&self) -> ExpPoly {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|j| {
                let up = if j + 1 < n { (j + 1) as f64 * self.coeffs[j + 1] } else { 0.0 };
                up - self.rate * self.coeffs[j]
            })
            .collect();
        ExpPoly {
            rate: self.rate,
            coeffs,
        }
    }

    pub fn nth_derivative(&self, order: usize) -> ExpPoly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }
}

/// What a term contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Tangential(usize),
    Normal,
    Pressure,
}

/// `amplitude * T(t) * X(x') * P(x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub target: Target,
    pub amplitude: f64,
    pub time: TimeFactor,
    pub plane: PlaneFactor,
    pub normal: ExpPoly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub name: String,
    /// Smallest dimension the recipe makes sense in.
    pub min_dim: usize,
    pub terms: Vec<Term>,
}

/// Exact solution together with the data it generates.
#[derive(Debug, Clone)]
pub struct ManufacturedBundle {
    pub recipe: String,
    /// `u*` with two normal derivatives.
    pub velocity: NormalJet,
    /// `p*` with one normal derivative.
    pub pressure: NormalJet,
    pub data: StokesData,
}

fn velocity_component(target: Target, n: usize) -> Option<usize> {
    match target {
        Target::Tangential(d) => Some(d),
        Target::Normal => Some(n - 1),
        Target::Pressure => None,
    }
}

fn check_recipe(recipe: &Recipe, grid: &Grid) -> Result<()> {
    let n = grid.dim();
    if n < recipe.min_dim {
        return Err(Error::Manufactured(format!(
            "recipe {} needs dimension >= {}",
            recipe.name, recipe.min_dim
        )));
    }
    let x_max = grid.normal().x_max();
    for (i, t) in recipe.terms.iter().enumerate() {
        if let Target::Tangential(d) = t.target {
            if d + 1 >= n {
                return Err(Error::Manufactured(format!("term {i} targets tangential direction {d}")));
            }
        }
        if t.plane.max_dim() > n - 1 {
            return Err(Error::Manufactured(format!("term {i} varies along a missing direction")));
        }
        let peak = grid
            .normal()
            .nodes()
            .iter()
            .map(|&x| t.normal.eval(x).abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let first = if t.target == Target::Pressure { 1 } else { 0 };
        for j in first..=3 {
            let tail = t.normal.nth_derivative(j).eval(x_max).abs();
            if tail > TAIL_TOL * peak {
                return Err(Error::Manufactured(format!(
                    "term {i} of recipe {} decays too slowly: derivative {j} is {tail:e} at x_n = {x_max}",
                    recipe.name
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Velocity,
    Pressure,
    Force,
    Divergence,
}

/// Samples one quantity with `shift` extra normal derivatives.
fn sample(grid: &Arc<Grid>, recipe: &Recipe, quantity: Quantity, shift: usize) -> PhysicalField {
    let n = grid.dim();
    let comps = match quantity {
        Quantity::Velocity | Quantity::Force => n,
        Quantity::Pressure | Quantity::Divergence => 1,
    };
    let tau = grid.tau();
    let length = grid.box_length();
    let normal: Vec<Vec<ExpPoly>> = recipe
        .terms
        .iter()
        .map(|t| (0..=shift + 2).map(|j| t.normal.nth_derivative(j)).collect())
        .collect();
    PhysicalField::from_fn(grid.clone(), comps, |c, t, x, xn| {
        let mut total = 0.0;
        for (term, p) in recipe.terms.iter().zip(&normal) {
            let vel = velocity_component(term.target, n);
            let relevant = match quantity {
                Quantity::Velocity => vel == Some(c),
                Quantity::Pressure => term.target == Target::Pressure,
                Quantity::Force => vel == Some(c) || term.target == Target::Pressure,
                Quantity::Divergence => vel.is_some(),
            };
            if !relevant {
                continue;
            }
            let (tv, dtv) = term.time.eval(t, tau);
            let x_f = term.plane.eval(x, length);
            let a = term.amplitude;
            let p_at = |j: usize| p[j].eval(xn);
            total += match (quantity, term.target) {
                (Quantity::Velocity, _) | (Quantity::Pressure, _) => a * tv * x_f.value * p_at(shift),
                (Quantity::Force, Target::Pressure) => {
                    if c == n - 1 {
                        a * tv * x_f.value * p_at(shift + 1)
                    } else {
                        a * tv * x_f.grad[c] * p_at(shift)
                    }
                }
                (Quantity::Force, _) => {
                    a * (dtv * x_f.value * p_at(shift)
                        - tv * (x_f.laplacian * p_at(shift) + x_f.value * p_at(shift + 2)))
                }
                (Quantity::Divergence, Target::Tangential(d)) => a * tv * x_f.grad[d] * p_at(shift),
                (Quantity::Divergence, _) => a * tv * x_f.value * p_at(shift + 1),
            };
        }
        total
    })
}

fn jet_of(grid: &Arc<Grid>, recipe: &Recipe, quantity: Quantity, order: usize) -> Result<NormalJet> {
    NormalJet::new((0..=order).map(|s| forward(&sample(grid, recipe, quantity, s))).collect())
}

/// Evaluates `(u*, p*)` and the data `(f, g, h)` they generate.
pub fn manufactured(recipe: &Recipe, grid: Arc<Grid>) -> Result<ManufacturedBundle> {
    check_recipe(recipe, &grid)?;
    let velocity = jet_of(&grid, recipe, Quantity::Velocity, 2)?;
    let pressure = jet_of(&grid, recipe, Quantity::Pressure, 1)?;
    let force = jet_of(&grid, recipe, Quantity::Force, 1)?;
    let divergence = jet_of(&grid, recipe, Quantity::Divergence, 1)?;
    let boundary_grid = Arc::new(grid.boundary());
    let boundary = forward(&sample(&boundary_grid, recipe, Quantity::Velocity, 0));
    Ok(ManufacturedBundle {
        recipe: recipe.name.clone(),
        velocity,
        pressure,
        data: StokesData::new(force, divergence, boundary)?,
    })
}

fn term(target: Target, amplitude: f64, time: TimeFactor, plane: PlaneFactor, normal: ExpPoly) -> Term {
    Term {
        target,
        amplitude,
        time,
        plane,
        normal,
    }
}

fn harmonic(index: i64, phase: f64) -> TimeFactor {
    TimeFactor::Harmonic { index, phase }
}

fn wave(index: &[i64], phase: f64) -> PlaneFactor {
    PlaneFactor::Wave {
        index: index.to_vec(),
        phase,
    }
}

/// Every named recipe.
pub fn catalogue() -> Vec<Recipe> {
    use Target::{Normal, Pressure, Tangential};
    let half_pi = 0.5 * PI;
    vec![
        Recipe {
            name: "quiescent".into(),
            min_dim: 2,
            terms: vec![term(Pressure, 1.0, harmonic(1, -half_pi), PlaneFactor::One, ExpPoly::new(0.0, &[1.0]))],
        },
        // Divergence-free, from the stream function cos t sin x_1 x_n^2 e^{-2 x_n}.
        Recipe {
            name: "swirl".into(),
            min_dim: 2,
            terms: vec![
                term(Tangential(0), 1.0, harmonic(1, 0.0), wave(&[1], -half_pi), ExpPoly::new(2.0, &[0.0, 2.0, -2.0])),
                term(Normal, -1.0, harmonic(1, 0.0), wave(&[1], 0.0), ExpPoly::new(2.0, &[0.0, 0.0, 1.0])),
                term(Pressure, 0.5, harmonic(1, -half_pi), wave(&[1], 0.0), ExpPoly::new(1.5, &[1.0])),
            ],
        },
        Recipe {
            name: "steady_shear".into(),
            min_dim: 2,
            terms: vec![
                term(Tangential(0), 1.0, TimeFactor::One, PlaneFactor::One, ExpPoly::new(2.0, &[0.0, 1.0])),
                term(Tangential(0), 0.8, TimeFactor::One, wave(&[1], 0.0), ExpPoly::new(1.5, &[1.0])),
                term(Normal, 0.6, TimeFactor::One, wave(&[1], -half_pi), ExpPoly::new(2.0, &[1.0, 1.0])),
                term(Pressure, 1.0, TimeFactor::One, wave(&[1], 0.0), ExpPoly::new(2.0, &[1.0])),
            ],
        },
        Recipe {
            name: "multi_mode".into(),
            min_dim: 2,
            terms: vec![
                term(Tangential(0), 1.0, harmonic(2, 0.0), PlaneFactor::One, ExpPoly::new(1.5, &[1.0, 1.0])),
                term(Tangential(0), 0.7, harmonic(1, 0.0), wave(&[2], -half_pi), ExpPoly::new(2.0, &[0.0, 1.0])),
                term(Tangential(0), 0.4, harmonic(2, 0.3), wave(&[3], 0.5), ExpPoly::new(1.6, &[1.0, 0.0, 1.0])),
                term(Tangential(0), 0.5, TimeFactor::One, wave(&[1], 0.0), ExpPoly::new(1.5, &[1.0])),
                term(Normal, 1.0, harmonic(1, -half_pi), PlaneFactor::One, ExpPoly::new(2.0, &[0.0, 1.0])),
                term(Normal, 0.9, harmonic(3, 0.0), wave(&[1], 0.0), ExpPoly::new(2.0, &[1.0, -1.0])),
                term(Normal, 0.3, TimeFactor::One, wave(&[2], 0.2), ExpPoly::new(1.8, &[0.5, 1.0])),
                term(Pressure, 1.0, harmonic(1, 0.0), wave(&[2], 0.0), ExpPoly::new(1.5, &[1.0])),
                term(Pressure, 0.5, TimeFactor::One, wave(&[1], -half_pi), ExpPoly::new(2.0, &[0.0, 1.0])),
                term(Pressure, 0.8, harmonic(2, -half_pi), PlaneFactor::One, ExpPoly::new(1.5, &[1.0, 1.0])),
            ],
        },
        Recipe {
            name: "smooth_periodic".into(),
            min_dim: 2,
            terms: vec![
                term(Tangential(0), 1.0, TimeFactor::ExpCos { beta: 0.7 }, wave(&[1], 0.0), ExpPoly::new(2.0, &[1.0, 1.0])),
                term(
                    Normal,
                    1.0,
                    TimeFactor::ExpCos { beta: 0.5 },
                    PlaneFactor::ExpSin { dim: 0, beta: 0.6 },
                    ExpPoly::new(1.5, &[0.0, 1.0]),
                ),
                term(Pressure, 1.0, TimeFactor::ExpCos { beta: 0.7 }, wave(&[1], 0.0), ExpPoly::new(2.0, &[1.0])),
            ],
        },
        Recipe {
            name: "oblique_3d".into(),
            min_dim: 3,
            terms: vec![
                term(Tangential(0), 1.0, harmonic(1, 0.0), wave(&[1, 1], 0.0), ExpPoly::new(2.0, &[1.0, 1.0])),
                term(Tangential(1), 0.5, harmonic(2, 0.4), wave(&[0, 1], 0.0), ExpPoly::new(1.5, &[1.0])),
                term(Normal, 0.8, harmonic(1, -half_pi), wave(&[1, -1], 0.0), ExpPoly::new(2.0, &[1.0, -2.0])),
                term(Normal, 0.4, harmonic(1, 0.0), PlaneFactor::One, ExpPoly::new(2.0, &[0.0, 1.0])),
                term(Tangential(1), 0.6, TimeFactor::One, wave(&[1, 0], 0.0), ExpPoly::new(2.0, &[0.0, 1.0])),
                term(Pressure, 1.0, harmonic(1, 0.0), wave(&[1, 1], -half_pi), ExpPoly::new(1.5, &[1.0])),
            ],
        },
    ]
}

pub fn recipe(name: &str) -> Option<Recipe> {
    catalogue().into_iter().find(|r| r.name == name)
}

/// Recipes usable in dimension `dim`.
pub fn catalogue_for(dim: usize) -> Vec<Recipe> {
    catalogue().into_iter().filter(|r| r.min_dim <= dim).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::NormalGrid;

    fn grid() -> Arc<Grid> {
        let normal = NormalGrid::graded(20.0, 64, 1.15, 5e-3).unwrap();
        Arc::new(Grid::new(2.0 * PI, 2, 4, 8, 2.0 * PI, normal).unwrap())
    }

    #[test]
    fn exp_poly_derivative_matches_difference_quotient() {
        let p = ExpPoly::new(1.5, &[1.0, -2.0, 0.5]);
        let d = p.derivative();
        for &x in &[0.0, 0.3, 2.0] {
            let h = 1e-6;
            let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
            assert!((fd - d.eval(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn slow_decay_is_rejected() {
        let r = Recipe {
            name: "slow".into(),
            min_dim: 2,
            terms: vec![term(Target::Normal, 1.0, TimeFactor::One, PlaneFactor::One, ExpPoly::new(0.5, &[1.0]))],
        };
        assert!(matches!(manufactured(&r, grid()), Err(Error::Manufactured(_))));
    }

    #[test]
    fn swirl_is_divergence_free() {
        let b = manufactured(&recipe("swirl").unwrap(), grid()).unwrap();
        assert!(b.data.divergence.value().max_abs() < 1e-14);
    }

    #[test]
    fn three_dimensional_recipe_needs_three_dimensions() {
        assert!(manufactured(&recipe("oblique_3d").unwrap(), grid()).is_err());
    }
}

//! Mixed Lebesgue, Sobolev and Besov norms on the torus-by-half-space grid.
//!
//! The measure is the time average times Lebesgue measure on the tangential
//! box times the trapezoid rule in `x_n`; boundary fields use unit normal weight.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::{NormalJet, PhysicalField, SpectralField};
use super::grid::Grid;
use super::transform::{derivative_symbol, inverse_real_part, Axis};
use crate::error::{Error, Result};
use crate::symbols::partition::{shell_range, shell_weight, ParabolicScale};

/// Relative size below which steady or `xi = 0` content counts as absent.
pub const ZERO_CONTENT_TOL: f64 = 1e-12;

fn sample_weights(grid: &Grid) -> (f64, Vec<f64>) {
    let cell = (grid.box_length() / grid.tangential() as f64).powi(grid.tdim() as i32) / grid.nt() as f64;
    (cell, grid.normal().trapezoid_weights())
}

fn integrate(sq: &[f64], grid: &Grid, q: f64) -> f64 {
    let (cell, wz) = sample_weights(grid);
    let nz = wz.len();
    let total: f64 = sq
        .iter()
        .enumerate()
        .map(|(i, &s)| wz[i % nz] * s.powf(0.5 * q))
        .sum();
    (cell * total).powf(1.0 / q)
}

/// Pointwise squared Euclidean length of a set of pieces. The transforms
/// are done once; each `L^q` norm is then a single weighted sum.
#[derive(Debug, Clone)]
pub struct Magnitude {
    grid: Option<Arc<Grid>>,
    sq: Vec<f64>,
}

impl Magnitude {
    pub fn of(pieces: &[SpectralField]) -> Self {
        let Some(first) = pieces.first() else {
            return Self { grid: None, sq: Vec::new() };
        };
        let grid = first.grid().clone();
        let mut sq = vec![0.0; grid.block()];
        for p in pieces {
            let phys = inverse_real_part(p);
            for c in 0..phys.components() {
                sq.iter_mut()
                    .zip(phys.component(c))
                    .for_each(|(s, v)| *s += v * v);
            }
        }
        Self { grid: Some(grid), sq }
    }

    /// Magnitude of `d_t^time grad^space u`.
    pub fn of_derivatives(jet: &NormalJet, time: u32, space: usize) -> Result<Self> {
        let grid = jet.grid().clone();
        let pieces: Vec<SpectralField> = space_derivatives(jet, space)?
            .into_iter()
            .map(|p| p.map_modes(|it, jt| derivative_symbol(&grid, Axis::Time, time, it, jt)))
            .collect();
        Ok(Self::of(&pieces))
    }

    pub fn lq(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        Ok(match &self.grid {
            Some(g) => integrate(&self.sq, g, q),
            None => 0.0,
        })
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::NormSpec(format!("exponent q must be in [1, inf), got {q}")));
    }
    Ok(())
}

/// `L^q` norm of the pointwise Euclidean length over components.
pub fn lq_norm(field: &PhysicalField, q: f64) -> Result<f64> {
    check_q(q)?;
    let b = field.grid().block();
    let mut sq = vec![0.0; b];
    for c in 0..field.components() {
        sq.iter_mut()
            .zip(field.component(c))
            .for_each(|(s, v)| *s += v * v);
    }
    Ok(integrate(&sq, field.grid(), q))
}

/// `L^q` norm of the pointwise Euclidean length of all pieces together. The
/// physical values are the real parts of the inverse series, so differences
/// of nearly equal fields are measured without a symmetry check.
pub fn lq_norm_pieces(pieces: &[SpectralField], q: f64) -> Result<f64> {
    check_q(q)?;
    Magnitude::of(pieces).lq(q)
}

/// All `order`-th space derivatives of a jet: tangential directions are
/// spectral, the normal direction (only on half-space grids) reads jet levels.
pub fn space_derivatives(jet: &NormalJet, order: usize) -> Result<Vec<SpectralField>> {
    let grid = jet.grid().clone();
    let tdim = grid.tdim();
    let dirs = if grid.nz() > 1 { tdim + 1 } else { tdim };
    let mut out = Vec::new();
    for combo in 0..dirs.pow(order as u32) {
        let mut counts = vec![0u32; tdim];
        let mut normal = 0;
        let mut rest = combo;
        for _ in 0..order {
            let d = rest % dirs;
            rest /= dirs;
            if d == tdim {
                normal += 1;
            } else {
                counts[d] += 1;
            }
        }
        let level = jet.level(normal).ok_or_else(|| {
            Error::Shape(format!("jet lacks normal derivative of order {normal}"))
        })?;
        let g = grid.clone();
        out.push(level.map_modes(|it, jt| {
            counts
                .iter()
                .enumerate()
                .map(|(d, &n)| derivative_symbol(&g, Axis::Tangential(d), n, it, jt))
                .product::<Complex64>()
        }));
    }
    Ok(out)
}

/// `|| d_t^time grad^space u ||_q`.
pub fn seminorm(jet: &NormalJet, time: u32, space: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Magnitude::of_derivatives(jet, time, space)?.lq(q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// `sum_{j <= r, i <= s} || d_t^j grad^i u ||_q` for integer orders.
    Sobolev,
    /// `|| F^{-1} (1 + k^2)^{r/2} |xi|^s u_hat ||_q`.
    HomogeneousTangential,
    /// Dyadic Besov norm `B^s_{qq}` in the scale with time weight `m`;
    /// defined for purely oscillatory fields.
    Besov { m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub time_order: f64,
    pub space_order: f64,
    pub q: f64,
    pub kind: NormKind,
}

impl NormSpec {
    pub fn sobolev(time_order: u32, space_order: u32, q: f64) -> Self {
        Self {
            time_order: time_order as f64,
            space_order: space_order as f64,
            q,
            kind: NormKind::Sobolev,
        }
    }
}

fn integer_order(x: f64, max: u32, what: &str) -> Result<u32> {
    if x.fract() != 0.0 || x < 0.0 || x > max as f64 {
        return Err(Error::NormSpec(format!(
            "{what} order must be an integer in [0, {max}], got {x}"
        )));
    }
    Ok(x as u32)
}

pub fn mixed_norm(jet: &NormalJet, spec: &NormSpec) -> Result<f64> {
    check_q(spec.q)?;
    match spec.kind {
        NormKind::Sobolev => {
            let r = integer_order(spec.time_order, 1, "time")?;
            let s = integer_order(spec.space_order, 2, "space")?;
            let mut total = 0.0;
            for j in 0..=r {
                for i in 0..=s as usize {
                    total += seminorm(jet, j, i, spec.q)?;
                }
            }
            Ok(total)
        }
        NormKind::HomogeneousTangential => {
            homogeneous_norm(jet.value(), spec.time_order, spec.space_order, spec.q)
        }
        NormKind::Besov { m } => {
            if spec.time_order != 0.0 {
                return Err(Error::NormSpec(
                    "Besov norms carry a single order; set the time order to 0".into(),
                ));
            }
            besov_norm(jet.value(), spec.space_order, spec.q, ParabolicScale::new(m)?)
        }
    }
}

pub fn homogeneous_norm(field: &SpectralField, r: f64, s: f64, q: f64) -> Result<f64> {
    let grid = field.grid().clone();
    let n_tan = grid.n_tan();
    if s < 0.0 {
        let scale = field.max_abs();
        for c in 0..field.components() {
            for m in 0..grid.n_modes() {
                if grid.wavevector(m % n_tan).iter().all(|&x| x == 0.0) {
                    let mag = field.profile(c, m).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if mag > ZERO_CONTENT_TOL * scale {
                        return Err(Error::HomogeneousZeroMode {
                            time: grid.time_index(m / n_tan),
                            magnitude: mag,
                        });
                    }
                }
            }
        }
    }
    let weighted = field.map_modes(|it, jt| {
        let k = grid.frequency(it);
        let xi: f64 = grid.wavevector(jt).iter().map(|x| x * x).sum::<f64>().sqrt();
        let w = if xi == 0.0 {
            if s == 0.0 { 1.0 } else { 0.0 }
        } else {
            xi.powf(s)
        };
        Complex64::from((1.0 + k * k).powf(0.5 * r) * w)
    });
    lq_norm_pieces(&[weighted], q)
}

fn steady_magnitude(field: &SpectralField) -> f64 {
    let grid = field.grid();
    let n_tan = grid.n_tan();
    let mut mag: f64 = 0.0;
    for c in 0..field.components() {
        for m in 0..grid.n_modes() {
            if grid.time_index(m / n_tan) == 0 {
                for z in field.profile(c, m) {
                    mag = mag.max(z.norm());
                }
            }
        }
    }
    mag
}

/// Block `F^{-1} [phi_l u_hat]` of the dyadic decomposition.
pub fn dyadic_block(field: &SpectralField, l: i32, scale: ParabolicScale) -> SpectralField {
    let grid = field.grid().clone();
    field.map_modes(|it, jt| {
        let rho = scale.eval(grid.frequency(it), &grid.wavevector(jt));
        Complex64::from(shell_weight(l, rho))
    })
}

fn rho_bounds(field: &SpectralField, scale: ParabolicScale) -> (f64, f64) {
    let grid = field.grid();
    let n_tan = grid.n_tan();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for m in 0..grid.n_modes() {
        let rho = scale.eval(grid.frequency(m / n_tan), &grid.wavevector(m % n_tan));
        if rho > 0.0 {
            lo = lo.min(rho);
            hi = hi.max(rho);
        }
    }
    (lo, hi)
}

/// `(sum_l (2^{s l} || F^{-1} phi_l u_hat ||_q)^q)^{1/q}` for a purely
/// oscillatory field.
pub fn besov_norm(field: &SpectralField, s: f64, q: f64, scale: ParabolicScale) -> Result<f64> {
    check_q(q)?;
    let steady = steady_magnitude(field);
    if steady > ZERO_CONTENT_TOL * field.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotOscillatory { magnitude: steady });
    }
    shell_sum(field, s, q, scale, 0.0)
}

/// Besov norm of a time-independent field: the `xi = 0` block plus the
/// dyadic shells in `|xi|`.
pub fn steady_besov_norm(field: &SpectralField, s: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let grid = field.grid().clone();
    let low = field.map_modes(|it, jt| {
        let zero = grid.time_index(it) == 0 && grid.wavevector(jt).iter().all(|&x| x == 0.0);
        Complex64::from(if zero { 1.0 } else { 0.0 })
    });
    let low_norm = lq_norm_pieces(&[low], q)?;
    shell_sum(field, s, q, ParabolicScale::parabolic(), low_norm.powf(q))
}

/// Weighted shell norms `(l, 2^{s l} || F^{-1} phi_l u_hat ||_q)` over every
/// shell that meets the lattice.
pub fn besov_shells(field: &SpectralField, s: f64, q: f64, scale: ParabolicScale) -> Result<Vec<(i32, f64)>> {
    check_q(q)?;
    let (lo, hi) = rho_bounds(field, scale);
    if !lo.is_finite() {
        return Ok(Vec::new());
    }
    shell_range(lo, hi)
        .map(|l| {
            let n = lq_norm_pieces(&[dyadic_block(field, l, scale)], q)?;
            Ok((l, 2f64.powf(s * l as f64) * n))
        })
        .collect()
}

fn shell_sum(field: &SpectralField, s: f64, q: f64, scale: ParabolicScale, base: f64) -> Result<f64> {
    let total = besov_shells(field, s, q, scale)?
        .into_iter()
        .fold(base, |acc, (_, t)| acc + t.powf(q));
    Ok(total.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::{Grid, NormalGrid};
    use crate::spectral::transform::forward;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn boundary_grid() -> Arc<Grid> {
        Arc::new(Grid::new(2.0 * PI, 2, 4, 16, 2.0 * PI, NormalGrid::boundary()).unwrap())
    }

    #[test]
    fn l2_norm_of_cosine() {
        let g = boundary_grid();
        let f = PhysicalField::from_fn(g, 1, |_, t, x, _| (t + 2.0 * x[0]).cos());
        // Average of cos^2 is 1/2 over a box of length 2 pi.
        let expect = (PI).sqrt();
        assert!((lq_norm(&f, 2.0).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn sobolev_counts_derivatives() {
        let g = boundary_grid();
        let f = PhysicalField::from_fn(g, 1, |_, _t, x, _| (3.0 * x[0]).sin());
        let jet = NormalJet::value_only(forward(&f));
        let l2 = seminorm(&jet, 0, 0, 2.0).unwrap();
        let h1 = seminorm(&jet, 0, 1, 2.0).unwrap();
        let h2 = seminorm(&jet, 0, 2, 2.0).unwrap();
        assert!((h1 - 3.0 * l2).abs() < 1e-12);
        assert!((h2 - 9.0 * l2).abs() < 1e-11);
        assert!(seminorm(&jet, 1, 0, 2.0).unwrap() < 1e-12);
    }

    #[test]
    fn homogeneous_negative_order_needs_zero_mean() {
        let g = boundary_grid();
        let f = PhysicalField::from_fn(g.clone(), 1, |_, t, _x, _| t.cos());
        assert!(matches!(
            homogeneous_norm(&forward(&f), 0.0, -0.5, 2.0),
            Err(Error::HomogeneousZeroMode { .. })
        ));
        let f = PhysicalField::from_fn(g, 1, |_, t, x, _| t.cos() * (2.0 * x[0]).cos());
        let n = homogeneous_norm(&forward(&f), 1.0, -1.0, 2.0).unwrap();
        let base = lq_norm(&PhysicalField::from_fn(f.grid().clone(), 1, |_, t, x, _| t.cos() * (2.0 * x[0]).cos()), 2.0).unwrap();
        assert!((n - base * 2f64.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn besov_rejects_steady_content() {
        let g = boundary_grid();
        let f = PhysicalField::from_fn(g, 1, |_, _t, x, _| x[0].cos());
        let r = besov_norm(&forward(&f), 1.0, 2.0, ParabolicScale::parabolic());
        assert!(matches!(r, Err(Error::NotOscillatory { .. })));
    }
}

//! Numerical audit of Marcinkiewicz-type bounds
//! `sup |eta^{e0} xi^{e} d^{(e0, e)} m(eta, xi)|` over a dyadic lattice.

use num_complex::Complex64;
use rayon::prelude::*;

use super::multipliers::{heat_profile, ratio_m, ratio_m1, ratio_m2, tangential_profile};
use crate::error::{Error, Result};

/// Relative step of the central differences.
const STEP: f64 = 1e-3;

/// Growth of a supremum, under one extra octave at each end, beyond which
/// the bound is reported as divergent.
pub const DIVERGENCE_GROWTH: f64 = 1.5;

/// Points `±2^{j / per_octave}` for `j` in `[min_exp, max_exp] * per_octave`
/// in every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditLattice {
    pub min_exp: i32,
    pub max_exp: i32,
    pub per_octave: u32,
}

impl Default for AuditLattice {
    fn default() -> Self {
        Self {
            min_exp: -10,
            max_exp: 10,
            per_octave: 1,
        }
    }
}

impl AuditLattice {
    fn values(&self) -> Vec<f64> {
        let p = self.per_octave as i32;
        let mut out = Vec::new();
        for j in self.min_exp * p..=self.max_exp * p {
            let v = 2f64.powf(j as f64 / p as f64);
            out.push(v);
            out.push(-v);
        }
        out
    }

    fn widened(&self) -> Self {
        Self {
            min_exp: self.min_exp - 1,
            max_exp: self.max_exp + 1,
            ..*self
        }
    }
}

/// Supremum for one derivative mask. Bit 0 of `mask` is the time frequency,
/// bit `d + 1` the tangential direction `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub symbol: String,
    pub mask: u32,
    pub sup: f64,
    pub per_octave: u32,
}

impl AuditRow {
    pub fn mask_label(&self, coords: usize) -> String {
        (0..coords)
            .map(|b| if self.mask >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub symbol: String,
    pub coords: usize,
    pub rows: Vec<AuditRow>,
    /// Largest ratio of the widened-lattice supremum to the base supremum.
    pub growth: f64,
    pub divergent: bool,
}

impl AuditReport {
    pub fn max_sup(&self) -> f64 {
        self.rows.iter().map(|r| r.sup).fold(0.0, f64::max)
    }
}

/// A vector-valued symbol of `(eta, xi)`.
pub type SymbolFn = Box<dyn Fn(f64, &[f64]) -> Result<Vec<Complex64>> + Send + Sync>;

fn mixed_derivative(f: &SymbolFn, point: &[f64], mask: u32) -> Result<Vec<Complex64>> {
    let active: Vec<usize> = (0..point.len()).filter(|&b| mask >> b & 1 == 1).collect();
    let steps: Vec<f64> = active.iter().map(|&b| STEP * point[b].abs()).collect();
    let mut acc: Option<Vec<Complex64>> = None;
    let mut shifted = point.to_vec();
    for signs in 0u32..(1 << active.len()) {
        let mut weight = 1.0;
        for (i, &b) in active.iter().enumerate() {
            let s = if signs >> i & 1 == 1 { 1.0 } else { -1.0 };
            shifted[b] = point[b] + s * steps[i];
            weight *= s / (2.0 * steps[i]);
        }
        let v = f(shifted[0], &shifted[1..])?;
        match &mut acc {
            None => acc = Some(v.into_iter().map(|z| z * weight).collect()),
            Some(a) => a.iter_mut().zip(v).for_each(|(a, z)| *a += z * weight),
        }
    }
    Ok(acc.unwrap_or_default())
}

fn sup_table(f: &SymbolFn, coords: usize, lattice: &AuditLattice) -> Result<Vec<f64>> {
    let values = lattice.values();
    let total = values.len().pow(coords as u32);
    let masks = 1u32 << coords;
    let per_point: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| -> Result<Vec<f64>> {
            let mut point = vec![0.0; coords];
            let mut rest = idx;
            for p in point.iter_mut() {
                *p = values[rest % values.len()];
                rest /= values.len();
            }
            let mut sups = vec![0.0; masks as usize];
            for mask in 0..masks {
                let d = mixed_derivative(f, &point, mask)?;
                let weight: f64 = (0..coords)
                    .filter(|&b| mask >> b & 1 == 1)
                    .map(|b| point[b].abs())
                    .product();
                let v = d.iter().map(|z| z.norm()).fold(0.0, f64::max) * weight;
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "symbol derivative with mask {mask:b} at {point:?}"
                    )));
                }
                sups[mask as usize] = v;
            }
            Ok(sups)
        })
        .collect::<Result<_>>()?;
    let mut sups = vec![0.0; masks as usize];
    for p in per_point {
        for (s, v) in sups.iter_mut().zip(p) {
            *s = f64::max(*s, v);
        }
    }
    Ok(sups)
}

/// Audits `symbol` over `1 + tdim` coordinates.
pub fn marcinkiewicz_audit(
    name: &str,
    tdim: usize,
    symbol: &SymbolFn,
    lattice: &AuditLattice,
) -> Result<AuditReport> {
    let coords = 1 + tdim;
    let base = sup_table(symbol, coords, lattice)?;
    let wide = sup_table(symbol, coords, &lattice.widened())?;
    let growth = base
        .iter()
        .zip(&wide)
        .map(|(b, w)| if *b > 0.0 { w / b } else if *w > 0.0 { f64::INFINITY } else { 1.0 })
        .fold(1.0, f64::max);
    let rows = base
        .into_iter()
        .enumerate()
        .map(|(mask, sup)| AuditRow {
            symbol: name.to_string(),
            mask: mask as u32,
            sup,
            per_octave: lattice.per_octave,
        })
        .collect();
    Ok(AuditReport {
        symbol: name.to_string(),
        coords,
        rows,
        growth,
        divergent: growth > DIVERGENCE_GROWTH,
    })
}

/// Normal positions at which profile symbols are sampled. Their natural
/// scales `1 / x^2` sit well inside the default lattice.
pub const PROFILE_POSITIONS: [f64; 3] = [0.1, 1.0, 10.0];

/// The bounded multipliers and normal profiles of the solver.
pub fn standard_symbols() -> Vec<(String, SymbolFn)> {
    let mut out: Vec<(String, SymbolFn)> = vec![
        ("ratio_m".into(), Box::new(|e, x| ratio_m(e, x).map(|v| vec![v]))),
        ("ratio_m1".into(), Box::new(ratio_m1)),
        ("ratio_m2".into(), Box::new(|e, x| ratio_m2(e, x).map(|v| vec![v]))),
    ];
    for power in 0..=2u32 {
        for (i, &x) in PROFILE_POSITIONS.iter().enumerate() {
            out.push((
                format!("heat_profile_p{power}_x{i}"),
                Box::new(move |e, xi| Ok(vec![heat_profile(e, xi, x, power)])),
            ));
            out.push((
                format!("tangential_profile_p{power}_x{i}"),
                Box::new(move |_e, xi| Ok(vec![tangential_profile(xi, x, power).into()])),
            ));
        }
    }
    out
}

/// A multiplier with an inverse power of `|xi|`, which has no uniform bound.
pub fn unbounded_example() -> SymbolFn {
    Box::new(|_e, xi| {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(vec![Complex64::new(1.0 / r, 0.0)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AuditLattice {
        AuditLattice {
            min_exp: -6,
            max_exp: 6,
            per_octave: 1,
        }
    }

    #[test]
    fn ratio_m_is_bounded_and_stable() {
        let f: SymbolFn = Box::new(|e, x| ratio_m(e, x).map(|v| vec![v]));
        let r = marcinkiewicz_audit("m", 1, &f, &small()).unwrap();
        assert!(!r.divergent, "growth {}", r.growth);
        assert!(r.rows[0].sup <= 1.0 + 1e-12);
        assert_eq!(r.rows.len(), 4);
    }

    #[test]
    fn inverse_wavenumber_is_flagged() {
        let r = marcinkiewicz_audit("inv", 1, &unbounded_example(), &small()).unwrap();
        assert!(r.divergent);
    }

    #[test]
    fn mask_label_orders_time_first() {
        let row = AuditRow {
            symbol: "x".into(),
            mask: 0b01,
            sup: 0.0,
            per_octave: 1,
        };
        assert_eq!(row.mask_label(2), "10");
    }
}

//! Finite-difference normal derivatives on nonuniform nodes.

use num_complex::Complex64;

use super::field::{NormalJet, SpectralField};
use crate::error::{Error, Result};

/// Stencil width used for sampled data.
pub const STENCIL: usize = 7;

/// Fornberg weights: `w[d][j]` approximates the `d`-th derivative at `z` from
/// values at `x[j]`.
pub fn fornberg(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Per-node stencils for derivatives up to `order`.
#[derive(Debug, Clone)]
pub struct DifferenceStencils {
    start: Vec<usize>,
    weights: Vec<Vec<Vec<f64>>>,
}

impl DifferenceStencils {
    pub fn new(nodes: &[f64], order: usize) -> Result<Self> {
        let width = STENCIL.min(nodes.len());
        if width <= order {
            return Err(Error::Grid(format!(
                "{} normal nodes cannot support derivative order {order}",
                nodes.len()
            )));
        }
        let mut start = Vec::with_capacity(nodes.len());
        let mut weights = Vec::with_capacity(nodes.len());
        for i in 0..nodes.len() {
            let s = i.saturating_sub(width / 2).min(nodes.len() - width);
            start.push(s);
            weights.push(fornberg(nodes[i], &nodes[s..s + width], order));
        }
        Ok(Self { start, weights })
    }

    pub fn apply(&self, order: usize, f: &[Complex64]) -> Vec<Complex64> {
        (0..f.len())
            .map(|i| {
                let s = self.start[i];
                self.weights[i][order]
                    .iter()
                    .zip(&f[s..])
                    .map(|(w, v)| v * w)
                    .sum()
            })
            .collect()
    }
}

/// Jet of sampled coefficients with normal derivatives up to `order`.
pub fn jet_from_samples(value: &SpectralField, order: usize) -> Result<NormalJet> {
    let grid = value.grid().clone();
    if grid.nz() == 1 {
        return Ok(NormalJet::value_only(value.clone()));
    }
    let st = DifferenceStencils::new(grid.normal().nodes(), order)?;
    let mut levels = vec![value.clone()];
    for d in 1..=order {
        let mut out = SpectralField::zeros(grid.clone(), value.components());
        for c in 0..value.components() {
            for m in 0..grid.n_modes() {
                let p = st.apply(d, value.profile(c, m));
                out.profile_mut(c, m).copy_from_slice(&p);
            }
        }
        levels.push(out);
    }
    NormalJet::new(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_matches_polynomial_derivatives() {
        let x = [0.0, 0.1, 0.25, 0.45, 0.7];
        let w = fornberg(0.25, &x, 2);
        let f = |t: f64| t.powi(3) - 2.0 * t;
        let d1: f64 = w[1].iter().zip(&x).map(|(a, &t)| a * f(t)).sum();
        let d2: f64 = w[2].iter().zip(&x).map(|(a, &t)| a * f(t)).sum();
        assert!((d1 - (3.0 * 0.0625 - 2.0)).abs() < 1e-12);
        assert!((d2 - 6.0 * 0.25).abs() < 1e-11);
    }
}

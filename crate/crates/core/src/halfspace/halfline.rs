//! Exponentially weighted integrals on the graded normal grid.
//!
//! Sampled data are interpolated cell by cell with local degree-11 polynomials;
//! the kernels `e^{-lambda (x - y)}` are integrated exactly against them, so
//! boundary layers of width `1/|lambda|` need no extra resolution beyond the
//! data's own.

use num_complex::Complex64;

use crate::error::{Error, Result};

const WIDTH: usize = 12;
const SERIES_RADIUS: f64 = 4.0;

/// Image used to extend data to the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reflection {
    /// Odd image: the resolvent vanishes at `x_n = 0`.
    Odd,
    /// Even image: the resolvent has zero normal derivative at `x_n = 0`.
    Even,
}

#[derive(Debug, Clone)]
struct Cell {
    h: f64,
    start: usize,
    /// Monomial coefficients (in the cell coordinate from the left end) of
    /// the interpolant, per stencil value: `left[m][j]`.
    left: Vec<Vec<f64>>,
    /// Same, measured from the right end.
    right: Vec<Vec<f64>>,
}

/// Precomputed interpolation data for one normal grid.
#[derive(Debug, Clone)]
pub struct HalfLine {
    nodes: Vec<f64>,
    cells: Vec<Cell>,
    width: usize,
    /// Quadrature weights of `int_0^X` for the same interpolants.
    weights: Vec<f64>,
}

/// Inverse of the Vandermonde matrix `V[j][m] = t_j^m`, returned as `[m][j]`.
fn vandermonde_inverse(t: &[f64]) -> Vec<Vec<f64>> {
    let n = t.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut row: Vec<f64> = (0..n).map(|m| t[j].powi(m as i32)).collect();
            row.extend((0..n).map(|c| if c == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= d);
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    a[row].iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
                }
            }
        }
    }
    (0..n).map(|m| (0..n).map(|j| a[m][n + j]).collect()).collect()
}

/// `W_m(z) = int_0^1 e^{-z (1 - t)} t^m dt` for `m < out.len()`.
fn kernel_moments(z: Complex64, out: &mut [Complex64]) {
    let top = out.len() - 1;
    if z.norm() < SERIES_RADIUS {
        // Series for the highest moment, then the recurrence downwards,
        // which is stable while |z| is below the moment index.
        let mut term = Complex64::new(1.0 / (top as f64 + 1.0), 0.0);
        let mut sum = term;
        for n in 0..80 {
            term *= -z / (top as f64 + n as f64 + 2.0);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        out[top] = sum;
        for m in (1..=top).rev() {
            out[m - 1] = (1.0 - z * out[m]) / m as f64;
        }
    } else {
        out[0] = (1.0 - (-z).exp()) / z;
        for m in 1..out.len() {
            out[m] = (1.0 - m as f64 * out[m - 1]) / z;
        }
    }
}

impl HalfLine {
    pub fn new(nodes: &[f64]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Grid("normal quadrature needs at least two nodes".into()));
        }
        let width = WIDTH.min(nodes.len());
        let cells = (0..nodes.len() - 1)
            .map(|i| {
                let start = i.saturating_sub(width / 2 - 1).min(nodes.len() - width);
                let h = nodes[i + 1] - nodes[i];
                let tl: Vec<f64> = (0..width).map(|j| (nodes[start + j] - nodes[i]) / h).collect();
                let tr: Vec<f64> = (0..width)
                    .map(|j| (nodes[i + 1] - nodes[start + j]) / h)
                    .collect();
                Cell {
                    h,
                    start,
                    left: vandermonde_inverse(&tl),
                    right: vandermonde_inverse(&tr),
                }
            })
            .collect::<Vec<Cell>>();
        let mut weights = vec![0.0; nodes.len()];
        for cell in &cells {
            for (m, row) in cell.left.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    weights[cell.start + j] += cell.h * c / (m as f64 + 1.0);
                }
            }
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            cells,
            width,
            weights,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `A_i = int_0^{x_i} e^{-lam (x_i - y)} f` and
    /// `B_i = int_{x_i}^{X} e^{-lam (y - x_i)} f`, for `Re lam >= 0`.
    pub fn damped_integrals(&self, f: &[Complex64], lam: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.nodes.len();
        let mut moments = vec![Complex64::default(); self.width];
        let mut fwd = vec![Complex64::default(); n - 1];
        let mut bwd = vec![Complex64::default(); n - 1];
        let mut damp = vec![Complex64::default(); n - 1];
        for (i, cell) in self.cells.iter().enumerate() {
            let z = lam * cell.h;
            kernel_moments(z, &mut moments);
            damp[i] = (-z).exp();
            let vals = &f[cell.start..cell.start + self.width];
            let (mut a, mut b) = (Complex64::default(), Complex64::default());
            for (m, w) in moments.iter().enumerate() {
                let cl: Complex64 = cell.left[m].iter().zip(vals).map(|(c, v)| v * c).sum();
                let cr: Complex64 = cell.right[m].iter().zip(vals).map(|(c, v)| v * c).sum();
                a += cl * w;
                b += cr * w;
            }
            fwd[i] = a * cell.h;
            bwd[i] = b * cell.h;
        }
        let mut big_a = vec![Complex64::default(); n];
        for i in 0..n - 1 {
            big_a[i + 1] = damp[i] * big_a[i] + fwd[i];
        }
        let mut big_b = vec![Complex64::default(); n];
        for i in (0..n - 1).rev() {
            big_b[i] = damp[i] * big_b[i + 1] + bwd[i];
        }
        (big_a, big_b)
    }

    /// `int_0^X |f|`.
    pub fn abs_integral(&self, f: &[Complex64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v.norm()).sum()
    }

    /// `(int_0^x f, int_x^X f)`.
    pub fn cumulative(&self, f: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        self.damped_integrals(f, Complex64::default())
    }

    /// Decaying solution of `-v'' + lam^2 v = f` on the half-line with the
    /// boundary condition of the chosen image; returns `[v, v', v'']`.
    pub fn resolvent(&self, f: &[Complex64], lam: Complex64, image: Reflection) -> [Vec<Complex64>; 3] {
        let (a, b) = self.damped_integrals(f, lam);
        let c = b[0];
        let sign = match image {
            Reflection::Odd => -1.0,
            Reflection::Even => 1.0,
        };
        let n = self.nodes.len();
        let mut v = Vec::with_capacity(n);
        let mut dv = Vec::with_capacity(n);
        let mut ddv = Vec::with_capacity(n);
        let lam2 = lam * lam;
        for i in 0..n {
            let image_term = c * (-lam * self.nodes[i]).exp() * sign;
            let val = (a[i] + b[i] + image_term) / (2.0 * lam);
            v.push(val);
            dv.push((b[i] - a[i] - image_term) * 0.5);
            ddv.push(lam2 * val - f[i]);
        }
        if image == Reflection::Odd {
            v[0] = Complex64::default();
            ddv[0] = -f[0];
        }
        [v, dv, ddv]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::NormalGrid;

    fn line() -> HalfLine {
        HalfLine::new(NormalGrid::graded(20.0, 128, 1.08, 2e-3).unwrap().nodes()).unwrap()
    }

    #[test]
    fn abs_integral_matches_cumulative() {
        let nodes = NormalGrid::graded(20.0, 64, 1.1, 1e-2).unwrap().nodes().to_vec();
        let line = HalfLine::new(&nodes).unwrap();
        let f: Vec<Complex64> = nodes.iter().map(|x| Complex64::from((-x).exp() * (1.0 + x))).collect();
        let (a, _) = line.cumulative(&f);
        assert!((line.abs_integral(&f) - a.last().unwrap().re).abs() < 1e-12);
        let exact = 2.0 - 22.0 * (-20.0f64).exp();
        assert!((line.abs_integral(&f) - exact).abs() < 1e-8);
    }

    #[test]
    fn moments_agree_across_branches() {
        let mut a = [Complex64::default(); 8];
        let mut b = [Complex64::default(); 8];
        let z = Complex64::new(2.0, 3.4640);
        kernel_moments(z, &mut a);
        // Recurrence branch evaluated at the same point.
        b[0] = (1.0 - (-z).exp()) / z;
        for m in 1..8 {
            b[m] = (1.0 - m as f64 * b[m - 1]) / z;
        }
        for m in 0..8 {
            assert!((a[m] - b[m]).norm() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn resolvent_of_exponential_source() {
        // -v'' + lam^2 v = e^{-a x}: v = (e^{-a x} - e^{-lam x}) / (lam^2 - a^2).
        let hl = line();
        let lam = Complex64::new(3.0, 2.0).sqrt();
        let a = 2.0;
        let f: Vec<Complex64> = hl.nodes().iter().map(|&x| Complex64::from((-a * x).exp())).collect();
        let [v, dv, _] = hl.resolvent(&f, lam, Reflection::Odd);
        let mut err: f64 = 0.0;
        for (i, &x) in hl.nodes().iter().enumerate() {
            let exact = ((-a * x).exp() - (-lam * x).exp()) / (lam * lam - a * a);
            let dexact = (-a * (-a * x).exp() + lam * (-lam * x).exp()) / (lam * lam - a * a);
            err = err.max((v[i] - exact).norm()).max((dv[i] - dexact).norm());
        }
        assert!(err < 1e-11, "err = {err}");
    }
}

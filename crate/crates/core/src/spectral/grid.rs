//! Sampling grids on the time torus, the tangential box and the normal half-line.

use std::f64::consts::PI;

use crate::error::{Error, ModeTag, Result};

/// Nodes on `[0, x_max]` in the normal direction.
///
/// Boundary fields live on the single-node grid `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalGrid {
    nodes: Vec<f64>,
}

impl NormalGrid {
    /// Geometric grading from `first_cell` with the given ratio, capped at a
    /// cell size chosen so that the last node lands on `x_max`.
    pub fn graded(x_max: f64, nodes: usize, ratio: f64, first_cell: f64) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::Grid(format!("x_max must be positive, got {x_max}")));
        }
        if nodes < 8 {
            return Err(Error::Grid(format!("need at least 8 normal nodes, got {nodes}")));
        }
        if !(ratio >= 1.0) || !(first_cell > 0.0) {
            return Err(Error::Grid(format!(
                "grading needs ratio >= 1 and first cell > 0, got {ratio}, {first_cell}"
            )));
        }
        let cells = nodes - 1;
        let total = |cap: f64| -> f64 {
            (0..cells)
                .map(|i| (first_cell * ratio.powi(i as i32)).min(cap))
                .sum()
        };
        if first_cell * cells as f64 > x_max {
            return Err(Error::Grid(format!(
                "first cell {first_cell} too large for {cells} cells on [0, {x_max}]"
            )));
        }
        let uncapped = first_cell * ratio.powi(cells as i32 - 1);
        if total(uncapped) < x_max {
            return Err(Error::Grid(format!(
                "grading ratio {ratio} cannot reach x_max = {x_max} with {nodes} nodes"
            )));
        }
        let (mut lo, mut hi) = (first_cell, uncapped);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < x_max {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cap = 0.5 * (lo + hi);
        let mut pts = Vec::with_capacity(nodes);
        let mut x = 0.0;
        pts.push(0.0);
        for i in 0..cells {
            x += (first_cell * ratio.powi(i as i32)).min(cap);
            pts.push(x);
        }
        *pts.last_mut().unwrap() = x_max;
        Self::from_nodes(pts)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes[0] != 0.0 {
            return Err(Error::Grid("normal grid must start at x_n = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Grid("normal nodes must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn boundary() -> Self {
        Self { nodes: vec![0.0] }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_boundary(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn x_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Trapezoid weights; the boundary grid carries unit weight.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        if n == 1 {
            return vec![1.0];
        }
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let h = self.nodes[i + 1] - self.nodes[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        w
    }
}

/// Product grid: `2K+1` time samples on `[0, tau)`, `N` samples per tangential
/// direction on `[0, L)^(n-1)`, and a normal grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    tau: f64,
    dim: usize,
    time_modes: usize,
    tangential: usize,
    box_length: f64,
    normal: NormalGrid,
}

impl Grid {
    pub fn new(
        tau: f64,
        dim: usize,
        time_modes: usize,
        tangential: usize,
        box_length: f64,
        normal: NormalGrid,
    ) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Grid(format!("period tau must be positive, got {tau}")));
        }
        if !(2..=3).contains(&dim) {
            return Err(Error::Grid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if tangential < 2 || !tangential.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "tangential sample count must be even and >= 2, got {tangential}"
            )));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::Grid(format!("box length must be positive, got {box_length}")));
        }
        Ok(Self {
            tau,
            dim,
            time_modes,
            tangential,
            box_length,
            normal,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
    /// Spatial dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }
    /// Number of tangential directions, `n - 1`.
    pub fn tdim(&self) -> usize {
        self.dim - 1
    }
    /// Largest resolved time index `K`.
    pub fn time_modes(&self) -> usize {
        self.time_modes
    }
    /// Tangential samples per direction `N`.
    pub fn tangential(&self) -> usize {
        self.tangential
    }
    pub fn box_length(&self) -> f64 {
        self.box_length
    }
    pub fn normal(&self) -> &NormalGrid {
        &self.normal
    }
    pub fn nt(&self) -> usize {
        2 * self.time_modes + 1
    }
    /// Number of tangential sample points, `N^(n-1)`.
    pub fn n_tan(&self) -> usize {
        self.tangential.pow(self.tdim() as u32)
    }
    pub fn nz(&self) -> usize {
        self.normal.len()
    }
    pub fn n_modes(&self) -> usize {
        self.nt() * self.n_tan()
    }
    /// Samples per component.
    pub fn block(&self) -> usize {
        self.n_modes() * self.nz()
    }

    pub fn with_normal(&self, normal: NormalGrid) -> Self {
        Self {
            normal,
            ..self.clone()
        }
    }

    pub fn boundary(&self) -> Self {
        self.with_normal(NormalGrid::boundary())
    }

    pub fn with_resolution(&self, time_modes: usize, tangential: usize) -> Result<Self> {
        Self::new(
            self.tau,
            self.dim,
            time_modes,
            tangential,
            self.box_length,
            self.normal.clone(),
        )
    }

    /// Same torus and box, possibly different resolution and normal grid.
    pub fn same_domain(&self, other: &Grid) -> bool {
        self.tau == other.tau && self.dim == other.dim && self.box_length == other.box_length
    }

    pub fn time_index(&self, it: usize) -> i64 {
        signed(it, self.nt())
    }

    pub fn time_position(&self, index: i64) -> Option<usize> {
        unsigned(index, self.nt(), self.time_modes as i64, self.time_modes as i64)
    }

    /// Angular time frequency `k = 2 pi m / tau` at storage index `it`.
    pub fn frequency(&self, it: usize) -> f64 {
        2.0 * PI / self.tau * self.time_index(it) as f64
    }

    /// Signed lattice indices of the tangential storage index `jt`.
    pub fn tangential_index(&self, jt: usize) -> Vec<i64> {
        let n = self.tangential;
        let mut out = vec![0; self.tdim()];
        let mut rest = jt;
        for d in (0..self.tdim()).rev() {
            out[d] = signed(rest % n, n);
            rest /= n;
        }
        out
    }

    pub fn tangential_position(&self, index: &[i64]) -> Option<usize> {
        let n = self.tangential;
        let half = (n / 2) as i64;
        let mut jt = 0;
        for &m in index {
            jt = jt * n + unsigned(m, n, half, half - 1)?;
        }
        Some(jt)
    }

    /// Tangential wavevector `xi = 2 pi j / L`.
    pub fn wavevector(&self, jt: usize) -> Vec<f64> {
        let s = 2.0 * PI / self.box_length;
        self.tangential_index(jt)
            .into_iter()
            .map(|j| s * j as f64)
            .collect()
    }

    /// True when any tangential index sits on the Nyquist line `-N/2`.
    pub fn is_nyquist(&self, jt: usize) -> bool {
        let half = (self.tangential / 2) as i64;
        self.tangential_index(jt).iter().any(|&j| j == -half)
    }

    /// Storage index of `(-k, -xi)`.
    pub fn partner(&self, it: usize, jt: usize) -> (usize, usize) {
        let nt = self.nt();
        let n = self.tangential;
        let pit = (nt - it) % nt;
        let mut pjt = 0;
        let mut rest = jt;
        let mut scale = 1;
        for _ in 0..self.tdim() {
            let j = rest % n;
            rest /= n;
            pjt += ((n - j) % n) * scale;
            scale *= n;
        }
        (pit, pjt)
    }

    pub fn mode_tag(&self, it: usize, jt: usize) -> ModeTag {
        ModeTag {
            time: self.time_index(it),
            tangential: self.tangential_index(jt),
        }
    }

    pub fn time_nodes(&self) -> Vec<f64> {
        let nt = self.nt();
        (0..nt).map(|i| self.tau * i as f64 / nt as f64).collect()
    }

    /// Physical tangential coordinates of storage index `jt`.
    pub fn tangential_point(&self, jt: usize) -> Vec<f64> {
        let n = self.tangential;
        let h = self.box_length / n as f64;
        let mut out = vec![0.0; self.tdim()];
        let mut rest = jt;
        for d in (0..self.tdim()).rev() {
            out[d] = h * (rest % n) as f64;
            rest /= n;
        }
        out
    }
}

fn signed(i: usize, n: usize) -> i64 {
    if 2 * i < n {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn unsigned(m: i64, n: usize, below: i64, above: i64) -> Option<usize> {
    if m < -below || m > above {
        return None;
    }
    Some(if m >= 0 { m as usize } else { (m + n as i64) as usize })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(dim: usize) -> Grid {
        Grid::new(2.0 * PI, dim, 3, 8, 2.0 * PI, NormalGrid::boundary()).unwrap()
    }

    #[test]
    fn graded_grid_reaches_x_max() {
        let g = NormalGrid::graded(20.0, 128, 1.08, 2e-3).unwrap();
        assert_eq!(g.len(), 128);
        assert_eq!(g.x_max(), 20.0);
        let h: Vec<f64> = g.nodes().windows(2).map(|w| w[1] - w[0]).collect();
        assert!((h[0] - 2e-3).abs() < 1e-15);
        assert!(h.iter().all(|&x| x <= 0.27));
        let w: f64 = g.trapezoid_weights().iter().sum();
        assert!((w - 20.0).abs() < 1e-12);
    }

    #[test]
    fn graded_grid_rejects_unreachable() {
        assert!(NormalGrid::graded(20.0, 16, 1.0, 1e-3).is_err());
    }

    #[test]
    fn indices_round_trip() {
        let g = grid(3);
        for jt in 0..g.n_tan() {
            let idx = g.tangential_index(jt);
            assert_eq!(g.tangential_position(&idx), Some(jt));
        }
        for it in 0..g.nt() {
            assert_eq!(g.time_position(g.time_index(it)), Some(it));
        }
        assert_eq!(g.time_index(4), -3);
        assert!(g.is_nyquist(4));
    }

    #[test]
    fn partner_negates_indices() {
        let g = grid(3);
        for it in 0..g.nt() {
            for jt in 0..g.n_tan() {
                let (pit, pjt) = g.partner(it, jt);
                assert_eq!(g.time_index(pit), -g.time_index(it));
                let a = g.tangential_index(jt);
                let b = g.tangential_index(pjt);
                for (x, y) in a.iter().zip(&b) {
                    let n = g.tangential() as i64;
                    assert_eq!((x + y).rem_euclid(n), 0);
                }
            }
        }
    }
}

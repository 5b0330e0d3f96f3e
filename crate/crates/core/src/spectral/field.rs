//! Sampled fields and their Fourier coefficients.
//!
//! Both representations share one layout: component-major, then time, then
//! flattened tangential index, then normal node. A mode's normal profile is
//! therefore a contiguous slice.

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

macro_rules! field_common {
    ($name:ident, $elem:ty) => {
        impl $name {
            pub fn zeros(grid: Arc<Grid>, components: usize) -> Self {
                let len = grid.block() * components;
                Self {
                    grid,
                    components,
                    data: vec![<$elem>::default(); len],
                }
            }

            pub fn from_vec(grid: Arc<Grid>, components: usize, data: Vec<$elem>) -> Result<Self> {
                if data.len() != grid.block() * components {
                    return Err(Error::Shape(format!(
                        "expected {} samples for {} components, got {}",
                        grid.block() * components,
                        components,
                        data.len()
                    )));
                }
                Ok(Self {
                    grid,
                    components,
                    data,
                })
            }

            pub fn grid(&self) -> &Arc<Grid> {
                &self.grid
            }
            pub fn components(&self) -> usize {
                self.components
            }
            pub fn data(&self) -> &[$elem] {
                &self.data
            }
            pub fn data_mut(&mut self) -> &mut [$elem] {
                &mut self.data
            }
            pub fn into_data(self) -> Vec<$elem> {
                self.data
            }

            pub fn component(&self, c: usize) -> &[$elem] {
                let b = self.grid.block();
                &self.data[c * b..(c + 1) * b]
            }
            pub fn component_mut(&mut self, c: usize) -> &mut [$elem] {
                let b = self.grid.block();
                &mut self.data[c * b..(c + 1) * b]
            }

            /// Normal profile of component `c` at mode (or sample column) `m`.
            pub fn profile(&self, c: usize, m: usize) -> &[$elem] {
                let nz = self.grid.nz();
                let start = c * self.grid.block() + m * nz;
                &self.data[start..start + nz]
            }
            pub fn profile_mut(&mut self, c: usize, m: usize) -> &mut [$elem] {
                let nz = self.grid.nz();
                let start = c * self.grid.block() + m * nz;
                &mut self.data[start..start + nz]
            }

            /// Field holding a subset of the components, in the given order.
            pub fn select(&self, comps: &[usize]) -> Self {
                let mut data = Vec::with_capacity(comps.len() * self.grid.block());
                for &c in comps {
                    data.extend_from_slice(self.component(c));
                }
                Self {
                    grid: self.grid.clone(),
                    components: comps.len(),
                    data,
                }
            }

            /// Concatenates components of fields on the same grid.
            pub fn stack(parts: &[&Self]) -> Result<Self> {
                let first = parts
                    .first()
                    .ok_or_else(|| Error::Shape("cannot stack zero fields".into()))?;
                let mut data = Vec::new();
                let mut components = 0;
                for p in parts {
                    p.check_grid(first)?;
                    data.extend_from_slice(&p.data);
                    components += p.components;
                }
                Ok(Self {
                    grid: first.grid.clone(),
                    components,
                    data,
                })
            }

            pub fn check_same_shape(&self, other: &Self) -> Result<()> {
                self.check_grid(other)?;
                if self.components != other.components {
                    return Err(Error::Shape(format!(
                        "component count {} vs {}",
                        self.components, other.components
                    )));
                }
                Ok(())
            }

            fn check_grid(&self, other: &Self) -> Result<()> {
                if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
                    return Err(Error::Shape("fields live on different grids".into()));
                }
                Ok(())
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.check_same_shape(other)?;
                let mut out = self.clone();
                out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += *b);
                Ok(out)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.check_same_shape(other)?;
                let mut out = self.clone();
                out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= *b);
                Ok(out)
            }

            pub fn scaled(&self, s: f64) -> Self {
                let mut out = self.clone();
                out.data.iter_mut().for_each(|a| *a *= s);
                out
            }
        }
    };
}

/// Real samples on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Arc<Grid>,
    components: usize,
    data: Vec<f64>,
}

/// Fourier coefficients over time and tangential directions, sampled in the
/// normal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Arc<Grid>,
    components: usize,
    data: Vec<Complex64>,
}

field_common!(PhysicalField, f64);
field_common!(SpectralField, Complex64);

impl PhysicalField {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    /// Samples `f(t, x', x_n)` for each component.
    pub fn from_fn<F>(grid: Arc<Grid>, components: usize, f: F) -> Self
    where
        F: Fn(usize, f64, &[f64], f64) -> f64,
    {
        let t = grid.time_nodes();
        let n_tan = grid.n_tan();
        let points: Vec<Vec<f64>> = (0..n_tan).map(|jt| grid.tangential_point(jt)).collect();
        let mut data = Vec::with_capacity(grid.block() * components);
        for c in 0..components {
            for &ti in &t {
                for xp in &points {
                    for &xn in grid.normal().nodes() {
                        data.push(f(c, ti, xp, xn));
                    }
                }
            }
        }
        Self {
            grid,
            components,
            data,
        }
    }
}

impl SpectralField {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn mode_count(&self) -> usize {
        self.grid.n_modes()
    }

    pub fn scaled_complex(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|a| *a *= s);
        out
    }

    /// Multiplies every mode's coefficients by `m(it, jt)`.
    pub fn map_modes<F>(&self, m: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let grid = &self.grid;
        let n_tan = grid.n_tan();
        let mut out = self.clone();
        for c in 0..self.components {
            for mode in 0..grid.n_modes() {
                let s = m(mode / n_tan, mode % n_tan);
                out.profile_mut(c, mode).iter_mut().for_each(|a| *a *= s);
            }
        }
        out
    }

    /// Restriction to the first normal node, as a field on the boundary grid.
    pub fn trace(&self) -> SpectralField {
        let grid = Arc::new(self.grid.boundary());
        let mut data = Vec::with_capacity(self.components * grid.n_modes());
        for c in 0..self.components {
            for mode in 0..self.grid.n_modes() {
                data.push(self.profile(c, mode)[0]);
            }
        }
        SpectralField {
            grid,
            components: self.components,
            data,
        }
    }

    /// Copy onto a grid of another resolution on the same domain: shared
    /// modes are copied, the remaining ones are zero.
    pub fn resample(&self, target: Arc<Grid>) -> Result<SpectralField> {
        if !self.grid.same_domain(&target) || self.grid.normal() != target.normal() {
            return Err(Error::Shape("resampling needs the same domain and normal grid".into()));
        }
        let mut out = SpectralField::zeros(target.clone(), self.components);
        let n_tan = self.grid.n_tan();
        let half = (self.grid.tangential() / 2) as i64;
        for mode in 0..self.grid.n_modes() {
            let (it, jt) = (mode / n_tan, mode % n_tan);
            let idx = self.grid.tangential_index(jt);
            // The source Nyquist line has no unique image on a finer grid.
            if idx.iter().any(|&j| j == -half) {
                continue;
            }
            let (Some(tt), Some(tj)) = (
                target.time_position(self.grid.time_index(it)),
                target.tangential_position(&idx),
            ) else {
                continue;
            };
            if target.is_nyquist(tj) {
                continue;
            }
            let tm = tt * target.n_tan() + tj;
            for c in 0..self.components {
                out.profile_mut(c, tm).copy_from_slice(self.profile(c, mode));
            }
        }
        Ok(out)
    }
}

/// A field together with its normal derivatives: `levels[i]` is the `i`-th
/// normal derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalJet {
    levels: Vec<SpectralField>,
}

impl NormalJet {
    pub fn new(levels: Vec<SpectralField>) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::Shape("jet needs at least a value".into()))?;
        for l in &levels[1..] {
            first.check_same_shape(l)?;
        }
        Ok(Self { levels })
    }

    /// Jet of a boundary field or a field whose normal derivatives are not
    /// needed.
    pub fn value_only(value: SpectralField) -> Self {
        Self {
            levels: vec![value],
        }
    }

    pub fn zeros(grid: Arc<Grid>, components: usize, order: usize) -> Self {
        Self {
            levels: (0..=order)
                .map(|_| SpectralField::zeros(grid.clone(), components))
                .collect(),
        }
    }

    pub fn value(&self) -> &SpectralField {
        &self.levels[0]
    }
    pub fn level(&self, i: usize) -> Option<&SpectralField> {
        self.levels.get(i)
    }
    pub fn levels(&self) -> &[SpectralField] {
        &self.levels
    }
    pub fn levels_mut(&mut self) -> &mut [SpectralField] {
        &mut self.levels
    }
    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }
    pub fn grid(&self) -> &Arc<Grid> {
        self.levels[0].grid()
    }
    pub fn components(&self) -> usize {
        self.levels[0].components()
    }

    /// Normal derivative; drops the highest level.
    pub fn normal_derivative(&self) -> Result<NormalJet> {
        if self.levels.len() < 2 {
            return Err(Error::Shape("jet carries no normal derivative".into()));
        }
        Ok(Self {
            levels: self.levels[1..].to_vec(),
        })
    }

    pub fn truncated(&self, order: usize) -> NormalJet {
        Self {
            levels: self.levels[..(order + 1).min(self.levels.len())].to_vec(),
        }
    }

    pub fn map_modes<F>(&self, m: F) -> NormalJet
    where
        F: Fn(usize, usize) -> Complex64,
    {
        Self {
            levels: self.levels.iter().map(|l| l.map_modes(&m)).collect(),
        }
    }

    pub fn select(&self, comps: &[usize]) -> NormalJet {
        Self {
            levels: self.levels.iter().map(|l| l.select(comps)).collect(),
        }
    }

    pub fn add(&self, other: &NormalJet) -> Result<NormalJet> {
        let n = self.levels.len().min(other.levels.len());
        let levels = (0..n)
            .map(|i| self.levels[i].add(&other.levels[i]))
            .collect::<Result<_>>()?;
        Ok(Self { levels })
    }

    pub fn sub(&self, other: &NormalJet) -> Result<NormalJet> {
        let n = self.levels.len().min(other.levels.len());
        let levels = (0..n)
            .map(|i| self.levels[i].sub(&other.levels[i]))
            .collect::<Result<_>>()?;
        Ok(Self { levels })
    }

    pub fn scaled(&self, s: f64) -> NormalJet {
        Self {
            levels: self.levels.iter().map(|l| l.scaled(s)).collect(),
        }
    }

    pub fn resample(&self, target: Arc<Grid>) -> Result<NormalJet> {
        Ok(Self {
            levels: self
                .levels
                .iter()
                .map(|l| l.resample(target.clone()))
                .collect::<Result<_>>()?,
        })
    }

    pub fn stack(parts: &[&NormalJet]) -> Result<NormalJet> {
        let n = parts.iter().map(|p| p.levels.len()).min().unwrap_or(0);
        let levels = (0..n)
            .map(|i| {
                let layer: Vec<&SpectralField> = parts.iter().map(|p| &p.levels[i]).collect();
                SpectralField::stack(&layer)
            })
            .collect::<Result<_>>()?;
        Self::new(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::NormalGrid;

    #[test]
    fn layout_keeps_profiles_contiguous() {
        let normal = NormalGrid::from_nodes(vec![0.0, 0.5, 1.0]).unwrap();
        let grid = Arc::new(Grid::new(1.0, 2, 1, 4, 1.0, normal).unwrap());
        let f = PhysicalField::from_fn(grid.clone(), 2, |c, _t, _x, xn| c as f64 + xn);
        assert_eq!(f.profile(1, 5), &[1.0, 1.5, 2.0]);
        let spec = SpectralField::zeros(grid, 1);
        assert_eq!(spec.trace().grid().nz(), 1);
    }
}

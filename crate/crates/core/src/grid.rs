//! Uniform grids on `[-L, L]^n` and the sampled fields that live on them.
//!
//! Nodes sit at `x_i = -L + i h` with `h = 2L / N`, so the origin is a node
//! whenever `N` is even and the grid doubles as a periodic torus of side `2L`.
//! Every integral in the crate is the node value times the cell volume `h^n`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Truncated,
    Periodic,
}

/// Spatial points are stored in three slots; unused axes are zero.
pub type Point = [f64; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    nodes: usize,
    half_width: f64,
    #[serde(default)]
    boundary: Boundary,
}

impl Grid {
    pub fn new(dim: usize, nodes: usize, half_width: f64, boundary: Boundary) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if nodes < 2 {
            return Err(invalid(format!("need at least 2 nodes per axis, got {nodes}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { dim, nodes, half_width, boundary })
    }

    pub fn line(nodes: usize, half_width: f64) -> Result<Self> {
        Self::new(1, nodes, half_width, Boundary::Truncated)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.nodes as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Axis indices of a flat index, last axis fastest.
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.nodes;
            flat /= self.nodes;
        }
        idx
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.nodes + i)
    }

    pub fn point(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Same box, twice the nodes per axis.
    pub fn refined(&self) -> Self {
        Self { nodes: self.nodes * 2, ..self.clone() }
    }

    /// Box scaled by `factor` (an integer) at unchanged spacing.
    pub fn enlarged(&self, factor: usize) -> Self {
        Self { nodes: self.nodes * factor, half_width: self.half_width * factor as f64, ..self.clone() }
    }

    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        Self::new(self.dim, self.nodes, half_width, self.boundary)
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

pub fn norm2(x: &Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Real scalar samples on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&Point) -> f64) -> Result<Self> {
        let values = grid.points().map(|x| f(&x)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Share of `∫|f|` carried by nodes in the outer eighth of the box.
    pub fn boundary_mass(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.abs()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge = 0.875 * self.grid.half_width;
        let outer: f64 = self
            .grid
            .points()
            .zip(&self.values)
            .filter(|(x, _)| x[..self.grid.dim].iter().any(|c| c.abs() >= edge))
            .map(|(_, v)| v.abs())
            .sum();
        outer / total
    }
}

/// Vector-valued samples, one component vector per axis (or a single scalar component).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("vector field needs at least one component"));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::GridMismatch("component length differs from grid".into()));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("vector field component".into()));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: &Grid, components: usize) -> Self {
        Self { grid: grid.clone(), components: vec![vec![0.0; grid.len()]; components] }
    }

    pub fn from_fn(grid: &Grid, components: usize, f: impl Fn(&Point) -> [f64; 3]) -> Result<Self> {
        let mut comps = vec![Vec::with_capacity(grid.len()); components];
        for x in grid.points() {
            let v = f(&x);
            for (c, comp) in comps.iter_mut().enumerate() {
                comp.push(v[c]);
            }
        }
        Self::new(grid.clone(), comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Euclidean magnitude at each node.
    pub fn magnitude(&self) -> GridFunction {
        let values =
            (0..self.grid.len()).map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()).collect();
        GridFunction { grid: self.grid.clone(), values }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components.iter().map(|c| c.iter().map(|v| a * v).collect()).collect(),
        }
    }

    /// `a * self + b * other`
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        if self.len() != other.len() {
            return Err(Error::GridMismatch("component counts differ".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
            .collect();
        Ok(Self { grid: self.grid.clone(), components })
    }

    pub fn sup_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .flatten()
            .zip(other.components.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Uniform time nodes `t_j = j T / M`, `j = 1..=M`, each carrying weight `T / M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("time horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(invalid("time grid needs at least one step"));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    /// Node times `t_1 .. t_M` (the origin is excluded).
    pub fn times(&self) -> Vec<f64> {
        (1..=self.steps).map(|j| self.time(j)).collect()
    }
}

/// Vector fields at the time nodes `t_1..t_M` of a [`TimeGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    times: TimeGrid,
    slices: Vec<VectorField>,
}

impl SpaceTimeField {
    pub fn new(times: TimeGrid, slices: Vec<VectorField>) -> Result<Self> {
        if slices.len() != times.steps() {
            return Err(Error::GridMismatch(format!("{} slices for {} time nodes", slices.len(), times.steps())));
        }
        let first = &slices[0];
        for s in &slices[1..] {
            s.grid().ensure_same(first.grid())?;
            if s.len() != first.len() {
                return Err(Error::GridMismatch("component counts differ between slices".into()));
            }
        }
        Ok(Self { times, slices })
    }

    pub fn zeros(grid: &Grid, components: usize, times: &TimeGrid) -> Self {
        Self { times: times.clone(), slices: vec![VectorField::zeros(grid, components); times.steps()] }
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn slices(&self) -> &[VectorField] {
        &self.slices
    }

    pub fn slice(&self, j: usize) -> &VectorField {
        &self.slices[j]
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    pub fn components(&self) -> usize {
        self.slices[0].len()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { times: self.times.clone(), slices: self.slices.iter().map(|s| s.scaled(a)).collect() }
    }

    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::GridMismatch("time grids differ".into()));
        }
        let slices = self.slices.iter().zip(&other.slices).map(|(x, y)| x.axpby(a, y, b)).collect::<Result<_>>()?;
        Ok(Self { times: self.times.clone(), slices })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.slices.iter().zip(&other.slices).fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_a_node_for_even_counts() {
        let g = Grid::new(2, 8, 1.0, Boundary::Periodic).unwrap();
        let mid = g.flat_index([4, 4, 0]);
        assert_eq!(g.point(mid), [0.0, 0.0, 0.0]);
        assert_eq!(g.multi_index(mid), [4, 4, 0]);
    }

    #[test]
    fn enlarged_keeps_spacing() {
        let g = Grid::line(64, 2.0).unwrap();
        assert_eq!(g.enlarged(2).spacing(), g.spacing());
        assert_eq!(g.refined().spacing(), g.spacing() / 2.0);
    }

    #[test]
    fn rejects_nonfinite_samples() {
        let g = Grid::line(4, 1.0).unwrap();
        assert!(GridFunction::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Vec3};

/// Smallest per-axis node count supported by the central-difference stencils.
pub const MIN_COUNT: usize = 4;

pub type ScalarClosure = Arc<dyn Fn(Vec3) -> f64 + Send + Sync>;
pub type VectorClosure = Arc<dyn Fn(Vec3) -> Vec3 + Send + Sync>;

/// Uniform periodic box `[origin, origin + lengths)` sampled at `counts` nodes per axis.
///
/// Node `(i, j, k)` sits at `origin + (i h_x, j h_y, k h_z)` with `h = L / n`.
/// Storage order is x-slowest, z-fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec3 {
    counts: [usize; 3],
    lengths: [f64; 3],
    origin: [f64; 3],
}

impl GridSpec3 {
    pub fn new(counts: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        Self::with_origin(counts, lengths, [0.0; 3])
    }

    pub fn with_origin(counts: [usize; 3], lengths: [f64; 3], origin: [f64; 3]) -> Result<Self> {
        for (axis, &n) in counts.iter().enumerate() {
            if n < MIN_COUNT {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} has {n} nodes, need at least {MIN_COUNT}"
                )));
            }
        }
        for (axis, &l) in lengths.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidGrid(format!("axis {axis} has length {l}")));
            }
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid(format!("origin {origin:?} is not finite")));
        }
        Ok(Self { counts, lengths, origin })
    }

    /// Box `[-L/2, L/2)` on every axis.
    pub fn centered(counts: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        Self::with_origin(counts, lengths, linalg::scale(lengths, -0.5))
    }

    pub fn cube(n: usize, length: f64) -> Result<Self> {
        Self::new([n; 3], [length; 3])
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            self.lengths[0] / self.counts[0] as f64,
            self.lengths[1] / self.counts[1] as f64,
            self.lengths[2] / self.counts[2] as f64,
        ]
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_periodic(&self) -> bool {
        true
    }

    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h[0] * h[1] * h[2]
    }

    pub fn volume(&self) -> f64 {
        self.lengths[0] * self.lengths[1] * self.lengths[2]
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().cloned().fold(0.0, f64::max)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.counts[1] + j) * self.counts[2] + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.counts[2];
        let j = (idx / self.counts[2]) % self.counts[1];
        let i = idx / (self.counts[1] * self.counts[2]);
        [i, j, k]
    }

    /// Index of the node displaced by `offset` along `axis`, wrapping periodically.
    #[inline]
    pub fn shifted(&self, ijk: [usize; 3], axis: usize, offset: isize) -> usize {
        let mut c = ijk;
        let n = self.counts[axis] as isize;
        c[axis] = (c[axis] as isize + offset).rem_euclid(n) as usize;
        self.index(c[0], c[1], c[2])
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let h = self.spacing();
        [
            self.origin[0] + i as f64 * h[0],
            self.origin[1] + j as f64 * h[1],
            self.origin[2] + k as f64 * h[2],
        ]
    }

    pub fn node_at(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.unravel(idx);
        self.node(i, j, k)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |idx| self.node_at(idx))
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.origin[a] && p[a] <= self.origin[a] + self.lengths[a])
    }
}

impl fmt::Display for GridSpec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{}x{} on [{}, {}) x [{}, {}) x [{}, {})",
            self.counts[0],
            self.counts[1],
            self.counts[2],
            self.origin[0],
            self.origin[0] + self.lengths[0],
            self.origin[1],
            self.origin[1] + self.lengths[1],
            self.origin[2],
            self.origin[2] + self.lengths[2]
        )
    }
}

/// Real samples at every grid node, optionally backed by the analytic function they came from.
#[derive(Clone)]
pub struct ScalarField3 {
    grid: GridSpec3,
    values: Vec<f64>,
    closure: Option<ScalarClosure>,
}

impl fmt::Debug for ScalarField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField3")
            .field("grid", &self.grid)
            .field("analytic", &self.closure.is_some())
            .finish_non_exhaustive()
    }
}

impl ScalarField3 {
    pub fn from_samples(grid: GridSpec3, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, closure: None })
    }

    pub fn zeros(grid: GridSpec3) -> Self {
        Self { grid, values: vec![0.0; grid.len()], closure: None }
    }

    /// Samples `f` at every node and keeps `f` as the analytic closure.
    pub fn from_fn<F>(grid: GridSpec3, f: F) -> Self
    where
        F: Fn(Vec3) -> f64 + Send + Sync + 'static,
    {
        let values = grid.nodes().map(&f).collect();
        Self { grid, values, closure: Some(Arc::new(f)) }
    }

    pub fn grid(&self) -> &GridSpec3 {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        self.closure = None;
        &mut self.values
    }

    pub fn closure(&self) -> Option<&ScalarClosure> {
        self.closure.as_ref()
    }

    pub fn eval(&self, p: Vec3) -> f64 {
        match &self.closure {
            Some(f) => f(p),
            None => trilinear(&self.grid, p, |idx| self.values[idx]),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        linalg::pairwise_sum(&self.values) / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), closure: None }
    }
}

/// Three component arrays congruent with one grid, optionally backed by an analytic closure.
#[derive(Clone)]
pub struct VectorField3 {
    grid: GridSpec3,
    comps: [Vec<f64>; 3],
    closure: Option<VectorClosure>,
    certified_divergence: Option<f64>,
}

impl fmt::Debug for VectorField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField3")
            .field("grid", &self.grid)
            .field("analytic", &self.closure.is_some())
            .field("certified_divergence", &self.certified_divergence)
            .finish_non_exhaustive()
    }
}

impl VectorField3 {
    pub fn from_components(grid: GridSpec3, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid("component length does not match grid".into()));
        }
        Ok(Self { grid, comps, closure: None, certified_divergence: None })
    }

    pub fn zeros(grid: GridSpec3) -> Self {
        let n = grid.len();
        Self {
            grid,
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            closure: None,
            certified_divergence: None,
        }
    }

    pub fn from_fn<F>(grid: GridSpec3, f: F) -> Self
    where
        F: Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    {
        Self::from_closure(grid, Arc::new(f))
    }

    pub fn from_closure(grid: GridSpec3, f: VectorClosure) -> Self {
        let n = grid.len();
        let mut comps = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for p in grid.nodes() {
            let v = f(p);
            for a in 0..3 {
                comps[a].push(v[a]);
            }
        }
        Self { grid, comps, closure: Some(f), certified_divergence: None }
    }

    pub fn grid(&self) -> &GridSpec3 {
        &self.grid
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.comps[axis]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.comps
    }

    pub fn closure(&self) -> Option<&VectorClosure> {
        self.closure.as_ref()
    }

    /// Attaches an analytic closure; the caller asserts it agrees with the samples.
    pub fn with_closure(mut self, f: VectorClosure) -> Self {
        self.closure = Some(f);
        self
    }

    pub fn without_closure(mut self) -> Self {
        self.closure = None;
        self
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Vec3 {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// Analytic value when a closure is present, periodic trilinear interpolation otherwise.
    pub fn eval(&self, p: Vec3) -> Vec3 {
        match &self.closure {
            Some(f) => f(p),
            None => [
                trilinear(&self.grid, p, |idx| self.comps[0][idx]),
                trilinear(&self.grid, p, |idx| self.comps[1][idx]),
                trilinear(&self.grid, p, |idx| self.comps[2][idx]),
            ],
        }
    }

    pub fn certified_divergence(&self) -> Option<f64> {
        self.certified_divergence
    }

    /// Records a divergence certificate. Fails if `residual` exceeds `tolerance`.
    pub fn certify_solenoidal(mut self, residual: f64, tolerance: f64) -> Result<Self> {
        if residual > tolerance {
            return Err(Error::NotSolenoidal { residual, tolerance });
        }
        self.certified_divergence = Some(residual);
        Ok(self)
    }

    pub fn dot(&self, other: &VectorField3) -> Result<ScalarField3> {
        self.check_grid(other)?;
        let values = (0..self.grid.len()).map(|i| linalg::dot(self.at(i), other.at(i))).collect();
        ScalarField3::from_samples(self.grid, values)
    }

    pub fn norm_sq(&self) -> ScalarField3 {
        let values = (0..self.grid.len()).map(|i| linalg::dot(self.at(i), self.at(i))).collect();
        ScalarField3 { grid: self.grid, values, closure: None }
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.grid.len()).fold(0.0, |m, i| m.max(linalg::norm(self.at(i))))
    }

    pub fn mean(&self) -> Vec3 {
        let n = self.grid.len() as f64;
        [
            linalg::pairwise_sum(&self.comps[0]) / n,
            linalg::pairwise_sum(&self.comps[1]) / n,
            linalg::pairwise_sum(&self.comps[2]) / n,
        ]
    }

    /// Root-mean-square magnitude over the nodes.
    pub fn rms(&self) -> f64 {
        let sq: Vec<f64> = (0..self.grid.len()).map(|i| linalg::dot(self.at(i), self.at(i))).collect();
        (linalg::pairwise_sum(&sq) / sq.len() as f64).sqrt()
    }

    /// Subtracts the node average from every component.
    pub fn remove_mean(&self) -> VectorField3 {
        let m = self.mean();
        let comps = [0, 1, 2].map(|a| self.comps[a].iter().map(|v| v - m[a]).collect());
        VectorField3 { grid: self.grid, comps, closure: None, certified_divergence: None }
    }

    pub fn scaled(&self, s: f64) -> VectorField3 {
        let comps = [0, 1, 2].map(|a| self.comps[a].iter().map(|v| v * s).collect());
        let closure = self.closure.clone().map(|f| -> VectorClosure {
            Arc::new(move |p| linalg::scale(f(p), s))
        });
        VectorField3 { grid: self.grid, comps, closure, certified_divergence: self.certified_divergence }
    }

    /// `a * self + b * other`, keeping an analytic closure when both operands have one.
    pub fn lin_comb(&self, a: f64, other: &VectorField3, b: f64) -> Result<VectorField3> {
        self.check_grid(other)?;
        let comps = [0, 1, 2].map(|ax| {
            self.comps[ax].iter().zip(&other.comps[ax]).map(|(x, y)| a * x + b * y).collect()
        });
        let closure = match (&self.closure, &other.closure) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |p| linalg::add(linalg::scale(f(p), a), linalg::scale(g(p), b)))
                    as VectorClosure)
            }
            _ => None,
        };
        Ok(VectorField3 { grid: self.grid, comps, closure, certified_divergence: None })
    }

    pub fn add(&self, other: &VectorField3) -> Result<VectorField3> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &VectorField3) -> Result<VectorField3> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// Pointwise map over node vectors. Drops the closure.
    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> VectorField3 {
        let mut out = VectorField3::zeros(self.grid);
        for i in 0..self.grid.len() {
            let v = f(self.at(i));
            for a in 0..3 {
                out.comps[a][i] = v[a];
            }
        }
        out
    }

    pub fn zip_map(&self, other: &VectorField3, f: impl Fn(Vec3, Vec3) -> Vec3) -> Result<VectorField3> {
        self.check_grid(other)?;
        let mut out = VectorField3::zeros(self.grid);
        for i in 0..self.grid.len() {
            let v = f(self.at(i), other.at(i));
            for a in 0..3 {
                out.comps[a][i] = v[a];
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &VectorField3) -> Result<f64> {
        self.check_grid(other)?;
        Ok((0..self.grid.len())
            .fold(0.0, |m, i| m.max(linalg::norm(linalg::sub(self.at(i), other.at(i))))))
    }

    pub fn check_grid(&self, other: &VectorField3) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Periodic trilinear interpolation of node data.
pub fn trilinear(grid: &GridSpec3, p: Vec3, value: impl Fn(usize) -> f64) -> f64 {
    let h = grid.spacing();
    let n = grid.counts();
    let o = grid.origin();
    let mut base = [0usize; 3];
    let mut frac = [0.0; 3];
    for a in 0..3 {
        let s = (p[a] - o[a]) / h[a];
        let fl = s.floor();
        frac[a] = s - fl;
        base[a] = (fl as i64).rem_euclid(n[a] as i64) as usize;
    }
    let mut acc = 0.0;
    for corner in 0..8 {
        let d = [corner >> 2 & 1, corner >> 1 & 1, corner & 1];
        let mut w = 1.0;
        let mut c = [0usize; 3];
        for a in 0..3 {
            w *= if d[a] == 1 { frac[a] } else { 1.0 - frac[a] };
            c[a] = (base[a] + d[a]) % n[a];
        }
        if w != 0.0 {
            acc += w * value(grid.index(c[0], c[1], c[2]));
        }
    }
    acc
}

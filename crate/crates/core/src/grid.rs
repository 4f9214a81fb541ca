//! Uniform structured grids, point-valued fields, and second-order
//! finite-difference operators.
//!
//! Points are stored row-major in `(x, y, z)`: the flat index of node
//! `(i, j, k)` is `(i * ny + j) * nz + k`. An axis with a single node is
//! inactive; derivatives along it are identically zero, which gives the
//! 2D and 1D reductions used by the wave solvers.

use crate::so3::{self, Mat3, Rotation, So3Error, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Sub};

/// Minimum number of nodes along an active axis.
pub const MIN_ACTIVE_NODES: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("axis {axis:?} has {nodes} nodes; active axes need at least {MIN_ACTIVE_NODES}")]
    TooFewNodes { axis: Axis, nodes: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("axis {0:?} is inactive on this grid")]
    InactiveAxis(Axis),
    #[error("field has {got} values, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("{modes} modes cannot be resolved on an axis with {nodes} nodes (need modes ≤ nodes/4)")]
    Resolution { modes: usize, nodes: usize },
    #[error("non-finite value at point {0}")]
    NonFinite(usize),
    #[error("rotation vector is non-zero on the Dirichlet boundary at point {0}")]
    BoundaryNotIdentity(usize),
    #[error("point {index}: {source}")]
    Rotation {
        index: usize,
        #[source]
        source: So3Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    /// `O = I` (equivalently `u = 0`) on the outermost node layer.
    DirichletIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dims: [usize; 3],
    spacing: f64,
    boundary: Boundary,
}

impl GridSpec {
    pub fn new(dims: [usize; 3], spacing: f64, boundary: Boundary) -> Result<Self, GridError> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(GridError::BadSpacing(spacing));
        }
        for axis in Axis::ALL {
            let n = dims[axis.index()];
            if n == 0 || (n > 1 && n < MIN_ACTIVE_NODES) {
                return Err(GridError::TooFewNodes { axis, nodes: n });
            }
        }
        Ok(GridSpec {
            dims,
            spacing,
            boundary,
        })
    }

    /// Cubic periodic grid of `n³` nodes covering a box of side `length`.
    pub fn periodic_cube(n: usize, length: f64) -> Result<Self, GridError> {
        GridSpec::new([n; 3], length / n as f64, Boundary::Periodic)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_active(&self, axis: Axis) -> bool {
        self.dims[axis.index()] > 1
    }

    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|a| self.is_active(*a))
    }

    pub fn dimension(&self) -> usize {
        self.active_axes().count()
    }

    /// Quadrature weight of one node: `h^d` with `d` the number of active axes.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dimension() as i32)
    }

    /// Physical length of an axis (`n h` periodic, `(n − 1) h` Dirichlet).
    pub fn extent(&self, axis: Axis) -> f64 {
        let n = self.dims[axis.index()];
        match self.boundary {
            Boundary::Periodic => n as f64 * self.spacing,
            Boundary::DirichletIdentity => (n.max(2) - 1) as f64 * self.spacing,
        }
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        [i, j, k]
    }

    /// Physical position of a node (origin at node `(0, 0, 0)`).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        self.coords(idx).map(|c| c as f64 * self.spacing)
    }

    /// True for nodes on the outer layer of a Dirichlet grid.
    pub fn is_boundary_point(&self, idx: usize) -> bool {
        if self.boundary == Boundary::Periodic {
            return false;
        }
        let c = self.coords(idx);
        self.active_axes()
            .any(|a| c[a.index()] == 0 || c[a.index()] == self.dims[a.index()] - 1)
    }

    /// Same physical domain at half the spacing.
    pub fn refined(&self) -> GridSpec {
        let dims = self.dims.map(|n| match (n, self.boundary) {
            (1, _) => 1,
            (n, Boundary::Periodic) => 2 * n,
            (n, Boundary::DirichletIdentity) => 2 * n - 1,
        });
        GridSpec {
            dims,
            spacing: self.spacing / 2.0,
            boundary: self.boundary,
        }
    }

    /// Flat indices and weights (including `1/h`) of the first-derivative
    /// stencil at `idx` along an active `axis`; unused slots carry weight 0.
    pub fn derivative_neighbours(&self, idx: usize, axis: Axis) -> [(usize, f64); 4] {
        let n = self.dims[axis.index()];
        let c = self.coords(idx)[axis.index()];
        let step = self.step(axis);
        let base = idx - c * step;
        let inv_h = 1.0 / self.spacing;
        first_derivative_stencil(n, c, self.is_periodic()).map(|(node, w)| (base + node * step, w * inv_h))
    }

    /// Nodes whose first-derivative stencils (along any active axis) read `idx`.
    pub fn stencil_readers(&self, idx: usize) -> Vec<usize> {
        let c = self.coords(idx);
        let mut out = vec![idx];
        for axis in self.active_axes() {
            let a = axis.index();
            let n = self.dims[a] as i64;
            for offset in [-2i64, -1, 1, 2] {
                let p = c[a] as i64 + offset;
                let p = if self.is_periodic() {
                    p.rem_euclid(n)
                } else if (0..n).contains(&p) {
                    p
                } else {
                    continue;
                };
                let mut q = c;
                q[a] = p as usize;
                out.push(self.index(q[0], q[1], q[2]));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn step(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.dims[1] * self.dims[2],
            Axis::Y => self.dims[2],
            Axis::Z => 1,
        }
    }
}

/// Values that can live at grid points and be combined linearly by stencils.
pub trait FieldValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn zero() -> Self;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl FieldValue for Vec3 {
    fn zero() -> Self {
        Vec3::zeros()
    }
}

impl FieldValue for Mat3 {
    fn zero() -> Self {
        Mat3::zeros()
    }
}

/// One value of type `T` per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: GridSpec,
    values: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type Vector3Field = Field<Vec3>;
pub type Matrix3Field = Field<Mat3>;

impl<T> Field<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Field { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> &T {
        &self.values[idx]
    }
}

impl<T: Send> Field<T> {
    pub fn from_fn(grid: GridSpec, f: impl Fn(usize) -> T + Sync + Send) -> Self {
        let values = (0..grid.len()).into_par_iter().map(f).collect();
        Field { grid, values }
    }
}

impl<T: Sync> Field<T> {
    pub fn map<U: Send>(&self, f: impl Fn(&T) -> U + Sync + Send) -> Field<U> {
        Field {
            grid: self.grid,
            values: self.values.par_iter().map(f).collect(),
        }
    }

    pub fn zip_map<S: Sync, U: Send>(
        &self,
        other: &Field<S>,
        f: impl Fn(&T, &S) -> U + Sync + Send,
    ) -> Result<Field<U>, GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }
}

impl<T: FieldValue> Field<T> {
    pub fn zeros(grid: GridSpec) -> Self {
        Field {
            grid,
            values: vec![T::zero(); grid.len()],
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| *v * s)
    }
}

impl ScalarField {
    /// Midpoint-rule integral `h^d Σ f`, summed pairwise in a fixed order.
    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.values) * self.grid.cell_volume()
    }

    /// `h^d Σ |f|`.
    pub fn integrate_abs(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        pairwise_sum(&abs) * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

type Stencil = [(usize, f64); 4];

/// Second-order first-derivative weights (without the `1/h` factor) at node `i`.
fn first_derivative_stencil(n: usize, i: usize, periodic: bool) -> Stencil {
    if periodic {
        [((i + n - 1) % n, -0.5), ((i + 1) % n, 0.5), (i, 0.0), (i, 0.0)]
    } else if i == 0 {
        [(0, -1.5), (1, 2.0), (2, -0.5), (0, 0.0)]
    } else if i == n - 1 {
        [(n - 1, 1.5), (n - 2, -2.0), (n - 3, 0.5), (i, 0.0)]
    } else {
        [(i - 1, -0.5), (i + 1, 0.5), (i, 0.0), (i, 0.0)]
    }
}

/// Second-order second-derivative weights (without `1/h²`) at node `i`.
fn second_derivative_stencil(n: usize, i: usize, periodic: bool) -> Stencil {
    if periodic {
        [((i + n - 1) % n, 1.0), (i, -2.0), ((i + 1) % n, 1.0), (i, 0.0)]
    } else if i == 0 {
        [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)]
    } else if i == n - 1 {
        [(n - 1, 2.0), (n - 2, -5.0), (n - 3, 4.0), (n - 4, -1.0)]
    } else {
        [(i - 1, 1.0), (i, -2.0), (i + 1, 1.0), (i, 0.0)]
    }
}

fn apply_stencil<T: FieldValue>(
    f: &Field<T>,
    axis: Axis,
    scale: f64,
    stencil: fn(usize, usize, bool) -> Stencil,
) -> Field<T> {
    let grid = f.grid;
    let n = grid.dims[axis.index()];
    let periodic = grid.is_periodic();
    Field::from_fn(grid, |idx| {
        let c = grid.coords(idx)[axis.index()];
        let step = grid.step(axis);
        let base = idx - c * step;
        let mut acc = T::zero();
        for (node, w) in stencil(n, c, periodic) {
            if w != 0.0 {
                acc += f.values[base + node * step] * w;
            }
        }
        acc * scale
    })
}

/// Central second-order derivative along `axis`; one-sided second-order
/// closures on the two boundary layers of a Dirichlet grid.
pub fn partial<T: FieldValue>(f: &Field<T>, axis: Axis) -> Result<Field<T>, GridError> {
    if !f.grid.is_active(axis) {
        return Err(GridError::InactiveAxis(axis));
    }
    Ok(apply_stencil(f, axis, 1.0 / f.grid.spacing, first_derivative_stencil))
}

/// Like [`partial`] but returns zeros along inactive axes.
pub fn partial_or_zero<T: FieldValue>(f: &Field<T>, axis: Axis) -> Field<T> {
    partial(f, axis).unwrap_or_else(|_| Field::zeros(f.grid))
}

/// Transpose of the [`partial`] stencil matrix applied to `g`
/// (used to pull gradients back through derivatives).
pub fn partial_adjoint<T: FieldValue>(g: &Field<T>, axis: Axis) -> Field<T> {
    let grid = g.grid;
    if !grid.is_active(axis) {
        return Field::zeros(grid);
    }
    if grid.is_periodic() {
        // The periodic central stencil is antisymmetric.
        return apply_stencil(g, axis, -1.0 / grid.spacing, first_derivative_stencil);
    }
    let n = grid.dims[axis.index()];
    let step = grid.step(axis);
    let inv_h = 1.0 / grid.spacing;
    Field::from_fn(grid, |idx| {
        let q = grid.coords(idx)[axis.index()];
        let base = idx - q * step;
        let mut acc = T::zero();
        for p in q.saturating_sub(2)..(q + 3).min(n) {
            for (node, w) in first_derivative_stencil(n, p, false) {
                if node == q && w != 0.0 {
                    acc += g.values[base + p * step] * w;
                }
            }
        }
        acc * inv_h
    })
}

/// Compact second derivative along `axis` (`(f₋ − 2f + f₊)/h²` in the interior).
pub fn second_partial<T: FieldValue>(f: &Field<T>, axis: Axis) -> Result<Field<T>, GridError> {
    if !f.grid.is_active(axis) {
        return Err(GridError::InactiveAxis(axis));
    }
    let h = f.grid.spacing;
    Ok(apply_stencil(f, axis, 1.0 / (h * h), second_derivative_stencil))
}

/// Compact Laplacian over the active axes.
pub fn laplacian<T: FieldValue>(f: &Field<T>) -> Field<T> {
    let mut out = Field::zeros(f.grid);
    for axis in f.grid.active_axes() {
        let d2 = second_partial(f, axis).expect("active axis");
        out.values
            .par_iter_mut()
            .zip(d2.values.par_iter())
            .for_each(|(o, v)| *o += *v);
    }
    out
}

pub fn gradient(f: &ScalarField) -> Vector3Field {
    let d = Axis::ALL.map(|a| partial_or_zero(f, a));
    Field::from_fn(f.grid, |i| Vec3::new(d[0].values[i], d[1].values[i], d[2].values[i]))
}

fn component(u: &Vector3Field, c: usize) -> ScalarField {
    u.map(|v| v[c])
}

/// `∂_i u_j` for all `i, j` as a matrix field `J_{ij}`.
pub fn jacobian(u: &Vector3Field) -> Matrix3Field {
    let d = Axis::ALL.map(|a| partial_or_zero(u, a));
    Field::from_fn(u.grid, |p| {
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = d[i].values[p][j];
            }
        }
        m
    })
}

pub fn divergence(u: &Vector3Field) -> ScalarField {
    let mut out = ScalarField::zeros(u.grid);
    for axis in u.grid.active_axes() {
        let d = partial(&component(u, axis.index()), axis).expect("active axis");
        out.values
            .iter_mut()
            .zip(d.values.iter())
            .for_each(|(o, v)| *o += v);
    }
    out
}

pub fn curl(u: &Vector3Field) -> Vector3Field {
    let j = jacobian(u);
    j.map(|m| Vec3::new(m[(1, 2)] - m[(2, 1)], m[(2, 0)] - m[(0, 2)], m[(0, 1)] - m[(1, 0)]))
}

/// Field of rotation vectors `u(x)`; finite, and zero on a Dirichlet boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisField(Vector3Field);

impl AxisField {
    pub fn new(field: Vector3Field) -> Result<Self, GridError> {
        for (i, v) in field.values.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(GridError::NonFinite(i));
            }
            if field.grid.is_boundary_point(i) && *v != Vec3::zeros() {
                return Err(GridError::BoundaryNotIdentity(i));
            }
        }
        Ok(AxisField(field))
    }

    pub fn zeros(grid: GridSpec) -> Self {
        AxisField(Field::zeros(grid))
    }

    pub fn field(&self) -> &Vector3Field {
        &self.0
    }

    pub fn into_field(self) -> Vector3Field {
        self.0
    }

    pub fn grid(&self) -> &GridSpec {
        &self.0.grid
    }
}

/// Field of proper rotations `O(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationField(Matrix3Field);

impl RotationField {
    /// Validates every point against the rotation invariants.
    pub fn new(field: Matrix3Field) -> Result<Self, GridError> {
        for (index, m) in field.values.iter().enumerate() {
            Rotation::from_matrix(m).map_err(|source| GridError::Rotation { index, source })?;
        }
        Ok(RotationField(field))
    }

    pub fn identity(grid: GridSpec) -> Self {
        RotationField(Field {
            grid,
            values: vec![Mat3::identity(); grid.len()],
        })
    }

    /// Spatially constant field `O(x) = r`.
    pub fn constant(grid: GridSpec, r: &Rotation) -> Self {
        RotationField(Field {
            grid,
            values: vec![*r.matrix(); grid.len()],
        })
    }

    pub fn field(&self) -> &Matrix3Field {
        &self.0
    }

    pub fn grid(&self) -> &GridSpec {
        &self.0.grid
    }

    /// The rigidly rotated field `x ↦ O(x) Ō`.
    pub fn right_multiply(&self, r: &Rotation) -> RotationField {
        let m = *r.matrix();
        RotationField(self.0.map(|o| o * m))
    }
}

/// Pointwise Rodrigues exponential.
pub fn field_exp(u: &AxisField) -> RotationField {
    RotationField(u.0.map(|v| so3::rot_exp(v).into_matrix()))
}

/// Pointwise principal logarithm.
pub fn field_log(o: &RotationField) -> Result<Vector3Field, GridError> {
    let logs: Result<Vec<Vec3>, GridError> = o
        .0
        .values
        .par_iter()
        .enumerate()
        .map(|(index, m)| {
            so3::rot_log(&Rotation::from_matrix_unchecked(*m))
                .map_err(|source| GridError::Rotation { index, source })
        })
        .collect();
    Field::new(o.0.grid, logs?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TrigMode {
    wavevector: [i32; 3],
    amplitude: f64,
    phase: f64,
}

/// Band-limited random vector field: a trigonometric polynomial per component,
/// defined on the unit cube of normalised coordinates and sampled on any grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    components: [Vec<TrigMode>; 3],
}

impl TrigField {
    pub fn random(grid: &GridSpec, seed: u64, modes: usize) -> Result<Self, GridError> {
        for axis in grid.active_axes() {
            let n = grid.dims()[axis.index()];
            if modes == 0 || modes > n / 4 {
                return Err(GridError::Resolution { modes, nodes: n });
            }
        }
        let m = modes as i32;
        let range = |axis: Axis| if grid.is_active(axis) { -m..=m } else { 0..=0 };
        let mut wavevectors = Vec::new();
        for kx in range(Axis::X) {
            for ky in range(Axis::Y) {
                for kz in range(Axis::Z) {
                    if (kx, ky, kz) != (0, 0, 0) {
                        wavevectors.push([kx, ky, kz]);
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let components = [0, 1, 2].map(|_| {
            wavevectors
                .iter()
                .map(|k| {
                    let k2: i32 = k.iter().map(|c| c * c).sum();
                    let normal: f64 = rng.sample(StandardNormal);
                    TrigMode {
                        wavevector: *k,
                        amplitude: normal / (1.0 + k2 as f64),
                        phase: rng.random_range(0.0..2.0 * PI),
                    }
                })
                .collect()
        });
        Ok(TrigField { components })
    }

    /// Normalised coordinates in `[0, 1)` (periodic) or `[0, 1]` (Dirichlet).
    fn unit_coords(grid: &GridSpec, idx: usize) -> [f64; 3] {
        let p = grid.position(idx);
        Axis::ALL.map(|a| {
            if grid.is_active(a) {
                p[a.index()] / grid.extent(a)
            } else {
                0.0
            }
        })
    }

    fn eval(&self, s: [f64; 3]) -> Vec3 {
        let comp = |modes: &[TrigMode]| {
            modes
                .iter()
                .map(|m| {
                    let arg: f64 = (0..3).map(|i| m.wavevector[i] as f64 * s[i]).sum();
                    m.amplitude * (2.0 * PI * arg + m.phase).sin()
                })
                .sum::<f64>()
        };
        Vec3::new(comp(&self.components[0]), comp(&self.components[1]), comp(&self.components[2]))
    }

    /// Samples the field; Dirichlet grids get the `∏ sin³(π s)` envelope and
    /// exact zeros on the boundary layer.
    pub fn sample(&self, grid: &GridSpec) -> Vector3Field {
        Field::from_fn(*grid, |idx| {
            if grid.is_boundary_point(idx) {
                return Vec3::zeros();
            }
            let s = Self::unit_coords(grid, idx);
            let mut v = self.eval(s);
            if grid.boundary() == Boundary::DirichletIdentity {
                for a in grid.active_axes() {
                    v *= (PI * s[a.index()]).sin().powi(3);
                }
            }
            v
        })
    }
}

fn max_norm(u: &Vector3Field) -> f64 {
    u.values.iter().fold(0.0, |m, v| m.max(v.norm()))
}

/// Deterministic smooth random rotation-vector field with `max ‖u‖ = amplitude`.
pub fn synthesize_smooth_field(
    grid: &GridSpec,
    seed: u64,
    modes: usize,
    amplitude: f64,
) -> Result<AxisField, GridError> {
    let raw = TrigField::random(grid, seed, modes)?.sample(grid);
    let peak = max_norm(&raw);
    let unit = raw.scaled(if peak > 0.0 { 1.0 / peak } else { 0.0 });
    AxisField::new(unit.scaled(amplitude))
}

//! Gradients of the discrete energies with respect to the nodal rotation
//! vectors.
//!
//! Two routes are provided. The finite-difference route perturbs one nodal
//! component at a time and re-evaluates only the energy density at the nodes
//! whose stencils read it. The analytic route pulls `∂E/∂A` back through the
//! strain matrix, the contortion, the derivative stencils and the exponential.

use super::{ElasticModuli, EnergyError};
use crate::grid::{
    field_exp, pairwise_sum, partial_adjoint, partial_or_zero, Axis, AxisField, Field, GridError,
    GridSpec, Matrix3Field, RotationField, Vector3Field,
};
use crate::so3::{exp_derivatives, rot_exp, Mat3, Vec3};
use crate::strain::{irreducible_parts, levi_civita, strain_bundle, strain_matrix_at, Tensor3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

/// Central-difference step for nodal perturbations.
pub const FD_STEP: f64 = 1e-6;

/// Frames one time step before and after the frame being differentiated.
#[derive(Debug, Clone)]
pub struct TimeNeighbours {
    prev: RotationField,
    next: RotationField,
    dt: f64,
}

impl TimeNeighbours {
    pub fn new(prev: RotationField, next: RotationField, dt: f64) -> Result<Self, EnergyError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(EnergyError::BadTimeStep(dt));
        }
        if prev.grid() != next.grid() {
            return Err(GridError::GridMismatch.into());
        }
        Ok(TimeNeighbours { prev, next, dt })
    }

    pub fn prev(&self) -> &RotationField {
        &self.prev
    }

    pub fn next(&self) -> &RotationField {
        &self.next
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Energy whose gradient is taken.
///
/// `Action` is the part of the leapfrog-discretised action that depends on
/// the middle frame `O = exp(u)`:
///
/// ```text
/// V1(u) − ρ h^d Σ (‖O_next − O‖² + ‖O − O_prev‖²) / dt²
/// ```
///
/// Its gradient vanishes exactly on solutions of the discrete equations of
/// motion.
#[derive(Debug, Clone, Copy)]
pub enum Functional<'a> {
    V1,
    V2,
    Action(&'a TimeNeighbours),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum GradientMethod {
    Analytic,
    #[default]
    FiniteDifference,
}

impl<'a> Functional<'a> {
    fn weights(&self, m: &ElasticModuli) -> [f64; 3] {
        match self {
            Functional::V2 => m.v2_weights(),
            Functional::V1 | Functional::Action(_) => m.v1_weights(),
        }
    }

    fn neighbours(&self, grid: &GridSpec) -> Result<Option<&'a TimeNeighbours>, EnergyError> {
        match *self {
            Functional::Action(t) if t.prev.grid() != grid => Err(GridError::GridMismatch.into()),
            Functional::Action(t) => Ok(Some(t)),
            _ => Ok(None),
        }
    }
}

/// Per-node energy density with an optional single-node override of `O`.
struct LocalEnergy<'a> {
    grid: GridSpec,
    o: &'a [Mat3],
    weights: [f64; 3],
    volume: f64,
    kinetic: Option<(&'a [Mat3], &'a [Mat3], f64)>,
}

impl<'a> LocalEnergy<'a> {
    fn new(
        f: &Functional<'a>,
        o: &'a RotationField,
        m: &ElasticModuli,
    ) -> Result<Self, EnergyError> {
        let grid = *o.grid();
        let volume = grid.cell_volume();
        let kinetic = f.neighbours(&grid)?.map(|t| {
            (
                t.prev.field().values(),
                t.next.field().values(),
                m.rho * volume / (t.dt * t.dt),
            )
        });
        Ok(LocalEnergy { grid, o: o.field().values(), weights: f.weights(m), volume, kinetic })
    }

    fn strain_at(&self, q: usize, over: Option<(usize, &Mat3)>) -> f64 {
        let at = |i: usize| match over {
            Some((p, m)) if p == i => *m,
            _ => self.o[i],
        };
        let oq = at(q);
        let mut k = Tensor3::default();
        for axis in self.grid.active_axes() {
            let mut d = Mat3::zeros();
            for (node, w) in self.grid.derivative_neighbours(q, axis) {
                if w != 0.0 {
                    d += at(node) * w;
                }
            }
            let raw = oq * d.transpose();
            let skew = (raw - raw.transpose()) * 0.5;
            let j = axis.index();
            for i in 0..3 {
                for l in 0..3 {
                    k.0[i][j][l] = skew[(i, l)];
                }
            }
        }
        let parts = irreducible_parts(&strain_matrix_at(&k));
        let s: f64 = (0..3).map(|i| self.weights[i] * parts[i].norm_squared()).sum();
        self.volume * s
    }

    fn kinetic_at(&self, p: usize, op: &Mat3) -> f64 {
        match self.kinetic {
            Some((prev, next, c)) => -c * ((next[p] - op).norm_squared() + (op - prev[p]).norm_squared()),
            None => 0.0,
        }
    }

    /// Energy terms that change when `O` at node `p` is replaced by `op`.
    fn touched(&self, p: usize, readers: &[usize], op: &Mat3) -> f64 {
        let over = Some((p, op));
        readers.iter().map(|&q| self.strain_at(q, over)).sum::<f64>() + self.kinetic_at(p, op)
    }

    fn total(&self) -> f64 {
        let dens: Vec<f64> = (0..self.grid.len())
            .into_par_iter()
            .map(|q| self.strain_at(q, None) + self.kinetic_at(q, &self.o[q]))
            .collect();
        pairwise_sum(&dens)
    }
}

pub fn functional_value(
    f: &Functional,
    u: &AxisField,
    m: &ElasticModuli,
) -> Result<f64, EnergyError> {
    let o = field_exp(u);
    Ok(LocalEnergy::new(f, &o, m)?.total())
}

/// Central differences of the discrete energy with nodal step `step`.
pub fn finite_difference_gradient(
    f: &Functional,
    u: &AxisField,
    m: &ElasticModuli,
    step: f64,
) -> Result<Vector3Field, EnergyError> {
    let o = field_exp(u);
    let local = LocalEnergy::new(f, &o, m)?;
    let grid = *u.grid();
    let values = u.field().values();
    Ok(Field::from_fn(grid, |p| {
        if grid.is_boundary_point(p) {
            return Vec3::zeros();
        }
        let readers = grid.stencil_readers(p);
        let mut g = Vec3::zeros();
        for c in 0..3 {
            let bumped = |s: f64| {
                let mut v = values[p];
                v[c] += s * step;
                local.touched(p, &readers, rot_exp(&v).matrix())
            };
            g[c] = (bumped(1.0) - bumped(-1.0)) / (2.0 * step);
        }
        g
    }))
}

fn analytic_gradient(
    f: &Functional,
    u: &AxisField,
    m: &ElasticModuli,
) -> Result<Vector3Field, EnergyError> {
    let grid = *u.grid();
    let o = field_exp(u);
    let neighbours = f.neighbours(&grid)?;
    let weights = f.weights(m);
    let bundle = strain_bundle(&o);
    let scale = 2.0 * grid.cell_volume();
    // ∂E/∂A at every node.
    let g = Field::from_fn(grid, |p| {
        (0..3).fold(Mat3::zeros(), |acc, i| acc + bundle.piece(i + 1).values()[p] * (scale * weights[i]))
    });
    let of = o.field();
    let d = Axis::ALL.map(|a| partial_or_zero(of, a));
    // Γ_b[a][c] = Σ_m G_mb ε_mac is the gradient with respect to O (∂_b O)ᵀ.
    let gamma = Axis::ALL.map(|b| {
        g.map(|gm| {
            let mut out = Mat3::zeros();
            for a in 0..3 {
                for c in 0..3 {
                    out[(a, c)] = (0..3).map(|mm| gm[(mm, b.index())] * levi_civita(mm, a, c)).sum();
                }
            }
            out
        })
    });
    let pulled: Vec<Matrix3Field> = Axis::ALL
        .iter()
        .filter(|a| grid.is_active(**a))
        .map(|&b| {
            let gt_o = gamma[b.index()].zip_map(of, |gm, om| gm.transpose() * om).expect("same grid");
            partial_adjoint(&gt_o, b)
        })
        .collect();
    let kinetic = neighbours.map(|t| (t, 2.0 * m.rho * grid.cell_volume() / (t.dt * t.dt)));
    let uv = u.field().values();
    Ok(Field::from_fn(grid, |p| {
        if grid.is_boundary_point(p) {
            return Vec3::zeros();
        }
        let op = of.values()[p];
        let mut go = Mat3::zeros();
        for axis in grid.active_axes() {
            go += gamma[axis.index()].values()[p] * d[axis.index()].values()[p];
        }
        for back in &pulled {
            go += back.values()[p];
        }
        if let Some((t, c)) = kinetic {
            go -= (op * 2.0 - t.next.field().values()[p] - t.prev.field().values()[p]) * c;
        }
        let dexp = exp_derivatives(&uv[p]);
        Vec3::new(go.dot(&dexp[0]), go.dot(&dexp[1]), go.dot(&dexp[2]))
    }))
}

/// Gradient of the discrete functional with respect to every nodal component
/// of `u`; zero on Dirichlet boundary nodes, where `u` is held fixed.
pub fn discrete_variational_gradient(
    f: &Functional,
    u: &AxisField,
    m: &ElasticModuli,
    method: GradientMethod,
) -> Result<Vector3Field, EnergyError> {
    match method {
        GradientMethod::Analytic => analytic_gradient(f, u, m),
        GradientMethod::FiniteDifference => finite_difference_gradient(f, u, m, FD_STEP),
    }
}

/// `max |a − b| / max |b|` over all nodal components.
fn normwise_relative(a: &Vector3Field, b: &Vector3Field) -> f64 {
    let diff = a.values().iter().zip(b.values()).fold(0.0f64, |acc, (x, y)| acc.max((x - y).amax()));
    let scale = b.values().iter().fold(0.0f64, |acc, y| acc.max(y.amax()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientCheck {
    /// Analytic against finite differences, normwise relative.
    pub max_rel_error: f64,
    /// Finite differences with steps `h` and `2h`, normwise relative.
    pub richardson_gap: f64,
}

pub fn compare_gradients(
    f: &Functional,
    u: &AxisField,
    m: &ElasticModuli,
) -> Result<GradientCheck, EnergyError> {
    let analytic = analytic_gradient(f, u, m)?;
    let fd = finite_difference_gradient(f, u, m, FD_STEP)?;
    let fd2 = finite_difference_gradient(f, u, m, 2.0 * FD_STEP)?;
    Ok(GradientCheck {
        max_rel_error: normwise_relative(&analytic, &fd),
        richardson_gap: normwise_relative(&fd2, &fd),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalCheck {
    /// `|⟨g, δu⟩ − (V(u+εδu) − V(u−εδu))/2ε| / |⟨g, δu⟩|` per direction.
    pub rel_errors: Vec<f64>,
}

impl DirectionalCheck {
    pub fn max_rel_error(&self) -> f64 {
        self.rel_errors.iter().fold(0.0f64, |m, e| m.max(*e))
    }
}

/// Compares the gradient against central differences of the global energy
/// along `directions` seeded Gaussian directions (zero on the boundary).
pub fn directional_derivative_check(
    f: &Functional,
    u: &AxisField,
    m: &ElasticModuli,
    method: GradientMethod,
    seed: u64,
    directions: usize,
) -> Result<DirectionalCheck, EnergyError> {
    let grid = *u.grid();
    let grad = discrete_variational_gradient(f, u, m, method)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rel_errors = Vec::with_capacity(directions);
    for _ in 0..directions {
        let dir: Vec<Vec3> = (0..grid.len())
            .map(|p| {
                let v = Vec3::from_fn(|_, _| StandardNormal.sample(&mut rng));
                if grid.is_boundary_point(p) {
                    Vec3::zeros()
                } else {
                    v
                }
            })
            .collect();
        let dir = Field::new(grid, dir)?;
        let predicted: f64 = pairwise_sum(
            &grad.values().iter().zip(dir.values()).map(|(g, d)| g.dot(d)).collect::<Vec<_>>(),
        );
        let value = |s: f64| -> Result<f64, EnergyError> {
            let moved = u.field().zip_map(&dir, |a, d| a + d * (s * FD_STEP))?;
            functional_value(f, &AxisField::new(moved)?, m)
        };
        let measured = (value(1.0)? - value(-1.0)?) / (2.0 * FD_STEP);
        rel_errors.push((predicted - measured).abs() / predicted.abs().max(f64::MIN_POSITIVE));
    }
    Ok(DirectionalCheck { rel_errors })
}

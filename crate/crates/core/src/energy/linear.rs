//! Small-rotation theory: the quadratic functional in `div u` and `curl u`,
//! its equilibrium operator, and measured orders of the expansions that lead
//! to it.

use super::{divergence_term, kinetic_density, EnergyError};
use crate::grid::{
    curl, divergence, field_exp, gradient, jacobian, laplacian, partial_adjoint, Axis, AxisField,
    Field, GridSpec, ScalarField, TrigField, Vector3Field,
};
use crate::so3::Vec3;
use crate::strain::{levi_civita, strain_bundle};
use serde::Serialize;

/// `α ∫ (div u)² + β ∫ ‖curl u‖²`.
pub fn linearized_v3(u: &Vector3Field, alpha: f64, beta: f64) -> f64 {
    let div = divergence(u);
    let rot = curl(u);
    let density = div.zip_map(&rot, |d, c| alpha * d * d + beta * c.norm_squared()).expect("same grid");
    density.integrate()
}

/// Exact gradient of the discrete [`linearized_v3`] with respect to every
/// nodal component of `u`.
pub fn linearized_v3_gradient(u: &Vector3Field, alpha: f64, beta: f64) -> Vector3Field {
    let grid = *u.grid();
    let w = 2.0 * grid.cell_volume();
    let div = divergence(u).scaled(w * alpha);
    let rot = curl(u).scaled(w * beta);
    let div_back = Axis::ALL.map(|a| partial_adjoint(&div, a));
    let rot_back = Axis::ALL.map(|a| partial_adjoint(&rot, a));
    Field::from_fn(grid, |p| {
        let mut g = Vec3::zeros();
        for b in 0..3 {
            g[b] = div_back[b].values()[p];
            for (a, back) in rot_back.iter().enumerate() {
                let r = back.values()[p];
                for i in 0..3 {
                    g[b] += levi_civita(i, a, b) * r[i];
                }
            }
        }
        g
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearResidual {
    /// `β Δu + (α − β) ∇(div u)` with the compact Laplacian.
    pub laplacian_form: Vector3Field,
    /// `α ∇(div u) − β ∇×∇×u`.
    pub curl_form: Vector3Field,
}

pub fn linear_equilibrium_residual(u: &Vector3Field, alpha: f64, beta: f64) -> LinearResidual {
    let grad_div = gradient(&divergence(u));
    let lap = laplacian(u);
    let curl_curl = curl(&curl(u));
    LinearResidual {
        laplacian_form: lap.zip_map(&grad_div, |l, g| l * beta + g * (alpha - beta)).expect("same grid"),
        curl_form: grad_div.zip_map(&curl_curl, |g, c| g * alpha - c * beta).expect("same grid"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionSample {
    pub amplitude: f64,
    /// `∫ |‖A⁽¹⁾‖² − (4/3)(div u)²|`.
    pub e1: f64,
    /// `∫ |‖A⁽²⁾‖² − 2‖curl u‖²|`.
    pub e2: f64,
    /// `∫ |ε_{ijk}∂_iA⁽²⁾_{jk} − (∂_m u_n ∂_n u_m − (div u)²)|`, after
    /// Richardson extrapolation in `h` to remove the stencil error.
    pub e5: f64,
    /// `∫ |‖Ȯ‖² − 2‖u̇‖²|`.
    pub kinetic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub samples: Vec<ExpansionSample>,
    /// Least-squares log–log slopes of `e1, e2, e5, kinetic` against the
    /// amplitude; `None` when fewer than two samples have a positive error.
    pub slopes: [Option<f64>; 4],
}

impl ExpansionReport {
    pub fn min_slope(&self) -> Option<f64> {
        self.slopes.iter().try_fold(f64::INFINITY, |m, s| s.map(|s| m.min(s)))
    }
}

/// Time step of the symmetric difference used for `Ȯ`.
const VELOCITY_STEP: f64 = 1e-4;

fn quadratic_rhs(u: &Vector3Field) -> ScalarField {
    let div = divergence(u);
    jacobian(u)
        .zip_map(&div, |j, d| (j * j).trace() - d * d)
        .expect("same grid")
}

fn eq5_defect(u: &Vector3Field) -> Result<ScalarField, EnergyError> {
    let o = field_exp(&AxisField::new(u.clone())?);
    let lhs = divergence_term(&strain_bundle(&o));
    Ok(lhs.zip_map(&quadratic_rhs(u), |l, r| l - r)?)
}

/// Expansion errors for `u = a·shape`, `u̇ = a·velocity`.
///
/// `shape` and `velocity` are sampled on `grid` and on its refinement (for
/// the extrapolated `e5`); both are normalised by their maximum on `grid`.
pub fn expansion_sample(
    grid: &GridSpec,
    shape: &(dyn Fn(&GridSpec) -> Vector3Field + Sync),
    velocity: &(dyn Fn(&GridSpec) -> Vector3Field + Sync),
    amplitude: f64,
) -> Result<ExpansionSample, EnergyError> {
    let max_norm = |f: &Vector3Field| f.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let base = shape(grid);
    let base_vel = velocity(grid);
    let (s_max, v_max) = (max_norm(&base), max_norm(&base_vel));
    if s_max == 0.0 || v_max == 0.0 {
        return Err(EnergyError::DegenerateField);
    }
    let (su, sv) = (amplitude / s_max, amplitude / v_max);
    let u = base.scaled(su);
    let vel = base_vel.scaled(sv);

    let bundle = strain_bundle(&field_exp(&AxisField::new(u.clone())?));
    let [n1, n2, _] = bundle.norms_squared();
    let div = divergence(&u);
    let rot = curl(&u);
    let e1 = n1.zip_map(&div, |n, d| n - 4.0 / 3.0 * d * d)?.integrate_abs();
    let e2 = n2.zip_map(&rot, |n, c| n - 2.0 * c.norm_squared())?.integrate_abs();

    let fine_grid = grid.refined();
    let coarse = eq5_defect(&u)?;
    let fine = eq5_defect(&shape(&fine_grid).scaled(su))?;
    let extrapolated = ScalarField::from_fn(*grid, |p| {
        let [i, j, k] = grid.coords(p);
        let q = fine_grid.index(
            if grid.is_active(Axis::X) { 2 * i } else { i },
            if grid.is_active(Axis::Y) { 2 * j } else { j },
            if grid.is_active(Axis::Z) { 2 * k } else { k },
        );
        (4.0 * fine.values()[q] - coarse.values()[p]) / 3.0
    });
    let e5 = extrapolated.integrate_abs();

    let shifted = |sign: f64| -> Result<_, EnergyError> {
        let f = u.zip_map(&vel, |a, v| a + v * (sign * VELOCITY_STEP))?;
        Ok(field_exp(&AxisField::new(f)?))
    };
    let odot = kinetic_density(&shifted(-1.0)?, &shifted(1.0)?, 2.0 * VELOCITY_STEP)?;
    let kinetic = odot.zip_map(&vel, |k, v| k - 2.0 * v.norm_squared())?.integrate_abs();

    Ok(ExpansionSample { amplitude, e1, e2, e5, kinetic })
}

fn log_log_slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .filter(|&(a, e)| a > 0.0 && e > 0.0)
        .map(|(a, e)| (a.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Amplitude sweep over a seeded random smooth field and velocity on `grid`.
pub fn expansion_check(
    grid: &GridSpec,
    seed: u64,
    amplitudes: &[f64],
) -> Result<ExpansionReport, EnergyError> {
    if amplitudes.is_empty() {
        return Err(EnergyError::TooFewAmplitudes);
    }
    let shape = TrigField::random(grid, seed, 1)?;
    let velocity = TrigField::random(grid, seed.wrapping_add(1), 1)?;
    let shape_fn = |g: &GridSpec| shape.sample(g);
    let vel_fn = |g: &GridSpec| velocity.sample(g);
    let samples = amplitudes
        .iter()
        .map(|&a| expansion_sample(grid, &shape_fn, &vel_fn, a))
        .collect::<Result<Vec<_>, _>>()?;
    let slope = |f: fn(&ExpansionSample) -> f64| log_log_slope(samples.iter().map(|s| (s.amplitude, f(s))));
    let slopes = [slope(|s| s.e1), slope(|s| s.e2), slope(|s| s.e5), slope(|s| s.kinetic)];
    Ok(ExpansionReport { samples, slopes })
}

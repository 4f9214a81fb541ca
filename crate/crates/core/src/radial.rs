//! Radially symmetric standing modes `φ = cos(ωt) v0 J0(k r)` of the
//! transversal wave equation, with `k = ω √(ρ / (c2 + c3))`.

use crate::energy::{ElasticModuli, EnergyError};
use crate::grid::{laplacian, GridSpec, ScalarField};
use serde::Serialize;
use std::f64::consts::PI;

/// Below this |x| the power series is summed in double-double arithmetic;
/// above it the Hankel asymptotic expansion is used.
pub const SERIES_LIMIT: f64 = 16.0;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    let bb = s - a;
    DoubleDouble { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    DoubleDouble { hi: s, lo: b - (s - a) }
}

impl DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn add(self, o: Self) -> Self {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        // Remainder self − q1·d, exact up to the low word.
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = (self.hi - p - e) + self.lo;
        quick_two_sum(q1, r / d)
    }
}

fn j0_series(x: f64) -> f64 {
    let x2 = DoubleDouble { hi: x * x, lo: x.mul_add(x, -(x * x)) };
    let q = DoubleDouble { hi: -x2.hi / 4.0, lo: -x2.lo / 4.0 };
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    for m in 1..200 {
        let mf = m as f64;
        term = term.mul(q).div_f64(mf * mf);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) + 1e-40 {
            break;
        }
    }
    sum.hi + sum.lo
}

fn j0_asymptotic(x: f64) -> f64 {
    // P ~ 1 − a₂/x² + a₄/x⁴ − …,  Q ~ −a₁/x + a₃/x³ − …,
    // a_k = Π_{j≤k} (2j−1)² / (k! 8^k); summed up to the smallest term.
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if term.abs() >= prev || term.abs() < 1e-18 {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q -= sign * term;
        }
    }
    let (s, c) = x.sin_cos();
    // cos(x − π/4) and sin(x − π/4) without rounding π/4 into x.
    let (cos_chi, sin_chi) = ((c + s) * std::f64::consts::FRAC_1_SQRT_2, (s - c) * std::f64::consts::FRAC_1_SQRT_2);
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadialError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("expected a grid with exactly two active axes, got dims {0:?}")]
    NotPlanar([usize; 3]),
    #[error("no sign change of J0 on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Moduli(#[from] EnergyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMode {
    pub omega: f64,
    pub v0: f64,
    pub k: f64,
    pub moduli: ElasticModuli,
}

impl RadialMode {
    /// Mode of angular frequency `omega`; `k = ω √(ρ / (c2 + c3))`.
    pub fn new(moduli: ElasticModuli, omega: f64, v0: f64) -> Result<Self, RadialError> {
        let moduli = ElasticModuli::new(moduli.c1, moduli.c2, moduli.c3, moduli.rho)?;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(RadialError::NonPositive { name: "omega", value: omega });
        }
        let k = omega * (moduli.rho / moduli.hat_c2()).sqrt();
        Ok(RadialMode { omega, v0, k, moduli })
    }

    /// Mode of wavenumber `k`; `ω = k √((c2 + c3) / ρ)`.
    pub fn with_wavenumber(moduli: ElasticModuli, k: f64, v0: f64) -> Result<Self, RadialError> {
        let moduli = ElasticModuli::new(moduli.c1, moduli.c2, moduli.c3, moduli.rho)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(RadialError::NonPositive { name: "k", value: k });
        }
        let omega = k * (moduli.hat_c2() / moduli.rho).sqrt();
        Ok(RadialMode { omega, v0, k, moduli })
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

/// `v(r) = v0 J0(k r)`; even in `r`.
pub fn radial_solution(mode: &RadialMode, r: f64) -> f64 {
    mode.v0 * bessel_j0(mode.k * r)
}

/// Geometric centre of the grid's active extent.
pub fn grid_center(grid: &GridSpec) -> [f64; 3] {
    let mut c = [0.0; 3];
    for axis in grid.active_axes() {
        let n = grid.dims()[axis.index()] as f64;
        c[axis.index()] = if grid.is_periodic() { n / 2.0 } else { (n - 1.0) / 2.0 } * grid.spacing();
    }
    c
}

/// Distance of node `i` from the grid centre over the active axes.
pub fn radius_at(grid: &GridSpec, i: usize) -> f64 {
    let c = grid_center(grid);
    let p = grid.position(i);
    grid.active_axes().map(|a| (p[a.index()] - c[a.index()]).powi(2)).sum::<f64>().sqrt()
}

/// `v(r)` sampled about the grid centre.
pub fn radial_field(grid: &GridSpec, mode: &RadialMode) -> ScalarField {
    ScalarField::from_fn(*grid, |i| radial_solution(mode, radius_at(grid, i)))
}

fn require_planar(grid: &GridSpec) -> Result<(), RadialError> {
    if grid.dimension() == 2 {
        Ok(())
    } else {
        Err(RadialError::NotPlanar(grid.dims()))
    }
}

/// `Δ_h v + k² v` on a planar grid.
pub fn helmholtz_residual(v: &ScalarField, k: f64) -> Result<ScalarField, RadialError> {
    require_planar(v.grid())?;
    let lap = laplacian(v);
    Ok(lap.zip_map(v, |l, x| l + k * k * x).expect("same grid"))
}

/// Root of J0 in `[lo, hi]` by bisection to `tol`.
pub fn bisect_j0_zero(lo: f64, hi: f64, tol: f64) -> Result<f64, RadialError> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (bessel_j0(a), bessel_j0(b));
    if fa * fb > 0.0 {
        return Err(RadialError::NoBracket { lo, hi });
    }
    let mut sa = fa.signum();
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = bessel_j0(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
            sa = fm.signum();
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

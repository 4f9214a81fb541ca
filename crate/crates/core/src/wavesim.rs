//! Single-axis rotational waves `u = (0, 0, φ)`.
//!
//! For `φ = φ(x, y, t)` the nonlinear equations reduce to the linear wave
//! equation `ρ φ_tt = (c2 + c3)(φ_xx + φ_yy)`; for `φ = φ(z, t)` they reduce
//! to `ρ φ_tt = (2/3)(c1 + 2c3) φ_zz`. Both are stepped with leapfrog on the
//! compact Laplacian.

use crate::energy::{
    discrete_variational_gradient, ElasticModuli, EnergyError, Functional, GradientMethod,
    TimeNeighbours,
};
use crate::grid::{
    field_exp, laplacian, pairwise_sum, Axis, AxisField, Field, GridError, GridSpec, ScalarField,
    Vector3Field,
};
use crate::material::{wave_speeds, MaterialError};
use crate::radial::{bessel_j0, radial_field, radius_at, RadialMode};
use crate::so3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest accepted Courant number `v·dt/h`.
pub const MAX_COURANT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WaveError {
    #[error("courant number {courant:.4} exceeds {MAX_COURANT}; use dt <= {suggested_dt:e}")]
    Cfl { courant: f64, suggested_dt: f64 },
    #[error("{mode:?} needs a grid active along {active:?} only, got dims {dims:?}")]
    GridShape { mode: WaveMode, active: Vec<Axis>, dims: [usize; 3] },
    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),
    #[error("need 2 <= saves <= steps + 1, got saves = {saves}, steps = {steps}")]
    BadSaves { saves: usize, steps: usize },
    #[error("initial field lives on a different grid")]
    InitialGrid,
    #[error("speed measurement window: {0}")]
    MeasurementWindow(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveMode {
    /// `φ(x, y, t)` on a grid with a single z layer; speed `v_t`.
    Transversal2D,
    /// `φ(z, t)` on a grid with single x and y layers; speed `v_l`.
    Longitudinal1D,
}

impl WaveMode {
    /// Axis along which speeds are measured.
    pub fn propagation_axis(self) -> Axis {
        match self {
            WaveMode::Transversal2D => Axis::X,
            WaveMode::Longitudinal1D => Axis::Z,
        }
    }

    pub fn speed(self, m: &ElasticModuli) -> Result<f64, WaveError> {
        let s = wave_speeds(m)?;
        Ok(match self {
            WaveMode::Transversal2D => s.v_t,
            WaveMode::Longitudinal1D => s.v_l,
        })
    }

    fn check_grid(self, grid: &GridSpec) -> Result<(), WaveError> {
        let active: Vec<Axis> = match self {
            WaveMode::Transversal2D => vec![Axis::X, Axis::Y],
            WaveMode::Longitudinal1D => vec![Axis::Z],
        };
        let ok = Axis::ALL.iter().all(|a| grid.is_active(*a) == active.contains(a));
        if ok {
            Ok(())
        } else {
            Err(WaveError::GridShape { mode: self, active, dims: grid.dims() })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Gaussian at rest. With `axis` set, a plane pulse varying only along
    /// that axis; otherwise radially symmetric over the active axes.
    GaussianPulse { center: [f64; 3], width: f64, amplitude: f64, axis: Option<Axis> },
    /// Travelling wave `a sin(k·x − v|k| t)`.
    PlaneMode { wavevector: [f64; 3], amplitude: f64 },
    /// Standing mode `v0 J0(k r)` at rest, centred on the grid.
    RadialHalfTurn { k: f64, v0: f64 },
    Fields { phi: ScalarField, phi_dot: ScalarField },
}

impl InitialCondition {
    /// `(φ⁰, φ̇⁰)` on `grid` for waves of speed `v`.
    pub fn sample(&self, grid: &GridSpec, v: f64) -> Result<(ScalarField, ScalarField), WaveError> {
        let dist2 = |p: [f64; 3], c: [f64; 3], axes: &[Axis]| -> f64 {
            axes.iter()
                .map(|a| {
                    let i = a.index();
                    let mut d = p[i] - c[i];
                    if grid.is_periodic() {
                        let len = grid.extent(*a);
                        d -= len * (d / len).round();
                    }
                    d * d
                })
                .sum()
        };
        let zero = ScalarField::zeros(*grid);
        Ok(match self {
            InitialCondition::GaussianPulse { center, width, amplitude, axis } => {
                let axes: Vec<Axis> = match axis {
                    Some(a) => vec![*a],
                    None => grid.active_axes().collect(),
                };
                let phi = ScalarField::from_fn(*grid, |i| {
                    amplitude * (-dist2(grid.position(i), *center, &axes) / (2.0 * width * width)).exp()
                });
                (phi, zero)
            }
            InitialCondition::PlaneMode { wavevector, amplitude } => {
                let k = Vec3::from(*wavevector);
                let omega = v * k.norm();
                let phase = |i| Vec3::from(grid.position(i)).dot(&k);
                (
                    ScalarField::from_fn(*grid, |i| amplitude * phase(i).sin()),
                    ScalarField::from_fn(*grid, |i| -amplitude * omega * phase(i).cos()),
                )
            }
            InitialCondition::RadialHalfTurn { k, v0 } => {
                let phi = ScalarField::from_fn(*grid, |i| v0 * bessel_j0(k * radius_at(grid, i)));
                (phi, zero)
            }
            InitialCondition::Fields { phi, phi_dot } => {
                if phi.grid() != grid || phi_dot.grid() != grid {
                    return Err(WaveError::InitialGrid);
                }
                (phi.clone(), phi_dot.clone())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveConfig {
    pub moduli: ElasticModuli,
    pub grid: GridSpec,
    pub dt: f64,
    pub steps: usize,
    /// Number of evenly spaced snapshots, including the first and last step.
    pub saves: usize,
    pub mode: WaveMode,
    pub initial: InitialCondition,
}

impl WaveConfig {
    pub fn speed(&self) -> Result<f64, WaveError> {
        self.mode.speed(&self.moduli)
    }

    /// Largest time step accepted for this grid and mode.
    pub fn max_dt(&self) -> Result<f64, WaveError> {
        Ok(MAX_COURANT * self.grid.spacing() / self.speed()?)
    }

    pub fn validate(&self) -> Result<(), WaveError> {
        self.mode.check_grid(&self.grid)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(WaveError::BadTimeStep(self.dt));
        }
        let courant = self.speed()? * self.dt / self.grid.spacing();
        if courant > MAX_COURANT {
            return Err(WaveError::Cfl { courant, suggested_dt: self.max_dt()? });
        }
        if self.saves < 2 || self.saves > self.steps + 1 {
            return Err(WaveError::BadSaves { saves: self.saves, steps: self.steps });
        }
        Ok(())
    }

    fn save_steps(&self) -> Vec<usize> {
        (0..self.saves).map(|i| i * self.steps / (self.saves - 1)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveTrajectory {
    pub snapshots: Vec<ScalarField>,
    pub times: Vec<f64>,
    pub config: WaveConfig,
    /// Conserved discrete energy between each snapshot and the step after it.
    pub energy_series: Vec<f64>,
}

impl WaveTrajectory {
    /// `max |E − E₀| / |E₀|` over the run.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy_series[0];
        let worst = self.energy_series.iter().fold(0.0f64, |m, e| m.max((e - e0).abs()));
        if e0 == 0.0 {
            worst
        } else {
            worst / e0.abs()
        }
    }
}

/// `Σ h^d ⟨D₊a, D₊b⟩` over the edges between nodes along active axes.
fn forward_gradient_product(a: &ScalarField, b: &ScalarField) -> f64 {
    let grid = *a.grid();
    let h = grid.spacing();
    let dims = grid.dims();
    let terms: Vec<f64> = (0..grid.len())
        .map(|i| {
            let c = grid.coords(i);
            let mut s = 0.0;
            for axis in grid.active_axes() {
                let ax = axis.index();
                let mut q = c;
                if c[ax] + 1 < dims[ax] {
                    q[ax] += 1;
                } else if grid.is_periodic() {
                    q[ax] = 0;
                } else {
                    continue;
                }
                let j = grid.index(q[0], q[1], q[2]);
                s += (a.values()[j] - a.values()[i]) * (b.values()[j] - b.values()[i]) / (h * h);
            }
            s
        })
        .collect();
    pairwise_sum(&terms) * grid.cell_volume()
}

/// Energy conserved exactly by the leapfrog scheme:
/// `Σ h^d [2ρ ((φⁿ⁺¹ − φⁿ)/dt)² + 2ρv² ⟨D₊φⁿ⁺¹, D₊φⁿ⟩]`.
pub fn discrete_energy(now: &ScalarField, next: &ScalarField, dt: f64, rho: f64, v: f64) -> f64 {
    let kinetic: Vec<f64> = now
        .values()
        .iter()
        .zip(next.values())
        .map(|(a, b)| ((b - a) / dt).powi(2))
        .collect();
    let grid = now.grid();
    2.0 * rho * pairwise_sum(&kinetic) * grid.cell_volume() + 2.0 * rho * v * v * forward_gradient_product(next, now)
}

/// Leapfrog run of `config`.
pub fn simulate(config: &WaveConfig) -> Result<WaveTrajectory, WaveError> {
    config.validate()?;
    let grid = config.grid;
    let v = config.speed()?;
    let dt = config.dt;
    let c2 = (v * dt).powi(2);
    let (mut phi0, phi_dot) = config.initial.sample(&grid, v)?;
    let fixed = |i: usize| grid.is_boundary_point(i);
    // Identity boundary: φ = 0 on Dirichlet walls.
    if !grid.is_periodic() {
        phi0 = ScalarField::from_fn(grid, |i| if fixed(i) { 0.0 } else { phi0.values()[i] });
    }

    let lap0 = laplacian(&phi0);
    let mut prev = phi0.clone();
    let mut now = ScalarField::from_fn(grid, |i| {
        let p = phi0.values()[i];
        if fixed(i) {
            p
        } else {
            p + dt * phi_dot.values()[i] + 0.5 * c2 * lap0.values()[i]
        }
    });
    // `prev`, `now` hold steps n and n + 1.
    let saves = config.save_steps();
    let mut snapshots = Vec::with_capacity(saves.len());
    let mut energy_series = Vec::with_capacity(saves.len());
    let mut next_save = saves.iter().peekable();
    for n in 0..=config.steps {
        if next_save.peek() == Some(&&n) {
            next_save.next();
            snapshots.push(prev.clone());
            energy_series.push(discrete_energy(&prev, &now, dt, config.moduli.rho, v));
        }
        if n == config.steps {
            break;
        }
        let lap = laplacian(&now);
        let after = ScalarField::from_fn(grid, |i| {
            let p = now.values()[i];
            if fixed(i) {
                p
            } else {
                2.0 * p - prev.values()[i] + c2 * lap.values()[i]
            }
        });
        prev = std::mem::replace(&mut now, after);
    }
    Ok(WaveTrajectory {
        times: saves.iter().map(|&s| s as f64 * dt).collect(),
        snapshots,
        config: config.clone(),
        energy_series,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit {
    pub speed: f64,
    /// Root-mean-square deviation of tracked positions from the fitted line.
    pub rms_residual: f64,
    pub samples: usize,
}

/// Profile along the propagation axis, averaged over the other axes.
fn line_profile(phi: &ScalarField, axis: Axis) -> Vec<f64> {
    let grid = phi.grid();
    let n = grid.dims()[axis.index()];
    let mut sum = vec![0.0; n];
    for (i, v) in phi.values().iter().enumerate() {
        sum[grid.coords(i)[axis.index()]] += v;
    }
    let per_line = (grid.len() / n) as f64;
    sum.iter().map(|s| s / per_line).collect()
}

/// Speed of the rightward packet of a pulse trajectory: the `φ²`-weighted
/// centroid around the rightward peak is tracked over the middle third of
/// the snapshots and fitted with a least-squares line.
pub fn measure_speed(traj: &WaveTrajectory) -> Result<SpeedFit, WaveError> {
    let grid = traj.config.grid;
    let axis = traj.config.mode.propagation_axis();
    let n = grid.dims()[axis.index()];
    let h = grid.spacing();
    let periodic = grid.is_periodic();
    let first = line_profile(&traj.snapshots[0], axis);
    let start = argmax(first.iter().map(|v| v * v), 0..n);
    let half = n / 2;

    let count = traj.snapshots.len();
    let (lo, hi) = (count / 3, (2 * count).div_ceil(3));
    let mut pts = Vec::new();
    for s in lo..hi.max(lo + 2).min(count) {
        let prof = line_profile(&traj.snapshots[s], axis);
        let sq: Vec<f64> = prof.iter().map(|v| v * v).collect();
        // Offsets 1..half ahead of the starting node.
        let ahead = |d: usize| -> Option<usize> {
            let j = start + d;
            if periodic {
                Some(j % n)
            } else {
                (j < n).then_some(j)
            }
        };
        let offsets: Vec<usize> = (1..half).filter(|d| ahead(*d).is_some()).collect();
        let peak_off = *offsets
            .iter()
            .max_by(|a, b| sq[ahead(**a).unwrap()].total_cmp(&sq[ahead(**b).unwrap()]))
            .ok_or_else(|| WaveError::MeasurementWindow("no nodes ahead of the pulse".into()))?;
        let peak = sq[ahead(peak_off).unwrap()];
        if peak == 0.0 {
            return Err(WaveError::MeasurementWindow("no rightward packet".into()));
        }
        // Contiguous window where the packet exceeds 1% of its peak.
        let cut = 0.01 * peak;
        let (mut num, mut den) = (0.0, 0.0);
        for dir in [-1i64, 1] {
            let mut d = peak_off as i64 + i64::from(dir > 0);
            while d >= 1 && d < half as i64 {
                let Some(j) = ahead(d as usize) else {
                    return Err(WaveError::MeasurementWindow("packet reached the boundary".into()));
                };
                if sq[j] < cut {
                    break;
                }
                if !periodic && j == n - 1 {
                    return Err(WaveError::MeasurementWindow("packet reached the boundary".into()));
                }
                num += sq[j] * d as f64;
                den += sq[j];
                d += dir;
            }
        }
        pts.push((traj.times[s], (start as f64 + num / den) * h));
    }
    if pts.len() < 2 {
        return Err(WaveError::MeasurementWindow("fewer than two snapshots to fit".into()));
    }
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let speed = stx / stt;
    let rms = (pts.iter().map(|p| (p.1 - mx - speed * (p.0 - mt)).powi(2)).sum::<f64>() / m).sqrt();
    Ok(SpeedFit { speed, rms_residual: rms, samples: pts.len() })
}

fn argmax(values: impl Iterator<Item = f64>, range: std::ops::Range<usize>) -> usize {
    values
        .zip(range)
        .fold((f64::NEG_INFINITY, 0), |best, (v, i)| if v > best.0 { (v, i) } else { best })
        .1
}

/// Grid for a plane-pulse speed run of `mode`, `nodes` long along the
/// propagation axis.
pub fn pulse_grid(mode: WaveMode, nodes: usize, spacing: f64) -> Result<GridSpec, GridError> {
    let dims = match mode {
        WaveMode::Transversal2D => [nodes, 4, 1],
        WaveMode::Longitudinal1D => [1, 1, nodes],
    };
    GridSpec::new(dims, spacing, crate::grid::Boundary::Periodic)
}

/// Plane Gaussian pulse run resolved with `ppw` points per dominant
/// wavelength (`σ = ppw·h / 2π`), on a periodic line of 16·ppw nodes, long
/// enough for the rightward packet to travel a quarter of the domain.
pub fn pulse_run(m: &ElasticModuli, mode: WaveMode, ppw: usize) -> Result<WaveTrajectory, WaveError> {
    let h = 1.0 / ppw as f64;
    let nodes = 16 * ppw;
    let grid = pulse_grid(mode, nodes, h)?;
    let v = mode.speed(m)?;
    let width = ppw as f64 * h / (2.0 * PI);
    let axis = mode.propagation_axis();
    let mut center = [0.0; 3];
    center[axis.index()] = grid.extent(axis) / 2.0;
    let dt = MAX_COURANT * h / v;
    let travel = grid.extent(axis) / 4.0;
    let steps = (travel / (v * dt)).ceil() as usize;
    let config = WaveConfig {
        moduli: *m,
        grid,
        dt,
        steps,
        saves: 31.min(steps + 1),
        mode,
        initial: InitialCondition::GaussianPulse { center, width, amplitude: 1.0, axis: Some(axis) },
    };
    simulate(&config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionReport {
    pub amplitude: f64,
    /// Equation-of-motion residuals (max norm, per unit cell volume) for the
    /// transversal sample, the longitudinal sample and their sum.
    pub r_t: f64,
    pub r_l: f64,
    pub r_sum: f64,
}

impl SuperpositionReport {
    pub fn ratio(&self) -> f64 {
        self.r_sum / self.r_t.max(self.r_l)
    }
}

/// Nonlinear residual of three snapshots `t = −dt, 0, dt` of `u = (0, 0, φ)`.
fn motion_residual(
    m: &ElasticModuli,
    grid: &GridSpec,
    phi: &(dyn Fn([f64; 3], f64) -> f64 + Sync),
    dt: f64,
) -> Result<f64, WaveError> {
    let frame = |t: f64| -> Result<AxisField, GridError> {
        AxisField::new(Vector3Field::from_fn(*grid, |i| Vec3::new(0.0, 0.0, phi(grid.position(i), t))))
    };
    let neighbours = TimeNeighbours::new(field_exp(&frame(-dt)?), field_exp(&frame(dt)?), dt)?;
    let grad = discrete_variational_gradient(
        &Functional::Action(&neighbours),
        &frame(0.0)?,
        m,
        GradientMethod::Analytic,
    )?;
    let worst = grad.values().iter().fold(0.0f64, |acc, g| acc.max(g.amax()));
    Ok(worst / grid.cell_volume())
}

/// Residuals of a transversal wave `a sin(k x − ω_t t + θ₁)`, a longitudinal
/// wave `a sin(k z − ω_l t + θ₂)` and their sum, with seeded phases and `k`
/// the fundamental wavenumber of the periodic cube `grid`.
pub fn superposition_residual(
    m: &ElasticModuli,
    grid: &GridSpec,
    amplitude: f64,
    seed: u64,
) -> Result<SuperpositionReport, WaveError> {
    if !(grid.is_periodic() && Axis::ALL.iter().all(|a| grid.is_active(*a))) {
        return Err(WaveError::GridShape {
            mode: WaveMode::Transversal2D,
            active: Axis::ALL.to_vec(),
            dims: grid.dims(),
        });
    }
    let speeds = wave_speeds(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (th1, th2): (f64, f64) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
    let kx = 2.0 * PI / grid.extent(Axis::X);
    let kz = 2.0 * PI / grid.extent(Axis::Z);
    let (wt, wl) = (speeds.v_t * kx, speeds.v_l * kz);
    let dt = 0.25 * grid.spacing() / speeds.v_t.max(speeds.v_l);
    let a = amplitude;
    let transversal = move |p: [f64; 3], t: f64| a * (kx * p[0] - wt * t + th1).sin();
    let longitudinal = move |p: [f64; 3], t: f64| a * (kz * p[2] - wl * t + th2).sin();
    let sum = move |p: [f64; 3], t: f64| transversal(p, t) + longitudinal(p, t);
    Ok(SuperpositionReport {
        amplitude,
        r_t: motion_residual(m, grid, &transversal, dt)?,
        r_l: motion_residual(m, grid, &longitudinal, dt)?,
        r_sum: motion_residual(m, grid, &sum, dt)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandingWaveReport {
    /// `max |φ(t) − cos(ωt) v| / |v0|` over the snapshots and nodes with
    /// `r ≤ radius`.
    pub max_rel_error: f64,
    pub steps: usize,
    pub period: f64,
}

/// Runs the transversal solver for one period from `φ⁰ = v0 J0(k r)`,
/// `φ̇⁰ = 0` on the planar Dirichlet `grid` and compares every step with
/// the separated solution `cos(ωt) v(r)` inside `radius`.
pub fn standing_wave_check(mode: &RadialMode, grid: &GridSpec, radius: f64) -> Result<StandingWaveReport, WaveError> {
    let period = mode.period();
    let probe = WaveConfig {
        moduli: mode.moduli,
        grid: *grid,
        dt: 1.0,
        steps: 1,
        saves: 2,
        mode: WaveMode::Transversal2D,
        initial: InitialCondition::RadialHalfTurn { k: mode.k, v0: mode.v0 },
    };
    let steps = (period / probe.max_dt()?).ceil() as usize;
    let config = WaveConfig { dt: period / steps as f64, steps, saves: steps + 1, ..probe };
    let traj = simulate(&config)?;
    let v = radial_field(grid, mode);
    let inside: Vec<usize> = (0..grid.len()).filter(|&i| radius_at(grid, i) <= radius).collect();
    let mut worst = 0.0f64;
    for (snap, t) in traj.snapshots.iter().zip(&traj.times) {
        let c = (mode.omega * t).cos();
        for &i in &inside {
            worst = worst.max((snap.values()[i] - c * v.values()[i]).abs());
        }
    }
    Ok(StandingWaveReport { max_rel_error: worst / mode.v0.abs(), steps, period })
}

/// `φ` as the z component of an axis field on `phi`'s grid.
pub fn single_axis_field(phi: &ScalarField) -> Result<AxisField, GridError> {
    AxisField::new(phi.map(|p| Vec3::new(0.0, 0.0, *p)))
}

/// Field of `φ` values sampled from a closure.
pub fn scalar_field(grid: &GridSpec, f: impl Fn([f64; 3]) -> f64 + Sync + Send) -> ScalarField {
    Field::from_fn(*grid, |i| f(grid.position(i)))
}

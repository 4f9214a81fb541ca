//! `validate` suites. Each prints a small table and reports whether every
//! check met its threshold.

use crate::{CliResult, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotelast::energy::{
    compare_gradients, directional_derivative_check, expansion_check, identity_residual, kinetic_energy,
    potential_v1, potential_v2, ElasticModuli, Functional, GradientMethod,
};
use rotelast::grid::{field_exp, synthesize_smooth_field, AxisField, Boundary, GridSpec, TrigField};
use rotelast::material::{classify, property_routes, wave_speeds, MaterialClass, ROUTE_TOL};
use rotelast::radial::{bessel_j0, bisect_j0_zero, RadialMode};
use rotelast::so3::rot_exp;
use rotelast::strain::{contortion, strain_bundle};
use rotelast::wavesim::{measure_speed, pulse_run, standing_wave_check, superposition_residual, WaveMode};
use std::f64::consts::PI;

struct Table {
    ok: bool,
}

impl Table {
    fn new(title: &str) -> Self {
        println!("== {title}");
        Table { ok: true }
    }

    fn row(&mut self, name: &str, value: f64, pass: bool, bound: &str) {
        self.ok &= pass;
        println!("  {name:<44} {value:>12.4e}  {bound:<12} {}", if pass { "ok" } else { "FAIL" });
    }
}

pub fn run(suite: Suite, grid: usize, seed: u64) -> CliResult {
    if grid < 8 {
        return Err("--grid must be at least 8".into());
    }
    let mut ok = true;
    if matches!(suite, Suite::Identities | Suite::All) {
        ok &= structural(seed)?;
        ok &= divergence_identity(grid, seed)?;
        ok &= expansions(seed)?;
        ok &= gradients(seed)?;
    }
    if matches!(suite, Suite::Material | Suite::All) {
        ok &= material(seed)?;
    }
    if matches!(suite, Suite::Waves | Suite::All) {
        ok &= waves(seed)?;
    }
    if matches!(suite, Suite::Radial | Suite::All) {
        ok &= radial()?;
    }
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn moduli() -> ElasticModuli {
    ElasticModuli::new(5.0, 1.0, 1.0, 1.0).expect("positive")
}

fn structural(seed: u64) -> CliResult {
    let mut t = Table::new("structural identities (5 fields, 10^3 periodic)");
    let g = GridSpec::periodic_cube(10, 1.0)?;
    let m = moduli();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut skew, mut reassembly, mut orth, mut rigid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for s in 0..5 {
        let o = field_exp(&synthesize_smooth_field(&g, seed + s, 2, 2.0)?);
        let k = contortion(&o);
        for t3 in k.values() {
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        skew = skew.max((t3.get(i, j, l) + t3.get(l, j, i)).abs());
                    }
                }
            }
        }
        let b = strain_bundle(&o);
        for p in 0..g.len() {
            let parts = [1, 2, 3].map(|i| b.piece(i).values()[p]);
            let a = b.a().values()[p];
            reassembly = reassembly.max((a - parts[0] - parts[1] - parts[2]).amax());
            for i in 0..3 {
                for j in i + 1..3 {
                    orth = orth.max(parts[i].dot(&parts[j]).abs() / (1.0 + a.norm_squared()));
                }
            }
        }
        let r = rot_exp(&rotelast::so3::Vec3::new(rng.random(), rng.random(), rng.random()));
        let turned = o.right_multiply(&r);
        let kr = contortion(&turned);
        for (x, y) in k.values().iter().zip(kr.values()) {
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        rigid = rigid.max((x.get(i, j, l) - y.get(i, j, l)).abs());
                    }
                }
            }
        }
        let (v1, v1r) = (potential_v1(&o, &m).total, potential_v1(&turned, &m).total);
        let (v2, v2r) = (potential_v2(&o, &m), potential_v2(&turned, &m));
        rigid = rigid.max((v1 - v1r).abs() / v1).max((v2 - v2r).abs() / v2);
        let later = field_exp(&synthesize_smooth_field(&g, seed + s + 100, 2, 2.0)?);
        let e = kinetic_energy(&o, &later, 0.1, m.rho)?;
        let er = kinetic_energy(&turned, &later.right_multiply(&r), 0.1, m.rho)?;
        rigid = rigid.max((e - er).abs() / e);
    }
    t.row("K skew in first and third index", skew, skew <= 1e-10, "<= 1e-10");
    t.row("A = A1 + A2 + A3", reassembly, reassembly <= 1e-10, "<= 1e-10");
    t.row("pieces mutually orthogonal", orth, orth <= 1e-10, "<= 1e-10");
    t.row("rigid rotation invariance (K, V1, V2, T)", rigid, rigid <= 1e-10, "<= 1e-10");
    Ok(t.ok)
}

fn divergence_identity(finest: usize, seed: u64) -> CliResult {
    let sizes = [finest / 2, finest, 2 * finest];
    let mut t = Table::new("flatness identity on periodic grids (max pointwise residual)");
    let base = GridSpec::periodic_cube(sizes[0], 2.0 * PI)?;
    let shape = TrigField::random(&base, seed, 1)?;
    let mut prev: Option<f64> = None;
    let mut rhs = 0.0;
    for &n in &sizes {
        let g = GridSpec::periodic_cube(n, 2.0 * PI)?;
        let u = shape.sample(&g);
        let peak = u.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let o = field_exp(&AxisField::new(u.scaled(0.3 / peak))?);
        let r = identity_residual(&o);
        let res = r.max_abs();
        match prev {
            Some(p) => {
                let factor = p / res;
                t.row(&format!("n = {n}: reduction factor"), factor, (3.0..=5.0).contains(&factor), "4 +- 25%");
            }
            None => t.row(&format!("n = {n}: residual"), res, res.is_finite(), ""),
        }
        prev = Some(res);
        rhs = r.rhs_integrated;
    }
    t.row("integrated divergence term on the finest grid", rhs.abs(), rhs.abs() <= 1e-6, "<= 1e-6");
    Ok(t.ok)
}

fn expansions(seed: u64) -> CliResult {
    let mut t = Table::new("small-amplitude expansions (16^3, amplitudes 0.4..0.05)");
    let g = GridSpec::periodic_cube(16, 2.0 * PI)?;
    let report = expansion_check(&g, seed, &[0.4, 0.2, 0.1, 0.05])?;
    for (name, s) in ["A1 norm vs div u", "A2 norm vs curl u", "divergence term", "kinetic"].iter().zip(report.slopes) {
        let v = s.unwrap_or(f64::NAN);
        t.row(&format!("log-log slope, {name}"), v, v >= 2.7, ">= 2.7");
    }
    Ok(t.ok)
}

fn gradients(seed: u64) -> CliResult {
    let mut t = Table::new("variational gradient, analytic vs central differences (8^3)");
    let g = GridSpec::new([8; 3], 1.0 / 8.0, Boundary::DirichletIdentity)?;
    let m = moduli();
    let u = synthesize_smooth_field(&g, seed, 1, 0.8)?;
    for (name, f) in [("V1", Functional::V1), ("V2", Functional::V2)] {
        let c = compare_gradients(&f, &u, &m)?;
        t.row(&format!("{name} pointwise relative error"), c.max_rel_error, c.max_rel_error <= 1e-6, "<= 1e-6");
        let d = directional_derivative_check(&f, &u, &m, GradientMethod::Analytic, seed, 10)?;
        let e = d.max_rel_error();
        t.row(&format!("{name} directional derivatives (10)"), e, e <= 1e-6, "<= 1e-6");
    }
    Ok(t.ok)
}

fn material(seed: u64) -> CliResult {
    let mut t = Table::new("material formulas (10^4 log-uniform moduli)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut violations) = (0.0f64, 0usize);
    for _ in 0..10_000 {
        let mut c = || 10f64.powf(rng.random_range(-2.0..2.0));
        let m = ElasticModuli::new(c(), c(), c(), 1.0)?;
        let Ok(r) = property_routes(&m) else { continue };
        worst = worst.max(r.sigma_gap()).max(r.youngs_gap());
        let nu = wave_speeds(&m)?.nu;
        let bad = match classify(&m).0 {
            MaterialClass::Ordinary => nu >= 0.5f64.sqrt(),
            MaterialClass::Auxetic => nu <= 0.5f64.sqrt() || nu >= 0.75f64.sqrt(),
            MaterialClass::Other => false,
        };
        violations += bad as usize;
    }
    t.row("worst route disagreement (condition units)", worst, worst <= ROUTE_TOL, "<= 1e-12");
    t.row("classification bound violations", violations as f64, violations == 0, "= 0");
    Ok(t.ok)
}

fn waves(seed: u64) -> CliResult {
    let mut t = Table::new("single-axis waves, moduli (5, 1, 1, 1)");
    let m = moduli();
    for mode in [WaveMode::Transversal2D, WaveMode::Longitudinal1D] {
        let v = mode.speed(&m)?;
        let mut errs = Vec::new();
        for ppw in [16, 32] {
            let traj = pulse_run(&m, mode, ppw)?;
            let err = (measure_speed(&traj)?.speed - v).abs() / v;
            t.row(&format!("{mode:?} ppw {ppw}: speed error"), err, ppw < 32 || err <= 0.02, "<= 2%");
            t.row(&format!("{mode:?} ppw {ppw}: energy drift"), traj.energy_drift(), traj.energy_drift() <= 1e-3, "<= 0.1%");
            errs.push(err);
        }
        let order = (errs[0] / errs[1]).log2();
        t.row(&format!("{mode:?} observed order"), order, order >= 1.9, ">= 2");
    }
    let g = GridSpec::periodic_cube(32, 2.0 * PI)?;
    let big = superposition_residual(&m, &g, 1.0, seed)?;
    t.row("superposition ratio at amplitude 1", big.ratio(), big.ratio() >= 10.0, ">= 10");
    let small = superposition_residual(&m, &g, 0.01, seed)?;
    t.row("superposition ratio at amplitude 0.01", small.ratio(), small.ratio() < big.ratio(), "decreasing");
    Ok(t.ok)
}

fn radial() -> CliResult {
    let mut t = Table::new("Bessel and radial standing mode");
    let z = bisect_j0_zero(2.0, 3.0, 1e-14)?;
    let zerr = (z - 2.404825557695773).abs();
    t.row("first zero of J0", z, zerr <= 1e-9, "2.4048255577");
    let e1 = (bessel_j0(1.0) - 0.765_197_686_557_966_6).abs();
    t.row("J0(1) against tabulated value", e1, e1 <= 1e-12, "<= 1e-12");
    let g = GridSpec::new([121, 121, 1], 0.25, Boundary::DirichletIdentity)?;
    let mode = RadialMode::with_wavenumber(moduli(), 1.0, PI)?;
    let r = standing_wave_check(&mode, &g, 8.0)?;
    t.row("standing wave over one period (r <= 8)", r.max_rel_error, r.max_rel_error <= 0.03, "<= 3%");
    Ok(t.ok)
}

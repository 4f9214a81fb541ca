//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the terminal.

use num::rational::Ratio;
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotelast::energy::{
    compare_gradients, directional_derivative_check, expansion_check, identity_residual, kinetic_energy,
    potential_v1, potential_v2, ElasticModuli, Functional, GradientMethod,
};
use rotelast::grid::{field_exp, synthesize_smooth_field, AxisField, GridSpec, TrigField, Vector3Field};
use rotelast::material::{classify, derived_properties, property_routes, wave_speeds, MaterialClass, ROUTE_TOL};
use rotelast::radial::{bessel_j0, bisect_j0_zero, radial_solution, RadialMode};
use rotelast::so3::{rot_exp, Vec3};
use rotelast::strain::{contortion, strain_bundle};
use rotelast::wavesim::{measure_speed, pulse_run, standing_wave_check, superposition_residual, WaveMode};
use rotelast::grid::Boundary;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn moduli(c1: f64, c2: f64, c3: f64) -> ElasticModuli {
    ElasticModuli::new(c1, c2, c3, 1.0).unwrap()
}

fn max_tensor_gap(a: &[rotelast::strain::Tensor3], b: &[rotelast::strain::Tensor3]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.0.iter().flatten().flatten().zip(y.0.iter().flatten().flatten()).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn structural_identities() -> Outcome {
    let g = GridSpec::periodic_cube(8, 1.0).unwrap();
    let m = moduli(5.0, 1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = [0.0f64; 4];
    for s in 0..20 {
        let o = field_exp(&synthesize_smooth_field(&g, 500 + s, 2, 2.5).unwrap());
        let later = field_exp(&synthesize_smooth_field(&g, 900 + s, 2, 2.5).unwrap());
        let k = contortion(&o);
        let scale = k.values().iter().map(|t| t.max_abs()).fold(0.0, f64::max);
        for t in k.values() {
            for i in 0..3 {
                for j in 0..3 {
                    for l in 0..3 {
                        worst[0] = worst[0].max((t.0[i][j][l] + t.0[l][j][i]).abs() / scale);
                    }
                }
            }
        }
        // Pieces rebuilt here from A alone and compared with the library's.
        let b = strain_bundle(&o);
        for p in 0..g.len() {
            let a = b.a().values()[p];
            let tr = a.trace() / 3.0;
            let iso = rotelast::so3::Mat3::identity() * tr;
            let skew = (a - a.transpose()) * 0.5;
            let dev = (a + a.transpose()) * 0.5 - iso;
            let ours = [iso, skew, dev];
            let norm = 1.0 + a.norm_squared();
            for i in 0..3 {
                worst[1] = worst[1].max((b.piece(i + 1).values()[p] - ours[i]).amax() / norm.sqrt());
                for j in i + 1..3 {
                    worst[1] = worst[1].max(ours[i].dot(&ours[j]).abs() / norm);
                }
            }
            worst[1] = worst[1].max((a - iso - skew - dev).amax() / norm.sqrt());
        }
        let r = rot_exp(&Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
        let turned = o.right_multiply(&r);
        worst[2] = worst[2].max(max_tensor_gap(k.values(), contortion(&turned).values()) / scale);
        let bt = strain_bundle(&turned);
        for (x, y) in b.a().values().iter().zip(bt.a().values()) {
            worst[2] = worst[2].max((x - y).amax() / scale);
        }
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
        let e = [
            rel(potential_v1(&o, &m).total, potential_v1(&turned, &m).total),
            rel(potential_v2(&o, &m), potential_v2(&turned, &m)),
            rel(
                kinetic_energy(&o, &later, 0.01, 1.0).unwrap(),
                kinetic_energy(&turned, &later.right_multiply(&r), 0.01, 1.0).unwrap(),
            ),
        ];
        worst[3] = e.iter().fold(worst[3], |w, x| w.max(*x));
    }
    let max = worst.iter().fold(0.0f64, |a, b| a.max(*b));
    check(
        max <= 1e-10,
        format!(
            "20 fields: K skew {:.1e}, pieces {:.1e}, K/A invariance {:.1e}, energy invariance {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn divergence_identity() -> Outcome {
    let base = GridSpec::periodic_cube(16, 2.0 * PI).unwrap();
    let shape = TrigField::random(&base, 23, 1).unwrap();
    let mut res = Vec::new();
    let mut rhs = 0.0;
    for n in [16, 32, 64] {
        let g = GridSpec::periodic_cube(n, 2.0 * PI).unwrap();
        let u = shape.sample(&g);
        let peak = u.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let r = identity_residual(&field_exp(&AxisField::new(u.scaled(0.4 / peak)).unwrap()));
        res.push(r.max_abs());
        rhs = r.rhs_integrated;
    }
    let f = [res[0] / res[1], res[1] / res[2]];
    check(
        f.iter().all(|f| (3.0..=5.0).contains(f)) && rhs.abs() <= 1e-6,
        format!("reduction factors {:.3}, {:.3}; integrated divergence term at 64^3 {:.1e}", f[0], f[1], rhs),
    )
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(a, e)| (a.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn linearization_orders() -> Outcome {
    let g = GridSpec::periodic_cube(16, 2.0 * PI).unwrap();
    let report = expansion_check(&g, 31, &[0.4, 0.2, 0.1, 0.05]).unwrap();
    let pick: [fn(&rotelast::energy::ExpansionSample) -> f64; 4] = [|s| s.e1, |s| s.e2, |s| s.e5, |s| s.kinetic];
    let slopes: Vec<f64> = pick
        .iter()
        .map(|f| slope(&report.samples.iter().map(|s| (s.amplitude, f(s))).collect::<Vec<_>>()))
        .collect();
    check(
        slopes.iter().all(|s| *s >= 2.7),
        format!("slopes A1 {:.2}, A2 {:.2}, divergence term {:.2}, kinetic {:.2}", slopes[0], slopes[1], slopes[2], slopes[3]),
    )
}

fn eps(i: usize, j: usize, k: usize) -> f64 {
    ((i as i64 - j as i64) * (j as i64 - k as i64) * (k as i64 - i as i64)) as f64 / 2.0
}

/// Piece norms of `A` for `O = R_z(φ)` with gradient `g`, built from the
/// definitions with plain arrays.
fn single_axis_norms(phi: f64, g: [f64; 3]) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    let o = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    let d = [[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]];
    let mut k = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                k[i][j][l] = (0..3).map(|m| o[i][m] * g[j] * d[l][m]).sum();
            }
        }
    }
    let mut a = [[0.0; 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    a[m][n] += eps(m, j, l) * k[j][n][l];
                }
            }
        }
    }
    let tr = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let mut n = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            let iso = if i == j { tr } else { 0.0 };
            let skew = 0.5 * (a[i][j] - a[j][i]);
            let dev = 0.5 * (a[i][j] + a[j][i]) - iso;
            n[0] += iso * iso;
            n[1] += skew * skew;
            n[2] += dev * dev;
        }
    }
    n
}

fn closed_forms(g: [f64; 3]) -> [f64; 3] {
    let (x, y, z) = (g[0] * g[0], g[1] * g[1], g[2] * g[2]);
    [4.0 / 3.0 * z, 2.0 * (x + y), 2.0 * x + 2.0 * y + 8.0 / 3.0 * z]
}

fn single_axis_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut derivation = 0.0f64;
    for _ in 0..200 {
        let g = [0; 3].map(|_| rng.random_range(-3.0..3.0));
        let brute = single_axis_norms(rng.random_range(-7.0..7.0), g);
        let closed = closed_forms(g);
        for i in 0..3 {
            derivation = derivation.max((brute[i] - closed[i]).abs() / (1.0 + closed[i]));
        }
    }
    let phi = |p: [f64; 3]| 1.3 * p[0].sin() * p[1].cos() + 0.9 * (p[2] + 0.4).sin();
    let dphi = |p: [f64; 3]| {
        [1.3 * p[0].cos() * p[1].cos(), -1.3 * p[0].sin() * p[1].sin(), 0.9 * (p[2] + 0.4).cos()]
    };
    let err = |n: usize| {
        let g = GridSpec::periodic_cube(n, 2.0 * PI).unwrap();
        let u = Vector3Field::from_fn(g, |i| Vec3::new(0.0, 0.0, phi(g.position(i))));
        let norms = strain_bundle(&field_exp(&AxisField::new(u).unwrap())).norms_squared();
        let mut e = [0.0f64; 3];
        for p in 0..g.len() {
            let exact = closed_forms(dphi(g.position(p)));
            for i in 0..3 {
                e[i] = e[i].max((norms[i].values()[p] - exact[i]).abs());
            }
        }
        e
    };
    let (coarse, fine) = (err(24), err(48));
    let orders: Vec<f64> = (0..3).map(|i| (coarse[i] / fine[i]).log2()).collect();
    check(
        derivation < 1e-12 && orders.iter().all(|o| *o >= 1.9),
        format!(
            "closed forms reproduced to {:.1e}; grid errors at 48^3 {:.1e} {:.1e} {:.1e}, orders {:.2} {:.2} {:.2}",
            derivation, fine[0], fine[1], fine[2], orders[0], orders[1], orders[2]
        ),
    )
}

fn variational_gradient() -> Outcome {
    let g = GridSpec::new([8; 3], 1.0 / 8.0, Boundary::DirichletIdentity).unwrap();
    let m = moduli(5.0, 1.0, 1.0);
    let (mut pointwise, mut directional) = (0.0f64, 0.0f64);
    for s in 0..10 {
        let u = synthesize_smooth_field(&g, 70 + s, 1, 1.0).unwrap();
        for f in [Functional::V1, Functional::V2] {
            pointwise = pointwise.max(compare_gradients(&f, &u, &m).unwrap().max_rel_error);
            let d = directional_derivative_check(&f, &u, &m, GradientMethod::Analytic, 300 + s, 1).unwrap();
            directional = directional.max(d.max_rel_error());
        }
    }
    check(
        pointwise <= 1e-6 && directional <= 1e-6,
        format!("10 fields x V1, V2: pointwise {pointwise:.1e}, directional {directional:.1e}"),
    )
}

type Q = Ratio<i64>;

/// `(σ, E, ν²)` in exact rationals from the Lamé parameters.
fn rational_properties(c1: i64, c2: i64, c3: i64) -> (Q, Q, Q) {
    let (c1, c2, c3) = (Q::from(c1), Q::from(c2), Q::from(c3));
    let lambda = Q::from(4) * (c1 / Q::from(3) - c2 - c3 / Q::from(3));
    let mu = Q::from(2) * (c2 + c3);
    let sigma = lambda / (Q::from(2) * (lambda + mu));
    let e = mu * (Q::from(3) * lambda + Q::from(2) * mu) / (lambda + mu);
    (sigma, e, mu / (lambda + Q::from(2) * mu))
}

fn material_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let (mut worst, mut violations, mut singular) = (0.0f64, 0usize, 0usize);
    for _ in 0..10_000 {
        let mut c = || 10f64.powf(rng.random_range(-3.0..3.0));
        let m = moduli(c(), c(), c());
        let Ok(routes) = property_routes(&m) else {
            singular += 1;
            continue;
        };
        worst = worst.max(routes.sigma_gap()).max(routes.youngs_gap());
        let r = derived_properties(&m).unwrap();
        let ok = match classify(&m).0 {
            MaterialClass::Ordinary => r.nu < 0.5f64.sqrt() && r.sigma > 0.0 && r.sigma < 0.5,
            MaterialClass::Auxetic => {
                r.nu > 0.5f64.sqrt() && r.nu < 0.75f64.sqrt() && r.sigma > -1.0 && r.sigma < 0.0
            }
            MaterialClass::Other => true,
        };
        violations += usize::from(!ok);
    }
    let mut spots = Vec::new();
    for (c, want) in [((5, 1, 1), (Q::new(1, 8), Q::from(9), Q::new(3, 7))), ((3, 1, 1), (Q::new(-1, 4), Q::from(6), Q::new(3, 5)))] {
        let exact = rational_properties(c.0, c.1, c.2);
        let r = derived_properties(&moduli(c.0 as f64, c.1 as f64, c.2 as f64)).unwrap();
        let f = |q: Q| *q.numer() as f64 / *q.denom() as f64;
        spots.push(
            exact == want
                && (r.sigma - f(want.0)).abs() < 1e-14
                && (r.youngs_modulus - f(want.1)).abs() < 1e-13
                && (r.nu - f(want.2).sqrt()).abs() < 1e-14,
        );
    }
    check(
        worst <= ROUTE_TOL && violations == 0 && spots.iter().all(|s| *s),
        format!(
            "worst route gap {worst:.1e} (condition units), {violations} bound violations, {singular} singular skipped, spot values {}",
            if spots.iter().all(|s| *s) { "exact" } else { "wrong" }
        ),
    )
}

fn speed_error(m: &ElasticModuli, mode: WaveMode, ppw: usize) -> (f64, f64) {
    let traj = pulse_run(m, mode, ppw).unwrap();
    let v = mode.speed(m).unwrap();
    let err = (measure_speed(&traj).unwrap().speed - v).abs() / v;
    // The pulse covers a quarter of the domain; scale the drift to a full crossing.
    (err, 4.0 * traj.energy_drift())
}

fn wave_speed_criterion() -> Outcome {
    let m = moduli(5.0, 1.0, 1.0);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, mode) in [("v_t", WaveMode::Transversal2D), ("v_l", WaveMode::Longitudinal1D)] {
        let runs: Vec<(f64, f64)> = [16, 32, 64].iter().map(|&p| speed_error(&m, mode, p)).collect();
        let order = (runs[0].0 / runs[2].0).log2() / 2.0;
        let drift = runs.iter().map(|r| r.1).fold(0.0, f64::max);
        ok &= runs[1].0 <= 0.02 && drift <= 1e-3 && order >= 1.9;
        parts.push(format!("{name} error {:.2}% at 32 ppw, order {order:.2}, drift {drift:.0e}", 100.0 * runs[1].0));
    }
    check(ok, parts.join("; "))
}

fn measured_ratio(m: &ElasticModuli) -> f64 {
    let vt = measure_speed(&pulse_run(m, WaveMode::Transversal2D, 32).unwrap()).unwrap().speed;
    let vl = measure_speed(&pulse_run(m, WaveMode::Longitudinal1D, 32).unwrap()).unwrap().speed;
    vt / vl
}

fn auxetic_speeds() -> Outcome {
    let bound = 0.5f64.sqrt();
    let mut ok = true;
    let mut parts = Vec::new();
    for (c1, c2, c3) in [(3.0, 1.0, 1.0), (2.5, 1.0, 0.5), (2.2, 1.0, 2.0)] {
        let m = moduli(c1, c2, c3);
        let nu = wave_speeds(&m).unwrap().nu;
        let measured = measured_ratio(&m);
        ok &= classify(&m).0 == MaterialClass::Auxetic && nu > bound && measured > bound;
        parts.push(format!("({c1},{c2},{c3}) nu {nu:.3} measured {measured:.3}"));
    }
    // Outside both classes the ratio passes 1 outright.
    let m = moduli(1.0, 1.0, 0.1);
    let (nu, measured) = (wave_speeds(&m).unwrap().nu, measured_ratio(&m));
    ok &= classify(&m).0 == MaterialClass::Other && nu > 1.0 && measured > 1.0;
    parts.push(format!("v_t > v_l at (1,1,0.1): nu {nu:.3} measured {measured:.3}"));
    check(ok, format!("v_t/v_l above sqrt(1/2): {}", parts.join(", ")))
}

fn superposition() -> Outcome {
    let m = moduli(5.0, 1.0, 1.0);
    let big = superposition_residual(&m, &GridSpec::periodic_cube(32, 2.0 * PI).unwrap(), 1.0, 1).unwrap();
    let g = GridSpec::periodic_cube(24, 2.0 * PI).unwrap();
    let ratios: Vec<f64> = [1.0, 0.3, 0.1, 0.01].iter().map(|&a| superposition_residual(&m, &g, a, 3).unwrap().ratio()).collect();
    check(
        big.ratio() >= 10.0 && ratios.windows(2).all(|w| w[1] < w[0]) && ratios[3] < 3.0,
        format!(
            "ratio {:.1} at amplitude 1 (32^3); 24^3 sweep {}",
            big.ratio(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(" > ")
        ),
    )
}

const FRAC_BITS: u32 = 256;

/// Power series of J0 summed in exact fixed-point integers.
fn series_j0(x: f64) -> f64 {
    let (mant, exp, _) = num::Float::integer_decode(x.abs());
    let mant = BigInt::from(mant);
    let shift = 2 * exp as i64 - 2;
    let step = &mant * &mant;
    let (mut numer, mut denom, mut sum) = (BigInt::one(), BigInt::one(), BigInt::zero());
    let scale = BigInt::one() << FRAC_BITS;
    let tiny = BigInt::one() << (FRAC_BITS - 110);
    let mut m: u64 = 0;
    loop {
        let total = m as i64 * shift;
        let wide = &numer * &scale;
        let scaled = if total >= 0 { wide << total as usize } else { wide >> (-total) as usize };
        let term = scaled / &denom;
        if m % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        m += 1;
        numer *= &step;
        denom *= BigInt::from(m * m);
        if (m * m) as f64 > x * x && term.abs() < tiny {
            break;
        }
    }
    (&sum >> (FRAC_BITS - 64) as usize).to_f64().unwrap() / 2f64.powi(64)
}

fn series_zero(lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let sa = series_j0(a).signum();
    while b - a > 1e-14 {
        let m = 0.5 * (a + b);
        if series_j0(m).signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn bessel_radial() -> Outcome {
    let series = (0..=400).map(|i| i as f64 * 0.125).map(|x| (bessel_j0(x) - series_j0(x)).abs()).fold(0.0, f64::max);
    let z = bisect_j0_zero(2.0, 3.0, 1e-13).unwrap();
    let zero_err = (z - 2.404825557695773).abs().max((z - series_zero(2.0, 3.0)).abs());
    let mode = RadialMode::with_wavenumber(moduli(5.0, 1.0, 1.0), 1.3, 2.0).unwrap();
    let v = |r: f64| radial_solution(&mode, r);
    let h = 1e-2;
    let mut ode = 0.0f64;
    for r in [0.5, 1.0, 5.0, 20.0] {
        // Sixth-order central differences.
        let d1 = (-v(r - 3.0 * h) + 9.0 * v(r - 2.0 * h) - 45.0 * v(r - h) + 45.0 * v(r + h) - 9.0 * v(r + 2.0 * h) + v(r + 3.0 * h)) / (60.0 * h);
        let d2 = (2.0 * v(r - 3.0 * h) - 27.0 * v(r - 2.0 * h) + 270.0 * v(r - h) - 490.0 * v(r) + 270.0 * v(r + h) - 27.0 * v(r + 2.0 * h) + 2.0 * v(r + 3.0 * h))
            / (180.0 * h * h);
        ode = ode.max((d2 + d1 / r + mode.k * mode.k * v(r)).abs());
    }
    let g = GridSpec::new([121, 121, 1], 0.25, Boundary::DirichletIdentity).unwrap();
    let standing = standing_wave_check(&RadialMode::with_wavenumber(moduli(5.0, 1.0, 1.0), 1.0, PI).unwrap(), &g, 8.0).unwrap();
    check(
        series <= 1e-12 && zero_err <= 1e-9 && ode <= 1e-8 && standing.max_rel_error <= 0.03,
        format!(
            "J0 vs series {series:.1e}, first zero {z:.15} (gap {zero_err:.0e}), ODE residual {ode:.1e}, standing wave {:.2}%",
            100.0 * standing.max_rel_error
        ),
    )
}

/// `(x, y, angle)` per glyph, mapped back from pixel space.
fn svg_glyphs(svg: &str, origin: f64, ppu: f64, height: f64) -> Vec<(f64, f64, f64)> {
    let margin = 0.5 * ppu;
    svg.lines()
        .filter(|l| l.starts_with("<use"))
        .map(|l| {
            let inner = |key: &str| {
                let s = l.find(key).unwrap() + key.len();
                let e = s + l[s..].find(')').unwrap();
                l[s..e].split_whitespace().map(|t| t.parse::<f64>().unwrap()).collect::<Vec<_>>()
            };
            let t = inner("translate(");
            let deg = inner("rotate(")[0];
            (origin + (t[0] - margin) / ppu, origin + (height - margin - t[1]) / ppu, -deg.to_radians())
        })
        .collect()
}

fn figure_reproduction() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_rotelast"))
            .args(["radial", "--k", "1", "--v0", "pi", "--render"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.svg"), run("b.svg"));
    let svg = String::from_utf8(a.clone()).unwrap();
    // Default scene: r <= 10 at spacing 0.5, 40 px per unit.
    let glyphs = svg_glyphs(&svg, -10.0, 40.0, 840.0);
    let centre = glyphs.iter().find(|g| g.0.abs() < 1e-9 && g.1.abs() < 1e-9).map(|g| g.2);
    let centre_ok = centre.is_some_and(|c| (c - PI).abs() < 1e-3);
    // Along the positive x axis the arrows turn back through horizontal
    // between neighbouring glyphs; each crossing must lie within one cell
    // of a zero of J0.
    let mut axis: Vec<(f64, f64)> = glyphs.iter().filter(|g| g.1.abs() < 1e-9 && g.0 >= 0.0).map(|g| (g.0, g.2)).collect();
    axis.sort_by(|p, q| p.0.total_cmp(&q.0));
    let crossings: Vec<f64> = axis
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| w[0].0 + (w[1].0 - w[0].0) * w[0].1 / (w[0].1 - w[1].1))
        .collect();
    let zeros = [series_zero(2.0, 3.0), series_zero(5.0, 6.0), series_zero(8.0, 9.0)];
    let near = crossings.len() == zeros.len() && crossings.iter().zip(&zeros).all(|(c, z)| (c - z).abs() <= 0.5);
    let glyph_count = glyphs.len() == 41 * 41;
    check(
        a == b && centre_ok && near && glyph_count,
        format!(
            "{} glyphs, centre angle {:.6}, horizontal crossings at {} vs zeros {}, repeat runs {}",
            glyphs.len(),
            centre.unwrap_or(f64::NAN),
            crossings.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(" "),
            zeros.iter().map(|z| format!("{z:.3}")).collect::<Vec<_>>().join(" "),
            if a == b { "byte-identical" } else { "differ" }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("structural identities", structural_identities),
        ("divergence identity convergence", divergence_identity),
        ("linearization orders", linearization_orders),
        ("single-axis exact oracle", single_axis_oracle),
        ("variational gradient", variational_gradient),
        ("material formulas", material_formulas),
        ("wave speeds", wave_speed_criterion),
        ("auxetic transversal vs longitudinal", auxetic_speeds),
        ("superposition failure", superposition),
        ("Bessel and radial solution", bessel_radial),
        ("arrow figure reproduction", figure_reproduction),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {:>2} {name}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Classical constants of the linearised medium, wave speeds and the
//! material classes they imply.

use crate::energy::{ElasticModuli, EnergyError};
use serde::Serialize;

/// Relative width of the band around a class boundary that is reported as
/// [`MaterialClass::Other`] with `boundary_flag` set.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Agreement required of the two algebraic routes, in units of the
/// condition number of the evaluation.
pub const ROUTE_TOL: f64 = 1e-12;

/// `√(1/2)`: largest speed ratio `v_t / v_l` available to ordinary materials.
pub const CLASSICAL_NU_BOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `√(3/4)`: upper speed ratio of the auxetic class.
pub const AUXETIC_NU_BOUND: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MaterialError {
    #[error(transparent)]
    Moduli(#[from] EnergyError),
    #[error("2c1 - 3c2 + c3 = {denominator:e} is singular; sigma and E are undefined")]
    Singular { denominator: f64 },
    #[error("{quantity}: Lame route {lame} and modulus route {c_form} disagree")]
    RouteDisagreement { quantity: &'static str, lame: f64, c_form: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MaterialClass {
    /// `c1 > 3c2 + c3`: Poisson's ratio in `(0, 1/2)`.
    Ordinary,
    /// `2c2 < c1 < 3c2 + c3`: Poisson's ratio in `(−1, 0)`.
    Auxetic,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lame {
    pub lambda: f64,
    pub mu: f64,
    /// `λ + 2μ`, the coefficient of `(div u)²` in the linear theory.
    pub alpha: f64,
    /// `μ`, the coefficient of `‖curl u‖²`.
    pub beta: f64,
}

fn validated(m: &ElasticModuli) -> Result<ElasticModuli, EnergyError> {
    ElasticModuli::new(m.c1, m.c2, m.c3, m.rho)
}

pub fn lame(m: &ElasticModuli) -> Result<Lame, MaterialError> {
    let m = validated(m)?;
    let lambda = 4.0 * (m.c1 / 3.0 - m.c2 - m.c3 / 3.0);
    let mu = 2.0 * (m.c2 + m.c3);
    Ok(Lame { lambda, mu, alpha: lambda + 2.0 * mu, beta: mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSpeeds {
    pub v_t: f64,
    pub v_l: f64,
    pub nu: f64,
}

/// `v_t = √((c2+c3)/ρ)`, `v_l = √((2c1+4c3)/(3ρ))` and their ratio, computed
/// from the ρ-free closed form.
pub fn wave_speeds(m: &ElasticModuli) -> Result<WaveSpeeds, MaterialError> {
    let m = validated(m)?;
    Ok(WaveSpeeds {
        v_t: ((m.c2 + m.c3) / m.rho).sqrt(),
        v_l: ((2.0 * m.c1 + 4.0 * m.c3) / (3.0 * m.rho)).sqrt(),
        nu: (1.5 * (m.c2 + m.c3) / (m.c1 + 2.0 * m.c3)).sqrt(),
    })
}

/// Class and whether the moduli sit on (within [`BOUNDARY_TOL`] of) one of
/// the defining equalities.
pub fn classify(m: &ElasticModuli) -> (MaterialClass, bool) {
    let upper = 3.0 * m.c2 + m.c3;
    let lower = 2.0 * m.c2;
    let near = |a: f64, b: f64| (a - b).abs() <= BOUNDARY_TOL * (a.abs() + b.abs());
    if near(m.c1, upper) || near(m.c1, lower) {
        (MaterialClass::Other, true)
    } else if m.c1 > upper {
        (MaterialClass::Ordinary, false)
    } else if m.c1 > lower {
        (MaterialClass::Auxetic, false)
    } else {
        (MaterialClass::Other, false)
    }
}

/// Poisson's ratio and Young's modulus along both algebraic routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouteCheck {
    /// `λ / (2(λ+μ))` and `(c1−3c2−c3)/(2c1−3c2+c3)`.
    pub sigma: [f64; 2],
    /// `μ(3λ+2μ)/(λ+μ)` and `12(c1−2c2)(c2+c3)/(2c1−3c2+c3)`.
    pub youngs_modulus: [f64; 2],
    /// Worst ratio of term magnitude to result over the cancelling sums.
    pub condition: f64,
    /// Size of the largest terms feeding each quantity, used in place of the
    /// result when a numerator cancels to zero.
    pub term_scale: [f64; 2],
}

impl RouteCheck {
    fn gap(pair: [f64; 2], condition: f64, term_scale: f64) -> f64 {
        let scale = (pair[1].abs() * condition).max(term_scale).max(f64::MIN_POSITIVE);
        (pair[0] - pair[1]).abs() / scale
    }

    /// Route disagreement in units of the condition number.
    pub fn sigma_gap(&self) -> f64 {
        Self::gap(self.sigma, self.condition, self.term_scale[0])
    }

    pub fn youngs_gap(&self) -> f64 {
        Self::gap(self.youngs_modulus, self.condition, self.term_scale[1])
    }
}

pub fn property_routes(m: &ElasticModuli) -> Result<RouteCheck, MaterialError> {
    let l = lame(m)?;
    let (c1, c2, c3) = (m.c1, m.c2, m.c3);
    let den = 2.0 * c1 - 3.0 * c2 + c3;
    let den_scale = 2.0 * c1 + 3.0 * c2 + c3;
    if den.abs() <= BOUNDARY_TOL * den_scale {
        return Err(MaterialError::Singular { denominator: den });
    }
    let ratio = |scale: f64, value: f64| if value == 0.0 { 1.0 } else { (scale / value.abs()).max(1.0) };
    // The Lamé route forms λ + μ and 3λ + 2μ, whose terms are larger than
    // those of the modulus route.
    let condition = ratio(2.0 * c1 + 9.0 * c2 + 5.0 * c3, den)
        .max(ratio(c1 + 3.0 * c2 + c3, c1 - 3.0 * c2 - c3))
        .max(ratio(c1 + 4.0 * c2 + 2.0 * c3, c1 - 2.0 * c2));
    let (lambda, mu) = (l.lambda, l.mu);
    Ok(RouteCheck {
        sigma: [lambda / (2.0 * (lambda + mu)), (c1 - 3.0 * c2 - c3) / den],
        youngs_modulus: [
            mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu),
            12.0 * (c1 - 2.0 * c2) * (c2 + c3) / den,
        ],
        condition,
        term_scale: [
            (c1 + 3.0 * c2 + c3) / den.abs(),
            12.0 * (c1 + 2.0 * c2) * (c2 + c3) / den.abs(),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialReport {
    pub lambda: f64,
    pub mu: f64,
    pub sigma: f64,
    pub youngs_modulus: f64,
    pub v_t: f64,
    pub v_l: f64,
    pub nu: f64,
    pub class: MaterialClass,
    pub boundary_flag: bool,
}

pub fn derived_properties(m: &ElasticModuli) -> Result<MaterialReport, MaterialError> {
    let l = lame(m)?;
    let routes = property_routes(m)?;
    for (quantity, pair, gap) in [
        ("sigma", routes.sigma, routes.sigma_gap()),
        ("youngs_modulus", routes.youngs_modulus, routes.youngs_gap()),
    ] {
        if !(gap <= ROUTE_TOL) {
            return Err(MaterialError::RouteDisagreement { quantity, lame: pair[0], c_form: pair[1] });
        }
    }
    let speeds = wave_speeds(m)?;
    let (class, boundary_flag) = classify(m);
    Ok(MaterialReport {
        lambda: l.lambda,
        mu: l.mu,
        sigma: routes.sigma[1],
        youngs_modulus: routes.youngs_modulus[1],
        v_t: speeds.v_t,
        v_l: speeds.v_l,
        nu: speeds.nu,
        class,
        boundary_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c1: f64, c2: f64, c3: f64, rho: f64) -> ElasticModuli {
        ElasticModuli::new(c1, c2, c3, rho).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn lame_examples() {
        for (c1, lambda) in [(5.0, 4.0 / 3.0), (3.0, -4.0 / 3.0), (4.0, 0.0)] {
            let moduli = m(c1, 1.0, 1.0, 1.0);
            let l = lame(&moduli).unwrap();
            assert!(close(l.lambda, lambda), "{c1}: {}", l.lambda);
            assert_eq!(l.mu, 4.0);
            assert!(close(l.alpha, moduli.alpha()));
            assert_eq!(l.beta, moduli.beta());
        }
        let bad = ElasticModuli { c1: 1.0, c2: -1.0, c3: 1.0, rho: 1.0 };
        assert!(lame(&bad).is_err());
    }

    #[test]
    fn property_examples() {
        let r = derived_properties(&m(5.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(close(r.sigma, 0.125) && close(r.youngs_modulus, 9.0));
        assert_eq!((r.class, r.boundary_flag), (MaterialClass::Ordinary, false));
        let r = derived_properties(&m(3.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(close(r.sigma, -0.25) && close(r.youngs_modulus, 6.0));
        assert_eq!(r.class, MaterialClass::Auxetic);
        assert_eq!(classify(&m(1.0, 1.0, 1.0, 1.0)), (MaterialClass::Other, false));
        assert_eq!(derived_properties(&m(1.0, 1.5, 1.0, 1.0)).unwrap().class, MaterialClass::Other);
    }

    #[test]
    fn class_boundaries_are_flagged() {
        assert_eq!(classify(&m(4.0, 1.0, 1.0, 1.0)), (MaterialClass::Other, true));
        assert_eq!(classify(&m(2.0, 1.0, 1.0, 1.0)), (MaterialClass::Other, true));
        assert_eq!(classify(&m(0.5, 1.0, 1.0, 1.0)), (MaterialClass::Other, false));
        // σ and E vanish exactly on the two borders.
        let r = derived_properties(&m(4.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(r.sigma.abs() < 1e-15 && r.boundary_flag);
        let r = derived_properties(&m(2.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(r.youngs_modulus.abs() < 1e-15 && r.boundary_flag);
    }

    #[test]
    fn singular_denominator_is_rejected() {
        // 2c1 − 3c2 + c3 = 0.
        for (c1, c2, c3) in [(1.0, 1.0, 1.0), (1.0, 2.0, 4.0)] {
            assert!(matches!(derived_properties(&m(c1, c2, c3, 1.0)), Err(MaterialError::Singular { .. })));
        }
    }

    #[test]
    fn speed_examples() {
        let s = wave_speeds(&m(5.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(close(s.v_t, 2f64.sqrt()) && close(s.v_l, (14.0f64 / 3.0).sqrt()));
        assert!(close(s.nu, (3.0f64 / 7.0).sqrt()));
        assert!(close(s.nu, s.v_t / s.v_l));
        assert!(close(wave_speeds(&m(3.0, 1.0, 1.0, 1.0)).unwrap().nu, 0.6f64.sqrt()));
        assert_eq!(s.nu, wave_speeds(&m(5.0, 1.0, 1.0, 7.0)).unwrap().nu);
        assert!(close(AUXETIC_NU_BOUND, 0.75f64.sqrt()));
    }
}

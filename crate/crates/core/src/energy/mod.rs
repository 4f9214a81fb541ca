//! Energy functionals of a rotation field and the identities relating them.
//!
//! With `‖·‖` the Frobenius norm and `A⁽ⁱ⁾` the irreducible strain pieces,
//!
//! ```text
//! V1 = ∫ c1 ‖A⁽¹⁾‖² + c2 ‖A⁽²⁾‖² + c3 ‖A⁽³⁾‖²
//! V2 = ∫ ĉ1 ‖A⁽¹⁾‖² + ĉ2 ‖A⁽²⁾‖²,      ĉ1 = c1 + 2 c3,  ĉ2 = c2 + c3
//! T  = ρ ∫ ‖Ȯ‖²
//! ```
//!
//! Integrals use the midpoint rule with node weight `h^d`.

mod gradient;
mod linear;

pub use gradient::{
    compare_gradients, directional_derivative_check, discrete_variational_gradient,
    finite_difference_gradient, functional_value, DirectionalCheck, Functional, GradientCheck,
    GradientMethod, TimeNeighbours, FD_STEP,
};
pub use linear::{
    expansion_check, expansion_sample, linear_equilibrium_residual, linearized_v3,
    linearized_v3_gradient, ExpansionReport, ExpansionSample, LinearResidual,
};

use crate::grid::{partial_or_zero, Axis, GridError, RotationField, ScalarField};
use crate::strain::{levi_civita, strain_bundle, StrainBundle};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnergyError {
    #[error("elastic parameter {name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("time step must be positive, got {0}")]
    BadTimeStep(f64),
    #[error("field is identically zero; expansion orders are undefined")]
    DegenerateField,
    #[error("amplitude list is empty")]
    TooFewAmplitudes,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Constitutive parameters: elastic moduli `c1, c2, c3` and density `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticModuli {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub rho: f64,
}

impl ElasticModuli {
    pub fn new(c1: f64, c2: f64, c3: f64, rho: f64) -> Result<Self, EnergyError> {
        for (name, value) in [("c1", c1), ("c2", c2), ("c3", c3), ("rho", rho)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(EnergyError::NonPositive { name, value });
            }
        }
        Ok(ElasticModuli { c1, c2, c3, rho })
    }

    /// `ĉ1 = c1 + 2 c3`.
    pub fn hat_c1(&self) -> f64 {
        self.c1 + 2.0 * self.c3
    }

    /// `ĉ2 = c2 + c3`.
    pub fn hat_c2(&self) -> f64 {
        self.c2 + self.c3
    }

    /// Coefficient of `(div u)²` in the linearised energy, `4 ĉ1 / 3`.
    pub fn alpha(&self) -> f64 {
        4.0 * self.hat_c1() / 3.0
    }

    /// Coefficient of `|curl u|²` in the linearised energy, `2 ĉ2`.
    pub fn beta(&self) -> f64 {
        2.0 * self.hat_c2()
    }

    pub(crate) fn v1_weights(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub(crate) fn v2_weights(&self) -> [f64; 3] {
        [self.hat_c1(), self.hat_c2(), 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub term1: f64,
    pub term2: f64,
    pub term3: f64,
    pub kinetic: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    /// Potential terms with no kinetic part.
    fn potential(terms: [f64; 3]) -> Self {
        EnergyBreakdown {
            term1: terms[0],
            term2: terms[1],
            term3: terms[2],
            kinetic: 0.0,
            total: terms.iter().sum(),
        }
    }

    /// Action density integrated over the snapshot: potential minus kinetic.
    pub fn with_kinetic(self, kinetic: f64) -> Self {
        EnergyBreakdown {
            kinetic,
            total: self.term1 + self.term2 + self.term3 - kinetic,
            ..self
        }
    }
}

/// `[∫‖A⁽¹⁾‖², ∫‖A⁽²⁾‖², ∫‖A⁽³⁾‖²]`.
pub fn piece_integrals(bundle: &StrainBundle) -> [f64; 3] {
    bundle.norms_squared().map(|n| n.integrate())
}

pub fn potential_v1(o: &RotationField, m: &ElasticModuli) -> EnergyBreakdown {
    let ints = piece_integrals(&strain_bundle(o));
    let w = m.v1_weights();
    EnergyBreakdown::potential([0, 1, 2].map(|i| w[i] * ints[i]))
}

pub fn potential_v2(o: &RotationField, m: &ElasticModuli) -> f64 {
    let ints = piece_integrals(&strain_bundle(o));
    m.hat_c1() * ints[0] + m.hat_c2() * ints[1]
}

/// `ε_{ijk} ∂_i A⁽²⁾_{jk}` at every node.
pub fn divergence_term(bundle: &StrainBundle) -> ScalarField {
    let a2 = bundle.piece(2);
    let d = Axis::ALL.map(|axis| partial_or_zero(a2, axis));
    ScalarField::from_fn(*a2.grid(), |p| {
        let mut s = 0.0;
        for (i, di) in d.iter().enumerate() {
            let m = di.values()[p];
            for j in 0..3 {
                for k in 0..3 {
                    s += levi_civita(i, j, k) * m[(j, k)];
                }
            }
        }
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    /// `−2‖A⁽¹⁾‖² − ‖A⁽²⁾‖² + ‖A⁽³⁾‖² − 4 ε_{ijk} ∂_i A⁽²⁾_{jk}`.
    pub pointwise: ScalarField,
    pub integrated: f64,
    /// `∫ 4 ε_{ijk} ∂_i A⁽²⁾_{jk}` alone; vanishes on periodic domains.
    pub rhs_integrated: f64,
}

impl IdentityResidual {
    pub fn max_abs(&self) -> f64 {
        self.pointwise.max_abs()
    }
}

/// Residual of the flatness identity relating the three strain invariants
/// to a total derivative.
pub fn identity_residual(o: &RotationField) -> IdentityResidual {
    let bundle = strain_bundle(o);
    let [n1, n2, n3] = bundle.norms_squared();
    let rhs = divergence_term(&bundle).scaled(4.0);
    let pointwise = ScalarField::from_fn(*o.grid(), |p| {
        -2.0 * n1.values()[p] - n2.values()[p] + n3.values()[p] - rhs.values()[p]
    });
    IdentityResidual {
        integrated: pointwise.integrate(),
        rhs_integrated: rhs.integrate(),
        pointwise,
    }
}

/// Pointwise `‖(after − before)/dt‖²`.
pub fn kinetic_density(
    before: &RotationField,
    after: &RotationField,
    dt: f64,
) -> Result<ScalarField, EnergyError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(EnergyError::BadTimeStep(dt));
    }
    Ok(before
        .field()
        .zip_map(after.field(), |a, b| ((b - a) / dt).norm_squared())?)
}

/// `ρ ∫ trace(Ȯ Ȯᵀ)` with `Ȯ` the difference quotient of two frames `dt` apart.
pub fn kinetic_energy(
    before: &RotationField,
    after: &RotationField,
    dt: f64,
    rho: f64,
) -> Result<f64, EnergyError> {
    Ok(rho * kinetic_density(before, after, dt)?.integrate())
}

//! Rotation algebra on SO(3): the hat/vee duality between rotation vectors
//! and skew-symmetric matrices, the Rodrigues exponential, and its inverse.
//!
//! Conventions: `(star(u))_{ik} = ε_{ijk} u_j` with `ε_{123} = +1`, so
//!
//! ```text
//!            ⎛  0   -u_z   u_y ⎞
//! star(u) =  ⎜ u_z    0   -u_x ⎟
//!            ⎝-u_y   u_x    0  ⎠
//! ```
//!
//! and `rot_exp(u)` is the rotation by angle `‖u‖` about `u / ‖u‖`
//! (counter-clockwise for a right-handed frame).

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

/// Rotation vector (Lie-algebra coordinates).
pub type Vec3 = Vector3<f64>;
/// Plain 3×3 real matrix.
pub type Mat3 = Matrix3<f64>;

/// Below this angle the Rodrigues coefficients are evaluated by Taylor series.
pub const SMALL_ANGLE: f64 = 1e-4;

/// Tolerance used when validating orthogonality and skew-symmetry.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Angles at or above `π - LOG_BRANCH_MARGIN` are rejected by [`rot_log`].
pub const LOG_BRANCH_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum So3Error {
    #[error("matrix is not skew-symmetric (symmetric part {residual:e})")]
    NotSkew { residual: f64 },
    #[error("matrix is not a proper rotation ({reason})")]
    NotRotation { reason: String },
    #[error("rotation angle {angle} is too close to π for an unambiguous logarithm")]
    BranchAmbiguity { angle: f64 },
}

/// A skew-symmetric 3×3 matrix (`S + Sᵀ = 0` exactly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Skew(Mat3);

impl Skew {
    /// Validates and wraps a matrix; the stored value is the exact skew part.
    pub fn from_matrix(m: &Mat3) -> Result<Self, So3Error> {
        let sym = (m + m.transpose()) * 0.5;
        let residual = sym.abs().max();
        if residual > STRUCTURE_TOL * m.abs().max().max(1.0) {
            return Err(So3Error::NotSkew { residual });
        }
        Ok(Skew((m - m.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn vee(&self) -> Vec3 {
        Vec3::new(self.0[(2, 1)], self.0[(0, 2)], self.0[(1, 0)])
    }
}

/// A proper rotation matrix satisfying `RᵀR = I` and `det R = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Validates orthogonality and orientation within [`STRUCTURE_TOL`]
    /// (scaled by a small factor for data that went through text round trips).
    pub fn from_matrix(m: &Mat3) -> Result<Self, So3Error> {
        check_rotation(m, 1e3 * STRUCTURE_TOL)?;
        Ok(Rotation(*m))
    }

    /// Wraps a matrix that is a rotation by construction.
    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat3 {
        self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let sin_part = Skew((self.0 - self.0.transpose()) * 0.5).vee().norm();
        let cos_part = 0.5 * (self.0.trace() - 1.0);
        sin_part.atan2(cos_part)
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

pub(crate) fn check_rotation(m: &Mat3, tol: f64) -> Result<(), So3Error> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(So3Error::NotRotation {
            reason: "non-finite entry".into(),
        });
    }
    let orth = (m.transpose() * m - Mat3::identity()).norm();
    if orth > tol {
        return Err(So3Error::NotRotation {
            reason: format!("‖RᵀR − I‖ = {orth:e}"),
        });
    }
    let det = m.determinant();
    if (det - 1.0).abs() > tol {
        return Err(So3Error::NotRotation {
            reason: format!("det = {det}"),
        });
    }
    Ok(())
}

/// The skew matrix dual to `u`.
pub fn star(u: &Vec3) -> Skew {
    Skew(Mat3::new(
        0.0, -u.z, u.y, //
        u.z, 0.0, -u.x, //
        -u.y, u.x, 0.0,
    ))
}

/// Inverse of [`star`]; rejects matrices whose symmetric part is not negligible.
pub fn vee(s: &Mat3) -> Result<Vec3, So3Error> {
    Skew::from_matrix(s).map(|s| s.vee())
}

/// `sin θ / θ` and `(1 − cos θ) / θ²`.
fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 * (1.0 - t2 / 20.0),
            0.5 - t2 / 24.0 * (1.0 - t2 / 30.0),
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    }
}

/// Rodrigues exponential `exp(star(u))`.
pub fn rot_exp(u: &Vec3) -> Rotation {
    let theta = u.norm();
    let s = star(u).0;
    let (a, b) = rodrigues_coefficients(theta);
    Rotation(Mat3::identity() + s * a + s * s * b)
}

/// Left Jacobian of the exponential map: `∂/∂t exp(star(u + t e)) = star(J(u) e) exp(star(u))`.
pub fn left_jacobian(u: &Vec3) -> Mat3 {
    let theta = u.norm();
    let s = star(u).0;
    let (b, c) = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (0.5 - t2 / 24.0 * (1.0 - t2 / 30.0), 1.0 / 6.0 - t2 / 120.0 * (1.0 - t2 / 42.0))
    } else {
        let t2 = theta * theta;
        ((1.0 - theta.cos()) / t2, (theta - theta.sin()) / (t2 * theta))
    };
    Mat3::identity() + s * b + s * s * c
}

/// Partial derivatives `∂ exp(star(u)) / ∂u_p` for `p = 0, 1, 2`.
pub fn exp_derivatives(u: &Vec3) -> [Mat3; 3] {
    let o = rot_exp(u).0;
    let jl = left_jacobian(u);
    [0, 1, 2].map(|p| star(&jl.column(p).into_owned()).0 * o)
}

/// Principal logarithm for rotations with angle below `π − 1e-6`.
pub fn rot_log(r: &Rotation) -> Result<Vec3, So3Error> {
    let m = r.0;
    let skew_axis = Skew((m - m.transpose()) * 0.5).vee();
    let sin_theta = skew_axis.norm();
    let cos_theta = 0.5 * (m.trace() - 1.0);
    let theta = sin_theta.atan2(cos_theta);
    if theta >= PI - LOG_BRANCH_MARGIN {
        return Err(So3Error::BranchAmbiguity { angle: theta });
    }
    if theta < 0.75 * PI {
        let scale = if theta < SMALL_ANGLE {
            let t2 = theta * theta;
            1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
        } else {
            theta / sin_theta
        };
        return Ok(skew_axis * scale);
    }
    // Near π: nnᵀ = (R + Rᵀ − 2 cos θ I) / (2 (1 − cos θ)).
    let outer = ((m + m.transpose()) * 0.5 - Mat3::identity() * cos_theta) / (1.0 - cos_theta);
    let (col, _) = (0..3)
        .map(|i| (i, outer[(i, i)]))
        .fold((0, f64::MIN), |best, cur| if cur.1 > best.1 { cur } else { best });
    let mut axis = outer.column(col).into_owned();
    axis /= axis.norm();
    if axis.dot(&skew_axis) < 0.0 {
        axis = -axis;
    }
    Ok(axis * theta)
}

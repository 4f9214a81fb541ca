//! Strain measures of a rotation field.
//!
//! - contortion `K_{ijk} = O_{im} ∂_j O_{km}` (skew in `i, k`),
//! - strain matrix `A_{mn} = ε_{mjl} K_{jnl}`,
//! - the irreducible split `A = A⁽¹⁾ + A⁽²⁾ + A⁽³⁾` into trace, skew and
//!   trace-free symmetric pieces,
//! - torsion `T_{jkl} = K_{jkl} − K_{jlk}` and its contraction to a 3×3 matrix.

use crate::grid::{partial_or_zero, Axis, Field, GridSpec, Matrix3Field, RotationField, ScalarField};
use crate::so3::Mat3;
use serde::Serialize;

/// Relative tolerance for declaring a torsion/strain ratio constant.
pub const RATIO_TOL: f64 = 1e-8;

/// Levi-Civita symbol with `ε₀₁₂ = +1`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Dense rank-3 tensor with 27 components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor3(pub [[[f64; 3]; 3]; 3]);

impl Tensor3 {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0[i][j][k]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub type ContortionField = Field<Tensor3>;
pub type TorsionField = Field<Tensor3>;

/// Contortion of a rotation field.
///
/// The discrete product `O (∂_j O)ᵀ` is only skew up to O(h²); it is
/// projected onto its skew part so that `K_{ijk} = −K_{kji}` holds exactly.
pub fn contortion(o: &RotationField) -> ContortionField {
    let f = o.field();
    let d = Axis::ALL.map(|a| partial_or_zero(f, a));
    Field::from_fn(*f.grid(), |p| {
        let op = f.values()[p];
        let mut k = Tensor3::default();
        for (j, dj) in d.iter().enumerate() {
            let raw = op * dj.values()[p].transpose();
            let skew = (raw - raw.transpose()) * 0.5;
            for i in 0..3 {
                for l in 0..3 {
                    k.0[i][j][l] = skew[(i, l)];
                }
            }
        }
        k
    })
}

/// `A_{mn} = ε_{mjl} K_{jnl}`.
pub fn strain_matrix_at(k: &Tensor3) -> Mat3 {
    let mut a = Mat3::zeros();
    for m in 0..3 {
        for n in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    let e = levi_civita(m, j, l);
                    if e != 0.0 {
                        s += e * k.get(j, n, l);
                    }
                }
            }
            a[(m, n)] = s;
        }
    }
    a
}

pub fn strain_matrix(k: &ContortionField) -> Matrix3Field {
    k.map(strain_matrix_at)
}

/// Trace, skew and trace-free symmetric parts of a 3×3 matrix.
pub fn irreducible_parts(a: &Mat3) -> [Mat3; 3] {
    let a1 = Mat3::identity() * (a.trace() / 3.0);
    let a2 = (a - a.transpose()) * 0.5;
    let a3 = (a + a.transpose()) * 0.5 - a1;
    [a1, a2, a3]
}

/// A strain matrix field together with its three irreducible pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainBundle {
    a: Matrix3Field,
    pieces: [Matrix3Field; 3],
}

impl StrainBundle {
    pub fn a(&self) -> &Matrix3Field {
        &self.a
    }

    /// Piece `i ∈ {1, 2, 3}`.
    pub fn piece(&self, i: usize) -> &Matrix3Field {
        &self.pieces[i - 1]
    }

    /// Pointwise `‖A⁽ⁱ⁾‖²` (Frobenius) for the three pieces.
    pub fn norms_squared(&self) -> [ScalarField; 3] {
        [0, 1, 2].map(|i| self.pieces[i].map(|m| m.norm_squared()))
    }

    pub fn grid(&self) -> &GridSpec {
        self.a.grid()
    }
}

pub fn decompose(a: &Matrix3Field) -> StrainBundle {
    let parts = a.map(irreducible_parts);
    let pieces = [0, 1, 2].map(|i| parts.map(|p| p[i]));
    StrainBundle {
        a: a.clone(),
        pieces,
    }
}

/// Contortion → strain matrix → decomposition in one call.
pub fn strain_bundle(o: &RotationField) -> StrainBundle {
    decompose(&strain_matrix(&contortion(o)))
}

pub fn torsion(k: &ContortionField) -> TorsionField {
    k.map(|k| {
        let mut t = Tensor3::default();
        for j in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    t.0[j][a][b] = k.get(j, a, b) - k.get(j, b, a);
                }
            }
        }
        t
    })
}

/// Candidate ways to contract the torsion tensor with `ε` into a matrix `B_{mn}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorsionPairing {
    /// `ε_{mjl} T_{jnl}` (the same pattern as the strain matrix).
    Jnl,
    /// `ε_{mjl} T_{njl}`.
    Njl,
    /// `ε_{mjl} T_{jln}`.
    Jln,
}

impl TorsionPairing {
    pub const ALL: [TorsionPairing; 3] = [TorsionPairing::Jnl, TorsionPairing::Njl, TorsionPairing::Jln];

    pub fn contract(self, t: &Tensor3) -> Mat3 {
        let mut b = Mat3::zeros();
        for m in 0..3 {
            for n in 0..3 {
                let mut s = 0.0;
                for j in 0..3 {
                    for l in 0..3 {
                        let e = levi_civita(m, j, l);
                        if e == 0.0 {
                            continue;
                        }
                        s += e * match self {
                            TorsionPairing::Jnl => t.get(j, n, l),
                            TorsionPairing::Njl => t.get(n, j, l),
                            TorsionPairing::Jln => t.get(j, l, n),
                        };
                    }
                }
                b[(m, n)] = s;
            }
        }
        b
    }
}

/// Ratios `B⁽ⁱ⁾ / A⁽ⁱ⁾` for one pairing, with their worst pointwise deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingFit {
    pub pairing: TorsionPairing,
    /// `None` when both pieces vanish identically (ratio undetermined).
    pub ratios: [Option<f64>; 3],
    /// `max ‖B⁽ⁱ⁾ − r A⁽ⁱ⁾‖ / max ‖A⁽ⁱ⁾‖` over the grid.
    pub deviation: [f64; 3],
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorsionReport {
    pub fits: Vec<PairingFit>,
    /// First pairing with constant ratios, preferring one matching `reference`.
    pub chosen: Option<TorsionPairing>,
    /// Target ratios `(T^ax, T^vec, T^ten) / (A⁽¹⁾, A⁽²⁾, A⁽³⁾)`.
    pub reference: [f64; 3],
    pub matches_reference: bool,
}

impl TorsionReport {
    /// True when no pairing reproduces the reference ratios.
    pub fn convention_mismatch(&self) -> bool {
        !self.matches_reference
    }

    pub fn chosen_fit(&self) -> Option<&PairingFit> {
        self.chosen
            .and_then(|c| self.fits.iter().find(|f| f.pairing == c))
    }
}

pub const TORSION_REFERENCE_RATIOS: [f64; 3] = [-1.0, -0.5, 0.5];

fn fit_ratio(a: &[Mat3], b: &[Mat3]) -> (Option<f64>, f64) {
    let aa: f64 = a.iter().map(|m| m.norm_squared()).sum();
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x.dot(y)).sum();
    let a_max = a.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let b_max = b.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let scale = a_max.max(b_max);
    if scale < 1e-300 {
        return (None, 0.0);
    }
    if a_max <= 1e-14 * scale {
        return (None, f64::INFINITY);
    }
    let r = ab / aa;
    let dev = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((y - x * r).norm()));
    (Some(r), dev / scale)
}

fn ratios_match(ratios: &[Option<f64>; 3], reference: &[f64; 3]) -> bool {
    ratios
        .iter()
        .zip(reference)
        .all(|(r, t)| r.is_none_or(|r| (r - t).abs() <= RATIO_TOL * t.abs().max(1.0)))
}

/// Pointwise comparison of the torsion-based pieces with the strain pieces
/// for every candidate pairing.
pub fn torsion_equivalence_report(o: &RotationField) -> TorsionReport {
    let k = contortion(o);
    let bundle = decompose(&strain_matrix(&k));
    let t = torsion(&k);
    let reference = TORSION_REFERENCE_RATIOS;
    let fits: Vec<PairingFit> = TorsionPairing::ALL
        .iter()
        .map(|&pairing| {
            let b = decompose(&t.map(|t| pairing.contract(t)));
            let mut ratios = [None; 3];
            let mut deviation = [0.0; 3];
            for i in 0..3 {
                let (r, d) = fit_ratio(bundle.pieces[i].values(), b.pieces[i].values());
                ratios[i] = r;
                deviation[i] = d;
            }
            PairingFit {
                pairing,
                ratios,
                deviation,
                constant: deviation.iter().all(|d| *d <= RATIO_TOL),
            }
        })
        .collect();
    let matching = fits
        .iter()
        .find(|f| f.constant && ratios_match(&f.ratios, &reference));
    let chosen = matching
        .or_else(|| fits.iter().find(|f| f.constant))
        .map(|f| f.pairing);
    TorsionReport {
        chosen,
        reference,
        matches_reference: matching.is_some(),
        fits,
    }
}

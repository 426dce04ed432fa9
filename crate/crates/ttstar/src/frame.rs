//! Frame-level data for tt*-structures and the checks that make a matrix
//! triple one.
//!
//! A frame snapshot of a tt*-bundle is the triple `(eta, g, phi)` of matrices
//! of the holomorphic symmetric pairing, the Hermitian metric, and the Higgs
//! field coefficient in a fixed holomorphic frame.  Conventions:
//!
//! * `eta(a, b) = a^T E b` is bilinear and symmetric,
//! * `g(a, b) = a^H G b` is conjugate-linear in the first slot and
//!   positive-definite Hermitian,
//! * `phi` is self-adjoint with respect to `eta`: `P^T E = E P`,
//! * the induced conjugate-linear operator `kappa(v) = K conj(v)` defined by
//!   `g(a, b) = eta(kappa(a), b)` must square to the identity.
//!
//! The canonical Toda frame of rank `n + 1` with index `l` has
//! `eta_{ij} = 1` iff `i + j = l - 1 (mod n+1)`, `g = diag(e^{w_j})`, and
//! `phi` acting as `e_j -> e_{j+1 (mod n+1)}`; `kappa^2 = Id` then pins the
//! exponents to the anti-symmetry condition `w_j + w_{l-1-j} = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymmetry::antisymmetry_partner;

/// Tolerance used by the builders for exact-data preconditions.
pub const BUILD_TOL: f64 = 1e-12;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("matrix dimension mismatch: expected {expected}x{expected}, got {got_rows}x{got_cols}")]
    DimensionMismatch {
        expected: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("index l = {l} outside 0..={n}")]
    IndexOutOfRange { l: usize, n: usize },
    #[error("exponent tuple has length {got}, expected {expected}")]
    BadTupleLength { expected: usize, got: usize },
    #[error("anti-symmetry violated at j = {j}: w_j + w_partner = {sum:e}")]
    AntiSymmetryViolated { j: usize, sum: f64 },
    #[error("eta is singular or too close to singular")]
    SingularEta,
    #[error("transform matrix is not invertible")]
    SingularTransform,
}

/// Matrix data of one tt*-frame snapshot.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FrameDto", into = "FrameDto")]
pub struct FrameStructure {
    pub n: usize,
    pub eta: CMatrix,
    pub g: CMatrix,
    pub phi: CMatrix,
}

impl FrameStructure {
    /// Wraps raw matrices after checking that each is `(n+1) x (n+1)`.
    pub fn new(n: usize, eta: CMatrix, g: CMatrix, phi: CMatrix) -> Result<Self, FrameError> {
        let dim = n + 1;
        for m in [&eta, &g, &phi] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(FrameError::DimensionMismatch {
                    expected: dim,
                    got_rows: m.nrows(),
                    got_cols: m.ncols(),
                });
            }
        }
        Ok(FrameStructure { n, eta, g, phi })
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }
}

/// The canonical `eta` pattern: ones where `i + j = l - 1 (mod n+1)`.
pub fn eta_pattern(n: usize, l: usize) -> CMatrix {
    let dim = n + 1;
    let target = (l + n) % dim;
    DMatrix::from_fn(dim, dim, |i, j| {
        if (i + j) % dim == target {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// The cyclic Higgs coefficient `e_j -> e_{j+1 (mod n+1)}`.
pub fn cyclic_phi(n: usize) -> CMatrix {
    let dim = n + 1;
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == (j + 1) % dim {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Assembles the canonical Toda frame of rank `n + 1`, index `l`, exponents `w`.
///
/// Fails if `l > n`, if `w` has the wrong length, or if `w` violates the
/// anti-symmetry condition `w_j + w_{(l-1-j) mod n+1} = 0` beyond
/// [`BUILD_TOL`].
pub fn build_toda_frame(n: usize, l: usize, w: &[f64]) -> Result<FrameStructure, FrameError> {
    let dim = n + 1;
    if l > n {
        return Err(FrameError::IndexOutOfRange { l, n });
    }
    if w.len() != dim {
        return Err(FrameError::BadTupleLength {
            expected: dim,
            got: w.len(),
        });
    }
    for j in 0..dim {
        let sum = w[j] + w[antisymmetry_partner(n, l, j)];
        if sum.abs() > BUILD_TOL {
            return Err(FrameError::AntiSymmetryViolated { j, sum });
        }
    }
    let g = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(w[i].exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(FrameStructure {
        n,
        eta: eta_pattern(n, l),
        g,
        phi: cyclic_phi(n),
    })
}

/// Largest entry modulus; the residual norm used throughout.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// One named validity check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

/// Outcome of [`validate_ttstar_frame`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<CheckResult>,
}

impl ValidityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the definitional checks on a frame snapshot.
///
/// Equality checks pass when the max-entry residual is below `tol`;
/// `eta_nondegenerate` passes when `|det eta| > tol` and
/// `g_positive_definite` when the smallest eigenvalue of the Hermitian part
/// of `g` is positive (the residual reported is that eigenvalue).
pub fn validate_ttstar_frame(s: &FrameStructure, tol: f64) -> ValidityReport {
    let dim = s.dim();
    let id = CMatrix::identity(dim, dim);
    let mut checks = Vec::new();

    let sym = max_abs(&(&s.eta - s.eta.transpose()));
    checks.push(CheckResult {
        name: "eta_symmetric".into(),
        residual: sym,
        passed: sym < tol,
    });

    let det = s.eta.clone().determinant().norm();
    checks.push(CheckResult {
        name: "eta_nondegenerate".into(),
        residual: det,
        passed: det > tol,
    });

    let herm = max_abs(&(&s.g - s.g.adjoint()));
    checks.push(CheckResult {
        name: "g_hermitian".into(),
        residual: herm,
        passed: herm < tol,
    });

    let hermitian_part = (&s.g + s.g.adjoint()).scale(0.5);
    let min_eig = hermitian_part
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    checks.push(CheckResult {
        name: "g_positive_definite".into(),
        residual: min_eig,
        passed: min_eig > 0.0,
    });

    let selfadj = max_abs(&(s.phi.transpose() * &s.eta - &s.eta * &s.phi));
    checks.push(CheckResult {
        name: "phi_self_adjoint".into(),
        residual: selfadj,
        passed: selfadj < tol,
    });

    let invol = match compute_kappa(s) {
        Ok(kappa) => max_abs(&(&kappa.matrix * kappa.matrix.map(|z| z.conj()) - id)),
        Err(_) => f64::INFINITY,
    };
    checks.push(CheckResult {
        name: "kappa_involution".into(),
        residual: invol,
        passed: invol < tol,
    });

    ValidityReport { checks }
}

/// The conjugate-linear operator induced by `(eta, g)` in frame coordinates.
#[derive(Clone, Debug)]
pub struct KappaMatrix {
    pub matrix: CMatrix,
}

impl KappaMatrix {
    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v.map(|z| z.conj())
    }

    /// Max-entry residual of `kappa^2 = Id`.
    pub fn involution_residual(&self) -> f64 {
        let dim = self.matrix.nrows();
        max_abs(&(&self.matrix * self.matrix.map(|z| z.conj()) - CMatrix::identity(dim, dim)))
    }
}

/// Solves `eta(kappa(a), b) = g(a, b)` for the matrix of `kappa`,
/// i.e. `K = eta^{-1} g^T`.
pub fn compute_kappa(s: &FrameStructure) -> Result<KappaMatrix, FrameError> {
    let lu = s.eta.clone().lu();
    let matrix = lu.solve(&s.g.transpose()).ok_or(FrameError::SingularEta)?;
    Ok(KappaMatrix { matrix })
}

/// Whether `g` is invariant under the diagonal cyclic-group action
/// `e_j -> omega^j e_j`, `omega = exp(2 pi i/(n+1))`; equivalently whether
/// `g` is diagonal to within `tol`.
pub fn check_zn_symmetry(s: &FrameStructure, tol: f64) -> bool {
    let dim = s.dim();
    let omega = 2.0 * std::f64::consts::PI / dim as f64;
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let twist = Complex64::from_polar(1.0, omega * (j as f64 - i as f64));
            worst = worst.max(((twist - 1.0) * s.g[(i, j)]).norm());
        }
    }
    worst < tol
}

/// Checks that `t` intertwines two frame snapshots as an isomorphism:
/// `t^T eta_2 t = eta_1`, `t^H g_2 t = g_1`, `t phi_1 = phi_2 t`.
pub fn verify_isomorphism(
    t: &CMatrix,
    s1: &FrameStructure,
    s2: &FrameStructure,
    tol: f64,
) -> Result<bool, FrameError> {
    if s1.dim() != s2.dim() || t.nrows() != s1.dim() || t.ncols() != s1.dim() {
        return Err(FrameError::DimensionMismatch {
            expected: s1.dim(),
            got_rows: t.nrows(),
            got_cols: t.ncols(),
        });
    }
    if t.clone().lu().try_inverse().is_none() {
        return Err(FrameError::SingularTransform);
    }
    let r_eta = max_abs(&(t.transpose() * &s2.eta * t - &s1.eta));
    let r_g = max_abs(&(t.adjoint() * &s2.g * t - &s1.g));
    let r_phi = max_abs(&(t * &s1.phi - &s2.phi * t));
    Ok(r_eta < tol && r_g < tol && r_phi < tol)
}

#[derive(Serialize, Deserialize, Clone)]
struct ComplexDto {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize, Clone)]
struct FrameDto {
    n: usize,
    eta: Vec<Vec<ComplexDto>>,
    g: Vec<Vec<ComplexDto>>,
    phi: Vec<Vec<ComplexDto>>,
}

fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<ComplexDto>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| ComplexDto {
                    re: m[(i, j)].re,
                    im: m[(i, j)].im,
                })
                .collect()
        })
        .collect()
}

fn rows_to_matrix(rows: &[Vec<ComplexDto>], dim: usize, name: &str) -> Result<CMatrix, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("field '{name}' must be a {dim}x{dim} matrix"));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(rows[i][j].re, rows[i][j].im)
    }))
}

impl From<FrameStructure> for FrameDto {
    fn from(s: FrameStructure) -> FrameDto {
        FrameDto {
            n: s.n,
            eta: matrix_to_rows(&s.eta),
            g: matrix_to_rows(&s.g),
            phi: matrix_to_rows(&s.phi),
        }
    }
}

impl TryFrom<FrameDto> for FrameStructure {
    type Error = String;

    fn try_from(dto: FrameDto) -> Result<FrameStructure, String> {
        let dim = dto.n + 1;
        Ok(FrameStructure {
            n: dto.n,
            eta: rows_to_matrix(&dto.eta, dim, "eta")?,
            g: rows_to_matrix(&dto.g, dim, "g")?,
            phi: rows_to_matrix(&dto.phi, dim, "phi")?,
        })
    }
}

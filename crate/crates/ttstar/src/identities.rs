//! Exact verification of the structural identities behind the canonical
//! reduction.
//!
//! Everything here runs in the cyclotomic field of order `2(n+1)`, so each
//! identity is checked by exact rational arithmetic: a check either holds
//! on the nose or it does not.  To stay inside the field the frame change
//! is rescaled by `sqrt(n+1)`, which turns the unitary `L` into the matrix
//! `Lhat = sqrt(n+1) L` with entries that are roots of unity; all
//! identities are stated for `Lhat` with the scale factor carried on the
//! other side.
//!
//! Floating-point twins of the same identities are provided for
//! cross-validation of the numeric frame-change code.

use std::sync::Arc;

use num::{BigInt, BigRational};
use serde::Serialize;

use crate::classify::{determine_l, DftFrameChange, ShiftOperator, Sign};
use crate::cyclotomic::{CycField, CycMatrix};
use crate::frame::{max_abs, CheckResult};

/// Outcome of one exact identity.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

/// All exact identities for one rank and twist sign.
#[derive(Clone, Debug, Serialize)]
pub struct IdentitySuite {
    pub n: usize,
    pub epsilon: i32,
    pub checks: Vec<IdentityCheck>,
}

impl IdentitySuite {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn exact_shift(field: &Arc<CycField>, dim: usize, epsilon: Sign) -> CycMatrix {
    CycMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            field.one()
        } else if i == dim - 1 && j == 0 {
            match epsilon {
                Sign::Plus => field.one(),
                Sign::Minus => field.one().neg(),
            }
        } else {
            field.zero()
        }
    })
}

fn exact_cyclic(field: &Arc<CycField>, dim: usize) -> CycMatrix {
    CycMatrix::from_fn(dim, dim, |i, j| {
        if i == (j + 1) % dim {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// `Lhat = sqrt(n+1) L`: entries `omega^{jk}`, pre-twisted by `zeta^{-j}`
/// when `epsilon = -1` (`zeta` the primitive root of order `2(n+1)`).
fn exact_frame_change(field: &Arc<CycField>, dim: usize, epsilon: Sign) -> CycMatrix {
    CycMatrix::from_fn(dim, dim, |j, k| {
        let mut exponent = 2 * (j as i64) * (k as i64);
        if epsilon == Sign::Minus {
            exponent -= j as i64;
        }
        field.zeta(exponent)
    })
}

fn exact_twist_diagonal(field: &Arc<CycField>, dim: usize, epsilon: Sign) -> CycMatrix {
    CycMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            return field.zero();
        }
        let mut exponent = 2 * i as i64;
        if epsilon == Sign::Minus {
            exponent -= 1;
        }
        field.zeta(exponent)
    })
}

fn exact_eta_pattern(field: &Arc<CycField>, dim: usize, l: usize) -> CycMatrix {
    let n = dim - 1;
    CycMatrix::from_fn(dim, dim, |i, j| {
        if (i + j) % dim == (l + n) % dim {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// Exact identities for the shift operator and Fourier frame change.
///
/// With `dim = n + 1`, `ell = determine_l(epsilon)` and the scaled frame
/// change `Lhat`:
///
/// * `shift_power`: `T^dim = epsilon I`,
/// * `shift_diagonalization`: `T Lhat = Lhat Dtw` with the twisted
///   eigenvalue diagonal `Dtw`,
/// * `frame_change_unitary`: `Lhat Lhat^* = dim I`,
/// * `cyclic_conjugation`: `D Lhat = Lhat C` for `D = diag(omega^k)`,
/// * `eta_transport`: the bilinear Gram `(Lhat S)^T (Lhat S) = dim E_ell`,
///   where `S` is the extra cyclic re-indexing used when `epsilon = -1`.
pub fn exact_identity_suite(n: usize, epsilon: Sign) -> IdentitySuite {
    let dim = n + 1;
    let field = CycField::new(2 * dim);
    let t = exact_shift(&field, dim, epsilon);
    let c = exact_cyclic(&field, dim);
    let lhat = exact_frame_change(&field, dim, epsilon);
    let dtw = exact_twist_diagonal(&field, dim, epsilon);
    let d = CycMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            field.zeta(2 * i as i64)
        } else {
            field.zero()
        }
    });
    let dim_rational = BigRational::from_integer(BigInt::from(dim as i64));
    let scaled_identity = CycMatrix::identity(&field, dim).scale_rational(&dim_rational);

    let mut checks = Vec::new();

    let power = t.pow(dim as u32);
    let expected_power = match epsilon {
        Sign::Plus => CycMatrix::identity(&field, dim),
        Sign::Minus => CycMatrix::identity(&field, dim).scale(&field.one().neg()),
    };
    checks.push(IdentityCheck {
        name: "shift_power".into(),
        holds: power == expected_power,
    });

    checks.push(IdentityCheck {
        name: "shift_diagonalization".into(),
        holds: t.mul(&lhat) == lhat.mul(&dtw),
    });

    checks.push(IdentityCheck {
        name: "frame_change_unitary".into(),
        holds: lhat.mul(&lhat.conj_transpose()) == scaled_identity,
    });

    checks.push(IdentityCheck {
        name: "cyclic_conjugation".into(),
        holds: d.mul(&lhat) == lhat.mul(&c),
    });

    let full = match epsilon {
        Sign::Plus => lhat.clone(),
        Sign::Minus => lhat.mul(&c),
    };
    let ell = determine_l(epsilon);
    let gram = full.transpose().mul(&full);
    let expected_gram = exact_eta_pattern(&field, dim, ell).scale_rational(&dim_rational);
    checks.push(IdentityCheck {
        name: "eta_transport".into(),
        holds: gram == expected_gram,
    });

    IdentitySuite {
        n,
        epsilon: epsilon.as_int(),
        checks,
    }
}

/// Exact identities for the diagonal twist automorphism at index `l`.
///
/// The diagonal `T_l = diag(zeta^{2j+1-l})` must preserve the pairing
/// pattern `E_l`, have unimodular entries, and intertwine the cyclic
/// Higgs coefficient with its `omega`-multiple: `T_l C = omega C T_l`.
pub fn exact_twist_suite(n: usize, l: usize) -> IdentitySuite {
    assert!(l <= n, "index l out of range");
    let dim = n + 1;
    let field = CycField::new(2 * dim);
    let c = exact_cyclic(&field, dim);
    let twist = CycMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            field.zeta(2 * i as i64 + 1 - l as i64)
        } else {
            field.zero()
        }
    });
    let eta = exact_eta_pattern(&field, dim, l);

    let mut checks = Vec::new();
    checks.push(IdentityCheck {
        name: "twist_preserves_eta".into(),
        holds: twist.transpose().mul(&eta).mul(&twist) == eta,
    });
    let unimodular = (0..dim).all(|j| {
        let t = field.zeta(2 * j as i64 + 1 - l as i64);
        t.conj().mul(&t) == field.one()
    });
    checks.push(IdentityCheck {
        name: "twist_unimodular".into(),
        holds: unimodular,
    });
    let omega_c = c.scale(&field.zeta(2));
    checks.push(IdentityCheck {
        name: "twist_commutation".into(),
        holds: twist.mul(&c) == omega_c.mul(&twist),
    });

    IdentitySuite {
        n,
        epsilon: if l % 2 == 0 { -1 } else { 1 },
        checks,
    }
}

/// Floating-point twins of [`exact_identity_suite`], evaluated with the
/// numeric frame-change code and reported as residuals at `tol`.
pub fn float_identity_suite(n: usize, epsilon: Sign, tol: f64) -> Vec<CheckResult> {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    let dim = n + 1;
    let shift = ShiftOperator::new(n, epsilon);
    let dft = DftFrameChange::new(n, epsilon);
    let l = &dft.matrix;
    let mut checks = Vec::new();

    let mut power = shift.matrix.clone();
    for _ in 1..dim {
        power = &power * &shift.matrix;
    }
    let expected = DMatrix::identity(dim, dim) * Complex64::new(epsilon.value(), 0.0);
    let r = max_abs(&(power - expected));
    checks.push(CheckResult {
        name: "shift_power".into(),
        residual: r,
        passed: r < tol,
    });

    let r = max_abs(&(&shift.matrix * l - l * dft.twist_diagonal()));
    checks.push(CheckResult {
        name: "shift_diagonalization".into(),
        residual: r,
        passed: r < tol,
    });

    let r = max_abs(&(l.adjoint() * l - DMatrix::identity(dim, dim)));
    checks.push(CheckResult {
        name: "frame_change_unitary".into(),
        residual: r,
        passed: r < tol,
    });

    let d = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / dim as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let r = max_abs(&(d * l - l * crate::frame::cyclic_phi(n)));
    checks.push(CheckResult {
        name: "cyclic_conjugation".into(),
        residual: r,
        passed: r < tol,
    });

    let full = match epsilon {
        Sign::Plus => l.clone(),
        Sign::Minus => l * crate::frame::cyclic_phi(n),
    };
    let ell = determine_l(epsilon);
    let r = max_abs(&(full.transpose() * &full - crate::frame::eta_pattern(n, ell)));
    checks.push(CheckResult {
        name: "eta_transport".into(),
        residual: r,
        passed: r < tol,
    });

    checks
}

//! Detection of cyclic fixed points and reduction to the canonical Toda
//! frame.
//!
//! A frame snapshot is a fixed point of simultaneous `omega`-rescaling of
//! the Higgs field (`omega = exp(2 pi i/(n+1))`) exactly when it admits a
//! frame in which `eta`, `g`, `phi` take the canonical Toda form.  The
//! reduction here follows the constructive route:
//!
//! 1. certify that `phi` has the simple eigenvalue cycle
//!    `u_0, u_0 omega, ..., u_0 omega^n` and extract eigenvectors through
//!    Lagrange projectors (no general eigensolver, so the same procedure
//!    works verbatim in exact arithmetic),
//! 2. normalize the eigenvectors against `eta`,
//! 3. solve the `+-1` sign relations imposed on the metric Gram matrix by
//!    the twist automorphism, preferring the sign `epsilon = -1` whenever
//!    both are achievable,
//! 4. rotate into w-coordinates with the discrete Fourier frame change.
//!
//! The final matrices are verified against the canonical patterns; the
//! reported residual makes the certificate checkable by the caller.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymmetry::{antisymmetry_partner, canonical_rotation};
use crate::frame::{
    cyclic_phi, eta_pattern, max_abs, validate_ttstar_frame, CMatrix, CVector, FrameStructure,
};

/// Projector traces must sit this close to one for the eigenvalue cycle to
/// count as simple.
const PROJECTOR_TRACE_TOL: f64 = 1e-6;

/// Minimum modulus of `eta(v, v)` on a unit eigenvector before the
/// eta-normalization is considered degenerate.
const ETA_NULL_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("input is not a valid tt*-frame; failed checks: {}", failed.join(", "))]
    InvalidInput { failed: Vec<String> },
    #[error("phi^(n+1) is not a nonzero scalar: {reason}")]
    NoScalarPower { reason: String },
    #[error("phi eigenvalues do not form a simple full cycle (projector {k} has trace {trace})")]
    NotSimpleCycle { k: usize, trace: Complex64 },
    #[error("eta degenerates on the eigenline of omega^{k}: |eta(v, v)| = {value:e}")]
    EtaDegenerateEigenvector { k: usize, value: f64 },
    #[error("structure is not a cyclic fixed point: {reason}")]
    NotFixedPoint { reason: String },
}

/// Sign of the `(n+1)`-st power of the twist automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_int(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// The anti-symmetry index selected by the sign of the twist power:
/// `epsilon = -1` gives `l = 0`, `epsilon = +1` gives `l = 1`.
pub fn determine_l(epsilon: Sign) -> usize {
    match epsilon {
        Sign::Minus => 0,
        Sign::Plus => 1,
    }
}

fn unit_root(dim: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(dim as i64);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / dim as f64)
}

/// The cyclic shift `tau_j -> tau_{j-1}` with sign `epsilon` closing the
/// wrap-around: ones on the superdiagonal, `epsilon` in the corner `(n, 0)`.
#[derive(Clone, Debug)]
pub struct ShiftOperator {
    pub n: usize,
    pub epsilon: Sign,
    pub matrix: CMatrix,
}

impl ShiftOperator {
    pub fn new(n: usize, epsilon: Sign) -> ShiftOperator {
        let dim = n + 1;
        let matrix = DMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                Complex64::new(1.0, 0.0)
            } else if i == n && j == 0 {
                Complex64::new(epsilon.value(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        ShiftOperator { n, epsilon, matrix }
    }
}

/// The discrete Fourier frame change diagonalizing the shift operator.
///
/// For `epsilon = +1` this is the plain DFT `L_{jk} = omega^{jk}/sqrt(n+1)`;
/// for `epsilon = -1` each row is pre-twisted by `omega^{-j/2}`.  In both
/// cases `L` is unitary, `L^{-1} T L` is diagonal, and `L^{-1} D L` is the
/// cyclic permutation, where `D = diag(1, omega, ..., omega^n)`.
#[derive(Clone, Debug)]
pub struct DftFrameChange {
    pub n: usize,
    pub epsilon: Sign,
    pub matrix: CMatrix,
}

impl DftFrameChange {
    pub fn new(n: usize, epsilon: Sign) -> DftFrameChange {
        let dim = n + 1;
        let scale = 1.0 / (dim as f64).sqrt();
        let half_angle = std::f64::consts::PI / dim as f64;
        let matrix = DMatrix::from_fn(dim, dim, |j, k| {
            let base = unit_root(dim, (j * k) as i64).scale(scale);
            match epsilon {
                Sign::Plus => base,
                Sign::Minus => Complex64::from_polar(1.0, -half_angle * j as f64) * base,
            }
        });
        DftFrameChange { n, epsilon, matrix }
    }

    /// The diagonal that conjugating the shift operator through `L` must
    /// produce: `D` for `epsilon = +1`, `omega^{-1/2} D` for `epsilon = -1`.
    pub fn twist_diagonal(&self) -> CMatrix {
        let dim = self.n + 1;
        let half = match self.epsilon {
            Sign::Plus => Complex64::new(1.0, 0.0),
            Sign::Minus => Complex64::from_polar(1.0, -std::f64::consts::PI / dim as f64),
        };
        DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                half * unit_root(dim, i as i64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Certified simple eigenvalue cycle of a Higgs coefficient.
#[derive(Clone, Debug)]
pub struct PhiCycle {
    /// Base eigenvalue, the `(n+1)`-st root of `tr(phi^{n+1})/(n+1)` with
    /// smallest non-negative argument.
    pub u0: Complex64,
    /// Unit eigenvectors; entry `k` belongs to eigenvalue `u0 omega^k`.
    pub eigenvectors: Vec<CVector>,
}

/// Certifies that the eigenvalues of `phi` form the simple cycle
/// `u0, u0 omega, ..., u0 omega^n` and extracts one eigenvector per line.
///
/// `phi^{n+1}` must be a nonzero multiple of the identity (relative
/// residual below `tol`), and every Lagrange projector must have unit
/// trace, which certifies one-dimensional eigenspaces over the full cycle.
pub fn phi_eigenvalue_cycle(phi: &CMatrix, tol: f64) -> Result<PhiCycle, ClassifyError> {
    let dim = phi.nrows();
    assert_eq!(dim, phi.ncols(), "phi must be square");
    let mut power = phi.clone();
    for _ in 1..dim {
        power = &power * phi;
    }
    let c = power.trace() / dim as f64;
    let scale = max_abs(&power).max(c.norm());
    if scale == 0.0 || c.norm() <= tol * scale {
        return Err(ClassifyError::NoScalarPower {
            reason: "trace vanishes (phi is nilpotent or has a degenerate cycle)".into(),
        });
    }
    let id = CMatrix::identity(dim, dim);
    let off = max_abs(&(&power - &id * c));
    if off > tol * scale {
        return Err(ClassifyError::NoScalarPower {
            reason: format!("relative residual {:.3e} against the identity", off / scale),
        });
    }

    // principal root: argument in [0, 2 pi/(n+1))
    let mut theta = c.arg();
    if theta < 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    let u0 = Complex64::from_polar(c.norm().powf(1.0 / dim as f64), theta / dim as f64);

    let normalized = phi.map(|z| z / u0);
    let mut eigenvectors = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut proj = id.clone();
        for j in 0..dim {
            if j == k {
                continue;
            }
            let factor = (&normalized - &id * unit_root(dim, j as i64))
                / (unit_root(dim, k as i64) - unit_root(dim, j as i64));
            proj = proj * factor;
        }
        let trace = proj.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > PROJECTOR_TRACE_TOL {
            return Err(ClassifyError::NotSimpleCycle { k, trace });
        }
        let best = (0..dim)
            .max_by(|&a, &b| {
                proj.column(a)
                    .norm()
                    .partial_cmp(&proj.column(b).norm())
                    .unwrap()
            })
            .unwrap();
        let col = proj.column(best).into_owned();
        let v = col.unscale(col.norm());
        let eig_residual = (&normalized * &v - &v * unit_root(dim, k as i64)).norm();
        if eig_residual > PROJECTOR_TRACE_TOL {
            return Err(ClassifyError::NotSimpleCycle { k, trace });
        }
        eigenvectors.push(v);
    }
    Ok(PhiCycle { u0, eigenvectors })
}

/// Solves `eps_i eps_j G_{i-1,j-1} = G_{ij}` for signs `eps_j in {-1, +1}`
/// on the eta-normalized Gram matrix of `g`, flipping one odd-sized
/// connected component when that allows the product to be `-1`.
fn solve_sign_relations(gt: &CMatrix, tol: f64) -> Result<(Vec<f64>, Sign), ClassifyError> {
    let dim = gt.nrows();
    let scale = max_abs(gt);
    let zero_thresh = scale * tol.max(1e-13);
    let coarse = (100.0 * tol).max(1e-6);

    // the i = j relations say all diagonal entries agree
    for i in 1..dim {
        if (gt[(i, i)] - gt[(0, 0)]).norm() > coarse * scale {
            return Err(ClassifyError::NotFixedPoint {
                reason: "metric Gram diagonal is not constant across the eigenvalue cycle".into(),
            });
        }
    }

    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let num = gt[(i, j)];
            let den = gt[((i + dim - 1) % dim, (j + dim - 1) % dim)];
            if num.norm() > zero_thresh && den.norm() > zero_thresh {
                let ratio = num / den;
                let sign = if ratio.re >= 0.0 { 1.0 } else { -1.0 };
                if (ratio - Complex64::new(sign, 0.0)).norm() > 0.5 {
                    return Err(ClassifyError::NotFixedPoint {
                        reason: format!("metric Gram ratio {ratio} is not close to +-1"),
                    });
                }
                adjacency[i].push((j, sign));
            }
        }
    }

    let mut eps = vec![0.0f64; dim];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..dim {
        if eps[start] != 0.0 {
            continue;
        }
        eps[start] = 1.0;
        let mut component = vec![start];
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            for &(j, sign) in &adjacency[i] {
                let implied = eps[i] * sign;
                if eps[j] == 0.0 {
                    eps[j] = implied;
                    component.push(j);
                    queue.push(j);
                } else if eps[j] != implied {
                    return Err(ClassifyError::NotFixedPoint {
                        reason: "sign relations on the metric Gram matrix are inconsistent".into(),
                    });
                }
            }
        }
        components.push(component);
    }

    let mut total: f64 = eps.iter().product();
    if total > 0.0 {
        if let Some(component) = components.iter().find(|c| c.len() % 2 == 1) {
            for &v in component {
                eps[v] = -eps[v];
            }
            total = -total;
        }
    }
    let sign = if total < 0.0 { Sign::Minus } else { Sign::Plus };
    Ok((eps, sign))
}

/// A canonical Toda presentation of a cyclic fixed point.
#[derive(Clone, Debug)]
pub struct TodaCanonicalForm {
    /// The structure matrices in the canonical frame.
    pub frame: FrameStructure,
    /// Normalized anti-symmetry index, `0` or `1`.
    pub l: usize,
    pub epsilon: Sign,
    /// Base eigenvalue of `phi` absorbed by the coordinate rescaling.
    pub u0: Complex64,
    /// Exponents of the diagonal metric.
    pub w: Vec<f64>,
    /// Columns express the canonical frame in input coordinates; it is an
    /// isomorphism from [`Self::frame`] onto the input with `phi/u0`.
    pub transform: CMatrix,
    /// Largest deviation of the canonical-frame matrices from the exact
    /// patterns (including the anti-symmetry defect of `w`).
    pub pattern_residual: f64,
}

/// Reduces a cyclic fixed point to the canonical Toda frame.
///
/// Returns the canonical matrices, the normalized index `l`, the exponent
/// tuple, and the frame change realizing the reduction.  Inputs that are
/// valid tt*-frames but not fixed points are rejected with the reason.
pub fn canonicalize_to_toda_frame(
    s: &FrameStructure,
    tol: f64,
) -> Result<TodaCanonicalForm, ClassifyError> {
    let report = validate_ttstar_frame(s, tol);
    if !report.all_passed() {
        return Err(ClassifyError::InvalidInput {
            failed: report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .collect(),
        });
    }
    let dim = s.dim();
    let n = s.n;
    let cycle = phi_eigenvalue_cycle(&s.phi, tol)?;

    let mut tau_columns = Vec::with_capacity(dim);
    for (k, v) in cycle.eigenvectors.iter().enumerate() {
        let c = (v.transpose() * &s.eta * v)[(0, 0)];
        if c.norm() < ETA_NULL_TOL {
            return Err(ClassifyError::EtaDegenerateEigenvector { k, value: c.norm() });
        }
        tau_columns.push(v / c.sqrt());
    }
    let tau = DMatrix::from_columns(&tau_columns);

    let gram = tau.adjoint() * &s.g * &tau;
    let (eps, epsilon) = solve_sign_relations(&gram, tol)?;

    // prefix products turn the per-step signs into the canonical shift
    let mut rescale = vec![1.0f64; dim];
    for j in 1..dim {
        rescale[j] = rescale[j - 1] * eps[j];
    }
    let mut scaled_tau = tau;
    for (j, &d) in rescale.iter().enumerate() {
        if d < 0.0 {
            for i in 0..dim {
                scaled_tau[(i, j)] = -scaled_tau[(i, j)];
            }
        }
    }

    let dft = DftFrameChange::new(n, epsilon);
    let mut transform = &scaled_tau * &dft.matrix;
    if epsilon == Sign::Minus {
        // re-index w_j -> w_{j+1} so the metric pairs against the l = 0 form
        transform = &transform * cyclic_phi(n);
    }

    let lu = transform.clone().lu();
    let inverse = lu.try_inverse().ok_or_else(|| ClassifyError::NotFixedPoint {
        reason: "canonical frame change is numerically singular".into(),
    })?;
    let eta_f = transform.transpose() * &s.eta * &transform;
    let g_f = transform.adjoint() * &s.g * &transform;
    let phi_f = &inverse * s.phi.map(|z| z / cycle.u0) * &transform;

    let l = determine_l(epsilon);
    let mut w = Vec::with_capacity(dim);
    for j in 0..dim {
        let d = g_f[(j, j)];
        if d.re <= 0.0 {
            return Err(ClassifyError::NotFixedPoint {
                reason: format!("canonical metric diagonal entry {j} is not positive: {d}"),
            });
        }
        w.push(d.re.ln());
    }

    let expected_g = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(w[i].exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut residual = max_abs(&(&eta_f - eta_pattern(n, l)));
    residual = residual.max(max_abs(&(&phi_f - cyclic_phi(n))));
    residual = residual.max(max_abs(&(&g_f - expected_g)));
    for j in 0..dim {
        residual = residual.max((w[j] + w[antisymmetry_partner(n, l, j)]).abs());
    }
    if residual > tol {
        return Err(ClassifyError::NotFixedPoint {
            reason: format!("canonical-pattern residual {residual:.3e} exceeds tolerance {tol:.1e}"),
        });
    }

    let frame = FrameStructure {
        n,
        eta: eta_f,
        g: g_f,
        phi: phi_f,
    };
    Ok(TodaCanonicalForm {
        frame,
        l,
        epsilon,
        u0: cycle.u0,
        w,
        transform,
        pattern_residual: residual,
    })
}

/// Classification summary for one structure, serialized by the CLI.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n: usize,
    /// Index produced by the canonical reduction (already `0` or `1`).
    pub l_input: usize,
    pub l_normalized: usize,
    /// Rotation from the canonical-frame exponents to the representative.
    pub shift: usize,
    /// Lexicographically smallest rotation of the exponent tuple.
    pub class_representative: Vec<f64>,
    pub epsilon: i32,
}

pub fn classification_report(canon: &TodaCanonicalForm) -> ClassificationReport {
    let (representative, shift) = canonical_rotation(&canon.w);
    ClassificationReport {
        n: canon.frame.n,
        l_input: canon.l,
        l_normalized: canon.l,
        shift,
        class_representative: representative,
        epsilon: canon.epsilon.as_int(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymmetry::cyclic_equivalent;
    use crate::fixtures;
    use crate::frame::{build_toda_frame, verify_isomorphism};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_valid_w(n: usize, l: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let dim = n + 1;
        let mut w = vec![0.0; dim];
        for j in 0..dim {
            let p = antisymmetry_partner(n, l, j);
            if j < p {
                let v: f64 = rng.gen_range(-1.0..1.0);
                w[j] = v;
                w[p] = -v;
            }
        }
        w
    }

    #[test]
    fn shift_operator_power_identity() {
        for n in 1..=6 {
            for epsilon in [Sign::Plus, Sign::Minus] {
                let t = ShiftOperator::new(n, epsilon);
                let mut power = t.matrix.clone();
                for _ in 1..=n {
                    power = &power * &t.matrix;
                }
                let expected = CMatrix::identity(n + 1, n + 1) * c(epsilon.value(), 0.0);
                // entries stay in {0, -1, +1}, so the identity is exact
                assert_eq!(max_abs(&(power - expected)), 0.0, "n = {n}");
            }
        }
    }

    #[test]
    fn dft_rank_two_matches_hand_computation() {
        let dft = DftFrameChange::new(1, Sign::Plus);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (idx, expected) in [(0, s), (1, s), (2, s), (3, -s)] {
            let entry = dft.matrix[(idx / 2, idx % 2)];
            assert!((entry - c(expected, 0.0)).norm() < 1e-15);
        }
        // conjugating diag(1, -1) through L gives the swap matrix
        let d = CMatrix::from_fn(2, 2, |i, j| if i == j { unit_root(2, i as i64) } else { c(0.0, 0.0) });
        let swap = (dft.matrix.adjoint() * d * &dft.matrix).map(|z| z.re);
        assert!((swap[(0, 1)] - 1.0).abs() < 1e-15 && (swap[(1, 0)] - 1.0).abs() < 1e-15);
        // the epsilon = -1 frame change is exactly the sinh-Gordon eigenframe
        let dft_minus = DftFrameChange::new(1, Sign::Minus);
        let diff = &dft_minus.matrix - fixtures::sinh_gordon_diagonalizer();
        assert!(max_abs(&diff) < 1e-15);
    }

    #[test]
    fn dft_conjugation_identities() {
        for n in 1..=5 {
            let dim = n + 1;
            for epsilon in [Sign::Plus, Sign::Minus] {
                let dft = DftFrameChange::new(n, epsilon);
                let l = &dft.matrix;
                let unitary = max_abs(&(l.adjoint() * l - CMatrix::identity(dim, dim)));
                assert!(unitary < 1e-12, "unitarity n = {n}");
                let t = ShiftOperator::new(n, epsilon);
                let twist = max_abs(&(&t.matrix * l - l * dft.twist_diagonal()));
                assert!(twist < 1e-12, "shift diagonalization n = {n}");
                let d = CMatrix::from_fn(dim, dim, |i, j| {
                    if i == j {
                        unit_root(dim, i as i64)
                    } else {
                        c(0.0, 0.0)
                    }
                });
                let circ = max_abs(&(d * l - l * cyclic_phi(n)));
                assert!(circ < 1e-12, "cyclic conjugation n = {n}");
            }
        }
    }

    #[test]
    fn eigenvalue_cycle_of_scaled_shift() {
        let u0 = Complex64::from_polar(3.0, 0.4);
        let phi = cyclic_phi(2) * u0;
        let cycle = phi_eigenvalue_cycle(&phi, 1e-10).unwrap();
        assert!((cycle.u0 - u0).norm() < 1e-12);
        let normalized = phi.map(|z| z / cycle.u0);
        for (k, v) in cycle.eigenvectors.iter().enumerate() {
            let residual = (&normalized * v - v * unit_root(3, k as i64)).norm();
            assert!(residual < 1e-12, "eigenvector {k}");
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalue_cycle_principal_root_is_canonical() {
        // a base eigenvalue beyond the principal sector comes back reduced
        let u0 = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0 + 0.1);
        let phi = cyclic_phi(2) * u0;
        let cycle = phi_eigenvalue_cycle(&phi, 1e-10).unwrap();
        assert!((cycle.u0.powu(3) - u0.powu(3)).norm() < 1e-12);
        let arg = cycle.u0.arg();
        assert!((0.0..2.0 * std::f64::consts::PI / 3.0).contains(&arg));
        assert!((cycle.u0 - Complex64::from_polar(1.0, 0.1)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalue_cycle_rejects_degenerate_phi() {
        let nilpotent = CMatrix::from_fn(2, 2, |i, j| {
            if (i, j) == (0, 1) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(matches!(
            phi_eigenvalue_cycle(&nilpotent, 1e-10),
            Err(ClassifyError::NoScalarPower { .. })
        ));
        // identity has a scalar power but a repeated eigenvalue
        assert!(matches!(
            phi_eigenvalue_cycle(&CMatrix::identity(2, 2), 1e-10),
            Err(ClassifyError::NotSimpleCycle { .. })
        ));
    }

    #[test]
    fn canonicalize_round_trips_canonical_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, l) in [(1, 0), (2, 0), (2, 1), (3, 1), (3, 2), (4, 3), (5, 4)] {
            let w = random_valid_w(n, l, &mut rng);
            let s = build_toda_frame(n, l, &w).unwrap();
            let canon = canonicalize_to_toda_frame(&s, 1e-10).unwrap();
            assert!(canon.pattern_residual < 1e-10, "(n, l) = ({n}, {l})");
            // normalized index follows the parity rule
            let expected_l = if l % 2 == 0 || n % 2 == 0 { 0 } else { 1 };
            assert_eq!(canon.l, expected_l, "(n, l) = ({n}, {l})");
            assert!(
                cyclic_equivalent(&w, &canon.w, 1e-9).is_some(),
                "(n, l) = ({n}, {l}): {w:?} vs {:?}",
                canon.w
            );
            // u0 = 1 here, so the transform is an isomorphism onto the input
            assert!((canon.u0 - c(1.0, 0.0)).norm() < 1e-12);
            assert!(verify_isomorphism(&canon.transform, &canon.frame, &s, 1e-10).unwrap());
        }
    }

    #[test]
    fn canonicalize_handles_unitary_frame_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (n, l) in [(1, 0), (2, 1), (3, 2), (4, 1)] {
            let dim = n + 1;
            let w = random_valid_w(n, l, &mut rng);
            let s = build_toda_frame(n, l, &w).unwrap();
            let ginibre = CMatrix::from_fn(dim, dim, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let u = ginibre.qr().q();
            let pushed = FrameStructure::new(
                n,
                u.transpose() * &s.eta * &u,
                u.adjoint() * &s.g * &u,
                u.adjoint() * &s.phi * &u,
            )
            .unwrap();
            let canon = canonicalize_to_toda_frame(&pushed, 1e-9).unwrap();
            assert!(
                cyclic_equivalent(&w, &canon.w, 1e-8).is_some(),
                "(n, l) = ({n}, {l})"
            );
            assert!(verify_isomorphism(&canon.transform, &canon.frame, &pushed, 1e-9).unwrap());
        }
    }

    #[test]
    fn canonicalize_diagonal_sinh_gordon_presentation() {
        let w = 0.8;
        let s = fixtures::sinh_gordon_diagonal_frame(w);
        let canon = canonicalize_to_toda_frame(&s, 1e-12).unwrap();
        assert_eq!(canon.l, 0);
        assert_eq!(canon.epsilon, Sign::Minus);
        assert!(cyclic_equivalent(&[-w, w], &canon.w, 1e-12).is_some());
        assert!(verify_isomorphism(&canon.transform, &canon.frame, &s, 1e-12).unwrap());
    }

    #[test]
    fn canonicalize_prefers_negative_sign_when_degenerate() {
        // w = 0 admits both twist signs; the canonical choice is -1
        let s = build_toda_frame(3, 1, &[0.0; 4]).unwrap();
        let canon = canonicalize_to_toda_frame(&s, 1e-10).unwrap();
        assert_eq!(canon.epsilon, Sign::Minus);
        assert_eq!(canon.l, 0);
        assert!(canon.w.iter().all(|&x| x.abs() < 1e-12));
        // generic odd-rank data with l = 1 keeps the positive sign
        let s = build_toda_frame(3, 1, &[0.0, 0.9, 0.0, -0.9]).unwrap();
        let canon = canonicalize_to_toda_frame(&s, 1e-10).unwrap();
        assert_eq!(canon.epsilon, Sign::Plus);
        assert_eq!(canon.l, 1);
        // even rank always normalizes to the negative sign
        let s = build_toda_frame(4, 1, &[0.0, 0.3, 0.7, -0.7, -0.3]).unwrap();
        let canon = canonicalize_to_toda_frame(&s, 1e-10).unwrap();
        assert_eq!(canon.epsilon, Sign::Minus);
        assert_eq!(canon.l, 0);
    }

    #[test]
    fn canonicalize_rejects_non_fixed_points() {
        // two independent two-cycles: valid frame, but no full eigenvalue cycle
        let dim = 4;
        let mut phi = CMatrix::zeros(dim, dim);
        phi[(0, 1)] = c(1.0, 0.0);
        phi[(1, 0)] = c(1.0, 0.0);
        phi[(2, 3)] = c(1.0, 0.0);
        phi[(3, 2)] = c(1.0, 0.0);
        let s = FrameStructure::new(3, CMatrix::identity(dim, dim), CMatrix::identity(dim, dim), phi)
            .unwrap();
        assert!(validate_ttstar_frame(&s, 1e-12).all_passed());
        assert!(matches!(
            canonicalize_to_toda_frame(&s, 1e-10),
            Err(ClassifyError::NotSimpleCycle { .. })
        ));

        // full cycle but a metric that is no twist fixed point
        let sh = 0.7f64;
        let mut g = CMatrix::identity(3, 3);
        g[(0, 0)] = c(sh.cosh(), 0.0);
        g[(1, 1)] = c(sh.cosh(), 0.0);
        g[(0, 1)] = c(0.0, sh.sinh());
        g[(1, 0)] = c(0.0, -sh.sinh());
        let phi = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                unit_root(3, i as i64)
            } else {
                c(0.0, 0.0)
            }
        });
        let s = FrameStructure::new(2, CMatrix::identity(3, 3), g, phi).unwrap();
        assert!(validate_ttstar_frame(&s, 1e-12).all_passed());
        assert!(matches!(
            canonicalize_to_toda_frame(&s, 1e-8),
            Err(ClassifyError::NotFixedPoint { .. })
        ));

        // invalid frames are refused outright
        let mut bad = build_toda_frame(2, 0, &[0.4, 0.0, -0.4]).unwrap();
        bad.eta *= c(2.0, 0.0);
        assert!(matches!(
            canonicalize_to_toda_frame(&bad, 1e-10),
            Err(ClassifyError::InvalidInput { .. })
        ));
    }

    #[test]
    fn report_uses_lexicographic_representative() {
        let s = build_toda_frame(2, 0, &[0.5, 0.0, -0.5]).unwrap();
        let canon = canonicalize_to_toda_frame(&s, 1e-10).unwrap();
        let report = classification_report(&canon);
        assert_eq!(report.n, 2);
        assert_eq!(report.l_normalized, 0);
        assert_eq!(report.epsilon, -1);
        let mut sorted = report.class_representative.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(report.class_representative[0], sorted[0]);
        assert!(cyclic_equivalent(&canon.w, &report.class_representative, 0.0).is_some());
    }
}

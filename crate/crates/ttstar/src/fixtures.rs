//! Explicit low-rank frames used as regression fixtures.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::frame::{build_toda_frame, CMatrix, FrameStructure};

/// The rank-two canonical Toda frame (sinh-Gordon), exponents `(w, -w)`.
pub fn sinh_gordon_toda_frame(w: f64) -> FrameStructure {
    build_toda_frame(1, 0, &[w, -w]).expect("(w, -w) satisfies the l = 0 condition")
}

/// The sinh-Gordon structure in the frame where `phi` is diagonal:
/// `eta = I`, `phi = diag(1, -1)`, `g = [[cosh w, -i sinh w], [i sinh w, cosh w]]`.
pub fn sinh_gordon_diagonal_frame(w: f64) -> FrameStructure {
    let i = Complex64::new(0.0, 1.0);
    let eta = CMatrix::identity(2, 2);
    let phi = DMatrix::from_row_slice(2, 2, &[
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]);
    let g = DMatrix::from_row_slice(2, 2, &[
        Complex64::new(w.cosh(), 0.0),
        -i * w.sinh(),
        i * w.sinh(),
        Complex64::new(w.cosh(), 0.0),
    ]);
    FrameStructure::new(1, eta, g, phi).expect("2x2 matrices")
}

/// Columns are the eigenframe `tau_0 = (e_0 - i e_1)/sqrt(2)`,
/// `tau_1 = (e_0 + i e_1)/sqrt(2)` that carries
/// [`sinh_gordon_diagonal_frame`] to the canonical Toda frame with
/// exponents `(-w, w)`.
pub fn sinh_gordon_diagonalizer() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(0.0, -s),
        Complex64::new(0.0, s),
    ])
}

//! Classification and numerics for Toda-type tt*-structures.
//!
//! A tt*-structure is presented here by the matrix data of a frame snapshot:
//! a symmetric nondegenerate bilinear form `eta`, a positive-definite
//! Hermitian metric `g`, and a Higgs-field coefficient `phi` that is
//! self-adjoint with respect to `eta`.  The crate provides
//!
//! * frame-level validation and isomorphism checking ([`frame`]),
//! * detection of cyclic-symmetry fixed points and reduction to the
//!   canonical Toda frame ([`classify`]),
//! * bookkeeping for the anti-symmetry condition on exponent tuples:
//!   index normalization, cyclic equivalence, and the reduction of the
//!   two-unknown cases to sinh-Gordon-like systems ([`asymmetry`]),
//! * a damped-Newton boundary-value solver for the radial Toda equations
//!   together with residual and asymptotic diagnostics ([`solver`]),
//! * exact rational central-charge data for the associated W-algebra
//!   minimal models ([`walgebra`]),
//! * exact cyclotomic verification of the structural matrix identities
//!   behind the classification ([`identities`], [`cyclotomic`]).

pub mod asymmetry;
pub mod classify;
pub mod cyclotomic;
pub mod fixtures;
pub mod frame;
pub mod identities;
pub mod solver;
pub mod walgebra;

/// Default tolerance for algebraic identity checks on `f64` data.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Default tolerance for checks applied to solver output.
pub const SOLVER_CHECK_TOL: f64 = 1e-8;

//! Bookkeeping for the anti-symmetry condition `w_j + w_{l-1-j} = 0`.
//!
//! The involution `j -> l - 1 - j (mod n+1)` pairs up the entries of an
//! exponent tuple; this module supplies the pairing itself, cyclic-shift
//! equivalence of tuples, the index shift that moves any `l` in `0..=n` to
//! the normalized value `0` or `1`, and the reduction of the normalized
//! systems to their independent unknowns.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::IDENTITY_TOL;

#[derive(Debug, Error)]
pub enum AsymmetryError {
    #[error("index l = {l} outside 0..={n}")]
    IndexOutOfRange { l: usize, n: usize },
    #[error("tuple has length {got}, expected {expected}")]
    BadTupleLength { expected: usize, got: usize },
    #[error("anti-symmetry violated at j = {j}: sum with partner = {sum:e}")]
    AntiSymmetryViolated { j: usize, sum: f64 },
    #[error("reduction requires l in {{0, 1}}, got l = {l}")]
    NotNormalized { l: usize },
    #[error("(n, l) = ({n}, {l}) has no independent unknowns")]
    NoUnknowns { n: usize, l: usize },
}

/// The partner index of `j` under the anti-symmetry pairing for `l`.
pub fn antisymmetry_partner(n: usize, l: usize, j: usize) -> usize {
    let dim = n + 1;
    (l + 2 * dim - 1 - j) % dim
}

fn check_tuple(n: usize, l: usize, values: &[f64]) -> Result<(), AsymmetryError> {
    let dim = n + 1;
    if l > n {
        return Err(AsymmetryError::IndexOutOfRange { l, n });
    }
    if values.len() != dim {
        return Err(AsymmetryError::BadTupleLength {
            expected: dim,
            got: values.len(),
        });
    }
    for j in 0..dim {
        let sum = values[j] + values[antisymmetry_partner(n, l, j)];
        if sum.abs() > IDENTITY_TOL {
            return Err(AsymmetryError::AntiSymmetryViolated { j, sum });
        }
    }
    Ok(())
}

/// An exponent or asymptotic-data tuple tagged with its anti-symmetry index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymmetryClass {
    pub n: usize,
    pub l: usize,
    pub values: Vec<f64>,
}

impl AsymmetryClass {
    pub fn new(n: usize, l: usize, values: Vec<f64>) -> Result<Self, AsymmetryError> {
        check_tuple(n, l, &values)?;
        Ok(AsymmetryClass { n, l, values })
    }

    /// The lexicographically smallest cyclic rotation of `values` and the
    /// shift that produces it (ties resolved toward the smallest shift).
    pub fn canonical_representative(&self) -> (Vec<f64>, usize) {
        canonical_rotation(&self.values)
    }
}

/// Smallest shift `s` such that `b[j] = a[(j + s) mod len]` for all `j`,
/// comparing entries within `tol`.
pub fn cyclic_equivalent(a: &[f64], b: &[f64], tol: f64) -> Option<usize> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let dim = a.len();
    (0..dim).find(|&s| (0..dim).all(|j| (b[j] - a[(j + s) % dim]).abs() <= tol))
}

/// Lexicographically smallest rotation and its shift.
pub fn canonical_rotation(values: &[f64]) -> (Vec<f64>, usize) {
    let dim = values.len();
    let rotate = |s: usize| -> Vec<f64> { (0..dim).map(|j| values[(j + s) % dim]).collect() };
    let mut best = rotate(0);
    let mut best_shift = 0;
    for s in 1..dim {
        let cand = rotate(s);
        if cand
            .iter()
            .zip(&best)
            .find_map(|(c, b)| c.partial_cmp(b).filter(|o| o.is_ne()))
            == Some(std::cmp::Ordering::Less)
        {
            best = cand;
            best_shift = s;
        }
    }
    (best, best_shift)
}

/// Outcome of the index normalization: the new index, the applied shift, and
/// the rotated tuple `values_new[j] = values[(j + shift) mod n+1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Normalized {
    pub l: usize,
    pub shift: usize,
    pub values: Vec<f64>,
}

/// Rotates a tuple satisfying the anti-symmetry condition for `l` into one
/// satisfying it for `l = 0` (when `l` or `n` is even) or `l = 1` (both odd).
///
/// The output entries are copies of input entries, so the normalized
/// anti-symmetry holds to exactly the accuracy of the input pairs: each
/// output pair sum reuses one input pair sum verbatim.
pub fn normalize_l(n: usize, l: usize, values: &[f64]) -> Result<Normalized, AsymmetryError> {
    check_tuple(n, l, values)?;
    let dim = n + 1;
    let (l_new, shift) = if l % 2 == 0 {
        (0, l / 2)
    } else if n % 2 == 1 {
        (1, (l - 1) / 2)
    } else {
        // backward by (n - l + 1)/2
        (0, dim - (n - l + 1) / 2)
    };
    let rotated: Vec<f64> = (0..dim).map(|j| values[(j + shift) % dim]).collect();
    debug_assert!(check_tuple(n, l_new, &rotated).is_ok());
    Ok(Normalized {
        l: l_new,
        shift,
        values: rotated,
    })
}

/// The reduction of a normalized system to its independent unknowns
/// `v_k = w_{index_map[k]}`:
///
/// ```text
/// (v_0)     = e^{a v_0} - e^{v_1 - v_0}
/// (v_j)     = e^{v_j - v_{j-1}} - e^{v_{j+1} - v_j}
/// (v_{m-1}) = e^{v_{m-1} - v_{m-2}} - e^{-b v_{m-1}}
/// ```
///
/// with the two boundary rules merging to `e^{a v_0} - e^{-b v_0}` when
/// `m = 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedSystem {
    pub m: usize,
    pub a: u32,
    pub b: u32,
    pub index_map: Vec<usize>,
}

/// Number of unknowns and boundary exponents for the normalized cases.
pub fn reduce_system(n: usize, l: usize) -> Result<ReducedSystem, AsymmetryError> {
    if l > 1 {
        return Err(AsymmetryError::NotNormalized { l });
    }
    if l > n {
        return Err(AsymmetryError::IndexOutOfRange { l, n });
    }
    let (m, a, b, index_map): (usize, u32, u32, Vec<usize>) = match (n % 2, l) {
        // n = 2m - 1: pairs j <-> n - j, unknowns w_0..w_{m-1}
        (1, 0) => {
            let m = (n + 1) / 2;
            (m, 2, 2, (0..m).collect())
        }
        // n = 2m: w_m = 0, unknowns w_0..w_{m-1}
        (0, 0) => {
            let m = n / 2;
            (m, 2, 1, (0..m).collect())
        }
        // n = 2m: w_0 = 0, pairs j <-> n+1-j, unknowns w_{m+1}..w_{2m}
        (0, 1) => {
            let m = n / 2;
            (m, 2, 1, (m + 1..=2 * m).collect())
        }
        // n = 2m + 1: w_0 = w_{m+1} = 0, unknowns w_1..w_m
        (1, 1) => {
            let m = (n - 1) / 2;
            (m, 1, 1, (1..=m).collect())
        }
        _ => unreachable!(),
    };
    if m == 0 {
        return Err(AsymmetryError::NoUnknowns { n, l });
    }
    Ok(ReducedSystem { m, a, b, index_map })
}

/// One row of the catalog of two-unknown cases: the `(n, l)` pair, the
/// indices singled out as the unknowns `(w, v)` in the source catalog, and
/// its boundary exponents.
#[derive(Clone, Copy, Debug)]
pub struct CatalogRow {
    pub n: usize,
    pub l: usize,
    pub w_index: usize,
    pub v_index: usize,
    pub a: u32,
    pub b: u32,
}

/// The ten two-unknown `(n, l)` cases, stored verbatim.
pub const TWO_UNKNOWN_CATALOG: [CatalogRow; 10] = [
    CatalogRow { n: 3, l: 0, w_index: 0, v_index: 1, a: 2, b: 2 },
    CatalogRow { n: 4, l: 0, w_index: 0, v_index: 1, a: 1, b: 2 },
    CatalogRow { n: 4, l: 1, w_index: 1, v_index: 2, a: 2, b: 1 },
    CatalogRow { n: 5, l: 1, w_index: 1, v_index: 2, a: 1, b: 1 },
    CatalogRow { n: 3, l: 2, w_index: 3, v_index: 0, a: 2, b: 2 },
    CatalogRow { n: 4, l: 2, w_index: 4, v_index: 0, a: 2, b: 1 },
    CatalogRow { n: 4, l: 3, w_index: 4, v_index: 0, a: 1, b: 2 },
    CatalogRow { n: 5, l: 3, w_index: 5, v_index: 0, a: 1, b: 1 },
    CatalogRow { n: 4, l: 4, w_index: 0, v_index: 1, a: 2, b: 1 },
    CatalogRow { n: 5, l: 5, w_index: 0, v_index: 1, a: 1, b: 1 },
];

/// Result of collapsing the two-unknown catalog through [`normalize_l`].
#[derive(Clone, Debug)]
pub struct CatalogCollapse {
    /// Normalized `(n, l)` class of each catalog row, in row order.
    pub row_classes: Vec<(usize, usize)>,
    /// Sorted distinct classes.
    pub classes: Vec<(usize, usize)>,
    /// Whether two rows share a class exactly when their `(a, b)` pairs
    /// agree up to swapping `a <-> b` (the swap is realized by the
    /// variable change `(w, v) -> (-v, -w)`).
    pub swap_consistent: bool,
}

/// A generic tuple satisfying the anti-symmetry condition for `(n, l)`:
/// distinct values on each free pair, zeros where forced.
fn generic_tuple(n: usize, l: usize) -> Vec<f64> {
    let dim = n + 1;
    let mut values = vec![0.0; dim];
    for j in 0..dim {
        let p = antisymmetry_partner(n, l, j);
        if j < p {
            values[j] = (j + 1) as f64;
            values[p] = -((j + 1) as f64);
        }
    }
    values
}

/// Normalizes every catalog row and cross-checks the class structure
/// against the `(a, b)` data.
pub fn collapse_table1() -> CatalogCollapse {
    let row_classes: Vec<(usize, usize)> = TWO_UNKNOWN_CATALOG
        .iter()
        .map(|row| {
            let normalized = normalize_l(row.n, row.l, &generic_tuple(row.n, row.l))
                .expect("catalog rows are valid (n, l) pairs");
            (row.n, normalized.l)
        })
        .collect();
    let mut classes = row_classes.clone();
    classes.sort_unstable();
    classes.dedup();
    let ab_matches = |r1: &CatalogRow, r2: &CatalogRow| {
        (r1.a, r1.b) == (r2.a, r2.b) || (r1.a, r1.b) == (r2.b, r2.a)
    };
    let mut swap_consistent = true;
    for i in 0..TWO_UNKNOWN_CATALOG.len() {
        for j in i + 1..TWO_UNKNOWN_CATALOG.len() {
            let same_class = row_classes[i] == row_classes[j];
            let same_ab = ab_matches(&TWO_UNKNOWN_CATALOG[i], &TWO_UNKNOWN_CATALOG[j]);
            if same_class != same_ab {
                swap_consistent = false;
            }
        }
    }
    CatalogCollapse {
        row_classes,
        classes,
        swap_consistent,
    }
}

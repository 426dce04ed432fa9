//! Exact arithmetic in cyclotomic fields.
//!
//! Elements of `Q(zeta_M)`, `zeta_M = exp(2 pi i / M)`, are stored as
//! polynomials in `zeta_M` with [`BigRational`] coefficients, reduced modulo
//! the `M`-th cyclotomic polynomial.  Equality of reduced representations is
//! equality in the field, so matrix identities checked here are proofs, not
//! floating-point estimates.
//!
//! The structural identities of the cyclic classification live in
//! `Q(zeta_{2(n+1)})`: that field contains the primitive root `omega` of
//! order `n + 1` together with its principal square root, which is all the
//! shift/DFT algebra needs.  Degrees stay below `phi(2(n+1)) <= 16` for the
//! ranks treated here, so dense coefficient vectors are entirely adequate.
//!
//! ```
//! use ttstar::cyclotomic::CycField;
//!
//! let field = CycField::new(6);
//! let z = field.zeta(1);
//! // zeta_6 satisfies x^2 = x - 1.
//! assert_eq!(z.mul(&z), z.sub(&field.one()));
//! ```

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use num_complex::Complex64;

/// Shared context for one cyclotomic field: the reduction data for
/// `Q[x] / (Phi_M)`.
pub struct CycField {
    order: usize,
    degree: usize,
    /// `x^k mod Phi_M` for `k` in `0..2 * order`, coefficients low to high,
    /// each of length `degree`.
    powers: Vec<Vec<BigRational>>,
}

impl CycField {
    /// Builds the field of order `order >= 1` (the `order`-th roots of unity).
    pub fn new(order: usize) -> Arc<CycField> {
        assert!(order >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_poly(order);
        let degree = phi.len() - 1;
        // x^degree = -(phi[0] + phi[1] x + ... + phi[degree-1] x^{degree-1})
        let fold: Vec<BigRational> = phi[..degree]
            .iter()
            .map(|c| BigRational::from(-c.clone()))
            .collect();
        let mut powers: Vec<Vec<BigRational>> = Vec::with_capacity(2 * order);
        let mut cur = vec![BigRational::zero(); degree];
        if degree > 0 {
            cur[0] = BigRational::one();
        }
        for _ in 0..2 * order {
            powers.push(cur.clone());
            // multiply by x, reduce the overflow coefficient through `fold`
            let top = cur[degree - 1].clone();
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigRational::zero();
            if !top.is_zero() {
                for i in 0..degree {
                    cur[i] += &top * &fold[i];
                }
            }
        }
        Arc::new(CycField {
            order,
            degree,
            powers,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree of the field extension, `phi(order)`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero(self: &Arc<Self>) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(self),
            coeffs: vec![BigRational::zero(); self.degree],
        }
    }

    pub fn one(self: &Arc<Self>) -> Cyclotomic {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(self: &Arc<Self>, q: BigRational) -> Cyclotomic {
        let mut coeffs = vec![BigRational::zero(); self.degree];
        coeffs[0] = q;
        Cyclotomic {
            field: Arc::clone(self),
            coeffs,
        }
    }

    pub fn from_int(self: &Arc<Self>, k: i64) -> Cyclotomic {
        self.from_rational(BigRational::from(BigInt::from(k)))
    }

    /// `zeta_M^k` for any integer exponent (negative exponents wrap).
    pub fn zeta(self: &Arc<Self>, k: i64) -> Cyclotomic {
        let m = self.order as i64;
        let k = k.rem_euclid(m) as usize;
        Cyclotomic {
            field: Arc::clone(self),
            coeffs: self.powers[k].clone(),
        }
    }
}

impl fmt::Debug for CycField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycField(order={}, degree={})", self.order, self.degree)
    }
}

/// The `m`-th cyclotomic polynomial, monic, integer coefficients low to high.
fn cyclotomic_poly(m: usize) -> Vec<BigInt> {
    // Phi_m = (x^m - 1) / prod of Phi_d over proper divisors d | m.
    let mut p = vec![BigInt::zero(); m + 1];
    p[0] = BigInt::from(-1);
    p[m] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            p = poly_div_exact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

/// Exact division of integer polynomials; the divisor must be monic and the
/// remainder must vanish.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn].clone();
        if !c.is_zero() {
            for (i, d) in den.iter().enumerate() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// An element of a cyclotomic field, in reduced polynomial form.
#[derive(Clone)]
pub struct Cyclotomic {
    field: Arc<CycField>,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    fn check_same_field(&self, other: &Cyclotomic) {
        assert_eq!(
            self.field.order, other.field.order,
            "mixed cyclotomic field orders"
        );
    }

    pub fn add(&self, other: &Cyclotomic) -> Cyclotomic {
        self.check_same_field(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Cyclotomic) -> Cyclotomic {
        self.check_same_field(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn neg(&self) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Cyclotomic {
        self.check_same_field(other);
        let deg = self.field.degree;
        let mut acc = vec![BigRational::zero(); deg];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                let basis = &self.field.powers[i + j];
                for (t, c) in basis.iter().enumerate() {
                    if !c.is_zero() {
                        acc[t] += &prod * c;
                    }
                }
            }
        }
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: acc,
        }
    }

    pub fn scale(&self, q: &BigRational) -> Cyclotomic {
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|a| a * q).collect(),
        }
    }

    /// Complex conjugation, `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Cyclotomic {
        let order = self.field.order;
        let deg = self.field.degree;
        let mut acc = vec![BigRational::zero(); deg];
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let basis = &self.field.powers[(order - k) % order];
            for (t, c) in basis.iter().enumerate() {
                if !c.is_zero() {
                    acc[t] += a * c;
                }
            }
        }
        Cyclotomic {
            field: Arc::clone(&self.field),
            coeffs: acc,
        }
    }

    pub fn pow(&self, mut e: u32) -> Cyclotomic {
        let mut base = self.clone();
        let mut out = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The element as a rational number, if it lies in the prime field.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Numerical embedding with `zeta_M = exp(2 pi i / M)`.
    pub fn to_complex(&self) -> Complex64 {
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.field.order as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            let cf = c.numer().to_string().parse::<f64>().unwrap()
                / c.denom().to_string().parse::<f64>().unwrap();
            acc = acc * zeta + Complex64::new(cf, 0.0);
        }
        acc
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Cyclotomic) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            write!(f, "{}", c.abs())?;
            if k > 0 {
                write!(f, "*z^{k}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Dense matrix over one cyclotomic field, row-major.
#[derive(Clone, PartialEq)]
pub struct CycMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Cyclotomic>,
}

impl CycMatrix {
    pub fn from_fn<F>(nrows: usize, ncols: usize, mut f: F) -> CycMatrix
    where
        F: FnMut(usize, usize) -> Cyclotomic,
    {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        CycMatrix { nrows, ncols, data }
    }

    pub fn identity(field: &Arc<CycField>, n: usize) -> CycMatrix {
        CycMatrix::from_fn(n, n, |i, j| {
            if i == j {
                field.one()
            } else {
                field.zero()
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.data[i * self.ncols + j]
    }

    pub fn mul(&self, other: &CycMatrix) -> CycMatrix {
        assert_eq!(self.ncols, other.nrows, "matrix dimension mismatch");
        CycMatrix::from_fn(self.nrows, other.ncols, |i, j| {
            let mut acc = self.get(i, 0).mul(other.get(0, j));
            for k in 1..self.ncols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn transpose(&self) -> CycMatrix {
        CycMatrix::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> CycMatrix {
        CycMatrix::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: &Cyclotomic) -> CycMatrix {
        CycMatrix::from_fn(self.nrows, self.ncols, |i, j| self.get(i, j).mul(s))
    }

    pub fn scale_rational(&self, q: &BigRational) -> CycMatrix {
        CycMatrix::from_fn(self.nrows, self.ncols, |i, j| self.get(i, j).scale(q))
    }

    pub fn pow(&self, e: u32) -> CycMatrix {
        assert_eq!(self.nrows, self.ncols, "pow requires a square matrix");
        assert!(e >= 1);
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Debug for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CycMatrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            write!(f, "  ")?;
            for j in 0..self.ncols {
                write!(f, "{:?}  ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn int_poly(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), int_poly(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), int_poly(&[1, 1]));
        assert_eq!(cyclotomic_poly(4), int_poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), int_poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), int_poly(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_poly(18), int_poly(&[1, 0, 0, -1, 0, 0, 1]));
    }

    #[test]
    fn root_of_unity_relations() {
        for order in [2usize, 4, 6, 10, 18] {
            let field = CycField::new(order);
            let z = field.zeta(1);
            assert_eq!(z.pow(order as u32), field.one());
            assert_eq!(field.zeta(order as i64 / 2), field.from_int(-1));
            assert_eq!(z.mul(&z.conj()), field.one());
            // full sum of all order-th roots vanishes
            let mut s = field.zero();
            for k in 0..order as i64 {
                s = s.add(&field.zeta(k));
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn negative_exponents_wrap() {
        let field = CycField::new(10);
        assert_eq!(field.zeta(-3), field.zeta(7));
        assert_eq!(field.zeta(-3).mul(&field.zeta(3)), field.one());
    }

    #[test]
    fn arithmetic_matches_numeric_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for order in [4usize, 6, 10, 18] {
            let field = CycField::new(order);
            for _ in 0..20 {
                let rand_elem = |rng: &mut ChaCha8Rng| {
                    let mut e = field.zero();
                    for k in 0..order as i64 {
                        if rng.gen_bool(0.4) {
                            let c = BigRational::new(
                                BigInt::from(rng.gen_range(-6i64..=6)),
                                BigInt::from(rng.gen_range(1i64..=4)),
                            );
                            e = e.add(&field.zeta(k).scale(&c));
                        }
                    }
                    e
                };
                let a = rand_elem(&mut rng);
                let b = rand_elem(&mut rng);
                let lhs = a.mul(&b).to_complex();
                let rhs = a.to_complex() * b.to_complex();
                assert!((lhs - rhs).norm() < 1e-9, "order {order}: {lhs} vs {rhs}");
                let conj = a.conj().to_complex();
                assert!((conj - a.to_complex().conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn matrix_algebra_on_roots() {
        // the 2x2 DFT diagonalizes the swap matrix: V^H swap V = 2 diag(1, -1)
        let field = CycField::new(4);
        let v = CycMatrix::from_fn(2, 2, |i, j| field.zeta(2 * (i as i64) * (j as i64)));
        let swap = CycMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                field.one()
            } else {
                field.zero()
            }
        });
        let lhs = v.conj_transpose().mul(&swap).mul(&v);
        let rhs = CycMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => field.from_int(2),
            (1, 1) => field.from_int(-2),
            _ => field.zero(),
        });
        assert_eq!(lhs, rhs);
    }
}

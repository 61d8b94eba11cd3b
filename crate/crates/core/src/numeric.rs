//! Exact arithmetic: arbitrary-precision rationals and small dense integer matrices.
//!
//! Everything downstream (the simplex kernel, integrality assertions, vertex
//! checks) works over an [`ExactField`]. The production alias is
//! [`Rational`], a canonical big-integer fraction; fixed-width ratios also
//! implement the trait so tests can cross-check the kernel.

use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Canonical arbitrary-precision fraction (lowest terms, positive denominator).
pub type Rational = BigRational;

/// Dense integer vector.
pub type IntVector = Vec<i64>;

/// Dense rational vector over the field `F`.
pub type RatVector<F = Rational> = Vec<F>;

/// An ordered field with exact comparison.
///
/// No epsilons: equality and ordering are decided exactly.
pub trait ExactField: Clone + Ord + Num + Signed + Debug + Display {
    fn from_int(v: i64) -> Self;

    /// True iff the value has denominator one.
    fn is_integral(&self) -> bool;

    /// The value as an `i64` if it is an integer that fits.
    fn to_int(&self) -> Option<i64>;
}

macro_rules! impl_exact_ratio {
    ($int:ty) => {
        impl ExactField for Ratio<$int> {
            fn from_int(v: i64) -> Self {
                Ratio::from_integer(<$int>::from(v))
            }

            fn is_integral(&self) -> bool {
                self.is_integer()
            }

            fn to_int(&self) -> Option<i64> {
                if self.is_integer() {
                    i64::try_from(self.numer().clone()).ok()
                } else {
                    None
                }
            }
        }
    };
}

impl_exact_ratio!(i64);
impl_exact_ratio!(i128);

impl ExactField for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn to_int(&self) -> Option<i64> {
        if self.is_integer() {
            i64::try_from(self.numer()).ok()
        } else {
            None
        }
    }
}

/// Builds `p/q` in lowest terms. Panics on `q == 0`; use [`checked_div`] for
/// user-driven division.
pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact division, `None` when the divisor is zero.
pub fn checked_div<F: ExactField>(a: &F, b: &F) -> Option<F> {
    if b.is_zero() {
        None
    } else {
        Some(a.clone() / b.clone())
    }
}

/// True iff every component has denominator one (vacuously true when empty).
pub fn is_integral<F: ExactField>(v: &[F]) -> bool {
    v.iter().all(ExactField::is_integral)
}

/// Converts an integral vector to machine integers.
pub fn to_int_vector<F: ExactField>(v: &[F]) -> Option<IntVector> {
    v.iter().map(ExactField::to_int).collect()
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rank of a list of rows over an exact field (Gaussian elimination).
pub fn rank<F: ExactField>(rows: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let p = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone() / p.clone();
                for c in col..cols {
                    let delta = factor.clone() * m[rank][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from rows; all rows must share the stated column count.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Appends a row; panics if the length does not match.
    pub fn push_row(&mut self, row: &[i64]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// `A x` for an integer vector.
    pub fn mul_vec(&self, x: &[i64]) -> IntVector {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Square submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut s = IntMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                s.set(i, j, self.get(r, c));
            }
        }
        s
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|r| self.row(r).iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v.div_floor(&prev);
                }
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }
}

impl Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fraction_arithmetic() {
        assert_eq!(rational(1, 2) + rational(1, 3), rational(5, 6));
        assert_eq!(rational(2, 4), rational(1, 2));
        let r = rational(-3, -6);
        assert_eq!(r.numer(), &BigInt::from(1));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(rational(0, 7).denom(), &BigInt::from(1));
        assert!(rational(1, 3) < rational(1, 2));
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert!(checked_div(&rational(1, 2), &Rational::zero()).is_none());
        assert_eq!(checked_div(&rational(1, 2), &rational(1, 4)), Some(rational(2, 1)));
    }

    #[test]
    fn integrality() {
        assert!(is_integral(&[rational(1, 1), rational(0, 1), rational(2, 1)]));
        assert!(!is_integral(&[rational(1, 2), rational(1, 1)]));
        assert!(is_integral::<Rational>(&[]));
    }

    #[test]
    fn rendering() {
        assert_eq!(render_rational(&rational(5, 6)), "5/6");
        assert_eq!(render_rational(&rational(-4, 2)), "-2");
        assert_eq!(render_rational(&rational(0, 3)), "0");
    }

    #[test]
    fn rank_and_determinant() {
        let rows = vec![
            vec![rational(1, 1), rational(2, 1)],
            vec![rational(2, 1), rational(4, 1)],
        ];
        assert_eq!(rank(&rows), 1);
        let m = IntMatrix::from_rows(2, &[vec![1, 1], vec![-1, 1]]).unwrap();
        assert_eq!(m.determinant(), BigInt::from(2));
        let tri = IntMatrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(tri.determinant(), BigInt::from(2));
        let swap = IntMatrix::from_rows(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.determinant(), BigInt::from(-1));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| rational(p, q))
    }

    proptest! {
        #[test]
        fn field_laws_hold_exactly(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a * c);
        }

        #[test]
        fn canonical_form_is_path_independent(p in -40i64..40, q in 1i64..15, k in 1i64..9) {
            let scaled = rational(p * k, q * k);
            let negated = rational(-p * k, -q * k);
            prop_assert_eq!(&scaled, &rational(p, q));
            prop_assert_eq!(&negated, &rational(p, q));
            prop_assert!(scaled.denom() > &BigInt::zero());
        }
    }
}

//! Exact integer and rational matrices.
//!
//! Every chaos decision (singularity, root-of-unity eigenvalues, `1 ∈ sp(A)`)
//! is made here with integer polynomial arithmetic. Floating eigenvalues are
//! only used to report moduli.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{cyclotomic_orders_dividing, IntPoly};
use crate::scalar::{rat_int, Rational, Scalar};

/// Relative tolerance used to merge eigenvalue moduli.
pub const EIG_MERGE_TOL: f64 = 1e-8;

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i128>>", into = "Vec<Vec<i128>>")]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i128>,
}

impl TryFrom<Vec<Vec<i128>>> for IntMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i128>>) -> Result<Self> {
        IntMatrix::from_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i128>> {
    fn from(m: IntMatrix) -> Self {
        m.rows()
    }
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i128>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            entries.extend(row);
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i128) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        IntMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, entries: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| (i == j) as i128)
    }

    pub fn diag(d: &[i128]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0 })
    }

    /// Companion matrix in observable canonical form: first column
    /// `-alphas`, ones on the superdiagonal.
    pub fn companion(alphas: &[i128]) -> Self {
        let n = alphas.len();
        Self::from_fn(n, |i, j| {
            if j == 0 {
                -alphas[i]
            } else if j == i + 1 {
                1
            } else {
                0
            }
        })
    }

    /// Companion matrix of a monic polynomial.
    pub fn companion_of(p: &IntPoly) -> Self {
        assert!(p.is_monic());
        let c = p.coeffs();
        let n = c.len() - 1;
        let alphas: Vec<i128> = (0..n).map(|i| c[n - 1 - i]).collect();
        Self::companion(&alphas)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i128>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        IntMatrix::from_fn(n, |i, j| (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, k: i128) -> IntMatrix {
        IntMatrix { n: self.n, entries: self.entries.iter().map(|&x| x * k).collect() }
    }

    pub fn pow(&self, k: u32) -> IntMatrix {
        (0..k).fold(IntMatrix::identity(self.n), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `row · self` for a row vector.
    pub fn row_mul(&self, row: &[i128]) -> Vec<i128> {
        (0..self.n).map(|j| (0..self.n).map(|i| row[i] * self.get(i, j)).sum()).collect()
    }

    /// Applies the matrix to a scalar vector.
    pub fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        (0..self.n).map(|i| crate::scalar::dot_int(self.row(i), x)).collect()
    }

    /// `Q Qᵗ = I`
    pub fn is_orthogonal(&self) -> bool {
        self.mul(&self.transpose()) == IntMatrix::identity(self.n)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i128 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut m = self.entries.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[k * n + k] == 0 {
                let Some(swap) = (k + 1..n).find(|&i| m[i * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    m.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j];
                    m[i * n + j] = v / prev;
                }
            }
            prev = m[k * n + k];
        }
        sign * m[n * n - 1]
    }

    fn minor(&self, row: usize, col: usize) -> IntMatrix {
        let n = self.n - 1;
        IntMatrix::from_fn(n, |i, j| {
            let si = if i < row { i } else { i + 1 };
            let sj = if j < col { j } else { j + 1 };
            self.get(si, sj)
        })
    }

    /// Transpose of the cofactor matrix; `A · adj(A) = det(A) I`.
    pub fn adjugate(&self) -> IntMatrix {
        let n = self.n;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        IntMatrix::from_fn(n, |i, j| {
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            s * self.minor(j, i).det()
        })
    }

    /// Inverse of a unimodular matrix, which is again integral.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        match self.det() {
            1 => Ok(self.adjugate()),
            -1 => Ok(self.adjugate().scale(-1)),
            d => Err(Error::NotUnimodular(d)),
        }
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.n, |i, j| rat_int(self.get(i, j)))
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// `det(xI - A)` by Faddeev–LeVerrier; the divisions by `k` are exact.
    pub fn charpoly(&self) -> IntPoly {
        let n = self.n;
        let mut coeffs = vec![0i128; n + 1];
        coeffs[n] = 1;
        let mut m = IntMatrix::zeros(n);
        for k in 1..=n {
            let mut next = self.mul(&m);
            for i in 0..n {
                let v = next.get(i, i) + coeffs[n - k + 1];
                next.set(i, i, v);
            }
            m = next;
            let t = self.mul(&m).trace();
            debug_assert_eq!(t % k as i128, 0);
            coeffs[n - k] = -t / k as i128;
        }
        IntPoly::new(coeffs)
    }

    /// Complex eigenvalues (numeric), as `(re, im)` pairs.
    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        if self.n == 0 {
            return Vec::new();
        }
        self.to_nalgebra()
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

pub fn det(a: &IntMatrix) -> i128 {
    a.det()
}

pub fn adjugate(a: &IntMatrix) -> IntMatrix {
    a.adjugate()
}

pub fn charpoly(a: &IntMatrix) -> IntPoly {
    a.charpoly()
}

pub fn is_unimodular(t: &IntMatrix) -> bool {
    matches!(t.det(), 1 | -1)
}

/// Orders `m` of roots of unity that are eigenvalues of `a`, i.e. the `m`
/// with `Φ_m | χ_A`. Empty exactly when no eigenvalue is a root of unity.
pub fn root_of_unity_orders(a: &IntMatrix) -> Vec<usize> {
    cyclotomic_orders_dividing(&a.charpoly())
}

/// `χ_A(1) = 0`, decided exactly.
pub fn one_in_spectrum(a: &IntMatrix) -> bool {
    a.charpoly().eval(1) == 0
}

/// Distinct eigenvalue moduli in descending order with their algebraic
/// multiplicities, merged at relative tolerance [`EIG_MERGE_TOL`].
pub fn eigenvalue_moduli_with_multiplicity(a: &IntMatrix) -> Result<Vec<(f64, usize)>> {
    if a.det() == 0 {
        return Err(Error::SingularMatrix);
    }
    let mut moduli: Vec<f64> = a.eigenvalues().iter().map(|&(re, im)| re.hypot(im)).collect();
    moduli.sort_by(|x, y| y.total_cmp(x));
    let mut groups: Vec<(f64, usize, f64)> = Vec::new();
    for m in moduli {
        match groups.last_mut() {
            Some((rep, count, sum)) if (*rep - m).abs() <= EIG_MERGE_TOL * rep.abs() => {
                *count += 1;
                *sum += m;
            }
            _ => groups.push((m, 1, m)),
        }
    }
    Ok(groups.into_iter().map(|(_, c, s)| (s / c as f64, c)).collect())
}

pub fn eigenvalue_moduli(a: &IntMatrix) -> Result<Vec<f64>> {
    Ok(eigenvalue_moduli_with_multiplicity(a)?.into_iter().map(|(m, _)| m).collect())
}

/// Square rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        RatMatrix { n, entries: (0..n * n).map(|k| f(k / n, k % n)).collect() }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            entries.extend(row);
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.n;
        RatMatrix::from_fn(n, |i, j| {
            (0..n).fold(Rational::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        })
    }

    pub fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(S::zero(), |acc, j| {
                    let c = self.get(i, j);
                    if c.is_zero() {
                        acc
                    } else {
                        acc + S::from_rational(c) * x[j].clone()
                    }
                })
            })
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows().iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect()
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<RatMatrix> {
        let n = self.n;
        let mut a = self.rows();
        let mut inv = RatMatrix::identity(n).rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let t = &f * &a[col][j];
                        a[r][j] = &a[r][j] - t;
                        let t = &f * &inv[col][j];
                        inv[r][j] = &inv[r][j] - t;
                    }
                }
            }
        }
        RatMatrix::from_rows(inv)
    }
}

//! Dense integer polynomials and cyclotomic polynomials.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(from = "Vec<i128>", into = "Vec<i128>")]
pub struct IntPoly {
    coeffs: Vec<i128>,
}

impl From<Vec<i128>> for IntPoly {
    fn from(coeffs: Vec<i128>) -> Self {
        IntPoly::new(coeffs)
    }
}

impl From<IntPoly> for Vec<i128> {
    fn from(p: IntPoly) -> Self {
        p.coeffs
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![1] }
    }

    /// `x^m - 1`
    pub fn x_pow_minus_one(m: usize) -> Self {
        let mut c = vec![0; m + 1];
        c[0] = -1;
        c[m] += 1;
        IntPoly::new(c)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> i128 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Division by a monic polynomial; quotient and remainder stay integral.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (IntPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0i128; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd];
            quot[i] = c;
            if c != 0 {
                for (j, &d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= c * d;
                }
            }
        }
        rem.truncate(dd);
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    pub fn is_divisible_by_monic(&self, divisor: &IntPoly) -> bool {
        self.div_rem_monic(divisor).1.is_zero()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match deg {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if deg == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{deg}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// Euler's totient.
pub fn totient(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// The `m`-th cyclotomic polynomial, by dividing `x^m - 1` by every `Φ_d`
/// with `d | m`, `d < m`.
pub fn cyclotomic(m: usize) -> IntPoly {
    assert!(m >= 1, "cyclotomic order must be positive");
    let mut table: Vec<Option<IntPoly>> = vec![None; m + 1];
    cyclotomic_memo(m, &mut table)
}

fn cyclotomic_memo(m: usize, table: &mut Vec<Option<IntPoly>>) -> IntPoly {
    if let Some(p) = &table[m] {
        return p.clone();
    }
    let mut p = IntPoly::x_pow_minus_one(m);
    for d in divisors(m) {
        if d == m {
            continue;
        }
        let phi_d = cyclotomic_memo(d, table);
        let (q, r) = p.div_rem_monic(&phi_d);
        debug_assert!(r.is_zero());
        p = q;
    }
    table[m] = Some(p.clone());
    p
}

/// Largest `m` with `φ(m) <= n`, found by scanning `m <= 2n² + 1`
/// (`φ(m) >= sqrt(m/2)` bounds the search).
pub fn max_order_with_totient_at_most(n: usize) -> usize {
    let bound = 2 * n * n + 1;
    (1..=bound)
        .filter(|&m| totient(m as u64) as usize <= n)
        .max()
        .unwrap_or(1)
}

/// All orders `m` such that `Φ_m` divides `p`; `p` must have degree `n >= 0`.
pub fn cyclotomic_orders_dividing(p: &IntPoly) -> Vec<usize> {
    let n = p.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    let bound = max_order_with_totient_at_most(n);
    (1..=bound)
        .filter(|&m| totient(m as u64) as usize <= n)
        .filter(|&m| p.is_divisible_by_monic(&cyclotomic(m)))
        .collect()
}

/// The companion-style polynomial `x^n + a_{n-1} x^{n-1} + ... + a_0` for
/// `alphas = (a_{n-1}, ..., a_0)`.
pub fn monic_from_alphas(alphas: &[i128]) -> IntPoly {
    let n = alphas.len();
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    for (i, &a) in alphas.iter().enumerate() {
        c[n - 1 - i] = a;
    }
    IntPoly::new(c)
}

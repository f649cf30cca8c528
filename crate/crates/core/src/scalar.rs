//! Field abstraction shared by the exact (rational) and floating execution modes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Absolute tolerance used by floating-point boundary tests.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Arithmetic needed by projections, dynamics and the observer.
///
/// `Rational` runs every computation without rounding; `f64` mirrors the
/// same logic and resolves boundary cases with [`BOUNDARY_TOL`].
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
{
    const EXACT: bool;

    fn from_int(v: i128) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn floor(&self) -> Self;
    fn to_f64(&self) -> f64;

    /// Sign of `self`. With `slack`, floats within [`BOUNDARY_TOL`] of zero
    /// report `Equal`; exact values ignore `slack`.
    fn sign(&self, slack: bool) -> Ordering;

    /// Representative in `[0, 1)`.
    fn frac(&self) -> Self {
        self.clone() - self.floor()
    }

    fn mul_int(&self, k: i128) -> Self {
        self.clone() * Self::from_int(k)
    }

    fn from_coeff(c: &Coeff) -> Self;

    /// The exact rational value; `None` for non-finite floats.
    fn to_exact(&self) -> Option<Rational>;

    fn is_zero_value(&self) -> bool {
        self.sign(false) == Ordering::Equal
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i128) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn floor(&self) -> Self {
        num_rational::Ratio::floor(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn mul_int(&self, k: i128) -> Self {
        match k {
            0 => Zero::zero(),
            1 => self.clone(),
            -1 => -self.clone(),
            _ => self * BigInt::from(k),
        }
    }

    fn from_coeff(c: &Coeff) -> Self {
        c.exact.clone()
    }

    fn to_exact(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn sign(&self, _slack: bool) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i128) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_coeff(c: &Coeff) -> Self {
        c.approx
    }

    fn to_exact(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn sign(&self, slack: bool) -> Ordering {
        let tol = if slack { BOUNDARY_TOL } else { 0.0 };
        if *self > tol {
            Ordering::Greater
        } else if *self < -tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn frac(&self) -> Self {
        let f = self - f64::floor(*self);
        // x = -1e-17 gives 1.0 after rounding
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

/// A rational constant together with its nearest float, so both modes read
/// coefficients without converting on every use.
#[derive(Clone, Debug, PartialEq)]
pub struct Coeff {
    exact: Rational,
    approx: f64,
}

impl Coeff {
    pub fn new(exact: Rational) -> Self {
        let approx = ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
        Coeff { exact, approx }
    }

    pub fn int(v: i128) -> Self {
        Coeff::new(rat_int(v))
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }
}

pub fn coeffs(v: &[Rational]) -> Vec<Coeff> {
    v.iter().cloned().map(Coeff::new).collect()
}

/// `Σ c_i x_i`
pub fn dot_coeff<S: Scalar>(row: &[Coeff], x: &[S]) -> S {
    row.iter().zip(x).fold(S::zero(), |acc, (c, xi)| {
        if c.is_zero() {
            acc
        } else {
            acc + S::from_coeff(c) * xi.clone()
        }
    })
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i128) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `p/q`, an integer, or a finite decimal such as `-3.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = frac_part.len() as u32;
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int_abs = int_part.trim_start_matches(['-', '+']);
        let joined = format!("{}{}", if int_abs.is_empty() { "0" } else { int_abs }, frac_part);
        let mag = BigInt::from_str(&joined).map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(digits);
        let r = Rational::new(mag, den);
        return Ok(if negative { -r } else { r });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Renders a rational as `p/q` (or `p` when integral).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts a finite float into the rational it denotes exactly.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

pub fn to_scalars<S: Scalar>(v: &[Rational]) -> Vec<S> {
    v.iter().map(S::from_rational).collect()
}

/// `row · x` for an integer row and a scalar vector.
pub fn dot_int<S: Scalar>(row: &[i128], x: &[S]) -> S {
    row.iter()
        .zip(x)
        .fold(S::zero(), |acc, (&c, xi)| if c == 0 { acc } else { acc + xi.mul_int(c) })
}

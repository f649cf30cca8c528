//! Affine maps `x ↦ Ax + B` on `R^N / G` and the chaos criteria for them.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{one_in_spectrum, root_of_unity_orders, IntMatrix};
use crate::scalar::{coeffs, format_rational, Coeff, Rational, Scalar};
use crate::tiling::{GroupSpec, Isometry};

/// `x_{k+1} = ϖ(A x_k + B)` realized on the fundamental domain of `group`.
#[derive(Clone, Debug)]
pub struct AffineSystem {
    a: IntMatrix,
    b: Vec<Rational>,
    b_coeffs: Vec<Coeff>,
    group: GroupSpec,
}

impl AffineSystem {
    /// Validates dimensions, lattice compatibility and the covering condition.
    pub fn new(a: IntMatrix, b: Vec<Rational>, group: GroupSpec) -> Result<Self> {
        let n = group.dim();
        if a.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let h1 = check_h1(&a, &b, &group)?;
        if !h1.holds {
            return Err(Error::GroupIncompatible(h1.describe()));
        }
        let b_coeffs = coeffs(&b);
        Ok(AffineSystem { a, b, b_coeffs, group })
    }

    pub fn linear(a: IntMatrix, group: GroupSpec) -> Result<Self> {
        let n = a.dim();
        Self::new(a, vec![Rational::zero(); n], group)
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `A x + B` before projection.
    pub fn lift<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.a
            .apply(x)
            .into_iter()
            .zip(&self.b_coeffs)
            .map(|(y, b)| if b.is_zero() { y } else { y + S::from_coeff(b) })
            .collect()
    }

    pub fn step<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.group.project_full(&self.lift(x))
    }

    /// Like [`step`](Self::step), also returning the coset index that the
    /// projection used (its linear part is the tangent correction).
    pub fn step_indexed<S: Scalar>(&self, x: &[S]) -> Result<(Vec<S>, usize)> {
        self.group.project_full_indexed(&self.lift(x))
    }

    /// `K` states starting with `x0`.
    pub fn trajectory<S: Scalar>(&self, x0: &[S], k: usize) -> Result<Vec<Vec<S>>> {
        let mut out = Vec::with_capacity(k);
        if k == 0 {
            return Ok(out);
        }
        out.push(x0.to_vec());
        for _ in 1..k {
            let next = self.step(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// `U⁻¹ A U ∈ Z^{N×N}`
pub fn check_lattice_compat(a: &IntMatrix, group: &GroupSpec) -> bool {
    let u = group.basis();
    match u.inverse() {
        Ok(inv) => inv.mul(&a.to_rational()).mul(u).is_integral(),
        Err(_) => false,
    }
}

/// Outcome of the covering-condition check on generators.
#[derive(Clone, Debug, PartialEq)]
pub struct H1Check {
    pub holds: bool,
    /// Generator whose induced isometry is not in the group.
    pub failing: Option<Isometry>,
    /// Induced `g' = (AQA⁻¹, Av + B − AQA⁻¹B)` per generator; `None` when
    /// `AQA⁻¹` is not integral.
    pub induced: Vec<Option<Isometry>>,
}

impl H1Check {
    pub fn describe(&self) -> String {
        match &self.failing {
            None => "H1 holds".into(),
            Some(g) => format!(
                "generator (Q = {}, v = [{}]) has no compatible image in the group",
                g.linear(),
                g.offset().iter().map(format_rational).collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

/// Checks `X ~ X' ⇒ AX + B ~ AX' + B` on the generators of `group`: each
/// generator `g = (Q, v)` must induce `g' = (AQA⁻¹, Av + B − AQA⁻¹B)` inside
/// the group, since `A g(X) + B = g'(AX + B)`.
pub fn check_h1(a: &IntMatrix, b: &[Rational], group: &GroupSpec) -> Result<H1Check> {
    let n = group.dim();
    if a.dim() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
    }
    let det = a.det();
    let gens = group.generators();
    let has_rotations = gens.iter().any(|g| g.linear() != &IntMatrix::identity(n));
    if det == 0 && has_rotations {
        return Err(Error::SingularMatrix);
    }
    let adj = if det == 0 { IntMatrix::identity(n) } else { a.adjugate() };
    let mut induced = Vec::with_capacity(gens.len());
    let mut failing = None;
    for g in gens {
        let image = if g.linear() == &IntMatrix::identity(n) {
            Some(IntMatrix::identity(n))
        } else {
            let num = a.mul(g.linear()).mul(&adj);
            (0..n * n)
                .all(|k| num.get(k / n, k % n) % det == 0)
                .then(|| IntMatrix::from_fn(n, |i, j| num.get(i, j) / det))
        };
        let candidate = image.and_then(|q2| {
            let av = a.apply(g.offset());
            let qb = q2.apply(b);
            let v2: Vec<Rational> = av.iter().zip(b).zip(&qb).map(|((x, y), z)| x + y - z).collect();
            Isometry::new(q2, v2).ok()
        });
        let ok = candidate.as_ref().is_some_and(|h| group.contains(h));
        if !ok && failing.is_none() {
            failing = Some(g.clone());
        }
        induced.push(candidate);
    }
    Ok(H1Check { holds: failing.is_none(), failing, induced })
}

/// Exact chaos criteria for `(A, B)` on `R^N / G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChaosReport {
    pub det: i128,
    pub det_nonzero: bool,
    pub charpoly: String,
    pub root_of_unity_orders: Vec<usize>,
    pub one_in_spectrum: bool,
    pub b_is_zero: bool,
    pub chaotic: bool,
    pub notes: Vec<String>,
}

/// Requires lattice compatibility and the covering condition; decides chaos exactly from the
/// characteristic polynomial.
pub fn check_chaos(a: &IntMatrix, b: &[Rational], group: &GroupSpec) -> Result<ChaosReport> {
    if !check_lattice_compat(a, group) {
        return Err(Error::GroupIncompatible("U⁻¹AU is not integral".into()));
    }
    let h1 = check_h1(a, b, group)?;
    if !h1.holds {
        return Err(Error::GroupIncompatible(h1.describe()));
    }
    let det = a.det();
    let orders = root_of_unity_orders(a);
    let one = one_in_spectrum(a);
    let b_is_zero = b.iter().all(Zero::is_zero);
    let chaotic = det != 0 && orders.is_empty() && (b_is_zero || !one);
    let mut notes = Vec::new();
    if det == 0 {
        notes.push("A is singular, so the map is not onto".into());
    }
    if !orders.is_empty() {
        notes.push(format!("eigenvalues include roots of unity of orders {orders:?}"));
    }
    if !group.is_lattice_group() && !group.acts_freely() {
        notes.push(
            "some group elements have fixed points; Lyapunov exponents are reported from A without a manifold structure"
                .into(),
        );
    }
    Ok(ChaosReport {
        det,
        det_nonzero: det != 0,
        charpoly: a.charpoly().to_string(),
        root_of_unity_orders: orders,
        one_in_spectrum: one,
        b_is_zero,
        chaotic,
        notes,
    })
}

/// Offset `c = (A − I)⁻¹ B` of the change of variables `x = r − c̄` that
/// turns `x ↦ Ax + B` into `r ↦ Ar`.
pub fn conjugate_to_linear(a: &IntMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.dim();
    let shifted = a.sub(&IntMatrix::identity(n));
    if shifted.det() == 0 {
        return Err(Error::OneInSpectrum);
    }
    let inv = shifted.to_rational().inverse()?;
    Ok(inv.apply(b))
}

/// The tent map `h(x) = 2x` on `[0, 1/2)`, `2(1 − x)` on `[1/2, 1]`.
pub fn tent_map<S: Scalar>(x: &S) -> S {
    let half = S::from_rational(&Rational::new(One::one(), 2.into()));
    if (x.clone() - half).sign(false) == std::cmp::Ordering::Less {
        x.mul_int(2)
    } else {
        (S::from_int(1) - x.clone()).mul_int(2)
    }
}

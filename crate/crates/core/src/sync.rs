//! Integer dead-beat observers: companion forms, key generation, and the
//! drive/observer pair with the switching projection.

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::dynamics::{check_chaos, check_h1, check_lattice_compat};
use crate::error::{Error, Result};
use crate::linalg::{is_unimodular, IntMatrix};
use crate::poly::{cyclotomic_orders_dividing, monic_from_alphas};
use crate::scalar::{coeffs, dot_int, Coeff, Rational, Scalar};
use crate::tiling::GroupSpec;

/// Tolerance for rejecting characteristic roots of modulus close to 1.
pub const UNIT_CIRCLE_TOL: f64 = 1e-8;

/// `(A♭, C♭)` in observable companion form: first column `−alphas`, ones
/// on the superdiagonal, `C♭ = (1, 0, ..., 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompanionPair {
    pub a_flat: IntMatrix,
    pub c_flat: Vec<i128>,
    /// `(α^{N−1}, ..., α⁰)`
    pub alphas: Vec<i128>,
}

/// Computes `T A T⁻¹` and `C T⁻¹` and checks their companion shape.
pub fn verify_companion_similarity(a: &IntMatrix, c: &[i128], t: &IntMatrix) -> Result<CompanionPair> {
    let n = a.dim();
    if c.len() != n || t.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: if c.len() != n { c.len() } else { t.dim() } });
    }
    if !is_unimodular(t) {
        return Err(Error::NotUnimodular(t.det()));
    }
    let t_inv = t.inverse_unimodular()?;
    let a_flat = t.mul(a).mul(&t_inv);
    let c_flat = t_inv.row_mul(c);
    let alphas: Vec<i128> = a_flat.column(0).iter().map(|v| -v).collect();
    let expected = IntMatrix::companion(&alphas);
    if a_flat != expected {
        return Err(Error::NotCompanion(format!("T A T⁻¹ = {a_flat}")));
    }
    if c_flat.iter().enumerate().any(|(i, &v)| v != i128::from(i == 0)) {
        return Err(Error::NotCompanion(format!("C T⁻¹ = {c_flat:?}")));
    }
    Ok(CompanionPair { a_flat, c_flat, alphas })
}

/// Observer gains with the identities that make them dead-beat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GainProof {
    pub l: Vec<i128>,
    pub m: Vec<i128>,
    /// `A − LC`
    pub error_matrix: IntMatrix,
    /// `(A − LC)^N = 0`
    pub nilpotent: bool,
    /// `(A − LC) M = 0`
    pub annihilates_m: bool,
    /// `C M`
    pub cm: i128,
}

/// `L = T⁻¹ · (first column of A♭)` and `M = T⁻¹ e₁`, verified exactly.
pub fn gain_from_companion(a: &IntMatrix, c: &[i128], t: &IntMatrix, pair: &CompanionPair) -> Result<GainProof> {
    let n = a.dim();
    let t_inv = t.inverse_unimodular()?;
    let l = t_inv.mul_vec(&pair.a_flat.column(0));
    let m = t_inv.column(0);
    let lc = IntMatrix::from_fn(n, |i, j| l[i] * c[j]);
    let error_matrix = a.sub(&lc);
    let nilpotent = error_matrix.pow(n as u32).is_zero();
    let annihilates_m = error_matrix.mul_vec(&m).iter().all(|&v| v == 0);
    let cm: i128 = c.iter().zip(&m).map(|(x, y)| x * y).sum();
    if !nilpotent || !annihilates_m || cm != 1 {
        return Err(Error::InternalInconsistency(format!(
            "dead-beat identities fail: nilpotent={nilpotent}, (A-LC)M=0: {annihilates_m}, CM={cm}"
        )));
    }
    Ok(GainProof { l, m, error_matrix, nilpotent, annihilates_m, cm })
}

/// Everything both ends share: the drive system, its output row and the
/// observer gains.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverKey {
    a: IntMatrix,
    b: Vec<Rational>,
    b_coeffs: Vec<Coeff>,
    c: Vec<i128>,
    l: Vec<i128>,
    m: Vec<i128>,
    t: IntMatrix,
    alphas: Vec<i128>,
    group: GroupSpec,
}

impl ObserverKey {
    /// Builds a key from `(A, B, C, T)`, deriving `L` and `M` and checking
    /// every invariant.
    pub fn from_parts(a: IntMatrix, b: Vec<Rational>, c: Vec<i128>, t: IntMatrix, group: GroupSpec) -> Result<Self> {
        let n = a.dim();
        if b.len() != n || group.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: if b.len() != n { b.len() } else { group.dim() } });
        }
        let pair = verify_companion_similarity(&a, &c, &t)?;
        let proof = gain_from_companion(&a, &c, &t, &pair)?;
        check_spectrum(&pair.alphas)?;
        check_group(&a, &b, &proof.error_matrix, &group)?;
        Ok(ObserverKey {
            b_coeffs: coeffs(&b),
            a,
            b,
            c,
            l: proof.l,
            m: proof.m,
            t,
            alphas: pair.alphas,
            group,
        })
    }

    /// The three-dimensional key with `det A = 3` on the standard torus.
    pub fn reference() -> Self {
        let a = IntMatrix::from_rows(vec![vec![-19, 26, 7], vec![-51, 65, 17], vec![152, -184, -47]]).expect("3x3");
        let t = IntMatrix::from_rows(vec![vec![6, -5, -1], vec![-5, 10, 3], vec![-1, 3, 1]]).expect("3x3");
        ObserverKey::from_parts(a, vec![Rational::zero(); 3], vec![6, -5, -1], t, GroupSpec::torus(3))
            .expect("reference key is valid")
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn c(&self) -> &[i128] {
        &self.c
    }

    pub fn l(&self) -> &[i128] {
        &self.l
    }

    pub fn m(&self) -> &[i128] {
        &self.m
    }

    pub fn t(&self) -> &IntMatrix {
        &self.t
    }

    pub fn alphas(&self) -> &[i128] {
        &self.alphas
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// `A − LC`
    pub fn error_matrix(&self) -> IntMatrix {
        let n = self.n();
        self.a.sub(&IntMatrix::from_fn(n, |i, j| self.l[i] * self.c[j]))
    }

    /// Recomputes every identity of the key from scratch.
    pub fn proof(&self) -> Result<KeyProof> {
        let pair = verify_companion_similarity(&self.a, &self.c, &self.t)?;
        let gains = gain_from_companion(&self.a, &self.c, &self.t, &pair)?;
        if gains.l != self.l || gains.m != self.m {
            return Err(Error::InternalInconsistency("stored gains differ from the derived ones".into()));
        }
        let chaos = check_chaos(&self.a, &self.b, &self.group)?;
        Ok(KeyProof { det: self.a.det(), charpoly: self.a.charpoly().to_string(), companion: pair, gains, chaos })
    }

    fn affine<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.a
            .apply(x)
            .into_iter()
            .zip(&self.b_coeffs)
            .map(|(y, b)| if b.is_zero() { y } else { y + S::from_coeff(b) })
            .collect()
    }

    fn project<S: Scalar>(&self, x: &[S], k: usize) -> Result<Vec<S>> {
        match projection_schedule(k, self.n()) {
            Projection::Full => self.group.project_full(x),
            Projection::Lattice => Ok(self.group.project_lattice(x)),
        }
    }
}

/// Exact certificate printed alongside a key.
#[derive(Clone, Debug, Serialize)]
pub struct KeyProof {
    pub det: i128,
    pub charpoly: String,
    pub companion: CompanionPair,
    pub gains: GainProof,
    pub chaos: crate::dynamics::ChaosReport,
}

fn check_spectrum(alphas: &[i128]) -> Result<()> {
    if alphas.last().is_none_or(|&a0| a0 == 0) {
        return Err(Error::ZeroEigenvalue);
    }
    let chi = monic_from_alphas(alphas);
    if !cyclotomic_orders_dividing(&chi).is_empty() {
        return Err(Error::RootOnUnitCircle);
    }
    let near_unit = IntMatrix::companion(alphas)
        .eigenvalues()
        .iter()
        .any(|&(re, im)| (re.hypot(im) - 1.0).abs() <= UNIT_CIRCLE_TOL);
    if near_unit {
        return Err(Error::RootOnUnitCircle);
    }
    Ok(())
}

fn check_group(a: &IntMatrix, b: &[Rational], error_matrix: &IntMatrix, group: &GroupSpec) -> Result<()> {
    if !check_lattice_compat(a, group) {
        return Err(Error::GroupIncompatible("U⁻¹AU is not integral".into()));
    }
    // the error recursion runs modulo the lattice, so A − LC must preserve it too
    if !check_lattice_compat(error_matrix, group) {
        return Err(Error::GroupIncompatible("U⁻¹(A − LC)U is not integral".into()));
    }
    let h1 = check_h1(a, b, group)?;
    if !h1.holds {
        return Err(Error::GroupIncompatible(h1.describe()));
    }
    Ok(())
}

/// Key from a unit upper triangular `T̂` and the coefficients of `χ_{A♭}`:
/// `T = T̂ᵗT̂`, `A = T⁻¹A♭T`, `C = C♭T`, `L = T⁻¹A♭C♭ᵗ`, `M = T⁻¹C♭ᵗ`.
pub fn keygen(that: &IntMatrix, alphas: &[i128], b: Vec<Rational>, group: GroupSpec) -> Result<ObserverKey> {
    let n = that.dim();
    if alphas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alphas.len() });
    }
    let unit_upper = (0..n).all(|i| (0..n).all(|j| that.get(i, j) == if i == j { 1 } else if i > j { 0 } else { that.get(i, j) }));
    if !unit_upper {
        return Err(Error::InvalidArgument("T̂ must be unit upper triangular".into()));
    }
    check_spectrum(alphas)?;
    let t = that.transpose().mul(that);
    let t_inv = t.inverse_unimodular()?;
    let a_flat = IntMatrix::companion(alphas);
    let a = t_inv.mul(&a_flat).mul(&t);
    let c = t.row(0).to_vec();
    ObserverKey::from_parts(a, b, c, t, group)
}

/// Unit upper triangular matrix with entries above the diagonal in
/// `[-bound, bound]`.
pub fn random_unit_upper(n: usize, bound: i128, rng: &mut impl Rng) -> IntMatrix {
    let mut t = IntMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            t.set(i, j, rng.gen_range(-bound..=bound));
        }
    }
    t
}

/// Random key on the standard torus: `T̂` entries in `[-2, 2]`, `alphas` in
/// `[-3, 3]`, resampled until the spectrum is admissible.
pub fn random_key(n: usize, rng: &mut impl Rng) -> ObserverKey {
    loop {
        let that = random_unit_upper(n, 2, rng);
        let alphas: Vec<i128> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        if let Ok(key) = keygen(&that, &alphas, vec![Rational::zero(); n], GroupSpec::torus(n)) {
            return key;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// `ϖ`, onto the fundamental domain of `G`
    Full,
    /// `ϖ'`, onto the lattice cell
    Lattice,
}

/// `ϖ` when `(N+1) | k`, otherwise `ϖ'`.
pub fn projection_schedule(k: usize, n: usize) -> Projection {
    if k.is_multiple_of(n + 1) {
        Projection::Full
    } else {
        Projection::Lattice
    }
}

/// `Y_k = C(X_k + M u_k)`, `X_{k+1} = ϖ_k(A(X_k + M u_k) + B)`.
pub fn drive_step<S: Scalar>(key: &ObserverKey, x: &[S], u: &S, k: usize) -> Result<(Vec<S>, S)> {
    let w: Vec<S> = x.iter().zip(&key.m).map(|(xi, &mi)| xi.clone() + u.mul_int(mi)).collect();
    let y = dot_int(&key.c, &w);
    let next = key.project(&key.affine(&w), k)?;
    Ok((next, y))
}

/// `Ŷ_k = C X̂_k`, `X̂_{k+1} = ϖ_k(A X̂_k + L(Y_k − Ŷ_k) + B)`.
pub fn observer_step<S: Scalar>(key: &ObserverKey, xhat: &[S], y: &S, k: usize) -> Result<(Vec<S>, S)> {
    let yhat = dot_int(&key.c, xhat);
    let innovation = y.clone() - yhat.clone();
    let lifted: Vec<S> = key
        .affine(xhat)
        .into_iter()
        .zip(&key.l)
        .map(|(v, &li)| v + innovation.mul_int(li))
        .collect();
    Ok((key.project(&lifted, k)?, yhat))
}

/// Observer update for a step whose output never arrived.
pub fn observer_coast<S: Scalar>(key: &ObserverKey, xhat: &[S], k: usize) -> Result<Vec<S>> {
    key.project(&key.affine(xhat), k)
}

/// `u_k = Y_k − Ŷ_k`, valid once `k ≥ N + 1`.
pub fn recover_input<S: Scalar>(key: &ObserverKey, y: &S, yhat: &S, k: usize) -> Result<S> {
    let first = key.n() + 1;
    if k < first {
        return Err(Error::NotYetSynchronized { k, first });
    }
    Ok(y.clone() - yhat.clone())
}

/// First step at which the observer is exact again after missing the
/// output of step `k0`.
///
/// On a lattice group every step uses `ϖ'` and the error dies after `N`
/// steps. Otherwise the error only propagates linearly between two `ϖ`
/// steps, so it has to wait for the next one.
pub fn resync_step(key: &ObserverKey, k0: usize) -> usize {
    let n = key.n();
    if key.group.is_lattice_group() {
        return k0 + 1 + n;
    }
    let block = n + 1;
    k0.div_ceil(block) * block + 1 + n
}

/// `e_k = d(X_k, X̂_k)` in `R^N / G'` for `k = 0..=K`, driving with
/// `u_stream[k]`.
pub fn error_sequence<S: Scalar>(
    key: &ObserverKey,
    x0: &[S],
    xhat0: &[S],
    u_stream: &[S],
    k_steps: usize,
) -> Result<Vec<f64>> {
    if u_stream.len() < k_steps {
        return Err(Error::InvalidArgument(format!("need {k_steps} inputs, got {}", u_stream.len())));
    }
    let lattice = key.group.translation_subgroup();
    let mut x = x0.to_vec();
    let mut xhat = xhat0.to_vec();
    let mut out = Vec::with_capacity(k_steps + 1);
    out.push(lattice.orbit_distance(&x, &xhat));
    for (k, u) in u_stream.iter().take(k_steps).enumerate() {
        let (x_next, y) = drive_step(key, &x, u, k)?;
        let (xhat_next, _) = observer_step(key, &xhat, &y, k)?;
        x = x_next;
        xhat = xhat_next;
        out.push(lattice.orbit_distance(&x, &xhat));
    }
    Ok(out)
}

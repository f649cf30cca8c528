//! Crystallographic groups acting on `R^N`, their fundamental domains and
//! the projections onto them.
//!
//! A group `G` is described by a lattice basis `U` (the translation subgroup
//! `G'`), a finite list of coset isometries `g_1, ..., g_k` (the last one is
//! the identity), and two fundamental domains: the lattice cell `U·[0,1)^N`
//! for `G'` and a domain `T` for `G`. Projections first reduce modulo the
//! lattice and then search the coset representatives for the image landing
//! in `T`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::scalar::{coeffs, dot_coeff, rat, rat_int, Coeff, Rational, Scalar};

/// Default lattice search radius, in cells.
pub const DEFAULT_RADIUS: usize = 2;

/// Affine isometry `X ↦ QX + v` with a signed-permutation linear part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    linear: IntMatrix,
    offset: Vec<Rational>,
}

impl Isometry {
    pub fn new(linear: IntMatrix, offset: Vec<Rational>) -> Result<Self> {
        if offset.len() != linear.dim() {
            return Err(Error::DimensionMismatch { expected: linear.dim(), got: offset.len() });
        }
        if !linear.is_orthogonal() {
            return Err(Error::MalformedGroup(format!("linear part {linear} is not orthogonal")));
        }
        Ok(Isometry { linear, offset })
    }

    pub fn identity(n: usize) -> Self {
        Isometry { linear: IntMatrix::identity(n), offset: vec![Rational::zero(); n] }
    }

    pub fn translation(v: Vec<Rational>) -> Self {
        Isometry { linear: IntMatrix::identity(v.len()), offset: v }
    }

    pub fn linear(&self) -> &IntMatrix {
        &self.linear
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn is_identity(&self) -> bool {
        self.linear == IntMatrix::identity(self.dim()) && self.offset.iter().all(Zero::is_zero)
    }

    pub fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.linear
            .apply(x)
            .into_iter()
            .zip(&self.offset)
            .map(|(y, v)| if v.is_zero() { y } else { y + S::from_rational(v) })
            .collect()
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let offset = self
            .linear
            .apply(&other.offset)
            .into_iter()
            .zip(&self.offset)
            .map(|(a, b)| a + b)
            .collect();
        Isometry { linear: self.linear.mul(&other.linear), offset }
    }

    pub fn inverse(&self) -> Isometry {
        let qt = self.linear.transpose();
        let offset = qt.apply(&self.offset).into_iter().map(|x| -x).collect();
        Isometry { linear: qt, offset }
    }
}

/// `coeffs · X + constant  (≥ | > | =)  0`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    coeffs: Vec<Coeff>,
    constant: Coeff,
    relation: Relation,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, constant: Rational, relation: Relation) -> Self {
        LinearConstraint { coeffs: crate::scalar::coeffs(&coeffs), constant: Coeff::new(constant), relation }
    }

    fn holds<S: Scalar>(&self, x: &[S], slack: bool) -> bool {
        let value = dot_coeff(&self.coeffs, x) + S::from_coeff(&self.constant);
        let s = value.sign(slack);
        match (self.relation, slack) {
            (Relation::Eq, _) => s == Ordering::Equal,
            (Relation::Ge, _) | (Relation::Gt, true) => s != Ordering::Less,
            (Relation::Gt, false) => s == Ordering::Greater,
        }
    }
}

/// How a domain was specified, kept for serialization.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSource {
    Builtin(String),
    Box { lo: Vec<Rational>, hi: Vec<Rational>, closed_hi: Vec<bool> },
}

/// Membership predicate of a fundamental domain: a conjunction of clauses,
/// each clause a disjunction of linear constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalDomain {
    source: DomainSource,
    clauses: Vec<Vec<LinearConstraint>>,
    bbox: (Vec<Rational>, Vec<Rational>),
}

impl FundamentalDomain {
    pub fn new(
        source: DomainSource,
        clauses: Vec<Vec<LinearConstraint>>,
        bbox: (Vec<Rational>, Vec<Rational>),
    ) -> Self {
        FundamentalDomain { source, clauses, bbox }
    }

    /// `lo_i <= x_i < hi_i`, or `<= hi_i` on axes flagged in `closed_hi`.
    pub fn boxed(lo: Vec<Rational>, hi: Vec<Rational>, closed_hi: Vec<bool>) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || closed_hi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: hi.len().min(closed_hi.len()) });
        }
        let mut d = Self::box_constraints(&lo, &hi, &closed_hi);
        d.source = DomainSource::Box { lo, hi, closed_hi };
        Ok(d)
    }

    fn box_constraints(lo: &[Rational], hi: &[Rational], closed_hi: &[bool]) -> Self {
        let n = lo.len();
        let unit = |i: usize, s: i64| -> Vec<Rational> {
            (0..n).map(|j| if i == j { rat(s, 1) } else { Rational::zero() }).collect()
        };
        let mut clauses = Vec::new();
        for i in 0..n {
            clauses.push(vec![LinearConstraint::new(unit(i, 1), -lo[i].clone(), Relation::Ge)]);
            let rel = if closed_hi[i] { Relation::Ge } else { Relation::Gt };
            clauses.push(vec![LinearConstraint::new(unit(i, -1), hi[i].clone(), rel)]);
        }
        FundamentalDomain {
            source: DomainSource::Builtin(String::new()),
            clauses,
            bbox: (lo.to_vec(), hi.to_vec()),
        }
    }

    fn builtin_box(name: &str, lo: Vec<Rational>, hi: Vec<Rational>, closed_hi: Vec<bool>) -> Self {
        let mut d = Self::box_constraints(&lo, &hi, &closed_hi);
        d.source = DomainSource::Builtin(name.to_string());
        d
    }

    /// The half-open cell `U·[0,1)^N`.
    pub fn lattice_cell(basis: &RatMatrix) -> Result<Self> {
        let n = basis.dim();
        let inv = basis.inverse()?;
        let mut clauses = Vec::new();
        for i in 0..n {
            let row: Vec<Rational> = (0..n).map(|j| inv.get(i, j).clone()).collect();
            let neg: Vec<Rational> = row.iter().map(|x| -x.clone()).collect();
            clauses.push(vec![LinearConstraint::new(row, Rational::zero(), Relation::Ge)]);
            clauses.push(vec![LinearConstraint::new(neg, rat(1, 1), Relation::Gt)]);
        }
        // bounding box of the parallelotope: sum of negative / positive parts per row
        let mut lo = vec![Rational::zero(); n];
        let mut hi = vec![Rational::zero(); n];
        for i in 0..n {
            for j in 0..n {
                let c = basis.get(i, j);
                if c < &Rational::zero() {
                    lo[i] += c;
                } else {
                    hi[i] += c;
                }
            }
        }
        Ok(FundamentalDomain { source: DomainSource::Builtin("lattice".into()), clauses, bbox: (lo, hi) })
    }

    pub fn source(&self) -> &DomainSource {
        &self.source
    }

    pub fn bbox(&self) -> &(Vec<Rational>, Vec<Rational>) {
        &self.bbox
    }

    /// Exact membership (floats compared without tolerance).
    pub fn contains<S: Scalar>(&self, x: &[S]) -> bool {
        self.contains_with(x, false)
    }

    /// Membership; with `slack`, float boundaries are widened by the
    /// boundary tolerance and strict inequalities become non-strict.
    pub fn contains_with<S: Scalar>(&self, x: &[S], slack: bool) -> bool {
        self.clauses.iter().all(|clause| clause.iter().any(|c| c.holds(x, slack)))
    }
}

/// A crystallographic group with translation lattice, coset isometries and
/// fundamental domains.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    name: String,
    n: usize,
    basis: RatMatrix,
    basis_rows: Vec<Vec<Coeff>>,
    basis_inv_rows: Vec<Vec<Coeff>>,
    basis_is_identity: bool,
    cosets: Vec<Isometry>,
    coset_inverses: Vec<Isometry>,
    domain: FundamentalDomain,
    lattice_domain: FundamentalDomain,
    radius: usize,
    transversal: Vec<Isometry>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.basis == other.basis
            && self.cosets == other.cosets
            && self.domain == other.domain
            && self.radius == other.radius
    }
}

impl GroupSpec {
    /// Builds a group and validates it: invertible basis, orthogonal coset
    /// parts preserving the lattice, identity as last coset, finite point
    /// group, and the lattice being the full translation subgroup.
    pub fn new(
        name: impl Into<String>,
        basis: RatMatrix,
        cosets: Vec<Isometry>,
        domain: FundamentalDomain,
        radius: usize,
    ) -> Result<Self> {
        let n = basis.dim();
        let basis_inv = basis.inverse()?;
        if cosets.is_empty() || !cosets.last().is_some_and(Isometry::is_identity) {
            return Err(Error::MalformedGroup("last coset must be the identity".into()));
        }
        for g in &cosets {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
            }
            let conj = basis_inv.mul(&g.linear.to_rational()).mul(&basis);
            if !conj.is_integral() {
                return Err(Error::MalformedGroup(format!(
                    "linear part {} does not preserve the lattice",
                    g.linear
                )));
            }
        }
        if domain.bbox.0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: domain.bbox.0.len() });
        }
        let lattice_domain = FundamentalDomain::lattice_cell(&basis)?;
        let row_coeffs = |m: &RatMatrix| -> Vec<Vec<Coeff>> { m.rows().iter().map(|r| coeffs(r)).collect() };
        let mut g = GroupSpec {
            name: name.into(),
            n,
            basis_rows: row_coeffs(&basis),
            basis_inv_rows: row_coeffs(&basis_inv),
            basis_is_identity: basis == RatMatrix::identity(n),
            basis,
            coset_inverses: cosets.iter().map(Isometry::inverse).collect(),
            cosets,
            domain,
            lattice_domain,
            radius,
            transversal: Vec::new(),
        };
        g.transversal = g.enumerate_point_group()?;
        Ok(g)
    }

    /// The standard torus `R^N / Z^N`.
    pub fn torus(n: usize) -> Self {
        let zero = vec![Rational::zero(); n];
        let one = vec![rat(1, 1); n];
        let domain = FundamentalDomain::builtin_box("torus", zero, one, vec![false; n]);
        GroupSpec::new(format!("torus({n})"), RatMatrix::identity(n), vec![Isometry::identity(n)], domain, DEFAULT_RADIUS)
            .expect("torus is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn cosets(&self) -> &[Isometry] {
        &self.cosets
    }

    pub fn domain(&self) -> &FundamentalDomain {
        &self.domain
    }

    pub fn lattice_domain(&self) -> &FundamentalDomain {
        &self.lattice_domain
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius = radius;
        self
    }

    /// Representatives of the point group, one per linear part, offsets
    /// reduced into the lattice cell. The identity comes first.
    pub fn transversal(&self) -> &[Isometry] {
        &self.transversal
    }

    /// True when `G = G'` (only translations).
    pub fn is_lattice_group(&self) -> bool {
        self.cosets.len() == 1
    }

    /// The translation subgroup `G'` with the lattice cell as domain.
    pub fn translation_subgroup(&self) -> GroupSpec {
        let n = self.n;
        GroupSpec::new(
            format!("{}'", self.name),
            self.basis.clone(),
            vec![Isometry::identity(n)],
            self.lattice_domain.clone(),
            self.radius,
        )
        .expect("translation subgroup of a valid group is valid")
    }

    /// Lattice translations `t_{u_i}` followed by the non-identity cosets.
    pub fn generators(&self) -> Vec<Isometry> {
        let mut gens: Vec<Isometry> = (0..self.n).map(|j| Isometry::translation(self.basis.column(j))).collect();
        gens.extend(self.cosets.iter().filter(|g| !g.is_identity()).cloned());
        gens
    }

    fn reduce_offset(&self, v: &[Rational]) -> Vec<Rational> {
        self.project_lattice(v)
    }

    fn enumerate_point_group(&self) -> Result<Vec<Isometry>> {
        let n = self.n;
        let cap = (1..=n).product::<usize>() * (1usize << n);
        let mut by_linear: HashMap<IntMatrix, Vec<Rational>> = HashMap::new();
        let mut order = vec![Isometry::identity(n)];
        by_linear.insert(IntMatrix::identity(n), vec![Rational::zero(); n]);
        let mut gens: Vec<Isometry> = self.cosets.clone();
        gens.extend(self.coset_inverses.iter().cloned());
        let mut frontier = order.clone();
        while let Some(e) = frontier.pop() {
            for g in &gens {
                let c = g.compose(&e);
                let off = self.reduce_offset(&c.offset);
                match by_linear.get(&c.linear) {
                    Some(existing) if *existing == off => {}
                    Some(_) => {
                        return Err(Error::MalformedGroup(
                            "two group elements share a linear part but differ by a non-lattice translation".into(),
                        ))
                    }
                    None => {
                        by_linear.insert(c.linear.clone(), off.clone());
                        let rep = Isometry { linear: c.linear, offset: off };
                        order.push(rep.clone());
                        frontier.push(rep);
                        if order.len() > cap {
                            return Err(Error::MalformedGroup("point group is not finite".into()));
                        }
                    }
                }
            }
        }
        Ok(order)
    }

    fn to_lattice_coords<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        if self.basis_is_identity {
            return x.to_vec();
        }
        self.basis_inv_rows.iter().map(|r| dot_coeff(r, x)).collect()
    }

    fn lattice_to_ambient<S: Scalar>(&self, z: &[S]) -> Vec<S> {
        if self.basis_is_identity {
            return z.to_vec();
        }
        self.basis_rows.iter().map(|r| dot_coeff(r, z)).collect()
    }

    /// `U y` for an integer coefficient vector.
    fn lattice_vector<S: Scalar>(&self, y: &[i64]) -> Vec<S> {
        let z: Vec<S> = y.iter().map(|&k| S::from_int(k as i128)).collect();
        self.lattice_to_ambient(&z)
    }

    /// Projection onto the lattice cell: `U·frac(U⁻¹X)`.
    pub fn project_lattice<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let z: Vec<S> = self.to_lattice_coords(x).iter().map(Scalar::frac).collect();
        self.lattice_to_ambient(&z)
    }

    /// True when `U⁻¹ v ∈ Z^N`.
    pub fn is_lattice_vector(&self, v: &[Rational]) -> bool {
        self.to_lattice_coords(v).iter().all(|c| c.is_integer())
    }

    fn offsets(&self) -> Vec<Vec<i64>> {
        let r = self.radius as i64;
        let mut out = vec![Vec::new()];
        for _ in 0..self.n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (-r..=r).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Projection onto the fundamental domain `T`, also returning the index
    /// of the coset used.
    ///
    /// The candidates `g_i⁻¹(Z) + U y`, with `Z = ϖ'(X)`, are scanned by
    /// ascending coset index and then lexicographic `y ∈ {-r..r}^N`; the
    /// first one in `T` wins. Floats are scanned once without and once with
    /// boundary tolerance.
    pub fn project_full_indexed<S: Scalar>(&self, x: &[S]) -> Result<(Vec<S>, usize)> {
        let z = self.project_lattice(x);
        if self.is_lattice_group() && self.domain.clauses == self.lattice_domain.clauses {
            return Ok((z, 0));
        }
        let passes: &[bool] = if S::EXACT { &[false] } else { &[false, true] };
        let offsets = self.offsets();
        let shifts: Vec<Vec<S>> = offsets.iter().map(|y| self.lattice_vector(y)).collect();
        for &slack in passes {
            for (i, h) in self.coset_inverses.iter().enumerate() {
                let base = h.apply(&z);
                for shift in &shifts {
                    let cand: Vec<S> = base.iter().zip(shift).map(|(a, b)| a.clone() + b.clone()).collect();
                    if self.domain.contains_with(&cand, slack) {
                        return Ok((cand, i));
                    }
                }
            }
        }
        Err(Error::ProjectionNotFound)
    }

    /// Projection `ϖ` onto the fundamental domain `T`.
    pub fn project_full<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.project_full_indexed(x).map(|(p, _)| p)
    }

    /// Squared orbit distance `min_g ‖Y − g(X)‖²` over point-group
    /// representatives and lattice translates within the search radius.
    ///
    /// Candidates are screened in `f64`; only those within `1e-9` of the
    /// float minimum are evaluated in `S`.
    pub fn orbit_distance_sq<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let zx = self.project_lattice(x);
        let zy = self.project_lattice(y);
        let yf: Vec<f64> = zy.iter().map(Scalar::to_f64).collect();
        let offsets = self.offsets();
        let shifts_f: Vec<Vec<f64>> = offsets.iter().map(|o| self.lattice_vector(o)).collect();
        let images: Vec<Vec<S>> = self.transversal.iter().map(|g| self.project_lattice(&g.apply(&zx))).collect();
        let mut scored = Vec::with_capacity(images.len() * offsets.len());
        for (gi, p) in images.iter().enumerate() {
            let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
            for (oi, s) in shifts_f.iter().enumerate() {
                let d2: f64 = yf.iter().zip(&pf).zip(s).map(|((a, b), s)| (a - b - s).powi(2)).sum();
                scored.push((d2, gi, oi));
            }
        }
        let fmin = scored.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let cutoff = fmin + 1e-9 * (1.0 + fmin);
        let mut best: Option<S> = None;
        for &(d2f, gi, oi) in &scored {
            if d2f > cutoff {
                continue;
            }
            let shift: Vec<S> = self.lattice_vector(&offsets[oi]);
            let d2 = zy
                .iter()
                .zip(&images[gi])
                .zip(&shift)
                .map(|((a, b), s)| {
                    let d = a.clone() - b.clone() - s.clone();
                    d.clone() * d
                })
                .fold(S::zero(), |acc, v| acc + v);
            if d2.is_zero_value() {
                return d2;
            }
            if best.as_ref().is_none_or(|b| d2 < *b) {
                best = Some(d2);
            }
        }
        best.unwrap_or_else(S::zero)
    }

    /// Orbit distance `d(x̄, ȳ) = inf_g ‖Y − g(X)‖`.
    pub fn orbit_distance<S: Scalar>(&self, x: &[S], y: &[S]) -> f64 {
        let d2 = self.orbit_distance_sq(x, y);
        if d2.is_zero_value() {
            0.0
        } else {
            d2.to_f64().sqrt()
        }
    }

    /// False when some element other than a translation fixes a point,
    /// searching elements `w + U y` with `y` within the search radius.
    pub fn acts_freely(&self) -> bool {
        let n = self.n;
        let offsets = self.offsets();
        for w in self.transversal.iter().filter(|w| !w.is_identity()) {
            let q_minus_i = w.linear.sub(&IntMatrix::identity(n)).to_rational();
            for y in &offsets {
                let shift: Vec<Rational> = self.lattice_vector(y);
                let rhs: Vec<Rational> = w.offset.iter().zip(&shift).map(|(a, b)| -(a + b)).collect();
                let mut aug = q_minus_i.rows();
                for (row, r) in aug.iter_mut().zip(&rhs) {
                    row.push(r.clone());
                }
                if rank(q_minus_i.rows()) == rank(aug) {
                    return false;
                }
            }
        }
        true
    }

    /// Membership of an isometry in the group: its linear part belongs to
    /// the point group and its offset differs from the representative's by
    /// a lattice vector.
    pub fn contains(&self, h: &Isometry) -> bool {
        if h.dim() != self.n {
            return false;
        }
        self.transversal.iter().any(|w| {
            w.linear == h.linear && {
                let diff: Vec<Rational> = h.offset.iter().zip(&w.offset).map(|(a, b)| a - b).collect();
                self.is_lattice_vector(&diff)
            }
        })
    }
}

/// Names accepted by [`builtin_group`].
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                let src = rows[r].clone();
                for (x, s) in rows[i].iter_mut().zip(&src) {
                    *x -= &f * s;
                }
            }
        }
        r += 1;
    }
    r
}

pub const BUILTIN_NAMES: &[&str] = &["torus(n)", "tent", "triangle-rot", "sym1", "sym2", "klein"];

fn iso(rows: Vec<Vec<i128>>, v: &[(i64, i64)]) -> Isometry {
    Isometry::new(
        IntMatrix::from_rows(rows).expect("square"),
        v.iter().map(|&(p, q)| rat(p, q)).collect(),
    )
    .expect("builtin isometry")
}

fn parse_torus_dim(name: &str) -> Option<usize> {
    let rest = name.strip_prefix("torus")?;
    let digits = rest.trim_start_matches(['(', ':']).trim_end_matches(')');
    digits.parse().ok().filter(|&n| n >= 1)
}

/// Looks up one of the built-in groups: `torus(n)` (also `torusN`,
/// `torus:N`), `tent`, `triangle-rot`, `sym1`, `sym2`, `klein`.
pub fn builtin_group(name: &str) -> Result<GroupSpec> {
    let name = name.trim();
    if let Some(n) = parse_torus_dim(name) {
        return Ok(GroupSpec::torus(n));
    }
    let int_basis = |rows: Vec<Vec<i128>>| IntMatrix::from_rows(rows).expect("square").to_rational();
    let (basis, cosets, domain) = match name {
        "tent" => (
            int_basis(vec![vec![2]]),
            vec![iso(vec![vec![-1]], &[(2, 1)]), Isometry::identity(1)],
            // s fixes 1 and s∘t⁻¹ fixes 0, so both ends belong to the domain
            FundamentalDomain::builtin_box("tent", vec![rat(0, 1)], vec![rat(1, 1)], vec![true]),
        ),
        "triangle-rot" => {
            let r = vec![vec![0, -1], vec![1, 0]];
            let r = iso(r, &[(0, 1), (0, 1)]);
            let r2 = r.compose(&r);
            let r3 = r2.compose(&r);
            (int_basis(vec![vec![1, 1], vec![-1, 1]]), vec![r, r2, r3, Isometry::identity(2)], triangle_domain())
        }
        "sym1" => (
            int_basis(vec![vec![1, 0], vec![0, 2]]),
            vec![iso(vec![vec![1, 0], vec![0, -1]], &[(0, 1), (0, 1)]), Isometry::identity(2)],
            FundamentalDomain::builtin_box("sym1", vec![rat(0, 1); 2], vec![rat(1, 1); 2], vec![false, true]),
        ),
        "sym2" => {
            let s1 = iso(vec![vec![-1, 0], vec![0, 1]], &[(0, 1), (0, 1)]);
            let s2 = iso(vec![vec![1, 0], vec![0, -1]], &[(0, 1), (0, 1)]);
            let s21 = s2.compose(&s1);
            (
                int_basis(vec![vec![2, 0], vec![0, 2]]),
                vec![s1, s2, s21, Isometry::identity(2)],
                FundamentalDomain::builtin_box("sym2", vec![rat(0, 1); 2], vec![rat(1, 1); 2], vec![true, true]),
            )
        }
        "klein" => (
            int_basis(vec![vec![2, 0], vec![0, 1]]),
            vec![iso(vec![vec![1, 0], vec![0, -1]], &[(1, 1), (0, 1)]), Isometry::identity(2)],
            FundamentalDomain::builtin_box("klein", vec![rat(0, 1); 2], vec![rat(1, 1); 2], vec![false, false]),
        ),
        other => return Err(Error::UnknownGroup(other.to_string())),
    };
    GroupSpec::new(name, basis, cosets, domain, DEFAULT_RADIUS)
}

/// Half-open triangle with vertices (1,0), (2,0), (1,1): the bottom edge is
/// kept with both ends, the left edge is dropped except (1,0), and the
/// hypotenuse is kept for `X1 >= 3/2` (the 2-fold rotation about (3/2,1/2)
/// swaps its halves).
fn triangle_domain() -> FundamentalDomain {
    use Relation::*;
    let c = |a: i64, b: i64, k: Rational, rel| LinearConstraint::new(vec![rat(a, 1), rat(b, 1)], k, rel);
    let clauses = vec![
        vec![c(0, 1, rat_int(0), Ge)],
        vec![c(1, 0, rat_int(-1), Ge)],
        vec![c(-1, -1, rat_int(2), Ge)],
        vec![c(1, 0, rat_int(-1), Gt), c(0, 1, rat_int(0), Eq)],
        vec![c(-1, -1, rat_int(2), Gt), c(1, 0, rat(-3, 2), Ge)],
    ];
    FundamentalDomain::new(
        DomainSource::Builtin("triangle-rot".into()),
        clauses,
        (vec![rat(1, 1), rat(0, 1)], vec![rat(2, 1), rat(1, 1)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn r(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    #[test]
    fn free_actions() {
        assert!(GroupSpec::torus(2).acts_freely());
        assert!(builtin_group("klein").unwrap().acts_freely());
        for name in ["tent", "sym1", "sym2", "triangle-rot"] {
            assert!(!builtin_group(name).unwrap().acts_freely(), "{name}");
        }
    }

    #[test]
    fn builtin_shapes() {
        let t = builtin_group("torus(2)").unwrap();
        assert_eq!(t.basis(), &RatMatrix::identity(2));
        assert_eq!(t.cosets().len(), 1);
        assert!(t.domain().contains(&r(&[(0, 1), (99, 100)])));
        assert!(!t.domain().contains(&r(&[(1, 1), (0, 1)])));

        let tent = builtin_group("tent").unwrap();
        assert_eq!(tent.basis().get(0, 0), &rat(2, 1));
        assert_eq!(tent.cosets().len(), 2);
        assert_eq!(tent.cosets()[0].apply(&r(&[(3, 10)])), r(&[(17, 10)]));

        let sym1 = builtin_group("sym1").unwrap();
        assert_eq!(sym1.basis(), &IntMatrix::diag(&[1, 2]).to_rational());
        assert_eq!(sym1.transversal().len(), 2);
        assert_eq!(builtin_group("triangle-rot").unwrap().transversal().len(), 4);
        assert_eq!(builtin_group("sym2").unwrap().transversal().len(), 4);
        assert_eq!(builtin_group("klein").unwrap().transversal().len(), 2);
        assert!(matches!(builtin_group("p6m"), Err(Error::UnknownGroup(_))));
        assert_eq!(builtin_group("torus3").unwrap().dim(), 3);
        assert_eq!(builtin_group("torus:4").unwrap().dim(), 4);
    }

    #[test]
    fn lattice_projection_examples() {
        let t = GroupSpec::torus(2);
        assert_eq!(t.project_lattice(&r(&[(3, 10), (7, 10)])), r(&[(3, 10), (7, 10)]));
        let tent = builtin_group("tent").unwrap();
        assert_eq!(tent.project_lattice(&r(&[(23, 10)])), r(&[(3, 10)]));
        assert_eq!(tent.project_lattice(&r(&[(-7, 10)])), r(&[(13, 10)]));
        let p = tent.project_lattice(&[-0.7f64]);
        assert!((p[0] - 1.3).abs() < 1e-15);
    }

    #[test]
    fn full_projection_examples() {
        let tent = builtin_group("tent").unwrap();
        assert_eq!(tent.project_full(&r(&[(3, 2)])).unwrap(), r(&[(1, 2)]));
        assert_eq!(tent.project_full(&r(&[(2, 5)])).unwrap(), r(&[(2, 5)]));
        assert_eq!(tent.project_full(&r(&[(1, 1)])).unwrap(), r(&[(1, 1)]));
        assert_eq!(tent.project_full(&r(&[(-1, 1)])).unwrap(), r(&[(1, 1)]));
        assert_eq!(tent.project_full(&r(&[(2, 1)])).unwrap(), r(&[(0, 1)]));
        let sym1 = builtin_group("sym1").unwrap();
        assert_eq!(sym1.project_full(&r(&[(1, 2), (13, 10)])).unwrap(), r(&[(1, 2), (7, 10)]));
        let f = sym1.project_full(&[0.5f64, 1.3]).unwrap();
        assert!((f[0] - 0.5).abs() < 1e-12 && (f[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn torus_projection_is_fractional_part() {
        let t = GroupSpec::torus(3);
        let x = r(&[(-7, 3), (5, 2), (1, 7)]);
        let want: Vec<Rational> = x.iter().map(Scalar::frac).collect();
        assert_eq!(t.project_full(&x).unwrap(), want);
        assert_eq!(t.project_lattice(&x), want);
    }

    #[test]
    fn triangle_boundary_choices() {
        let g = builtin_group("triangle-rot").unwrap();
        let d = g.domain();
        assert!(d.contains(&r(&[(1, 1), (0, 1)])));
        assert!(d.contains(&r(&[(2, 1), (0, 1)])));
        assert!(!d.contains(&r(&[(1, 1), (1, 1)])));
        assert!(!d.contains(&r(&[(1, 1), (1, 2)])));
        assert!(d.contains(&r(&[(3, 2), (1, 2)])));
        assert!(d.contains(&r(&[(9, 5), (1, 5)])));
        assert!(!d.contains(&r(&[(6, 5), (4, 5)])));
        // (1,1) and (2,0) are both lattice points
        assert_eq!(g.project_full(&r(&[(1, 1), (1, 1)])).unwrap(), r(&[(2, 1), (0, 1)]));
        assert_eq!(g.project_full(&r(&[(6, 5), (4, 5)])).unwrap(), r(&[(9, 5), (1, 5)]));
        assert_eq!(g.project_full(&r(&[(1, 1), (1, 2)])).unwrap(), r(&[(3, 2), (0, 1)]));
    }

    #[test]
    fn orbit_distance_examples() {
        let t1 = GroupSpec::torus(1);
        let d = t1.orbit_distance(&r(&[(1, 10)]), &r(&[(9, 10)]));
        assert!((d - 0.2).abs() < 1e-15);
        let tent = builtin_group("tent").unwrap();
        assert_eq!(tent.orbit_distance(&r(&[(1, 10)]), &r(&[(19, 10)])), 0.0);
        let x = r(&[(1, 3), (2, 7)]);
        for name in ["torus(2)", "sym1", "sym2", "klein", "triangle-rot"] {
            assert_eq!(builtin_group(name).unwrap().orbit_distance(&x, &x), 0.0);
        }
    }

    #[test]
    fn membership_examples() {
        let t = GroupSpec::torus(2);
        assert!(t.contains(&Isometry::translation(r(&[(3, 1), (-4, 1)]))));
        assert!(!t.contains(&Isometry::translation(r(&[(1, 2), (0, 1)]))));
        let tent = builtin_group("tent").unwrap();
        assert!(tent.contains(&iso(vec![vec![-1]], &[(4, 1)])));
        assert!(!tent.contains(&Isometry::translation(r(&[(1, 1)]))));
        assert!(tent.contains(&Isometry::translation(r(&[(-2, 1)]))));
        // words of length two
        let sym2 = builtin_group("sym2").unwrap();
        for a in sym2.generators() {
            for b in sym2.generators() {
                assert!(sym2.contains(&a.compose(&b)));
                assert!(sym2.contains(&a.compose(&b.inverse())));
            }
        }
    }

    #[test]
    fn malformed_groups_are_rejected() {
        let basis = IntMatrix::identity(1).to_rational();
        let half_shift = Isometry::translation(r(&[(1, 2)]));
        let domain = FundamentalDomain::boxed(r(&[(0, 1)]), r(&[(1, 1)]), vec![false]).unwrap();
        let e = GroupSpec::new("bad", basis.clone(), vec![half_shift, Isometry::identity(1)], domain.clone(), 2);
        assert!(matches!(e, Err(Error::MalformedGroup(_))));
        let e = GroupSpec::new("bad", basis, vec![Isometry::identity(1), iso(vec![vec![-1]], &[(0, 1)])], domain, 2);
        assert!(matches!(e, Err(Error::MalformedGroup(_))));
        let rot = IntMatrix::from_rows(vec![vec![0, -1], vec![1, 0]]).unwrap();
        let domain = FundamentalDomain::boxed(r(&[(0, 1), (0, 1)]), r(&[(1, 1), (2, 1)]), vec![false; 2]).unwrap();
        let e = GroupSpec::new(
            "bad",
            IntMatrix::diag(&[1, 2]).to_rational(),
            vec![Isometry::new(rot, r(&[(0, 1), (0, 1)])).unwrap(), Isometry::identity(2)],
            domain,
            2,
        );
        assert!(matches!(e, Err(Error::MalformedGroup(_))));
    }
}

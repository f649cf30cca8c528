//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's algorithms except for plain data access.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use tilechaos::scalar::rat;
use tilechaos::tiling::Isometry;
use tilechaos::{GroupSpec, IntMatrix, Rational};

pub fn m(rows: &[&[i128]]) -> IntMatrix {
    IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn reference_a() -> IntMatrix {
    m(&[&[-19, 26, 7], &[-51, 65, 17], &[152, -184, -47]])
}

pub fn reference_t() -> IntMatrix {
    m(&[&[6, -5, -1], &[-5, 10, 3], &[-1, 3, 1]])
}

pub const REFERENCE_C: [i128; 3] = [6, -5, -1];

/// Determinant by the Leibniz permutation expansion.
pub fn leibniz_det(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i128;
    permute(&mut perm, 0, a, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, a: &[Vec<i128>], total: &mut i128) {
    let n = perm.len();
    if k == n {
        let mut sign = 1i128;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        *total += sign * (0..n).map(|i| a[i][perm[i]]).product::<i128>();
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, a, total);
        perm.swap(k, i);
    }
}

/// `det(tI − A)`
pub fn char_value(a: &IntMatrix, t: i128) -> i128 {
    let n = a.dim();
    let rows: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { t - a.get(i, j) } else { -a.get(i, j) }).collect())
        .collect();
    leibniz_det(&rows)
}

pub fn naive_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn naive_pow(a: &[Vec<i128>], e: usize) -> Vec<Vec<i128>> {
    let n = a.len();
    let mut acc: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    for _ in 0..e {
        acc = naive_mul(&acc, a);
    }
    acc
}

pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn mat_vec(a: &IntMatrix, x: &[Rational]) -> Vec<Rational> {
    let n = a.dim();
    (0..n)
        .map(|i| (0..n).fold(Rational::zero(), |acc, j| acc + x[j].clone() * BigInt::from(a.get(i, j))))
        .collect()
}

/// `x ↦ Ax mod 1` on `E_p^N`, exact rationals; true when every point comes
/// back within `p^N` steps.
pub fn all_points_periodic(a: &IntMatrix, p: u64) -> bool {
    let n = a.dim();
    let total = (p as usize).pow(n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let x0: Vec<Rational> = (0..n)
            .map(|_| {
                let c = rest % p as usize;
                rest /= p as usize;
                Rational::new(BigInt::from(c), BigInt::from(p))
            })
            .collect();
        let mut x = x0.clone();
        let mut back = false;
        for _ in 0..total {
            x = mat_vec(a, &x).iter().map(frac).collect();
            if x == x0 {
                back = true;
                break;
            }
        }
        if !back {
            return false;
        }
    }
    true
}

/// `x ↦ Ax mod p` is a bijection of `(Z/pZ)^N`, by listing images.
pub fn brute_force_bijection(a: &IntMatrix, p: u64) -> bool {
    let n = a.dim();
    let total = (p as usize).pow(n as u32);
    let mut seen = vec![false; total];
    for idx in 0..total {
        let mut rest = idx;
        let v: Vec<i128> = (0..n)
            .map(|_| {
                let c = (rest % p as usize) as i128;
                rest /= p as usize;
                c
            })
            .collect();
        let img = (0..n).rev().fold(0usize, |acc, i| {
            let s: i128 = (0..n).map(|j| a.get(i, j) * v[j]).sum();
            acc * p as usize + s.rem_euclid(p as i128) as usize
        });
        if std::mem::replace(&mut seen[img], true) {
            return false;
        }
    }
    true
}

fn iso_key(g: &Isometry) -> String {
    format!("{:?}|{:?}", g.linear().rows(), g.offset())
}

/// Distinct group elements reachable by words of length `<= max_len` in
/// the lattice translations, the non-identity cosets and their inverses.
pub fn group_words(g: &GroupSpec, max_len: usize) -> Vec<Isometry> {
    let n = g.dim();
    let mut gens: Vec<Isometry> = Vec::new();
    for j in 0..n {
        let col = g.basis().column(j);
        gens.push(Isometry::translation(col.clone()));
        gens.push(Isometry::translation(col.iter().map(|c| -c.clone()).collect()));
    }
    for c in g.cosets().iter().filter(|c| !c.is_identity()) {
        gens.push(c.clone());
        gens.push(c.inverse());
    }
    let mut seen: HashMap<String, Isometry> = HashMap::new();
    let id = Isometry::identity(n);
    seen.insert(iso_key(&id), id.clone());
    let mut layer = vec![id];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in &gens {
                let c = s.compose(w);
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(iso_key(&c)) {
                    slot.insert(c.clone());
                    next.push(c);
                }
            }
        }
        layer = next;
    }
    seen.into_values().collect()
}

/// Distinct images `h(X)` lying in the fundamental domain.
pub fn domain_images(g: &GroupSpec, words: &[Isometry], x: &[Rational]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for w in words {
        let y = w.apply(x);
        if g.domain().contains(&y) && !out.contains(&y) {
            out.push(y);
        }
    }
    out
}

/// Random rational with denominator `den` in `[lo, hi)`.
pub fn random_rational(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Rational {
    let num = rng.gen_range(lo * den..hi * den);
    rat(num, den)
}

/// Random point of the lattice cell `U·[0,1)^N`, with a coarse denominator
/// half of the time so boundary cases come up.
pub fn random_cell_point(g: &GroupSpec, rng: &mut impl Rng) -> Vec<Rational> {
    let n = g.dim();
    let den = if rng.gen_bool(0.5) { 4 } else { rng.gen_range(5..2000) };
    let z: Vec<Rational> = (0..n).map(|_| random_rational(rng, 0, 1, den)).collect();
    (0..n)
        .map(|i| (0..n).fold(Rational::zero(), |acc, j| acc + g.basis().get(i, j) * &z[j]))
        .collect()
}

/// Exact torus simulation of the drive and observer, written directly from
/// the update formulas; returns `(X_k, X̂_k, Y_k − Ŷ_k)` for `k = 0..K`.
pub fn torus_sync_oracle(
    a: &IntMatrix,
    c: &[i128],
    l: &[i128],
    mm: &[i128],
    x0: &[Rational],
    xhat0: &[Rational],
    u: &[Rational],
) -> Vec<(Vec<Rational>, Vec<Rational>, Rational)> {
    let dot = |row: &[i128], x: &[Rational]| -> Rational {
        row.iter().zip(x).fold(Rational::zero(), |acc, (&r, xi)| acc + xi * BigInt::from(r))
    };
    let mut x = x0.to_vec();
    let mut xh = xhat0.to_vec();
    let mut out = Vec::new();
    for uk in u {
        let w: Vec<Rational> = x.iter().zip(mm).map(|(xi, &mi)| xi + uk * BigInt::from(mi)).collect();
        let y = dot(c, &w);
        let yh = dot(c, &xh);
        out.push((x.clone(), xh.clone(), &y - &yh));
        x = mat_vec(a, &w).iter().map(frac).collect();
        let innov = &y - &yh;
        xh = mat_vec(a, &xh)
            .iter()
            .zip(l)
            .map(|(v, &li)| frac(&(v + &innov * BigInt::from(li))))
            .collect();
    }
    out
}

//! Whole operations behind the command-line tool and the browser demo:
//! seeded key generation, seeded starting states, proof rendering.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::scalar::Rational;
use crate::sync::{keygen, random_unit_upper, KeyProof, ObserverKey};
use crate::tiling::GroupSpec;
use crate::AffineSystem;

/// Denominator of seeded starting states, per lattice coordinate.
pub const STATE_DENOMINATOR: i64 = 1 << 20;

pub enum ThatSource {
    /// Entries above the diagonal uniform in `[-bound, bound]`.
    Random { bound: i128 },
    Given(IntMatrix),
}

pub struct KeygenRequest {
    /// Checked against `alphas` when present.
    pub n: Option<usize>,
    pub alphas: Vec<i128>,
    pub that: ThatSource,
    pub seed: u64,
    /// Zero when absent.
    pub b: Option<Vec<Rational>>,
    pub group: GroupSpec,
}

pub fn generate_key(req: KeygenRequest) -> Result<ObserverKey> {
    let n = req.alphas.len();
    if let Some(want) = req.n {
        if want != n {
            return Err(Error::DimensionMismatch { expected: want, got: n });
        }
    }
    if n == 0 {
        return Err(Error::InvalidArgument("alphas must not be empty".into()));
    }
    let that = match req.that {
        ThatSource::Random { bound } => random_unit_upper(n, bound, &mut ChaCha8Rng::seed_from_u64(req.seed)),
        ThatSource::Given(t) if t.dim() == n => t,
        ThatSource::Given(t) => return Err(Error::DimensionMismatch { expected: n, got: t.dim() }),
    };
    let b = req.b.unwrap_or_else(|| vec![Rational::zero(); n]);
    keygen(&that, &req.alphas, b, req.group)
}

impl ObserverKey {
    /// The drive map `X ↦ AX + B` on the key's group.
    pub fn system(&self) -> AffineSystem {
        AffineSystem::new(self.a().clone(), self.b().to_vec(), self.group().clone())
            .expect("key invariants include the covering condition")
    }
}

/// Random rational point of the fundamental domain: uniform lattice
/// coordinates with denominator [`STATE_DENOMINATOR`], then projected.
pub fn seeded_state(group: &GroupSpec, seed: u64) -> Result<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<Rational> = (0..group.dim())
        .map(|_| Rational::new(BigInt::from(rng.gen_range(0..STATE_DENOMINATOR)), BigInt::from(STATE_DENOMINATOR)))
        .collect();
    group.project_full(&group.basis().apply(&z))
}

pub fn seeded_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen()).collect()
}

/// Human-readable certificate for a key.
pub fn render_proof(key: &ObserverKey, proof: &KeyProof) -> String {
    let mut s = String::new();
    let g = &proof.gains;
    let chaos = &proof.chaos;
    let _ = writeln!(s, "group        {}", key.group().name());
    let _ = writeln!(s, "A            {}", key.a());
    let _ = writeln!(s, "C            {:?}", key.c());
    let _ = writeln!(s, "T            {}", key.t());
    let _ = writeln!(s, "A_flat       {}", proof.companion.a_flat);
    let _ = writeln!(s, "C_flat       {:?}", proof.companion.c_flat);
    let _ = writeln!(s, "alphas       {:?}", proof.companion.alphas);
    let _ = writeln!(s, "det A        {}", proof.det);
    let _ = writeln!(s, "charpoly     {}", proof.charpoly);
    let _ = writeln!(s, "L            {:?}", g.l);
    let _ = writeln!(s, "M            {:?}", g.m);
    let _ = writeln!(s, "A - LC       {}", g.error_matrix);
    let _ = writeln!(s, "(A - LC)^n = 0   {}", g.nilpotent);
    let _ = writeln!(s, "(A - LC)M = 0    {}", g.annihilates_m);
    let _ = writeln!(s, "CM           {}", g.cm);
    let _ = writeln!(s, "chaotic      {}", chaos.chaotic);
    for note in &chaos.notes {
        let _ = writeln!(s, "note         {note}");
    }
    s
}

//! Numerical evidence of chaos: periodic points on rational grids, Lyapunov
//! spectra, Weyl sums and box counts.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{check_chaos, AffineSystem, ChaosReport};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalue_moduli, IntMatrix, EIG_MERGE_TOL};
use crate::scalar::{dot_int, Scalar};

/// Default cap on `p^N` for [`periodic_points`].
pub const DEFAULT_POINT_BUDGET: u128 = 1_000_000;

/// `gcd(p, det A) = 1`, i.e. `x ↦ Ax` is a bijection of `(Z/pZ)^N`.
pub fn mod_p_invertible(a: &IntMatrix, p: u64) -> bool {
    (p as i128).gcd(&a.det()) == 1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicReport {
    pub p: u64,
    pub points_checked: u128,
    pub all_periodic: bool,
    /// period → number of points with that least period
    pub period_histogram: BTreeMap<u64, u64>,
}

/// Least periods of every point of `E_p^N = {0, 1/p, ..., (p-1)/p}^N` under
/// `x ↦ Ax mod 1`.
///
/// A point `v/p` is tracked by its numerator `v ∈ (Z/pZ)^N`, so the
/// iteration is exact. Orbits longer than `p^N` steps count as failures.
pub fn periodic_points(a: &IntMatrix, p: u64, budget: u128) -> Result<PeriodicReport> {
    if p == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let n = a.dim();
    let total = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    if !mod_p_invertible(a, p) {
        return Err(Error::NotCoprime { p, det: a.det() });
    }
    let total = total as usize;
    let pi = p as i128;
    let decode = |mut idx: usize| -> Vec<i128> {
        let mut v = vec![0i128; n];
        for c in v.iter_mut().rev() {
            *c = (idx % p as usize) as i128;
            idx /= p as usize;
        }
        v
    };
    let encode = |v: &[i128]| -> usize { v.iter().fold(0usize, |acc, &c| acc * p as usize + c as usize) };
    let image = |idx: usize| -> usize {
        let v = decode(idx);
        let w: Vec<i128> = a.mul_vec(&v).iter().map(|x| x.rem_euclid(pi)).collect();
        encode(&w)
    };

    let mut period = vec![0u64; total];
    let mut histogram = BTreeMap::new();
    let mut all_periodic = true;
    let mut path = Vec::new();
    for start in 0..total {
        if period[start] != 0 {
            continue;
        }
        path.clear();
        path.push(start);
        let mut cur = image(start);
        while cur != start && path.len() <= total {
            if period[cur] != 0 {
                break;
            }
            path.push(cur);
            cur = image(cur);
        }
        if cur != start {
            all_periodic = false;
            for &i in &path {
                period[i] = u64::MAX;
            }
            continue;
        }
        let len = path.len() as u64;
        for &i in &path {
            period[i] = len;
        }
        *histogram.entry(len).or_insert(0) += len;
    }
    Ok(PeriodicReport { p, points_checked: total as u128, all_periodic, period_histogram: histogram })
}

/// `(ln μ₁, ..., ln μ_m)` over the distinct eigenvalue moduli, descending.
pub fn lyapunov_spectrum(a: &IntMatrix) -> Result<Vec<f64>> {
    let moduli = eigenvalue_moduli(a)?;
    if moduli.iter().any(|m| (m - 1.0).abs() <= EIG_MERGE_TOL) {
        return Err(Error::ModulusOne);
    }
    Ok(moduli.iter().map(|m| m.ln()).collect())
}

/// Top Lyapunov exponent from `K` steps of a random unit tangent vector.
///
/// The tangent map of `ϖ ∘ f` at `x` is `Q A`, where `Q` is the linear part
/// of the isometry the projection applied; `Q` is orthogonal, so only `A`
/// changes the norm, but carrying it keeps the direction correct.
pub fn empirical_top_lyapunov(sys: &AffineSystem, x0: &[f64], k: usize, seed: u64) -> Result<f64> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = random_unit(n, &mut rng);
    let mut x = x0.to_vec();
    let cosets = sys.group().cosets();
    let mut total = 0.0;
    for _ in 0..k {
        let (next, idx) = sys.step_indexed(&x)?;
        let au = sys.a().apply(&u);
        let back = cosets[idx].linear().transpose();
        let v = back.apply(&au);
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        total += norm.ln();
        u = v.iter().map(|c| c / norm).collect();
        x = next;
    }
    Ok(total / k as f64)
}

fn random_unit(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylEntry {
    pub p: Vec<i64>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylReport {
    #[serde(rename = "K")]
    pub k: usize,
    pub entries: Vec<WeylEntry>,
}

impl WeylReport {
    pub fn max_magnitude(&self) -> f64 {
        self.entries.iter().map(|e| e.magnitude).fold(0.0, f64::max)
    }
}

/// `|K⁻¹ Σ_k exp(2πi p·x_k)|` per probe. The phase `frac(p·x_k)` is reduced
/// in the scalar type before the trigonometric evaluation.
pub fn weyl_sums<S: Scalar>(seq: &[Vec<S>], probes: &[Vec<i64>]) -> Result<WeylReport> {
    let entries = probes
        .iter()
        .map(|p| weyl_entry(seq, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeylReport { k: seq.len(), entries })
}

/// Same as [`weyl_sums`], spreading probes over `jobs` threads.
pub fn weyl_sums_parallel<S: Scalar>(seq: &[Vec<S>], probes: &[Vec<i64>], jobs: usize) -> Result<WeylReport> {
    if jobs <= 1 || probes.len() < 2 {
        return weyl_sums(seq, probes);
    }
    let chunk = probes.len().div_ceil(jobs);
    let parts: Vec<Result<Vec<WeylEntry>>> = std::thread::scope(|s| {
        let handles: Vec<_> = probes
            .chunks(chunk)
            .map(|ps| s.spawn(move || ps.iter().map(|p| weyl_entry(seq, p)).collect::<Result<Vec<_>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("weyl worker panicked")).collect()
    });
    let mut entries = Vec::with_capacity(probes.len());
    for part in parts {
        entries.extend(part?);
    }
    Ok(WeylReport { k: seq.len(), entries })
}

fn weyl_entry<S: Scalar>(seq: &[Vec<S>], p: &[i64]) -> Result<WeylEntry> {
    if p.iter().all(|&c| c == 0) {
        return Err(Error::ZeroProbe);
    }
    let row: Vec<i128> = p.iter().map(|&c| c as i128).collect();
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for x in seq {
        if x.len() != row.len() {
            return Err(Error::DimensionMismatch { expected: row.len(), got: x.len() });
        }
        let phase = TAU * dot_int(&row, x).frac().to_f64();
        re += phase.cos();
        im += phase.sin();
    }
    let magnitude = if seq.is_empty() { 0.0 } else { re.hypot(im) / seq.len() as f64 };
    Ok(WeylEntry { p: p.to_vec(), magnitude })
}

/// Nonzero integer vectors with `‖p‖∞ ≤ radius`, one of each pair `±p`
/// (the one whose first nonzero entry is positive); `p` and `−p` give
/// conjugate sums of equal magnitude.
pub fn probes_up_to(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut all = vec![Vec::new()];
    for _ in 0..n {
        all = all
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-radius..=radius).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    all.into_iter()
        .filter(|v| v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCount {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub fraction: f64,
    pub measure: f64,
}

/// Fraction of `seq` inside `[lo, hi)` and the box's Lebesgue measure.
pub fn box_count<S: Scalar>(seq: &[Vec<S>], lo: &[f64], hi: &[f64]) -> Result<BoxCount> {
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
    }
    if lo.iter().zip(hi).any(|(&l, &h)| !(0.0 <= l && l <= h && h <= 1.0)) {
        return Err(Error::InvalidArgument("box must lie in [0,1)^N".into()));
    }
    let measure = lo.iter().zip(hi).map(|(l, h)| h - l).product();
    let inside = seq
        .iter()
        .filter(|x| {
            x.iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (&l, &h))| {
                    let v = c.to_f64();
                    l <= v && v < h
                })
        })
        .count();
    let fraction = if seq.is_empty() { 0.0 } else { inside as f64 / seq.len() as f64 };
    Ok(BoxCount { lo: lo.to_vec(), hi: hi.to_vec(), fraction, measure })
}

/// The `2^N` half-width boxes covering `[0,1)^N`.
pub fn dyadic_boxes(n: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..1usize << n)
        .map(|mask| {
            let lo: Vec<f64> = (0..n).map(|i| if mask >> (n - 1 - i) & 1 == 1 { 0.5 } else { 0.0 }).collect();
            let hi = lo.iter().map(|l| l + 0.5).collect();
            (lo, hi)
        })
        .collect()
}

/// `y_k = frac(C·x_k)`
pub fn output_sequence<S: Scalar>(seq: &[Vec<S>], c: &[i128]) -> Result<Vec<S>> {
    if c.iter().all(|&v| v == 0) {
        return Err(Error::ZeroC);
    }
    seq.iter()
        .map(|x| {
            if x.len() != c.len() {
                return Err(Error::DimensionMismatch { expected: c.len(), got: x.len() });
            }
            Ok(dot_int(c, x).frac())
        })
        .collect()
}

/// Settings for [`diagnose`].
#[derive(Clone, Debug)]
pub struct DiagnoseConfig {
    pub primes: Vec<u64>,
    pub budget: u128,
    /// Trajectory length for Weyl sums, box counts and the empirical exponent.
    pub steps: usize,
    pub seed: u64,
    pub probe_radius: i64,
    /// Output row `C` for the scalar Weyl test; skipped when `None`.
    pub output_c: Option<Vec<i128>>,
    pub output_probes: i64,
    pub jobs: usize,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        DiagnoseConfig {
            primes: vec![2, 3, 5, 7],
            budget: DEFAULT_POINT_BUDGET,
            steps: 10_000,
            seed: 0,
            probe_radius: 2,
            output_c: None,
            output_probes: 3,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsReport {
    pub chaos_report: ChaosReport,
    pub periodic: Vec<PeriodicReport>,
    pub lyapunov: Vec<f64>,
    pub lyapunov_empirical: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    pub x0: Vec<f64>,
    pub weyl: Vec<WeylEntry>,
    pub output_weyl: Vec<WeylEntry>,
    pub boxes: Vec<BoxCount>,
    pub notes: Vec<String>,
}

/// Runs every diagnostic on `sys` from one seeded random start.
///
/// Periodic points use `U⁻¹AU`, the map induced on the lattice torus.
/// Weyl sums and box counts are taken in lattice coordinates
/// `frac(U⁻¹ x)`, which is the state itself on the standard torus.
pub fn diagnose(sys: &AffineSystem, cfg: &DiagnoseConfig) -> Result<DiagnosticsReport> {
    let group = sys.group();
    let chaos = check_chaos(sys.a(), sys.b(), group)?;
    let mut notes = Vec::new();

    let u = group.basis();
    let a_lat_r = u.inverse()?.mul(&sys.a().to_rational()).mul(u);
    let a_lat = IntMatrix::from_fn(sys.dim(), |i, j| {
        num_traits::ToPrimitive::to_i128(&a_lat_r.get(i, j).to_integer()).unwrap_or(0)
    });

    let periodic_results: Vec<(u64, Result<PeriodicReport>)> = if cfg.jobs > 1 && cfg.primes.len() > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = cfg
                .primes
                .iter()
                .map(|&p| {
                    let a = &a_lat;
                    s.spawn(move || (p, periodic_points(a, p, cfg.budget)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("periodic worker panicked")).collect()
        })
    } else {
        cfg.primes.iter().map(|&p| (p, periodic_points(&a_lat, p, cfg.budget))).collect()
    };
    let mut periodic = Vec::new();
    for (p, r) in periodic_results {
        match r {
            Ok(rep) => periodic.push(rep),
            Err(e) => notes.push(format!("periodic points skipped for p = {p}: {e}")),
        }
    }

    let lyapunov = match lyapunov_spectrum(sys.a()) {
        Ok(l) => l,
        Err(e) => {
            notes.push(format!("Lyapunov spectrum unavailable: {e}"));
            Vec::new()
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x0 = sample_in_domain(sys, &mut rng)?;
    let lyapunov_empirical = if cfg.steps > 0 && chaos.det_nonzero {
        Some(empirical_top_lyapunov(sys, &x0, cfg.steps, rng.gen())?)
    } else {
        None
    };

    let traj = sys.trajectory(&x0, cfg.steps)?;
    let lattice_traj: Vec<Vec<f64>> = traj.iter().map(|x| lattice_coords(sys, x)).collect();
    let probes = probes_up_to(sys.dim(), cfg.probe_radius);
    let weyl = if probes.is_empty() || lattice_traj.is_empty() {
        Vec::new()
    } else {
        weyl_sums_parallel(&lattice_traj, &probes, cfg.jobs)?.entries
    };
    let output_weyl = match &cfg.output_c {
        Some(c) if !lattice_traj.is_empty() => {
            let ys: Vec<Vec<f64>> = output_sequence(&traj, c)?.into_iter().map(|y| vec![y]).collect();
            let scalar_probes: Vec<Vec<i64>> = (1..=cfg.output_probes).map(|q| vec![q]).collect();
            weyl_sums(&ys, &scalar_probes)?.entries
        }
        _ => Vec::new(),
    };
    let boxes = if lattice_traj.is_empty() {
        Vec::new()
    } else {
        dyadic_boxes(sys.dim())
            .iter()
            .map(|(lo, hi)| box_count(&lattice_traj, lo, hi))
            .collect::<Result<Vec<_>>>()?
    };
    if !group.is_lattice_group() {
        notes.push("equidistribution statistics are taken in lattice coordinates; no pass/fail claim off the torus".into());
    }

    Ok(DiagnosticsReport {
        chaos_report: chaos,
        periodic,
        lyapunov,
        lyapunov_empirical,
        k: cfg.steps,
        x0,
        weyl,
        output_weyl,
        boxes,
        notes,
    })
}

fn lattice_coords(sys: &AffineSystem, x: &[f64]) -> Vec<f64> {
    let g = sys.group();
    if g.is_lattice_group() && g.basis() == &crate::linalg::RatMatrix::identity(sys.dim()) {
        return x.to_vec();
    }
    let inv = g.basis().inverse().expect("group basis is invertible");
    inv.apply(x).iter().map(Scalar::frac).collect()
}

/// Uniform point of the fundamental domain, by rejection from its bounding box.
pub fn sample_in_domain(sys: &AffineSystem, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let domain = sys.group().domain();
    let (lo, hi) = domain.bbox();
    let lo: Vec<f64> = lo.iter().map(Scalar::to_f64).collect();
    let hi: Vec<f64> = hi.iter().map(Scalar::to_f64).collect();
    for _ in 0..10_000 {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(&l, &h)| l + (h - l) * rng.gen::<f64>()).collect();
        if domain.contains(&x) {
            return Ok(x);
        }
    }
    Err(Error::ProjectionNotFound)
}

//! Acceptance suite: one line per criterion, then a single assertion that
//! all of them passed.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilechaos::codec::{digit_sweep, MixingCodec};
use tilechaos::diagnostics::{empirical_top_lyapunov, output_sequence, periodic_points, probes_up_to, weyl_sums};
use tilechaos::linalg::root_of_unity_orders;
use tilechaos::poly::IntPoly;
use tilechaos::scalar::rat;
use tilechaos::sync::{error_sequence, gain_from_companion, random_key, verify_companion_similarity};
use tilechaos::{builtin_group, dynamics::tent_map, AffineSystem, GroupSpec, IntMatrix, ObserverKey, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: usize, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = o.pass && in_time;
    println!(
        "criterion {id:>2} [{}] {title}: {} ({:.2}s of {:.0}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        limit.as_secs_f64()
    );
    pass
}

fn reference_key_reproduction() -> Outcome {
    let a = reference_a();
    let t = reference_t();
    let pair = match verify_companion_similarity(&a, &REFERENCE_C, &t) {
        Ok(p) => p,
        Err(e) => return outcome(false, format!("companion check failed: {e}")),
    };
    let printed_flat = m(&[&[-1, 1, 0], &[7, 0, 1], &[3, 0, 0]]);
    let gains = match gain_from_companion(&a, &REFERENCE_C, &t, &pair) {
        Ok(g) => g,
        Err(e) => return outcome(false, format!("gain derivation failed: {e}")),
    };
    let det = leibniz_det(&a.rows());
    let printed_eigs = [-3.0, -0.4142, 2.4142];
    let mut eigs: Vec<f64> = a.eigenvalues().iter().map(|&(re, _)| re).collect();
    eigs.sort_by(f64::total_cmp);
    let eig_ok = a.eigenvalues().iter().all(|&(_, im)| im.abs() < 1e-9)
        && eigs.iter().zip(printed_eigs).all(|(g, w)| (g - w).abs() < 1e-3);
    let ok = pair.a_flat == printed_flat
        && gains.l == vec![-2, -6, 19]
        && gains.m == vec![1, 2, -5]
        && det == 3
        && eig_ok;
    outcome(ok, format!("A♭ = {}, L = {:?}, M = {:?}, det = {det}, eigenvalues {eigs:.4?}", pair.a_flat, gains.l, gains.m))
}

fn finite_time_sync() -> Outcome {
    let key = ObserverKey::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let steps = 24;
    let mut late_errors = 0usize;
    for _ in 0..100 {
        let mut draw = |max: i64| {
            let den = rng.gen_range(2..max);
            random_rational(&mut rng, 0, 1, den)
        };
        let x0: Vec<Rational> = (0..3).map(|_| draw(10_000)).collect();
        let xh0: Vec<Rational> = (0..3).map(|_| draw(10_000)).collect();
        let u: Vec<Rational> = (0..steps).map(|_| draw(1000)).collect();
        let e = error_sequence(&key, &x0, &xh0, &u, steps).expect("simulation");
        let oracle = torus_sync_oracle(key.a(), key.c(), key.l(), key.m(), &x0, &xh0, &u);
        late_errors += e.iter().skip(4).filter(|&&ek| ek != 0.0).count();
        let oracle_synced = oracle.iter().skip(4).all(|(x, xh, _)| x == xh);
        let oracle_recovers = oracle.iter().enumerate().skip(4).all(|(k, (_, _, du))| du == &u[k]);
        if !oracle_synced || !oracle_recovers {
            return outcome(false, "independent simulation disagrees");
        }
    }
    outcome(late_errors == 0, format!("100 runs of {steps} steps, {late_errors} nonzero e_k with k >= 4"))
}

fn dead_beat_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for i in 0..200 {
        let n = 1 + i % 4;
        let key = random_key(n, &mut rng);
        let a = key.a().rows();
        let err: Vec<Vec<i128>> = (0..n)
            .map(|r| (0..n).map(|c| a[r][c] - key.l()[r] * key.c()[c]).collect())
            .collect();
        let nil = naive_pow(&err, n).iter().flatten().all(|&v| v == 0);
        let am = (0..n).all(|r| (0..n).map(|c| err[r][c] * key.m()[c]).sum::<i128>() == 0);
        let cm: i128 = key.c().iter().zip(key.m()).map(|(x, y)| x * y).sum();
        if !(nil && am && cm == 1) {
            return outcome(false, format!("key {i} fails: nilpotent={nil}, (A-LC)M=0: {am}, CM={cm}"));
        }
        count += 1;
    }
    outcome(true, format!("{count} keys, n in 1..=4, all identities exact"))
}

fn truncated_channel() -> Outcome {
    let key = ObserverKey::reference();
    let codec = MixingCodec::plain(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let msg: Vec<u8> = (0..1000).map(|_| rng.gen()).collect();
    let x0: Vec<Rational> = (0..3).map(|_| random_rational(&mut rng, 0, 1, 1_000_003)).collect();
    let xh0 = vec![Rational::zero(); 3];
    let sweep = match digit_sweep(&key, &codec, &msg, &x0, &xh0, 1..=8) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let errs: Vec<String> = sweep.errors.iter().map(|(q, e)| format!("q={q}:{e}")).collect();
    let ok = sweep.q_star.is_some_and(|q| q <= 6);
    let q = sweep.q_star.map_or("none".to_string(), |q| q.to_string());
    outcome(ok, format!("q* = {q} (reference value 4); byte errors {}", errs.join(" ")))
}

fn periodic_lattices() -> Outcome {
    let a = reference_a();
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [2u64, 5, 7, 11] {
        let rep = periodic_points(&a, p, 1_000_000).expect("coprime and within budget");
        let oracle = all_points_periodic(&a, p);
        ok &= rep.all_periodic && oracle && rep.points_checked == (p as u128).pow(3);
        let max_period = rep.period_histogram.keys().max().copied().unwrap_or(0);
        parts.push(format!("p={p}: {} points, max period {max_period}", rep.points_checked));
    }
    outcome(ok, parts.join("; "))
}

fn tent_realization() -> Outcome {
    let sys = AffineSystem::linear(m(&[&[2]]), builtin_group("tent").unwrap()).unwrap();
    let n = 10_000i64;
    let mismatches = (0..n)
        .filter(|&i| {
            let x = rat(i, n);
            sys.step(std::slice::from_ref(&x)).unwrap() != vec![tent_map(&x)]
        })
        .count();
    outcome(mismatches == 0, format!("{n} grid points, {mismatches} mismatches"))
}

fn root_of_unity_detector() -> Outcome {
    let cases: [(IntMatrix, Vec<usize>); 4] = [
        (IntMatrix::identity(3), vec![1]),
        (m(&[&[0, -1], &[1, 0]]), vec![4]),
        (IntMatrix::companion_of(&IntPoly::new(vec![1, -1, 1])), vec![6]),
        (reference_a(), vec![]),
    ];
    let got: Vec<Vec<usize>> = cases.iter().map(|(a, _)| root_of_unity_orders(a)).collect();
    let ok = cases.iter().zip(&got).all(|((_, want), g)| g == want);
    outcome(ok, format!("orders {got:?}"))
}

fn lyapunov_cross_check() -> Outcome {
    let cat = AffineSystem::linear(m(&[&[2, 1], &[1, 1]]), GroupSpec::torus(2)).unwrap();
    let l_cat = empirical_top_lyapunov(&cat, &[0.1234, 0.5678], 10_000, 8).unwrap();
    let want_cat = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    let reference = AffineSystem::linear(reference_a(), GroupSpec::torus(3)).unwrap();
    let l_ref = empirical_top_lyapunov(&reference, &[0.31, 0.47, 0.83], 10_000, 8).unwrap();
    let want_ref = 3f64.ln();
    let rel_cat = (l_cat - want_cat).abs() / want_cat;
    let rel_ref = (l_ref - want_ref).abs() / want_ref;
    outcome(
        rel_cat <= 0.01 && rel_ref <= 0.05,
        format!("cat map {l_cat:.6} vs {want_cat:.6} ({:.3}%), reference {l_ref:.6} vs {want_ref:.6} ({:.3}%)", 100.0 * rel_cat, 100.0 * rel_ref),
    )
}

fn equidistribution() -> Outcome {
    let k = 100_000;
    let bound = 5.0 / (k as f64).sqrt();
    let systems = [
        (AffineSystem::linear(m(&[&[2, 1], &[1, 1]]), GroupSpec::torus(2)).unwrap(), vec![1i128, 0]),
        (AffineSystem::linear(reference_a(), GroupSpec::torus(3)).unwrap(), REFERENCE_C.to_vec()),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (sys, c) in &systems {
        let n = sys.dim();
        let probes = probes_up_to(n, 2);
        let scalar: Vec<Vec<i64>> = (1..=3).map(|q| vec![q]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9 + n as u64);
        let (mut state_pass, mut output_pass, mut worst) = (0, 0, 0.0f64);
        for _ in 0..10 {
            let x0: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let traj = sys.trajectory(&x0, k).unwrap();
            let w = weyl_sums(&traj, &probes).unwrap().max_magnitude();
            let ys: Vec<Vec<f64>> = output_sequence(&traj, c).unwrap().into_iter().map(|y| vec![y]).collect();
            let wy = weyl_sums(&ys, &scalar).unwrap().max_magnitude();
            worst = worst.max(w).max(wy);
            state_pass += usize::from(w <= bound);
            output_pass += usize::from(wy <= bound);
        }
        ok &= state_pass >= 9 && output_pass >= 9;
        parts.push(format!("n={n}: state {state_pass}/10, output {output_pass}/10, max {worst:.5}"));
    }
    outcome(ok, format!("bound {bound:.5}; {}", parts.join("; ")))
}

fn projection_correctness() -> Outcome {
    let names = ["torus(1)", "torus(2)", "torus(3)", "tent", "triangle-rot", "sym1", "sym2", "klein"];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut parts = Vec::new();
    let mut ok = true;
    for name in names {
        let g = builtin_group(name).unwrap();
        let words = group_words(&g, 4);
        let mut bad = 0;
        for _ in 0..1000 {
            let x = random_cell_point(&g, &mut rng);
            let images = domain_images(&g, &words, &x);
            let got = g.project_full(&x).ok();
            if images.len() != 1 || got.as_ref() != Some(&images[0]) {
                bad += 1;
            }
        }
        ok &= bad == 0;
        parts.push(format!("{name} {bad}"));
    }
    outcome(ok, format!("mismatches per group over 1000 points: {}", parts.join(", ")))
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        run(1, "reference key reproduction", s(1), reference_key_reproduction),
        run(2, "finite-time synchronization", s(5), finite_time_sync),
        run(3, "dead-beat algebra on random keys", s(10), dead_beat_algebra),
        run(4, "truncated-channel recovery", s(10), truncated_channel),
        run(5, "periodic-point lattices", s(30), periodic_lattices),
        run(6, "tent-map realization", s(2), tent_realization),
        run(7, "root-of-unity detector", s(1), root_of_unity_detector),
        run(8, "Lyapunov cross-check", s(5), lyapunov_cross_check),
        run(9, "equidistribution", s(60), equidistribution),
        run(10, "projection correctness", s(30), projection_correctness),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len());
}

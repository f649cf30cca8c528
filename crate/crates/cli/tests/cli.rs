use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tilechaos::io::key_from_json;
use tilechaos::ObserverKey;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilechaos")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn keygen_from_alphas_has_requested_charpoly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("key.json");
    let res = run(&["keygen", "--n", "3", "--alphas", "1,-7,-3", "--that", "random", "--seed", "7", "--out", path_str(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let key = key_from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(key.a().charpoly().coeffs(), &[-3, -7, 1, 1]);
    let proof = String::from_utf8(res.stdout).unwrap();
    assert!(proof.contains("(A - LC)^n = 0   true"));
    assert!(proof.contains("CM           1"));
}

#[test]
fn keygen_reference_key_matches_builtin() {
    let res = run(&["keygen", "--reference-key"]);
    assert!(res.status.success());
    let key = key_from_json(&String::from_utf8(res.stdout).unwrap()).unwrap();
    let reference = ObserverKey::reference();
    assert_eq!(key.a(), reference.a());
    assert_eq!(key.l(), &[-2, -6, 19]);
    assert_eq!(key.m(), &[1, 2, -5]);
    assert_eq!(key.t(), reference.t());
}

#[test]
fn keygen_validation_failures_exit_2() {
    let res = run(&["keygen", "--alphas", "1,-7,0"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("root 0"));
    let res = run(&["keygen", "--alphas", "0,1"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn missing_files_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["mask", "--reference-key", "--input", path_str(&dir.path().join("absent")), "--output", path_str(&dir.path().join("f"))]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn diagnose_reports_chaos() {
    let json = |args: &[&str]| -> serde_json::Value {
        let res = run(args);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        serde_json::from_slice(&res.stdout).unwrap()
    };
    let rot = json(&["diagnose", "--a", "0,-1;1,0", "--steps", "100"]);
    assert_eq!(rot["chaos_report"]["chaotic"], false);
    assert_eq!(rot["chaos_report"]["root_of_unity_orders"], serde_json::json!([4]));

    let tent = json(&["diagnose", "--a", "2", "--group", "tent", "--steps", "100"]);
    assert_eq!(tent["chaos_report"]["chaotic"], true);

    let reference = json(&["diagnose", "--reference-key", "--steps", "1000"]);
    assert_eq!(reference["chaos_report"]["chaotic"], true);
    let want = [3f64.ln(), (1.0 + 2f64.sqrt()).ln(), (2f64.sqrt() - 1.0).ln()];
    let got: Vec<f64> = reference["lyapunov"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(got.len(), 3);
    for w in want {
        assert!(got.iter().any(|g| (g - w).abs() < 1e-9), "{got:?}");
    }
}

#[test]
fn mask_unmask_roundtrip_exact() {
    let dir = tempfile::tempdir().unwrap();
    let (plain, frames, back) = (dir.path().join("p"), dir.path().join("f"), dir.path().join("b"));
    let payload: Vec<u8> = (0..=255u8).chain((0..200).map(|i: u32| (i * 37 % 251) as u8)).collect();
    fs::write(&plain, &payload).unwrap();
    assert!(run(&["mask", "--reference-key", "--input", path_str(&plain), "--output", path_str(&frames), "--w", "1,0,2"]).status.success());
    let text = fs::read_to_string(&frames).unwrap();
    assert!(text.lines().next().unwrap().starts_with("k:0 y:"));
    assert!(run(&["unmask", "--reference-key", "--input", path_str(&frames), "--output", path_str(&back), "--w", "1,0,2"]).status.success());
    assert_eq!(fs::read(&back).unwrap(), payload);
}

#[test]
fn four_digit_channel_recovers_ten_thousand_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (plain, frames, back) = (dir.path().join("p"), dir.path().join("f"), dir.path().join("b"));
    fs::write(&plain, tilechaos::ops::seeded_bytes(10_000, 3)).unwrap();
    assert!(run(&["mask", "--reference-key", "--q", "4", "--input", path_str(&plain), "--output", path_str(&frames)]).status.success());
    assert!(run(&["unmask", "--reference-key", "--input", path_str(&frames), "--output", path_str(&back)]).status.success());
    assert_eq!(fs::read(&back).unwrap(), fs::read(&plain).unwrap());
}

#[test]
fn frame_gap_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (plain, frames, back) = (dir.path().join("p"), dir.path().join("f"), dir.path().join("b"));
    fs::write(&plain, [7u8; 30]).unwrap();
    assert!(run(&["mask", "--reference-key", "--input", path_str(&plain), "--output", path_str(&frames)]).status.success());
    let text = fs::read_to_string(&frames).unwrap();
    let cut: String = text.lines().filter(|l| !l.starts_with("k:10 ")).map(|l| format!("{l}\n")).collect();
    fs::write(&frames, cut).unwrap();
    let strict = run(&["unmask", "--reference-key", "--input", path_str(&frames), "--output", path_str(&back)]);
    assert_eq!(strict.status.code(), Some(2));
    let lossy = run(&["unmask", "--reference-key", "--lossy", "--input", path_str(&frames), "--output", path_str(&back)]);
    assert!(lossy.status.success());
    assert!(String::from_utf8_lossy(&lossy.stderr).contains("damaged byte positions"));

    fs::write(&frames, "k:0 q:4\n").unwrap();
    let res = run(&["unmask", "--reference-key", "--input", path_str(&frames), "--output", path_str(&back)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn error_profile_vanishes_after_three_steps() {
    let res = run(&["simulate", "--reference-key", "--error-profile", "--steps", "50", "--seed", "4"]);
    assert!(res.status.success());
    let csv = String::from_utf8(res.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,e_k,u_minus_uhat,sent,recovered"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let k: usize = cols[0].parse().unwrap();
        if k >= 4 {
            assert_eq!(cols[1].parse::<f64>().unwrap(), 0.0, "{line}");
            assert_eq!(cols[2].parse::<f64>().unwrap(), 0.0, "{line}");
            assert_eq!(cols[3], cols[4]);
        }
    }
}

#[test]
fn simulate_writes_exact_tent_orbit() {
    let res = run(&["simulate", "--a", "2", "--group", "tent", "--x0", "1/5", "--steps", "3"]);
    assert_eq!(String::from_utf8(res.stdout).unwrap(), "k,x1\n0,1/5\n1,2/5\n2,4/5\n3,2/5\n");
}

#[test]
fn identical_flags_give_identical_output() {
    let cmds: [&[&str]; 4] = [
        &["keygen", "--alphas", "1,-7,-3", "--seed", "11"],
        &["diagnose", "--reference-key", "--steps", "2000", "--seed", "9", "--jobs", "2"],
        &["simulate", "--reference-key", "--steps", "40", "--precision", "float", "--seed", "1"],
        &["simulate", "--reference-key", "--error-profile", "--q", "4", "--steps", "40", "--seed", "1"],
    ];
    for args in cmds {
        let (a, b) = (run(args), run(args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let jobs1 = run(&["diagnose", "--reference-key", "--steps", "2000", "--seed", "9", "--jobs", "1"]);
    let jobs2 = run(&["diagnose", "--reference-key", "--steps", "2000", "--seed", "9", "--jobs", "2"]);
    assert_eq!(jobs1.stdout, jobs2.stdout);
}

#[test]
fn custom_group_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    fs::write(&g, tilechaos::io::group_to_json(&tilechaos::builtin_group("sym1").unwrap())).unwrap();
    let res = run(&["simulate", "--a", "-2,0;0,3", "--b", "1/2,-3", "--group-file", path_str(&g), "--x0", "1/3,1/7", "--steps", "2"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let res = run(&["simulate", "--a", "-2,0;0,3", "--b", "1/2,-16/5", "--group-file", path_str(&g), "--steps", "2"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn reference_key_alias() {
    assert_eq!(run(&["keygen", "--paper-3-3"]).stdout, run(&["keygen", "--reference-key"]).stdout);
}

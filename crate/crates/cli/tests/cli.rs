use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setscore::interval_family::{prediction_family, GridSpec};
use setscore::interval_scores::{elementary_score, normalized_score};
use setscore::{Distribution, Interval, IntervalFamily, PointMeasure};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setscore"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn qi_score_writes_one_row_per_case_plus_mean() {
    let dir = TempDir::new().unwrap();
    let fc = write(dir.path(), "fc.csv", "case_id,lo,hi\nb,-1,1\na,0,2\nc,-2,0.5\n");
    let obs = write(dir.path(), "obs.csv", "case_id,y\na,0.5\nb,3\nc,0\n");
    let out = dir.path().join("scores.csv");
    let o = run(&[
        "score", "--score", "qi", "--alpha", "0.8", "--beta", "0.1", "--transform", "identity",
        "--forecasts", s(&fc), "--obs", s(&obs), "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // header, three cases, mean
    assert_eq!(lines.len(), 5, "{text}");
    assert_eq!(lines[0], "case_id,score");
    assert!(lines[4].starts_with("mean,"));
    // rows follow the observation order
    assert!(lines[1].starts_with("a,") && lines[2].starts_with("b,") && lines[3].starts_with("c,"));
}

#[test]
fn non_numeric_observation_reports_its_line() {
    let dir = TempDir::new().unwrap();
    let fc = write(dir.path(), "fc.csv", "case_id,lo,hi\na,0,1\nb,0,1\n");
    let obs = write(dir.path(), "obs.csv", "case_id,y\na,0.5\nb,oops\n");
    let o = run(&["score", "--alpha", "0.5", "--forecasts", s(&fc), "--obs", s(&obs)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("obs.csv:3"), "{}", stderr(&o));
}

#[test]
fn missing_files_and_bad_json_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let o = run(&["family", "--dist", s(&dir.path().join("none.json")), "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", "{\"type\":\"normal\",\"mean\":0");
    let o = run(&["family", "--dist", s(&bad), "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.json"), "{}", stderr(&o));
}

#[test]
fn empty_forecaster_manifest_is_rejected() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.csv", "forecaster,case_id,family\n");
    let obs = write(dir.path(), "obs.csv", "case_id,y\na,0.5\n");
    let o = run(&[
        "murphy", "--alpha", "0.5", "--manifest", s(&m), "--obs", s(&obs), "--mu-box", "-2,-2,2,2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no forecasters"), "{}", stderr(&o));
}

#[test]
fn murphy_truth_dominates_in_dist_mode() {
    let dir = TempDir::new().unwrap();
    let truth = write(dir.path(), "truth.json", r#"{"type":"normal","mean":0,"sd":1}"#);
    let shifted = write(dir.path(), "shifted.json", r#"{"type":"normal","mean":0.5,"sd":1}"#);
    let wide = write(dir.path(), "wide.json", r#"{"type":"normal","mean":0,"sd":2}"#);
    let o = run(&[
        "murphy", "--alpha", "0.5", "--mu-box", "-2,-2,2,2", "--u-grid", "9",
        "--dist", s(&truth), "--dist", s(&shifted), "--dist", s(&wide),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("u1,u2,truth,shifted,wide\n"));
    // u ranges over grid pairs with u1 <= u2
    assert_eq!(text.lines().count(), 1 + 9 * 10 / 2);
}

#[test]
fn family_file_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"type":"mixture","components":[
        {"w":0.6,"type":"normal","mean":0,"sd":1},
        {"w":0.3,"type":"uniform","lo":1,"hi":3},
        {"w":0.1,"type":"dirac","at":-0.5}]}"#;
    let d = write(dir.path(), "mix.json", spec);
    let out = dir.path().join("fam.csv");
    let o = run(&["family", "--dist", s(&d), "--alpha", "0.6", "--n", "101", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let read = IntervalFamily::read_csv(fs::read_to_string(&out).unwrap().as_bytes(), "fam.csv").unwrap();
    let f = Distribution::from_json(spec).unwrap();
    let direct = prediction_family(&f, 0.6, &GridSpec::Auto { n: 101, eps: 1e-3 }).unwrap();
    assert_eq!(read, direct);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let y = rng.random_range(-4.0..4.0);
        let (u1, u2): (f64, f64) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let u = Interval::new(u1.min(u2), u1.max(u2)).unwrap();
        let (a, b) = (elementary_score(&read, y, 0.6, &u), elementary_score(&direct, y, 0.6, &u));
        assert_eq!(a.to_bits(), b.to_bits(), "y {y}, u {u:?}");
    }
}

#[test]
fn uniform_family_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let d = write(dir.path(), "u.json", r#"{"type":"uniform","lo":0,"hi":1}"#);
    let o = run(&["family", "--dist", s(&d), "--alpha", "0.75", "--n", "51"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fam = IntervalFamily::read_csv(stdout(&o).as_bytes(), "stdout").unwrap();
    assert_eq!(fam.domain_cut().finite(), Some(0.25));
    // Γ(a) = a + 0.75 on [0, 0.25], Γ(a) = 0.75 to the left of the support
    let mut inside = 0;
    for (a, g) in fam.grid().iter().zip(fam.gamma()) {
        let g = g.finite().unwrap();
        let want = a.max(0.0) + 0.75;
        assert!((g - want).abs() <= 1e-12, "a {a}: {g}");
        inside += usize::from((0.0..=0.25).contains(a));
    }
    assert!(inside >= 10);
}

#[test]
fn si_regimes_for_two_point_laws() {
    let dir = TempDir::new().unwrap();
    let two = |lam: f64| {
        format!(
            r#"{{"type":"mixture","components":[{{"w":{lam},"type":"dirac","at":0}},{{"w":{},"type":"dirac","at":1}}]}}"#,
            1.0 - lam
        )
    };
    let cases = [
        (0.7, "0.6", "lo,hi,length\n0,0,0\n"),
        (0.5, "0.5", "lo,hi,length\n0,0,0\n1,1,0\n"),
        (0.5, "0.8", "lo,hi,length\n0,1,1\n"),
    ];
    for (lam, alpha, want) in cases {
        let d = write(dir.path(), "two.json", &two(lam));
        let o = run(&["si", "--dist", s(&d), "--alpha", alpha]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o), want, "lambda {lam}, alpha {alpha}");
    }
}

#[test]
fn exhaustive_scores_follow_the_manifest() {
    let dir = TempDir::new().unwrap();
    let d = write(dir.path(), "n.json", r#"{"type":"normal","mean":0,"sd":1}"#);
    let fam = dir.path().join("fam.csv");
    let o = run(&["family", "--dist", s(&d), "--alpha", "0.5", "--n", "41", "--out", s(&fam)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = write(dir.path(), "m.csv", "case_id,family\nq,fam.csv\np,fam.csv\n");
    let obs = write(dir.path(), "obs.csv", "case_id,y\np,0.1\nq,5\n");
    let o = run(&[
        "score", "--score", "exhaustive", "--alpha", "0.5", "--manifest", s(&m), "--obs", s(&obs),
        "--mu-box", "-2,-2,2,2", "--mu-res", "9",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let read = IntervalFamily::read_csv(fs::read_to_string(&fam).unwrap().as_bytes(), "fam.csv").unwrap();
    let mu = PointMeasure::uniform_grid([-2.0, -2.0, 2.0, 2.0], 9).unwrap();
    let want = format!(
        "case_id,score\np,{}\nq,{}\n",
        normalized_score(&read, 0.1, 0.5, &mu),
        normalized_score(&read, 5.0, 0.5, &mu)
    );
    assert!(stdout(&o).starts_with(&want), "{}", stdout(&o));
}

#[test]
fn malformed_atoms_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let y = write(dir.path(), "y.json", r#"{"n":3,"atoms":[{"p":0.5,"cells":[0,7]},{"p":0.5,"cells":[]}]}"#);
    let o = run(&["vorobev", "--randset", s(&y), "--alpha", "0.5", "--argmin"]);
    assert_eq!(o.status.code(), Some(2));
    let y = write(dir.path(), "y.json", r#"{"n":3,"atoms":[{"p":0.5,"cells":[0]}"#);
    let o = run(&["vorobev", "--randset", s(&y), "--alpha", "0.5", "--argmin"]);
    assert_eq!(o.status.code(), Some(2));
}

fn randset_files(dir: &Path) -> (PathBuf, PathBuf) {
    let y = write(
        dir,
        "y.json",
        r#"{"n":6,"atoms":[{"p":0.5,"cells":[0,1,2]},{"p":0.25,"cells":[1,2,3]},{"p":0.25,"cells":[4]}]}"#,
    );
    let x = write(dir, "x.txt", "cells 6\n0 1 1 1 0 0\n");
    (y, x)
}

#[test]
fn vorobev_scores_are_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let (y, x) = randset_files(dir.path());
    let args = |seed: &str| {
        run(&["vorobev", "--randset", s(&y), "--alpha", "0.5", "--grid", s(&x), "--samples", "50", "--seed", seed])
    };
    let (a, b, c) = (args("11"), args("11"), args("12"));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn vorobev_half_level_is_half_the_symmetric_difference() {
    let dir = TempDir::new().unwrap();
    let (y, x) = randset_files(dir.path());
    let o = run(&["vorobev", "--randset", s(&y), "--alpha", "0.5", "--grid", s(&x), "--samples", "40", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let xs = [false, true, true, true, false, false];
    let cells = [vec![0, 1, 2], vec![1, 2, 3], vec![4]];
    for line in stdout(&o).lines().skip(1).filter(|l| !l.starts_with("expected")) {
        let normalized: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        // the sample must be one of the atoms; the score pins down which
        let halves: Vec<f64> = cells
            .iter()
            .map(|c| {
                let diff = (0..6).filter(|i| xs[*i] != c.contains(i)).count();
                0.5 * diff as f64
            })
            .collect();
        assert!(halves.contains(&normalized), "{normalized} not in {halves:?}");
    }
}

#[test]
fn vorobev_argmin_lists_minimisers() {
    let dir = TempDir::new().unwrap();
    let (y, _) = randset_files(dir.path());
    let o = run(&["vorobev", "--randset", s(&y), "--alpha", "0.5", "--argmin"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mins: Vec<&str> = text.lines().skip(1).collect();
    // coverage 0.5, 0.75, 0.75, 0.25, 0.25, 0: cells 1, 2 forced, cell 0 free
    assert_eq!(mins.len(), 2, "{text}");
    assert!(mins.contains(&"011000") && mins.contains(&"111000"));
}

#[test]
fn demos_pass_and_unknown_names_fail() {
    let o = run(&["demo", "proper-subset", "--alpha", "0.75"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["demo", "si-table", "--gamma", "0.8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().last().unwrap().starts_with("si-table: PASS"));
    let o = run(&["demo", "no-such-demo"]);
    assert_eq!(o.status.code(), Some(2));
}

use std::process::Command;

fn molevo(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_molevo"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn validate_reports_each_line_and_exits_3_on_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.smi");
    std::fs::write(&good, "CCO\nc1ccccc1 benzene\n").unwrap();
    let out = molevo(&["validate", "--smiles", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);

    let bad = dir.path().join("bad.smi");
    std::fs::write(&bad, "CCO\nC1CC\nC(C)(C)(C)(C)C\n").unwrap();
    let out = molevo(&["validate", "--smiles", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let status: Vec<&str> = text
        .lines()
        .map(|l| l.split('\t').nth(2).unwrap())
        .collect();
    assert_eq!(status, vec!["ok", "error", "invalid"]);
}

#[test]
fn run_exit_codes_follow_the_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "population_size = lots\n").unwrap();
    let out = molevo(&["run", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let seeds = dir.path().join("seeds.smi");
    std::fs::write(&seeds, "CCO\nC1CC\n").unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "seed_smiles = seeds.smi\ngenerations = 1\npopulation_size = 4\n",
    )
    .unwrap();
    let out = molevo(&["run", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn run_and_score_write_results() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "generations = 2\npopulation_size = 10\n").unwrap();
    let out_dir = dir.path().join("artifacts");
    let out = molevo(&[
        "run",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--rng-seed",
        "5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "library.smi",
        "rules_final.json",
        "provenance.jsonl",
        "metrics.csv",
        "run_manifest.json",
    ] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let metrics = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);

    let weights = dir.path().join("w.txt");
    std::fs::write(&weights, "validity = 0.3\n").unwrap();
    let out = molevo(&[
        "score",
        "--smiles",
        out_dir.join("library.smi").to_str().unwrap(),
        "--weights",
        weights.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert_eq!(text.lines().count(), 11);
    assert_eq!(text.lines().next().unwrap().split('\t').count(), 14);
}

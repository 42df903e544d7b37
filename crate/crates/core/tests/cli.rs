mod common;

use std::path::Path;

use oevqe::cli::main_with_args;
use serde_json::Value;

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["oevqe"];
    argv.extend_from_slice(args);
    main_with_args(argv)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn reference_fci(name: &str) -> f64 {
    common::reference(name).e_fci
}

#[test]
fn run_writes_report_with_exact_energy() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("h2.json");
    let csv = dir.path().join("h2.csv");
    let fcidump = common::fixture_path("h2_0.74");
    let code = run(&[
        "run",
        "--fcidump",
        path_str(&fcidump),
        "--fragment",
        "0",
        "--exact",
        "--json",
        path_str(&json),
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["mode"], "oe-adapt");
    let e = v["final_e_g"].as_f64().unwrap();
    assert!((e - reference_fci("h2_0.74")).abs() < 1e-8);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.lines().count() >= 2);

    let summary = dir.path().join("summary.csv");
    assert_eq!(run(&["report", path_str(&json), "--csv", path_str(&summary)]), 0);
    assert_eq!(std::fs::read_to_string(&summary).unwrap(), table);
}

#[test]
fn fci_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let fcidump = common::fixture_path("h4_1.00");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let csv = dir.path().join(name);
        assert_eq!(run(&["fci", "--fcidump", path_str(&fcidump), "--csv", path_str(&csv)]), 0);
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    let e: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((e - reference_fci("h4_1.00")).abs() < 1e-8);
}

#[test]
fn input_errors_exit_with_one() {
    let fcidump = common::fixture_path("h4_1.00");
    assert_eq!(run(&["run", "--fcidump", path_str(&fcidump), "--fragment", "0,0"]), 1);
    assert_eq!(run(&["run", "--fcidump", path_str(&fcidump), "--fragment", "9"]), 1);
    assert_eq!(run(&["run", "--fcidump", "/nonexistent/x.fcidump"]), 1);
    assert_eq!(run(&["run", "--fcidump", path_str(&fcidump), "--grad-threshold=-1"]), 1);
    assert_eq!(run(&["run", "--fcidump", path_str(&fcidump), "--schedule", "2,1"]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
}

#[test]
fn curve_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "# nothing\n").unwrap();
    assert_eq!(run(&["curve", "--manifest", path_str(&empty)]), 1);

    let manifest = dir.path().join("scan.txt");
    let fcidump = common::fixture_path("h4_1.00");
    std::fs::write(&manifest, format!("1.00 {}\n", fcidump.display())).unwrap();
    let csv = dir.path().join("scan.csv");
    let code = run(&[
        "curve",
        "--manifest",
        path_str(&manifest),
        "--fragment",
        "0",
        "--baseline",
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("distance,e_oe,e_adapt,e_fci"));
    assert_eq!(lines[1].split(',').count(), lines[0].split(',').count());
}

#[test]
fn variance_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bp.csv");
    let code = run(&["bp-var", "--qubits", "4,6", "--samples", "50", "--seed", "3", "--csv", path_str(&csv)]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let fcidump = common::fixture_path("h4_1.00");
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "fcidump = {}\nfragment = 0\nbudget = 2\nmode = oe-adapt\n",
            fcidump.display()
        ),
    )
    .unwrap();
    let json = dir.path().join("out.json");
    assert_eq!(run(&["run", "--config", path_str(&cfg), "--json", path_str(&json)]), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["total_ops"].as_u64().unwrap() <= 2);
    assert_eq!(v["config"]["max_ops_total"], 2);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["run", "--config", path_str(&cfg)]), 1);
}

#[test]
fn rank_and_scf_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let fcidump = common::fixture_path("h6_1.50");
    let csv = dir.path().join("rank.csv");
    assert_eq!(run(&["rank", "--fcidump", path_str(&fcidump), "--fragment", "0", "--csv", path_str(&csv)]), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("rank,class,delta_lambda"));
    assert_eq!(run(&["scf", "--fcidump", path_str(&fcidump)]), 0);
    assert_eq!(run(&["adapt", "--fcidump", path_str(&common::fixture_path("h2_0.74"))]), 0);
}

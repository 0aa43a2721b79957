//! End-to-end checks of the CLI surface: subcommands, file formats, and
//! exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use mapbench::exact::brute_force;
use mapbench::generators::{gen_random, load_cs, read_cs_text};
use mapbench::heuristics::greedy;
use mapbench::Instance;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mapbench"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn mapbench");
    assert!(
        out.status.success(),
        "mapbench {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn mapbench");
    assert!(
        !out.status.success(),
        "mapbench {args:?} unexpectedly succeeded"
    );
    out
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mapbench-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const CS_SAMPLE: &str = "CS 2\n3 1\n2 4\n5 2\n1 6\n2 2\n3 1\n";

#[test]
fn gen_writes_files_both_formats() {
    let dir = scratch("gen");
    let stdout = run_ok(&[
        "gen", "--family", "planted", "--s", "3", "--n", "4", "--count", "2", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(stdout.contains("3p4_1: optimum 4"));
    let text = Instance::read_file(&dir.join("3p4_1.map")).unwrap();
    assert_eq!((text.s(), text.n()), (3, 4));

    run_ok(&[
        "gen", "--family", "random", "--s", "3", "--n", "5", "--count", "1", "--out",
        dir.to_str().unwrap(), "--binary",
    ]);
    let binary = Instance::read_file(&dir.join("3r5_1.mapbin")).unwrap();
    assert_eq!(binary, gen_random(3, 5, 1).unwrap());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn run_reports_planted_experiment_as_csv() {
    let stdout = run_ok(&[
        "run", "--family", "planted", "--s", "3", "--n", "6", "--count", "3", "--format", "csv",
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].starts_with("instance,ref_kind,reference,err_greedy"));
    assert!(lines[1].starts_with("3p6,opt,6.0,"), "row was {}", lines[1]);
    // every error in the data row is non-negative
    for cell in lines[1].split(',').skip(3).take(4) {
        assert!(cell.parse::<f64>().unwrap() >= 0.0);
    }
    assert!(lines[2].starts_with("3-AP avg."));
    assert!(lines[3].starts_with("All avg."));
}

#[test]
fn run_loads_cs_data_and_solves_exactly() {
    let dir = scratch("cs");
    let path = dir.join("sample.cs");
    fs::write(&path, CS_SAMPLE).unwrap();

    let inst = load_cs(&read_cs_text(CS_SAMPLE).unwrap()).unwrap();
    let (_, opt) = brute_force(&inst).unwrap();

    let stdout = run_ok(&[
        "run", "--family", "cs", "--in", path.to_str().unwrap(), "--exact", "--format", "csv",
        "--details",
    ]);
    let row = stdout.lines().nth(1).unwrap();
    assert!(row.starts_with(&format!("3cs2,opt,{opt}.0,")), "row was {row}");
    assert!(stdout.contains("3cs2#1"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_handles_all_three_formats() {
    let dir = scratch("solve");
    let inst = gen_random(3, 6, 2).unwrap();
    let text = dir.join("inst.map");
    let binary = dir.join("inst.mapbin");
    inst.write_text_file(&text).unwrap();
    inst.write_binary_file(&binary).unwrap();
    let cs = dir.join("inst.cs");
    fs::write(&cs, CS_SAMPLE).unwrap();

    let expected = greedy(&inst).objective(&inst).unwrap();
    for path in [&text, &binary] {
        let stdout = run_ok(&["solve", "--in", path.to_str().unwrap(), "--heuristic", "greedy"]);
        assert!(stdout.contains("instance s=3 n=6"));
        assert!(
            stdout.contains(&format!("objective {expected}")),
            "solve output: {stdout}"
        );
    }
    let stdout = run_ok(&[
        "solve", "--in", cs.to_str().unwrap(), "--heuristic", "shiftrom", "--metrics",
    ]);
    assert!(stdout.contains("instance s=3 n=2"));
    assert!(stdout.contains("weight_reads"));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn scale_fits_an_exponent() {
    let stdout = run_ok(&[
        "scale", "--heuristic", "rom", "--s", "2", "--n", "8,12,16", "--reps", "1",
    ]);
    assert!(stdout.contains("n=8 "));
    assert!(stdout.contains("fitted exponent:"));
}

#[test]
fn error_paths_exit_nonzero() {
    // composite needs s >= 3
    let out = run_err(&["run", "--family", "composite", "--s", "2", "--n", "5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("s >= 3"));

    // cs family without a file
    run_err(&["run", "--family", "cs"]);
    // unknown family / heuristic
    run_err(&["run", "--family", "gp", "--s", "3", "--n", "5"]);
    run_err(&["solve", "--in", "/nonexistent.map", "--heuristic", "sorcery"]);
    // unreadable path
    run_err(&["solve", "--in", "/nonexistent.map", "--heuristic", "greedy"]);
    // cs cannot be generated
    run_err(&["gen", "--family", "cs", "--s", "3", "--n", "5", "--out", "/tmp"]);

    // memory guard
    let out = run_err(&[
        "run", "--family", "random", "--s", "3", "--n", "2000", "--max-bytes", "1000000",
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte limit"));

    // exact over the search budget
    let out = run_err(&[
        "run", "--family", "random", "--s", "3", "--n", "30", "--count", "1", "--exact",
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    // scale needs at least 3 strictly increasing sizes
    run_err(&["scale", "--heuristic", "rom", "--s", "2", "--n", "5,5,6"]);
}

use std::path::{Path, PathBuf};

use scpizza::cli::{dispatch, EXIT_BUDGET, EXIT_FAILED, EXIT_INPUT, EXIT_OK};
use scpizza::numeric::{frac, int};
use scpizza::reductions::{ch_cuts_to_lines, ChInstance, ChSolution, ChValuation, Label, ReductionMeta};
use scpizza::sc_path::PathFile;

fn run(args: &[&str]) -> i32 {
    dispatch(args.iter().map(|s| s.to_string()))
}

fn p(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SQUARE: &str = r#"{"masses":[{"color":0,"polygons":[{"weight":1,"outer":[[0,0],[1,0],[1,1],[0,1]]}]}]}"#;

#[test]
fn overlapping_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (ch, inst, meta, path) = (p(dir.path(), "ch.json"), p(dir.path(), "inst.json"), p(dir.path(), "meta.json"), p(dir.path(), "path.json"));
    assert_eq!(run(&["gen", "--agents", "3", "--seed", "4", "-o", s(&ch)]), EXIT_OK);
    assert_eq!(run(&["validate", "--from", s(&ch)]), EXIT_OK);
    assert_eq!(run(&["gen", "--from", s(&ch), "--reduction", "overlapping", "-o", s(&inst), "--meta", s(&meta)]), EXIT_OK);
    assert_eq!(run(&["validate", "--instance", s(&inst)]), EXIT_OK);

    let report = p(dir.path(), "report.json");
    assert_eq!(run(&["solve", "--instance", s(&inst), "--eps", "1/1000", "-o", s(&path), "--report", s(&report)]), EXIT_OK);
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["verified_exact"], true);
    assert!(rep["turns"].as_u64().unwrap() <= 2);

    assert_eq!(run(&["verify", "--instance", s(&inst), "--path", s(&path), "--eps", "1/1000", "--meta", s(&meta)]), EXIT_OK);
    assert_eq!(run(&["verify", "--instance", s(&inst), "--path", s(&path), "--eps", "1/1000", "--turns", "0"]), EXIT_FAILED);
    let cuts = p(dir.path(), "cuts.json");
    assert_eq!(run(&["map-back", "--meta", s(&meta), "--path", s(&path), "--from", s(&ch), "--eps", "1/1000", "-o", s(&cuts)]), EXIT_OK);
    assert!(ChSolution::parse(&std::fs::read_to_string(&cuts).unwrap()).is_ok());

    let svg = p(dir.path(), "fig.svg");
    assert_eq!(run(&["render", "--instance", s(&inst), "--path", s(&path), "-o", s(&svg)]), EXIT_OK);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn eval_and_export_on_square() {
    let dir = tempfile::tempdir().unwrap();
    let inst = p(dir.path(), "sq.json");
    std::fs::write(&inst, SQUARE).unwrap();
    let path = p(dir.path(), "p.json");
    std::fs::write(&path, r#"{"coords":["1/2","1","1/2"]}"#).unwrap();
    assert_eq!(run(&["validate", "--path", s(&path)]), EXIT_OK);
    assert_eq!(run(&["eval", "--instance", s(&inst), "--path", s(&path)]), EXIT_OK);
    let etr = p(dir.path(), "f.etr");
    assert_eq!(run(&["export-etr", "--instance", s(&inst), "--turns", "1", "-o", s(&etr)]), EXIT_OK);
    assert!(!std::fs::read_to_string(&etr).unwrap().is_empty());

    let out = p(dir.path(), "sol.json");
    assert_eq!(run(&["solve", "--instance", s(&inst), "--method", "grid", "--grid-resolution", "8", "-o", s(&out)]), EXIT_OK);
    let file: PathFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.coords.len(), 2);
}

#[test]
fn straight_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let ch = ChInstance {
        agents: vec![
            ChValuation::uniform(&[(int(0), frac(1, 4)), (frac(1, 2), frac(3, 4))]),
            ChValuation::uniform(&[(frac(1, 4), frac(1, 2)), (frac(3, 4), int(1))]),
        ],
    };
    let (chf, inst, meta, lines) = (p(dir.path(), "ch.json"), p(dir.path(), "inst.json"), p(dir.path(), "meta.json"), p(dir.path(), "lines.json"));
    std::fs::write(&chf, ch.to_json()).unwrap();
    let gen = ["gen", "--from", s(&chf), "--reduction", "straight", "--eps", "1/5", "--d", "1/40", "-o", s(&inst), "--meta", s(&meta)];
    assert_eq!(run(&gen), EXIT_OK);

    // Two cuts, at 1/8 and 5/8, halve both agents.
    let sol = ChSolution::from_pieces(&[
        (int(0), frac(1, 8), Label::Plus),
        (frac(1, 8), frac(5, 8), Label::Minus),
        (frac(5, 8), int(1), Label::Plus),
    ]);
    let m = ReductionMeta::parse(&std::fs::read_to_string(&meta).unwrap()).unwrap();
    std::fs::write(&lines, ch_cuts_to_lines(&m, &sol).unwrap().to_json()).unwrap();
    assert_eq!(run(&["validate", "--lines", s(&lines)]), EXIT_OK);
    assert_eq!(run(&["verify-lines", "--instance", s(&inst), "--lines", s(&lines), "--eps", "1/10", "--meta", s(&meta)]), EXIT_OK);
    assert_eq!(run(&["map-back", "--meta", s(&meta), "--lines", s(&lines), "--from", s(&chf)]), EXIT_OK);
    assert_eq!(run(&["map-back", "--meta", s(&meta), "--path", s(&lines)]), EXIT_INPUT);
    assert_eq!(run(&["render", "--instance", s(&inst), "--lines", s(&lines), "--size", "200", "-o", s(&p(dir.path(), "l.svg"))]), EXIT_OK);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = p(dir.path(), "sq.json");
    std::fs::write(&inst, SQUARE).unwrap();
    assert_eq!(run(&["--help"]), EXIT_OK);
    assert_eq!(run(&["frobnicate"]), EXIT_INPUT);
    assert_eq!(run(&["validate"]), EXIT_INPUT);
    assert_eq!(run(&["validate", "--instance", s(&p(dir.path(), "missing.json"))]), EXIT_INPUT);
    assert_eq!(run(&["solve", "--instance", s(&inst), "--eps=-1"]), EXIT_INPUT);
    assert_eq!(run(&["solve", "--instance", s(&inst), "--method", "simulated-annealing"]), EXIT_INPUT);
    let big = ["solve", "--instance", s(&inst), "--method", "grid", "--turns", "8", "--grid-resolution", "64"];
    assert_eq!(run(&big), EXIT_BUDGET);

    let bad = p(dir.path(), "bad.json");
    std::fs::write(&bad, r#"{"masses":[{"color":0,"polygons":[{"weight":1,"outer":[[0,0],[0,1],[1,1],[1,0]]}]}]}"#).unwrap();
    assert_eq!(run(&["validate", "--instance", s(&bad)]), EXIT_INPUT);

    let off = p(dir.path(), "off.json");
    std::fs::write(&off, r#"{"coords":["1","1"]}"#).unwrap();
    assert_eq!(run(&["eval", "--instance", s(&inst), "--path", s(&off)]), EXIT_INPUT);
    let unbalanced = p(dir.path(), "u.json");
    std::fs::write(&unbalanced, r#"{"coords":["1/4","3/4"]}"#).unwrap();
    assert_eq!(run(&["verify", "--instance", s(&inst), "--path", s(&unbalanced)]), EXIT_FAILED);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adafuse"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn learn_costs_matches_hand_count() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.jsonl");
    let g = dir.path().join("g.tsv");
    std::fs::write(&h, "{\"id\":\"x\",\"hyps\":[\"oaaa\"]}\n").unwrap();
    std::fs::write(&g, "x\taaaa\n").unwrap();
    let out = run(&["learn-costs", "--hyps", s(&h), "--gt", s(&g), "--min-count", "1"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let m = adafuse::io::parse_cost_matrix(&text(&out.stdout), Path::new("-")).unwrap();
    assert_eq!(m.cost('o', 'a'), 0.75);
}

#[test]
fn learn_costs_snapshot_selection() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.jsonl");
    let g = dir.path().join("g.tsv");
    std::fs::write(&h, "{\"id\":\"x\",\"hyps\":[\"aaaa\",\"obbb\"]}\n").unwrap();
    std::fs::write(&g, "x\taaaa\n").unwrap();
    let all = run(&[
        "learn-costs",
        "--hyps",
        s(&h),
        "--gt",
        s(&g),
        "--min-count",
        "1",
        "--snapshot",
        "all",
    ]);
    let first = run(&[
        "learn-costs",
        "--hyps",
        s(&h),
        "--gt",
        s(&g),
        "--min-count",
        "1",
        "--snapshot",
        "0",
    ]);
    assert!(all.status.success() && first.status.success());
    assert_ne!(all.stdout, first.stdout);
    let out = run(&["learn-costs", "--hyps", s(&h), "--gt", s(&g), "--snapshot", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_overlap_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.jsonl");
    let g = dir.path().join("g.tsv");
    std::fs::write(&h, "{\"id\":\"x\",\"hyps\":[\"a\"]}\n").unwrap();
    std::fs::write(&g, "y\ta\n").unwrap();
    let out = run(&["learn-costs", "--hyps", s(&h), "--gt", s(&g)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("no sample ids in common"));
}

#[test]
fn eval_identical_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.tsv");
    let j = dir.path().join("r.json");
    std::fs::write(&p, "a\tcat\t1\nb\tDog\t2\n").unwrap();
    let g = dir.path().join("g.tsv");
    std::fs::write(&g, "a\tcat\nb\tDog\n").unwrap();
    let out = run(&["eval", "--pred", s(&p), "--gt", s(&g), "--json", s(&j)]);
    assert!(out.status.success());
    assert_eq!(
        text(&out.stdout),
        "n_samples: 2\nted: 0\ncrw: 100.00\nted_upper: 0\ncrw_upper: 100.00\n"
    );
    let r: adafuse::EvalReport = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(r.crw, 1.0);
    assert_eq!(r.version, adafuse::metrics::REPORT_VERSION);
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["prune", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_value_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.jsonl");
    std::fs::write(&h, "{\"id\":\"x\",\"hyps\":[\"a\"]}\n").unwrap();
    let out = run(&["fuse", "--hyps", s(&h), "--lambda=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("lambda"));
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.jsonl");
    std::fs::write(&h, "{\"id\":\"x\",\"hyps\":[\"a\"]}\n{oops\n").unwrap();
    let out = run(&["fuse", "--hyps", s(&h)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("h.jsonl:2:"), "{}", text(&out.stderr));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.jsonl");
    std::fs::write(&h, "{\"id\":\"x\",\"hyps\":[\"cat\",\"cat\",\"bat\"]}\n").unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        format!(
            "{{\"version\":1,\"lambda\":2.0,\"paths\":{{\"hypotheses\":{:?}}}}}",
            s(&h)
        ),
    )
    .unwrap();
    let from_cfg = run(&["--config", s(&cfg), "fuse"]);
    assert!(from_cfg.status.success(), "{}", text(&from_cfg.stderr));
    assert_eq!(text(&from_cfg.stdout), "x\tcat\t4\n");
    let flag = run(&["--config", s(&cfg), "fuse", "--lambda", "0.5"]);
    assert_eq!(text(&flag.stdout), "x\tcat\t1\n");
    let defaults = run(&["fuse", "--hyps", s(&h)]);
    assert_eq!(text(&defaults.stdout), "x\tcat\t2\n");

    std::fs::write(&cfg, "{\"version\":1,\"lamda\":2.0}").unwrap();
    let typo = run(&["--config", s(&cfg), "fuse", "--hyps", s(&h)]);
    assert_eq!(typo.status.code(), Some(2));
    assert!(text(&typo.stderr).contains("lamda"));
}

#[test]
fn pipeline_improves_on_single_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gt = fixtures().join("gt200.tsv");
    let words = fixtures().join("words.txt");
    let p = |n: &str| d.join(n).to_str().unwrap().to_owned();
    let steps: Vec<Vec<String>> = vec![
        vec![
            "simulate",
            "--gt",
            s(&gt),
            "--snapshots",
            "10",
            "--noise-first",
            "2",
            "--noise-last",
            "0.8",
            "--out",
            &p("h.jsonl"),
        ],
        vec![
            "learn-costs",
            "--hyps",
            &p("h.jsonl"),
            "--gt",
            s(&gt),
            "--out",
            &p("c.tsv"),
        ],
        vec![
            "fit-f",
            "--hyps",
            &p("h.jsonl"),
            "--gt",
            s(&gt),
            "--dict",
            s(&words),
            "--costs",
            &p("c.tsv"),
            "--out",
            &p("f.json"),
        ],
        vec![
            "prune",
            "--hyps",
            &p("h.jsonl"),
            "--gt",
            s(&gt),
            "--dict",
            s(&words),
            "--costs",
            &p("c.tsv"),
            "--f-curve",
            &p("f.json"),
            "--out",
            &p("m.txt"),
            "--trace",
            &p("t.csv"),
        ],
        vec![
            "fuse",
            "--hyps",
            &p("h.jsonl"),
            "--dict",
            s(&words),
            "--costs",
            &p("c.tsv"),
            "--f-curve",
            &p("f.json"),
            "--mask",
            &p("m.txt"),
            "--out",
            &p("pred.tsv"),
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(str::to_owned).collect())
    .collect();
    for step in &steps {
        let out = bin().args(step).output().unwrap();
        assert!(out.status.success(), "{step:?}: {}", text(&out.stderr));
    }
    let out = run(&["eval", "--pred", &p("pred.tsv"), "--gt", s(&gt), "--json", &p("r.json")]);
    assert!(out.status.success());
    let fused: adafuse::EvalReport = serde_json::from_str(&std::fs::read_to_string(p("r.json")).unwrap()).unwrap();

    let hsets = adafuse::io::read_hypotheses(p("h.jsonl")).unwrap();
    let refs = adafuse::io::read_ground_truth(&gt).unwrap();
    let best_single = (0..10)
        .map(|i| {
            adafuse::evaluate(hsets.iter().zip(&refs).map(|(h, r)| (&h.outputs()[i], &r.ground_truth)))
                .unwrap()
                .crw_upper
        })
        .fold(0.0, f64::max);
    assert!(fused.crw_upper >= best_single, "{} < {best_single}", fused.crw_upper);
}

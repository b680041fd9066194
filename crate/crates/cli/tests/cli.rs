use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainmetric"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn first_number(o: &Output) -> f64 {
    stdout(o)
        .split_whitespace()
        .next()
        .expect("some output")
        .parse()
        .expect("a number")
}

#[test]
fn gen_then_chain_pair() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("y.json");
    let s = space.to_str().unwrap();
    let o = run(&["gen", "y-spider", "k=8", "h=1/32", "--out", s]);
    assert!(o.status.success(), "{o:?}");
    assert!(space.exists());
    let o = run(&[
        "chain", "--space", s, "--eps", "1/8", "--source", "p", "--target", "q",
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    // 17 significant digits in scientific notation
    let token = text.trim();
    assert_eq!(token.split('e').next().unwrap().len(), 18, "{token}");
    let d: f64 = token.parse().unwrap();
    assert!(d > 1.0 && d <= 3.0);
}

#[test]
fn chain_witness_on_inline_spec() {
    let o = run(&[
        "chain",
        "--space",
        "rational-grid d=8",
        "--eps",
        "1/4",
        "--source",
        "p",
        "--target",
        "q",
        "--witness",
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap().parse::<f64>().unwrap(), 1.0);
    let chain: Vec<usize> = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!((chain[0], *chain.last().unwrap()), (0, 8), "{text}");
    assert!(chain.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 2));
}

#[test]
fn all_pairs_csv_and_dmx() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["m.csv", "m.dmx"] {
        let out = dir.path().join(name);
        let o = run(&[
            "chain",
            "--space",
            "comb h=1/2",
            "--eps",
            "1/2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{o:?}");
        let m = if name.ends_with("csv") {
            chainmetric::DistanceMatrix::read_csv(std::io::BufReader::new(
                std::fs::File::open(&out).unwrap(),
            ))
        } else {
            chainmetric::DistanceMatrix::read_dmx(std::fs::File::open(&out).unwrap())
        }
        .unwrap();
        assert_eq!(m.len(), 9);
    }
}

#[test]
fn chain_needs_a_pair_or_output() {
    let o = run(&["chain", "--space", "comb h=1/2", "--eps", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn d0_reports_schedule() {
    let o = run(&[
        "d0",
        "--space",
        "y-spider k=16 h=1/128",
        "--pair",
        "p,q",
        "--schedule",
        "1/8,1/16",
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let last: f64 = text
        .lines()
        .find(|l| l.starts_with("final"))
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(last > 2.5 && last <= 3.0, "{text}");
    // below the 3h floor
    let o = run(&[
        "d0",
        "--space",
        "y-spider k=16 h=1/128",
        "--schedule",
        "1/64",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn d0_json_has_final() {
    let o = run(&[
        "d0",
        "--space",
        "slit-plane h=1/8",
        "--schedule",
        "1/2,3/8",
        "--constrained",
        "--json",
    ]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["final"].as_f64().unwrap() > 2.8);
}

#[test]
fn iterate_levels() {
    let o = run(&[
        "iterate",
        "--space",
        "yn-tower n=2 m=3 k=2 h=1/8",
        "--levels",
        "1/2,1/4",
        "--pair",
        "p,q",
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3, "{text}");
    assert!(text.starts_with("level 0 1.0000000000000000e0"), "{text}");
}

#[test]
fn length_of_free_and_in_space_paths() {
    let dir = tempfile::tempdir().unwrap();
    let free = dir.path().join("free.json");
    std::fs::write(
        &free,
        r#"{"metric":"euclidean","vertices":[[],[[1,3.0],[2,4.0]],[[1,3.0]]]}"#,
    )
    .unwrap();
    let o = run(&["length", "--path", free.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(first_number(&o), 9.0);

    let space = dir.path().join("r.json");
    let o = run(&["gen", "rational", "d=4", "--out", space.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let in_space = dir.path().join("path.json");
    std::fs::write(&in_space, r#"{"space":"r.json","ids":[0,4,2]}"#).unwrap();
    let o = run(&["length", "--path", in_space.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(first_number(&o), 1.5);
}

#[test]
fn waypoints_residual_within_bound() {
    let o = run(&[
        "waypoints",
        "--space",
        "y-spider k=16 h=1/128",
        "--eps",
        "1/16",
        "--pair",
        "p,q",
        "--delta",
        "1/2",
        "--json",
    ]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["waypoints"].as_array().unwrap().len(), 5);
    assert!(v["residual"].as_f64().unwrap() <= v["residual_bound"].as_f64().unwrap());
}

#[test]
fn verify_exit_codes_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&[
            "verify",
            "--preset",
            "smoke",
            "--only",
            "5,6",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        assert!(stdout(&o).contains("PASS"));
    }
    let strip = |p: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        v.to_string()
    };
    assert_eq!(strip(&a), strip(&b));

    // the X claim fails at every preset
    let o = run(&["verify", "--preset", "smoke", "--only", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    assert_eq!(run(&["verify", "--preset", "huge"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--preset", "smoke", "--only", "12"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--space-spec",
        "y-spider k=16 h=1/64",
        "--eps-grid",
        "1/8,1/16",
        "--h-grid",
        "1/64,1/128",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,eps,estimate,runtime_s,hops");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 5);
    }
    // eps below 3h is a coupling error
    let o = run(&[
        "sweep",
        "--space-spec",
        "y-spider k=16 h=1/64",
        "--eps-grid",
        "1/64",
        "--h-grid",
        "1/64",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let o = bin()
        .env("CHAINMETRIC_THREADS", "zero")
        .args([
            "chain",
            "--space",
            "comb h=1/2",
            "--eps",
            "1/2",
            "--source",
            "p",
            "--target",
            "tip",
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env("CHAINMETRIC_THREADS", "1")
        .args([
            "chain",
            "--space",
            "comb h=1/2",
            "--eps",
            "1/2",
            "--source",
            "p",
            "--target",
            "tip",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
    assert_eq!(first_number(&o), 1.0);
}

#[test]
fn unknown_generator_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = run(&["gen", "torus", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

use std::fs;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_mws-plan");

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn osnr_sweep_csv() {
    let (ok, out, _) = run(&[
        "osnr", "--scheme", "joint", "--axis", "power", "--start", "-20", "--end", "0", "--step",
        "5",
    ]);
    assert!(ok);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "axis_value,osnr_tx_db,scheme");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("-20.0000,") && lines[1].ends_with(",joint-ca"));

    let (ok, out, _) = run(&[
        "osnr",
        "--scheme",
        "sws",
        "--lines",
        "1",
        "--axis",
        "ocnr",
        "--start",
        "55",
        "--end",
        "55",
        "--step",
        "1",
        "--line-power-dbm",
        "16",
    ]);
    assert!(ok);
    let v: f64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 35.9).abs() < 0.01);
}

#[test]
fn osnr_rejects_empty_range() {
    let (ok, _, err) = run(&["osnr", "--start", "5", "--end", "0"]);
    assert!(!ok);
    assert!(!err.is_empty());
}

#[test]
fn qot_reports_feasibility() {
    let (ok, out, _) = run(&[
        "qot",
        "--spans",
        "6",
        "--symbol-rate",
        "140",
        "--modulation",
        "16",
        "--osnr-tx-db",
        "36",
    ]);
    assert!(ok, "{out}");
    assert!(out.contains("config: 16QAM@140"));
    assert!(out.contains("feasible: true"));
    let (ok, out, _) = run(&[
        "qot",
        "--spans",
        "6",
        "--symbol-rate",
        "140",
        "--modulation",
        "64",
    ]);
    assert!(ok);
    assert!(out.contains("feasible: false"));
    let (ok, _, _) = run(&["qot", "--spans", "6", "--modulation", "8"]);
    assert!(!ok);
}

#[test]
fn plan_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let demands = dir.path().join("d.csv");
    fs::write(
        &demands,
        "src,dst,gbps\nBerlin,Hamburg,1500\nFrankfurt,Muenchen,400\n",
    )
    .unwrap();
    let out = dir.path().join("plan.csv");
    let (ok, _, err) = run(&[
        "plan",
        "--topology",
        &data("germany.json"),
        "--demands",
        demands.to_str().unwrap(),
        "--scenario",
        "fixed",
        "--penalty-db",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    let text = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "src,dst,path,config,slots,snr_db,source_type");
    let summary = lines.last().unwrap();
    assert!(summary.starts_with("summary,"));
    assert!(summary.contains("unserved_gbps=0"));
    assert!(text.contains("fixed-mws:0:1/4"));
}

#[test]
fn plan_rejects_unknown_node() {
    let dir = tempfile::tempdir().unwrap();
    let demands = dir.path().join("d.csv");
    fs::write(&demands, "src,dst,gbps\nBerlin,Atlantis,100\n").unwrap();
    let (ok, _, err) = run(&[
        "plan",
        "--topology",
        &data("germany.json"),
        "--demands",
        demands.to_str().unwrap(),
    ]);
    assert!(!ok);
    assert!(err.contains("Atlantis"), "{err}");
}

#[test]
fn sweep_writes_both_files_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "sweep".to_string(),
            "--topology".into(),
            data("germany.json"),
            "--art-min".into(),
            "20000".into(),
            "--art-max".into(),
            "60000".into(),
            "--art-step".into(),
            "20000".into(),
            "--scenarios".into(),
            "sws,flex:3,fixed:1".into(),
            "--penalty-grid".into(),
            "0,1.5,3".into(),
            "--randomize-weights".into(),
            "--seed".into(),
            "5".into(),
            "--out-dir".into(),
            out.into(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let argv = args(d.to_str().unwrap());
        let (ok, _, err) = run(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(ok, "{err}");
    }
    for f in ["results.csv", "penalty.csv"] {
        let x = fs::read(a.join(f)).unwrap();
        assert_eq!(x, fs::read(b.join(f)).unwrap());
    }
    let results = fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 3 * 3);
    let penalty = fs::read_to_string(a.join("penalty.csv")).unwrap();
    assert_eq!(penalty.lines().count(), 1 + 3);
}

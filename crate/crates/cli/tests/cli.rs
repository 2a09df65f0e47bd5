use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddsmetrics"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn eval_target_is_exact() {
    let o = run(&["eval", "--model", "target", "--freq", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["max_abs_error"], 0.0);
    assert_eq!(v["model"], "target");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn eval_digitized_reports_bounds() {
    let o = run(&["eval", "--model", "digitized", "--bits", "8", "--multiplier", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let paper = v["paper_bound"].as_f64().unwrap();
    assert!((paper - 0.1058296).abs() < 1e-7);
    assert!(v["max_abs_error"].as_f64().unwrap() <= paper);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 13);
}

#[test]
fn eval_dt_matches_multiplier() {
    let a = run(&["eval", "--model", "held", "--freq", "50", "--dt", "0.0025"]);
    let b = run(&["eval", "--model", "held", "--freq", "50", "--multiplier", "8"]);
    assert_eq!(a.status.code(), Some(0));
    let (a, b): (serde_json::Value, serde_json::Value) = (
        serde_json::from_str(&stdout(&a)).unwrap(),
        serde_json::from_str(&stdout(&b)).unwrap(),
    );
    assert_eq!(a, b);
    assert_eq!(a["m_num"], 8);
}

#[test]
fn eval_flag_validation() {
    let o = run(&["eval", "--model", "held", "--bits", "8", "--multiplier", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bits not valid for model 'held'"));

    let o = run(&["eval", "--model", "quantized"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bits"));

    let o = run(&["eval", "--model", "digitized", "--bits", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--multiplier"));

    for bad in [
        vec!["eval", "--model", "quantized", "--bits", "0"],
        vec!["eval", "--model", "target", "--freq", "-1"],
        vec!["eval", "--model", "held", "--multiplier", "4", "--dt", "0.1"],
        vec!["eval", "--model", "nope"],
        vec!["eval", "--model", "target", "--samples", "10"],
    ] {
        assert_eq!(run(&bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn eval_csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = run(&[
        "eval", "--model", "quantized", "--bits", "4", "--mode", "round", "--format", "csv",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("model,freq_hz,bits,mode"));
    assert!(lines[1].starts_with("quantized,1,4,round,,,"));
}

#[test]
fn eval_resource_failure_exits_3() {
    let o = run(&[
        "eval", "--model", "held", "--multiplier", "100000", "--dft-cap", "65536",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn sweep_bits_row_count() {
    let o = run(&["sweep", "bits", "--bits-from", "1", "--bits-to", "16", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("bits,mode,max_err,max_err_pct,eq5_bound,thd_ratio,thd_db"));
    assert_eq!(data_lines(&text).len(), 16);
}

#[test]
fn sweep_multiplier_axis_points() {
    let o = run(&[
        "sweep", "multiplier", "--decades-from", "0.5", "--decades-to", "2",
        "--points-per-decade", "30", "--samples", "2000", "--samples-per-step", "16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_lines(&stdout(&o)).len(), 46);
}

#[test]
fn sweep_grid_order_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let svg = dir.path().join("g.svg");
    let o = run(&[
        "sweep", "grid", "--bits-from", "2", "--bits-to", "4", "--multipliers", "8,4,16",
        "--samples", "2000", "--samples-per-step", "16", "--out", csv.to_str().unwrap(),
        "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let keys: Vec<(String, String)> = data_lines(&text)
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[1].to_owned())
        })
        .collect();
    let want: Vec<(String, String)> = ["2", "3", "4"]
        .iter()
        .flat_map(|b| ["4", "8", "16"].iter().map(move |m| (b.to_string(), m.to_string())))
        .collect();
    assert_eq!(keys, want);
    let chart = fs::read_to_string(&svg).unwrap();
    assert_eq!(chart.matches("class=\"cell\"").count(), 9);
}

#[test]
fn sweep_sequential_matches_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, extra) in [None, Some("--sequential")].into_iter().enumerate() {
        let csv = dir.path().join(format!("{i}.csv"));
        let svg = dir.path().join(format!("{i}.svg"));
        let mut args = vec![
            "sweep", "multiplier", "--decades-from", "0", "--decades-to", "1",
            "--points-per-decade", "10", "--samples", "2000", "--metric", "thd",
        ];
        let (c, s) = (csv.to_str().unwrap().to_owned(), svg.to_str().unwrap().to_owned());
        args.extend(["--out", &c, "--svg", &s]);
        args.extend(extra);
        assert_eq!(run(&args).status.code(), Some(0));
        outputs.push((fs::read(&csv).unwrap(), fs::read(&svg).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sweep_flag_validation() {
    let o = run(&["sweep", "bits", "--multipliers", "4,8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--multipliers not valid for sweep 'bits'"));
    assert_eq!(run(&["sweep", "multiplier", "--bits-from", "3"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "bits", "--bits-from", "9", "--bits-to", "3"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "multiplier", "--multipliers", "4,-1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "surface"]).status.code(), Some(2));
}

#[test]
fn sweep_unwritable_path_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("x.csv");
    let o = run(&["sweep", "bits", "--bits-to", "3", "--samples", "2000", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bounds_subcommand() {
    let o = run(&["bounds", "--multiplier", "64", "--bits", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let get = |k: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(k).and_then(|r| r.strip_prefix(' ')))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(get("quantization"), 0.0078125);
    assert!((get("digitized_paper") - 0.1058296).abs() < 1e-7);
    assert!((get("digitized_strict") - 0.1059478).abs() < 1e-7);
    assert_eq!(get("full_scale_range"), 2.0);
}

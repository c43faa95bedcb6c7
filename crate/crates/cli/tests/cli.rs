use std::process::{Command, Output};

fn colossal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colossal"))
        .args(["--sieve-limit", "1000000"])
        .args(args)
        .env_remove("COLOSSAL_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn last_record(text: &str) -> csv::StringRecord {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.records().last().unwrap().unwrap()
}

#[test]
fn gen_reaches_n508() {
    let text = stdout(&colossal(&["gen", "--count", "504"]));
    assert!(text.starts_with("index,q,v,eps,g_num,g_den,ln_n,ln_ln_n,ln_sigma,X,n,form\n"));
    let last = last_record(&text);
    assert_eq!(&last[0], "508");
    assert_eq!(&last[11], "3257,73,19,7,5,0,0,3,0,0,0,0,0,2");
}

#[test]
fn gen_four_steps_ends_at_5040() {
    let last = last_record(&stdout(&colossal(&["gen", "--count", "4"])));
    assert_eq!((&last[0], &last[10]), ("8", "5040"));
    let x: f64 = last[9].parse().unwrap();
    assert!((x - 1.79097).abs() < 1e-5);
}

#[test]
fn gen_prefix_starts_at_two() {
    let text = stdout(&colossal(&["gen", "--count", "1", "--include-prefix"]));
    let ns: Vec<String> = csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap()[10].to_string())
        .collect();
    assert_eq!(ns, ["2", "6", "12", "60", "120"]);
}

#[test]
fn zero_count_is_a_usage_error() {
    assert_eq!(colossal(&["gen", "--count", "0"]).status.code(), Some(1));
    assert_eq!(colossal(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let a = colossal(&["gen", "--count", "300"]).stdout;
    let b = colossal(&["gen", "--count", "300"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn checkpointed_resume_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("state.json");
    let ckpt = ckpt.to_str().unwrap();
    let cold = stdout(&colossal(&["gen", "--count", "500"]));
    let first = stdout(&colossal(&[
        "gen",
        "--count",
        "300",
        "--checkpoint",
        ckpt,
        "--checkpoint-every",
        "70",
    ]));
    let json = std::fs::read_to_string(ckpt).unwrap();
    assert!(json.contains("\"version\": 1"));
    assert!(json.contains("\"counter\": 304"));
    let second = stdout(&colossal(&["gen", "--count", "200", "--resume", ckpt]));
    let joined = first + second.split_once('\n').unwrap().1;
    assert_eq!(joined, cold);
}

#[test]
fn resume_rejects_foreign_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("state.json");
    let ckpt_s = ckpt.to_str().unwrap();
    stdout(&colossal(&["gen", "--count", "10", "--checkpoint", ckpt_s]));
    let text = std::fs::read_to_string(&ckpt).unwrap();
    std::fs::write(&ckpt, text.replace("\"version\": 1", "\"version\": 9")).unwrap();
    let out = colossal(&["gen", "--count", "1", "--resume", ckpt_s]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported checkpoint version 9"));

    stdout(&colossal(&["gen", "--count", "10", "--checkpoint", ckpt_s]));
    let out = Command::new(env!("CARGO_BIN_EXE_colossal"))
        .args([
            "--sieve-limit",
            "500000",
            "gen",
            "--count",
            "1",
            "--resume",
            ckpt_s,
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sieve limit"));
}

#[test]
fn jsonl_via_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_colossal"))
        .args(["gen", "--count", "2"])
        .env("COLOSSAL_FORMAT", "jsonl")
        .env("COLOSSAL_SIEVE_LIMIT", "10000")
        .output()
        .unwrap();
    let text = stdout(&out);
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["index"], 6);
    assert_eq!(lines[1]["n"], 360);
    assert_eq!(lines[1]["form"], "5,3,2");
}

#[test]
fn sieve_exhaustion_is_a_resource_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_colossal"))
        .args(["--sieve-limit", "100", "gen", "--count", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sieve exhausted"));
}

#[test]
fn table3_rows() {
    let text = stdout(&colossal(&["table", "table3", "--rows", "8..42"]));
    let row = |i: &str| {
        text.lines()
            .find(|l| l.starts_with(&format!("{i}\t")))
            .unwrap()
            .to_string()
    };
    let r25: Vec<String> = row("25").split('\t').map(String::from).collect();
    assert_eq!((r25[5].as_str(), r25[6].as_str()), ("7", "255:254"));
    assert!(row("42").ends_with("\t-3.05e-4"));
    assert_eq!(text.lines().count(), 36);
}

#[test]
fn table1_column_2386() {
    let text = stdout(&colossal(&["table", "table1", "--indices", "2386"]));
    let x = text.lines().find(|l| l.starts_with("X ")).unwrap();
    assert!(x.trim_end().ends_with("1.7800000890"), "{x}");
}

#[test]
fn stats_and_ki() {
    let text = stdout(&colossal(&["stats", "--indices", "8,9"]));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let head = rdr.headers().unwrap().clone();
    let ki = head.iter().position(|h| h == "ki").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!((&rows[0][ki], &rows[1][ki]), ("", "33"));

    let text = stdout(&colossal(&["--k-max", "40", "ki", "--indices", "9,13"]));
    assert_eq!(text, "index,ki,horizon\n9,33,40\n13,1,40\n");
}

#[test]
fn gl_windows_from_nine() {
    let text = stdout(&colossal(&["gl", "--base", "9", "--max-k", "33"]));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let d: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[5].parse().unwrap())
        .collect();
    assert_eq!(d.len(), 34);
    assert!(d[1..33].iter().all(|&x| x < 0.0));
    assert!(d[33] > 0.0);
}

#[test]
fn verify_reports_known_failures_and_k9() {
    let text = stdout(&colossal(&["verify", "--horizon", "42"]));
    assert!(text.contains("k_9 = 33"));
    assert!(text.contains("known Robin failures (expected, i ≤ 8): [2, 3, 4, 5, 6, 7, 8]"));
    let text = stdout(&colossal(&["verify", "--horizon", "8"]));
    assert!(text.contains("final X = 1.7909733665"));
}

#[test]
fn oracle_agrees() {
    let text = stdout(&colossal(&["oracle", "--limit", "100000"]));
    assert!(text.contains("oracle CA: [2, 6, 12, 60, 120, 360, 2520, 5040, 55440]"));
    assert!(text.contains("engine CA: [2, 6, 12, 60, 120, 360, 2520, 5040, 55440]"));
    assert_eq!(
        colossal(&["oracle", "--limit", "20000000"]).status.code(),
        Some(2)
    );
}

#[test]
fn osc_eval_on_the_diagonal() {
    let text = stdout(&colossal(&[
        "osc", "eval", "--b", "0.5", "--delta", "1", "--mu", "2", "--nu", "2",
    ]));
    let g: f64 = last_record(&text)[2].parse().unwrap();
    assert!((g - 2.16395).abs() < 1e-5);
    assert_eq!(
        colossal(&["osc", "eval", "--b", "0.9", "--mu", "1", "--nu", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn osc_contour_gives_one_polyline_per_level() {
    let text = stdout(&colossal(&[
        "osc", "contour", "--b", "0.5", "--delta", "1", "--levels", "0.5,1,2",
    ]));
    let mut lines: Vec<(String, String)> = csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    lines.dedup();
    assert_eq!(lines.len(), 3);
}

#[test]
fn osc_deltaphi_family() {
    let text = stdout(&colossal(&["osc", "deltaphi", "--samples", "10"]));
    assert_eq!(text.lines().count(), 1 + 18 * 10);
}

#[test]
fn osc_prime_scan_hits_are_in_the_margin() {
    let text = stdout(&colossal(&["osc", "prime-scan", "--pairs", "2000"]));
    for r in csv::Reader::from_reader(text.as_bytes()).records() {
        let r = r.unwrap();
        if &r[0] == "hit" {
            let eval = stdout(&colossal(&["osc", "eval", "--mu", &r[2], "--nu", &r[3]]));
            assert_eq!(&last_record(&eval)[3], "true");
        }
    }
}

#[test]
fn osc_margin_scan_traces_eligible_points() {
    let out = colossal(&["--k-max", "50", "osc", "margin-scan", "--index", "9"]);
    let text = stdout(&out);
    assert!(text.starts_with("k,lambda,lambda_next,g,in_margin\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("margin"));
}

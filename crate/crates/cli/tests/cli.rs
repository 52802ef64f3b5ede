use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output, Stdio};

const GF4: &str = "p=2,e=1,m=2";

fn rankmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankmin")).args(args).env_remove("RANKMIN_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = rankmin(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn grw_of_small_code() {
    let o = rankmin(&["grw", "--field", GF4, "--code", "[[1,0,1],[0,1,2]]", "--r", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
    let seq = rankmin(&["grw", "--field", GF4, "--code", "[[1,0,1],[0,1,2]]"]);
    assert_eq!(stdout(&seq).trim(), "0 1 3");
}

#[test]
fn count_small_case() {
    let o = rankmin(&["count", "--q", "2", "--m", "2", "--n", "3", "--r", "1"]);
    assert_eq!(stdout(&o).trim(), "14");
    let v = json(&["count", "--kind", "qbinom", "--q", "2", "--n", "4", "--r", "2"]);
    assert_eq!(v["value"], "35");
}

#[test]
fn code_from_stdin_and_file() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rankmin"))
        .args(["wt", "--field", GF4, "--code", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"[[1,0,1],[0,1,2]]").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o).trim(), "3");

    let dir = std::env::temp_dir().join(format!("rankmin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("code.json");
    std::fs::write(&path, format!(r#"{{"field":"{GF4}","n":3,"gen":[[1,0,1],[0,1,2]]}}"#)).unwrap();
    let arg = format!("@{}", path.display());
    assert_eq!(stdout(&rankmin(&["grw", "--code", &arg, "--r", "1"])).trim(), "1");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn emitted_code_reads_back() {
    let census = json(&["census", "--field", GF4, "--n", "3", "--k", "2", "--exemplars", "1"]);
    assert_eq!(census["minimal"]["1"], "14");
    for (w, codes) in census["exemplars"].as_object().unwrap() {
        let code = serde_json::to_string(&codes[0]).unwrap();
        let wt = rankmin(&["wt", "--code", &code]);
        assert_eq!(stdout(&wt).trim(), w);
    }
}

#[test]
fn strict_decisions_exit_one() {
    let args = ["minimal", "--field", GF4, "--code", "[[1,0],[0,1]]", "--r", "1"];
    assert_eq!(rankmin(&args).status.code(), Some(0));
    let mut strict = vec!["--strict"];
    strict.extend_from_slice(&args);
    let o = rankmin(&strict);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("no"));

    let yes = rankmin(&["--strict", "minimal", "--field", GF4, "--code", "[[1,0,1],[0,1,2]]", "--r", "1", "--method", "all"]);
    assert_eq!(yes.status.code(), Some(0));

    let cut = rankmin(&["--strict", "cutting", "--field", GF4, "--subspace", "[[1,0,0,0]]", "--r", "0"]);
    assert_eq!(cut.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rankmin(&["verify", "--suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(rankmin(&["grw", "--code", "[[1,0]]"]).status.code(), Some(2));
    assert_eq!(rankmin(&["grw", "--field", GF4, "--code", "[[1,7]]"]).status.code(), Some(2));
    assert_eq!(rankmin(&["count", "--q", "2"]).status.code(), Some(2));
    assert_eq!(rankmin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rankmin(&["verify", "--suite", "empty", "--trials", "3", "--only-trial", "5"]).status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_three() {
    let o = rankmin(&["--json", "--budget", "10", "omega", "--field", "p=2,e=1,m=3", "--k", "3", "--r", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "budget-exceeded");
}

#[test]
fn verify_is_seeded_and_byte_identical() {
    let args = ["--json", "verify", "--suite", "support-duality", "--trials", "40", "--seed", "7"];
    let a = rankmin(&args);
    let b = rankmin(&["--threads", "1", "--json", "verify", "--suite", "support-duality", "--trials", "40", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["trials"], 40);
    let other = rankmin(&["--json", "verify", "--suite", "support-duality", "--trials", "40", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn verify_lists_suites() {
    let v = json(&["verify", "--list"]);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"support-duality") && names.contains(&"cutting-routes"));
}

#[test]
fn omega_certificates_check_out() {
    let res = json(&["omega", "--field", GF4, "--k", "3", "--r", "1"]);
    assert_eq!(res["outcome"], "solved");
    assert_eq!(res["value"], 5);
    let text = serde_json::to_string(&res).unwrap();
    let o = rankmin(&["omega", "--check", &text, "--rescan"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut forged = res["witness"].clone();
    forged["witness_index"] = Value::String("1".into());
    let o = rankmin(&["omega", "--check", &serde_json::to_string(&forged).unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn shards_merge_to_full_scan() {
    let dir = std::env::temp_dir().join(format!("rankmin-shards-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut files = Vec::new();
    for i in 0..3 {
        let idx = i.to_string();
        let v = json(&["omega", "--field", GF4, "--k", "3", "--r", "1", "--dim", "5", "--shards", "3", "--shard-index", &idx]);
        let p = dir.join(format!("s{i}.json"));
        std::fs::write(&p, serde_json::to_string(&v).unwrap()).unwrap();
        files.push(p.display().to_string());
    }
    let mut args = vec!["omega", "--merge"];
    args.extend(files.iter().rev().map(String::as_str));
    let merged = json(&args);
    assert_eq!(merged["exhausted"], false);
    assert_eq!(merged["witness_index"], "0");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bounds_and_field_info() {
    let b = json(&["bounds", "--m", "3", "--k", "3", "--r", "1"]);
    assert_eq!(b["exact"], 6);
    let f = json(&["field", "--field", "p=2,e=1,m=3", "--expand", "[1,2]"]);
    assert_eq!(f["q"], 2);
    assert_eq!(f["expansion"].as_array().unwrap().len(), 3);
    let ev = json(&["evasive-max", "--field", GF4, "--k", "2", "--h", "1", "--t", "2"]);
    assert_eq!(ev["value"], 4);
}

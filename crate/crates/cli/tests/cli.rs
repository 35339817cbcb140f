use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistsym")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const T1: &[&str] = &["verify", "--theorem", "1", "--d", "1", "--r", "3", "--j", "1", "--w", "1,2", "--n-max", "4", "--mode", "as-stated"];
const T3: &[&str] = &["verify", "--theorem", "3", "--d", "1", "--r", "3", "--j", "1", "--w", "1,2", "--n-max", "1", "--mode", "as-stated"];

#[test]
fn theorem_one_passes() {
    let o = run(T1);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().ends_with("pass\n"));
}

#[test]
fn theorem_three_prints_witness() {
    let o = run(T3);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("fail at n=1 y=(0): T3.L = -2/3 - 1/3*ζ3 but T3.R = -4/3 - 2/3*ζ3"), "{out}");
}

#[test]
fn usage_errors_exit_two_with_one_line() {
    for args in [
        &["verify", "--theorem", "12", "--r", "3", "--w", "1,2"][..],
        &["verify", "--theorem", "1", "--r", "3", "--w", "1,3"],
        &["verify", "--theorem", "1", "--r", "3"],
        &["verify", "--theorem", "1", "--r", "3", "--w", "1,2", "--frobnicate"],
        &["bernoulli", "--r", "3", "--d", "5", "--char", "7"],
        &["quotient", "--type", "G9", "--r", "3", "--w", "1,2"],
        &["audit", "--grid-file", "/nonexistent/grid.txt"],
    ] {
        let o = run(args);
        let err = String::from_utf8_lossy(&o.stderr).into_owned();
        let want = if args[0] == "audit" { 3 } else { 2 };
        assert_eq!(code(&o), want, "{args:?}: {err}");
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(o.stdout.is_empty());
    }
    let err = String::from_utf8(run(&["verify", "--theorem", "12", "--r", "3", "--w", "1,2"]).stderr).unwrap();
    assert!(err.contains("no theorem 12"), "{err}");
}

#[test]
fn help_documents_flags() {
    let o = run(&["verify", "--help"]);
    assert_eq!(code(&o), 0);
    let help = String::from_utf8(o.stdout).unwrap();
    for flag in ["--theorem", "--d", "--char", "--r", "--j", "--w", "--n-max", "--mode", "--y", "--format"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn output_is_byte_identical() {
    for fmt in ["json", "csv", "pretty"] {
        let mut args = T3.to_vec();
        args.extend(["--format", fmt]);
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
    let args = ["bernoulli", "--d", "5", "--char", "1", "--r", "3", "--n-max", "5", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn json_report_schema() {
    let mut args = T1.to_vec();
    args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["witness"].is_null());
    assert_eq!(v["instance"]["theorem"], 1);
    assert_eq!(v["instance"]["w"], serde_json::json!([1, 2]));
    assert_eq!(v["mode"], "as-stated");

    let mut args = T3.to_vec();
    args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&run(&args).stdout).unwrap();
    assert_eq!(v["pass"], false);
    let w = &v["witness"];
    assert_eq!(w["n"], 1);
    assert_eq!(w["y"], serde_json::json!(["0"]));
    assert_eq!(w["sides"], serde_json::json!(["T3.L", "T3.R"]));
    // (ζ3² - 1)/3 and twice it, in the basis 1, ζ3
    assert_eq!(w["values"][0], serde_json::json!({"m": 3, "coeffs": ["-2/3", "-1/3"]}));
    assert_eq!(w["values"][1], serde_json::json!({"m": 3, "coeffs": ["-4/3", "-2/3"]}));
}

#[test]
fn csv_rows_per_side_and_n() {
    let mut args = T3.to_vec();
    args.extend(["--format", "csv"]);
    let out = String::from_utf8(run(&args).stdout).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "instance,mode,side,weight,n,values");
    // two sides, n = 0 and 1, then the summary
    assert_eq!(lines.len(), 1 + 2 * 2 + 1);
    assert!(lines.last().unwrap().ends_with(",summary,,,fail"));
}

#[test]
fn subcommands_run() {
    let ok = |args: &[&str]| {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        String::from_utf8(o.stdout).unwrap()
    };
    let out = ok(&["chars", "--d", "5", "--format", "csv"]);
    assert_eq!(out.lines().count(), 5);
    let out = ok(&["bernoulli", "--r", "3", "--n-max", "2", "--format", "csv"]);
    assert_eq!(out, "n,value\n0,0\n1,-2/3 - 1/3*ζ3\n2,2/3\n");
    let out = ok(&["bernoulli", "--r", "3", "--n-max", "2", "--x", "-1/2", "--format", "csv"]);
    assert_eq!(out.lines().count(), 4);
    ok(&["power-sum", "--r", "3", "--upper", "3", "--k-max", "4", "--egf-check", "2"]);
    ok(&["quotient", "--type", "L23:1", "--r", "5", "--w", "1,2,3", "--y", "0,1/2", "--order", "3"]);
    ok(&["consistency", "--type", "G1", "--d", "4", "--char", "1", "--r", "3", "--w", "1,2", "--y", "1", "--n-max", "4"]);
    ok(&["padic", "--p", "5", "--r", "3", "--n", "1", "--levels", "3"]);
    ok(&["padic", "--p", "7", "--r", "4", "--d", "1", "--levels", "2", "--distribution"]);
}

#[test]
fn audit_reads_grid_file() {
    let dir = std::env::temp_dir().join(format!("twistsym-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.txt");
    std::fs::write(&path, "theorems = 1, 11\nd = 1, 3\nr = 4\nw = 1-2\nn_max = 3\nmodes = as-stated\nformat = csv\n").unwrap();
    let o = run(&["audit", "--grid-file", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("theorem,mode,instances,passed,failed,skipped\n"), "{out}");
    assert!(out.contains("\n1,as-stated,"));

    std::fs::write(&path, "theorems = 3\nd = 1\nr = 3\nw = 1-2\nn_max = 2\nmodes = as-stated\n").unwrap();
    let o = run(&["audit", "--grid-file", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    std::fs::write(&path, "colour = blue\n").unwrap();
    let o = run(&["audit", "--grid-file", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 1: unknown key"));
    std::fs::remove_dir_all(&dir).ok();
}

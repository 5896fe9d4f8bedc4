use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn neurotopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurotopo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Enough of JSON Schema for the report: types, objects, arrays, refs,
/// enums, consts and numeric or length bounds.
fn validate(schema: &Value, root: &Value, v: &Value, at: &str) -> Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").ok_or(format!("{at}: unsupported ref {r}"))?;
        return validate(&root["$defs"][name], root, v, at);
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{at}: bad type keyword")),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            "number" => v.is_number(),
            "integer" => v.is_u64() || v.is_i64(),
            _ => false,
        });
        if !ok {
            return Err(format!("{at}: {v} is not {types:?}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            return Err(format!("{at}: expected {c}, got {v}"));
        }
    }
    if let Some(e) = schema.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{at}: {v} not in {e:?}"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{at}: {x} < {min}"));
        }
    }
    if let (Some(max), Some(x)) = (schema.get("maximum").and_then(Value::as_f64), v.as_f64()) {
        if x > max {
            return Err(format!("{at}: {x} > {max}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{at}: missing {key}"));
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (k, x) in obj {
            let path = format!("{at}.{k}");
            match (props.and_then(|p| p.get(k)), schema.get("additionalProperties")) {
                (Some(sub), _) => validate(sub, root, x, &path)?,
                (None, Some(Value::Bool(false))) => return Err(format!("{path}: not allowed")),
                (None, Some(sub)) if sub.is_object() => validate(sub, root, x, &path)?,
                _ => {}
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(n) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < n {
                return Err(format!("{at}: fewer than {n} items"));
            }
        }
        if let Some(n) = schema.get("maxItems").and_then(Value::as_u64) {
            if arr.len() as u64 > n {
                return Err(format!("{at}: more than {n} items"));
            }
        }
        if let Some(items) = schema.get("items") {
            for (k, x) in arr.iter().enumerate() {
                validate(items, root, x, &format!("{at}[{k}]"))?;
            }
        }
    }
    Ok(())
}

fn report_schema() -> Value {
    serde_json::from_str(neurotopo::report::REPORT_SCHEMA).unwrap()
}

const HOLLOW: &str = "1,1,0\n0,1,1\n1,0,1\n";

#[test]
fn analyze_hollow_triangle() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "tri.csv", HOLLOW);
    let v = stdout_json(&neurotopo(&["analyze", s(&input)]));
    assert_eq!(v["topology"]["betti"], serde_json::json!([1, 1]));
    assert_eq!(v["topology"]["dim_lower_bound"], 2);
    assert_eq!(v["input"]["n"], 3);
    assert_eq!(v["input"]["m"], 3);
    assert!(v["timings_ms"].is_object());
    let schema = report_schema();
    validate(&schema, &schema, &v, "$").unwrap();
}

#[test]
fn schema_rejects_a_tampered_report() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "tri.csv", HOLLOW);
    let mut v = stdout_json(&neurotopo(&["analyze", s(&input), "--no-timings"]));
    let schema = report_schema();
    validate(&schema, &schema, &v, "$").unwrap();
    v["topology"]["extra"] = Value::Bool(true);
    assert!(validate(&schema, &schema, &v, "$").is_err());
    v["topology"].as_object_mut().unwrap().remove("extra");
    v["significance"]["null_mode"] = Value::from("both");
    assert!(validate(&schema, &schema, &v, "$").is_err());
}

#[test]
fn simulated_report_matches_the_schema() {
    let dir = TempDir::new().unwrap();
    let code = dir.path().join("sim.csv");
    let out = neurotopo(&[
        "simulate",
        "--holes",
        "1",
        "--cells",
        "12",
        "--minutes",
        "2",
        "--out",
        s(&code),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&neurotopo(&["analyze", s(&code), "--null-mode", "theta"]));
    let schema = report_schema();
    validate(&schema, &schema, &v, "$").unwrap();
    assert_eq!(v["significance"]["null_mode"], "theta");
    assert_eq!(v["input"]["n"], 12);
}

#[test]
fn repeated_runs_are_byte_identical_without_timings() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.csv", "1,0,0,1\n0,1,1,0\n1,1,0,0\n0,0,1,1\n1,0,0,1\n0,0,0,0\n");
    let a = neurotopo(&["analyze", s(&input), "--no-timings", "--seed", "7"]);
    let b = neurotopo(&["analyze", s(&input), "--no-timings", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("timings_ms"));
}

#[test]
fn binarize_flag_matches_prebinarized_input() {
    let dir = TempDir::new().unwrap();
    // column means 0.5, 2.0, 0.3
    let act = write(&dir, "act.csv", "0.9,3.0,0.1\n0.1,2.5,0.7\n0.8,0.5,0.1\n0.2,2.0,0.3\n");
    let bin = write(&dir, "bin.csv", "1,1,0\n0,1,1\n1,0,0\n0,0,0\n");
    let mut a = stdout_json(&neurotopo(&["analyze", s(&act), "--binarize", "--no-timings"]));
    let mut b = stdout_json(&neurotopo(&["analyze", s(&bin), "--no-timings"]));
    assert_eq!(a["input"]["binarized"], true);
    assert_eq!(b["input"]["binarized"], false);
    for v in [&mut a, &mut b] {
        let input = v["input"].as_object_mut().unwrap();
        input.remove("source");
        input.remove("binarized");
    }
    assert_eq!(a, b);
}

#[test]
fn csv_summary_has_a_header_and_one_row() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "tri.csv", HOLLOW);
    let out = neurotopo(&["analyze", s(&input), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(fields(lines[0]).len(), fields(lines[1]).len());
    assert_eq!(fields(lines[1])[6], "(1,1)");
}

/// Splits one CSV line, honouring double quotes.
fn fields(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            c => out.last_mut().unwrap().push(c),
        }
    }
    out
}

#[test]
fn test_subcommand_reports_a_decision() {
    let dir = TempDir::new().unwrap();
    let mut rows = String::new();
    for _ in 0..200 {
        rows.push_str("1,0,0\n0,1,0\n0,0,1\n1,0,1\n0,0,0\n");
    }
    let input = write(&dir, "ex.csv", &rows);
    let out = neurotopo(&["test", s(&input), "--feature", "monomial 1 2"]);
    let v = stdout_json(&out);
    assert_eq!(v["A"], serde_json::json!([1, 2]));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let expect = if v["decision"] == "significant" {
        "significant"
    } else {
        "not significant"
    };
    assert_eq!(stderr.trim(), expect);
    let hole = stdout_json(&neurotopo(&["test", s(&input), "--feature", "hole 1"]));
    assert_eq!(hole["dim"], 1);
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(neurotopo(&["analyze", s(&missing)]).status.code(), Some(2));

    let ragged = write(&dir, "ragged.csv", "1,0\n1,0,1\n");
    let out = neurotopo(&["analyze", s(&ragged)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let input = write(&dir, "tri.csv", HOLLOW);
    assert_eq!(
        neurotopo(&["test", s(&input), "--feature", "triangle 1 2"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        neurotopo(&["analyze", s(&input), "--max-dim", "0"]).status.code(),
        Some(4)
    );

    // without smoothing an unobserved pattern has log-probability -inf
    let out = neurotopo(&["test", s(&input), "--feature", "monomial 1 2", "--smoothing", "0"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_reads_a_toml_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sim.toml",
        "n_holes = 2\nn_cells = 10\nseed = 3\n\n[trajectory]\nduration = 30.0\n",
    );
    let out_path = dir.path().join("code.csv");
    let pos = dir.path().join("pos.csv");
    let out = neurotopo(&[
        "simulate",
        "--config",
        s(&cfg),
        "--out",
        s(&out_path),
        "--positions",
        s(&pos),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 3000);
    assert!(text.lines().all(|l| l.split(',').count() == 10));
    assert!(std::fs::read_to_string(&pos).unwrap().lines().count() >= 3000);

    let bad = write(&dir, "bad.toml", "n_holes = \"many\"\n");
    assert_eq!(neurotopo(&["simulate", "--config", s(&bad)]).status.code(), Some(4));
}

#[test]
fn bench_writes_csv_rows() {
    let out = neurotopo(&["bench", "--sizes", "8,12", "--m", "10", "--cf-cap", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,m,t_gen,t_cf,cf_status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("8,10,"));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_appraisal");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("APPRAISAL_NLI_URL")
        .env_remove("APPRAISAL_LLM_URL")
        .env_remove("APPRAISAL_LLM_MODEL")
        .env_remove("APPRAISAL_LLM_KEY")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn schemas() -> Value {
    let o = run(&["schemas"]);
    assert!(o.status.success());
    serde_json::from_slice(&o.stdout).unwrap()
}

fn assert_valid(schema_name: &str, instance: &Value) {
    let all = schemas();
    let schema = &all[schema_name];
    assert!(schema.is_object(), "no schema `{schema_name}`");
    let validator = jsonschema::validator_for(schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:?}");
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn json_outputs_match_their_schemas() {
    for (cmd, schema) in [
        ("salience", "salience_report"),
        ("rank", "rank_report"),
        ("explain", "explain_report"),
    ] {
        let o = run(&[cmd, "--fixture", "alex", "--format", "json", "--compare"]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let value: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_valid(schema, &value);
    }
}

#[test]
fn bundled_fixtures_match_the_fixture_schema() {
    for name in ["sarah", "alex"] {
        let text = fs::read_to_string(format!(
            "{}/data/fixtures/{name}.json",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        assert_valid("fixture", &serde_json::from_str(&text).unwrap());
    }
}

#[test]
fn file_inputs_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write(
        dir.path(),
        "profile.json",
        r#"{"user_id":"u1","goals":["Healthy"],"dietary_constraints":["vegan"],"familiar_items":["Rice"]}"#,
    );
    let candidates = write(
        dir.path(),
        "candidates.json",
        r#"[
          {"id":"a","name":"Rice Bowl","description":"A healthy rice bowl.","prep_time_minutes":10,"ingredients":["rice","tofu"],"tags":["vegan"]},
          {"id":"b","name":"Omelette","description":"Quick and tasty.","prep_time_minutes":5,"ingredients":["egg","cheese"],"tags":[]}
        ]"#,
    );
    let o = run(&[
        "rank", "--profile", &profile, "--candidates", &candidates, "--query",
        "something healthy in 20 minutes", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ranking"]["entries"][0]["candidate_id"], "a");
    assert_eq!(v["ranking"]["excluded"][0]["candidate_id"], "b");

    let o = run(&[
        "rank", "--profile", &profile, "--candidates", &candidates, "--query",
        "something healthy", "--no-normative-filter", "--format", "json",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ranking"]["entries"].as_array().unwrap().len(), 2);

    // Config paths resolve relative to the config file.
    write(
        dir.path(),
        "run.toml",
        "profile = \"profile.json\"\ncandidates = \"candidates.json\"\nquery = \"quick dinner\"\ntop_k = 2\nformat = \"json\"\n",
    );
    let config = dir.path().join("run.toml");
    let o = run(&["salience", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["salience"]["dominant"].as_array().unwrap().len(), 2);
    assert_valid("salience_report", &v);
}

#[test]
fn input_errors_exit_with_two() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["rank", "--profile", "/nonexistent/profile.json", "--query", "x"],
        vec!["explain", "--fixture", "nobody"],
        vec!["scenario", "nobody"],
        vec!["salience", "--fixture", "sarah", "--top-k", "7"],
        vec!["salience", "--fixture", "sarah", "--query", "   "],
        vec!["rank", "--fixture", "sarah", "--threshold", "1.5"],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(&["scenario", "nobody"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alex") && err.contains("sarah"), "{err}");
}

#[test]
fn unreachable_services_without_fallback_exit_with_one() {
    let o = run(&["explain", "--fixture", "sarah", "--realizer", "llm"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unavailable"));
    let o = run(&["salience", "--fixture", "sarah", "--scorer", "remote"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fallback_is_logged_to_the_run_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["explain", "--fixture", "sarah", "--realizer", "llm", "--fallback", "--out", out]);
    assert!(o.status.success());
    let log = fs::read_to_string(dir.path().join("runlog.jsonl")).unwrap();
    let records: Vec<Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let realizers: Vec<&str> = records.iter().map(|r| r["realizer"].as_str().unwrap()).collect();
    assert_eq!(realizers, ["llm", "template-fallback"]);
    for r in &records {
        assert_valid("run_record", r);
    }
}

#[test]
fn scenario_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scenario", "sarah", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS sarah"));
    let run_dir = dir.path().join("sarah");
    for file in [
        "salience.json",
        "ranking.json",
        "plan.json",
        "explanation.txt",
        "baseline.txt",
        "comparison.json",
        "runlog.jsonl",
    ] {
        assert!(run_dir.join(file).is_file(), "missing {file}");
    }
    let salience: Value = serde_json::from_str(&fs::read_to_string(run_dir.join("salience.json")).unwrap()).unwrap();
    assert_valid("salience", &salience);
    let ranking: Value = serde_json::from_str(&fs::read_to_string(run_dir.join("ranking.json")).unwrap()).unwrap();
    assert_valid("ranking", &ranking);
    assert_eq!(ranking["entries"][0]["candidate_id"], "lemon_chicken_rice");
}

#[test]
fn compare_text_lists_both_explanations() {
    let o = run(&["explain", "--fixture", "sarah", "--compare"]);
    let text = stdout(&o);
    assert!(text.contains("== Appraisal explanation =="));
    assert!(text.contains("== Baseline explanation =="));
    assert!(text.contains("baseline prompt sections: User profile, Situational input"));
    assert!(!text.contains("sections: User profile, Situational input, Dominant appraisals"));
}

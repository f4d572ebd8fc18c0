//! End-to-end tests of the `eolcycle` binary: the exit-code contract,
//! output stability, and cross-command consistency.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn asset(relative: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(relative)
}

fn eolcycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eolcycle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&Path]) -> Output {
    let args: Vec<&str> = args.iter().map(|p| p.to_str().unwrap()).collect();
    eolcycle(&args)
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes_follow_the_contract() {
    let clean = run(&[Path::new("validate"), &asset("fixtures/iwp.ttl")]);
    assert_eq!(code(&clean), 0);

    let broken = run(&[
        Path::new("validate"),
        &asset("fixtures/invalid/bad_cardinality.ttl"),
    ]);
    assert_eq!(code(&broken), 2);
    assert!(stdout(&broken).contains("component-cardinality"));
    assert!(stdout(&broken).contains("ccpo:halfPanel"));

    let missing = eolcycle(&["validate", "does-not-exist.ttl"]);
    assert_eq!(code(&missing), 1);
}

#[test]
fn strict_mode_upgrades_existential_warnings() {
    let fixture = asset("fixtures/invalid/missing_generation.ttl");
    let advisory = run(&[Path::new("validate"), &fixture]);
    assert_eq!(code(&advisory), 0);
    assert!(stdout(&advisory).contains("warning[missing-generation-activity]"));

    let strict = eolcycle(&["validate", fixture.to_str().unwrap(), "--strict"]);
    assert_eq!(code(&strict), 2);
}

#[test]
fn query_matches_the_golden_tsv() {
    let output = eolcycle(&[
        "query",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "--file",
        asset("cq/cq1.rq").to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert_eq!(code(&output), 0);
    let golden = std::fs::read_to_string(asset("tests/golden/cq1.tsv")).unwrap();
    assert_eq!(stdout(&output), golden);
}

#[test]
fn empty_results_still_exit_zero() {
    let output = eolcycle(&[
        "query",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "--query",
        "PREFIX ccpo: <http://www.semanticweb.org/ccpo#>\nSELECT ?r WHERE { ccpo:iwp1 ccpo:suggestedEoLRoute ?r }",
        "--format",
        "tsv",
    ]);
    assert_eq!(code(&output), 0);
    assert_eq!(stdout(&output), "?r\n");
}

#[test]
fn malformed_queries_exit_one_with_location() {
    let output = eolcycle(&[
        "query",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "--query",
        "SELECT ?x WHERE { ?x ",
    ]);
    assert_eq!(code(&output), 1);
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("syntax error at"));
}

#[test]
fn decide_reports_strong_reuse_for_the_panel() {
    let output = eolcycle(&[
        "decide",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "ccpo:iwp1",
    ]);
    assert_eq!(code(&output), 0);
    assert!(stdout(&output).contains("final route: StrongReuseSuggestion"));

    let unknown = eolcycle(&[
        "decide",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "ccpo:nonexistent",
    ]);
    assert_eq!(code(&unknown), 1);
}

#[test]
fn decision_gap_exits_three_when_reconciliation_is_off() {
    let dir = std::env::temp_dir().join("eolcycle-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("norecon.toml");
    std::fs::write(&config, "[decision]\nreconciliation = false\n").unwrap();

    let output = eolcycle(&[
        "decide",
        asset("fixtures/iwp_overdue.ttl").to_str().unwrap(),
        "ccpo:iwp3",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 3);
    assert!(stdout(&output).contains("at end of life: true"));
    assert!(stdout(&output).contains("final route: (none)"));

    // With the default (reconciled) ruleset the same product gets a route.
    let reconciled = eolcycle(&[
        "decide",
        asset("fixtures/iwp_overdue.ttl").to_str().unwrap(),
        "ccpo:iwp3",
    ]);
    assert_eq!(code(&reconciled), 0);
    assert!(stdout(&reconciled).contains("WeakReuse_ConsiderRefurbishmentSoon"));
}

#[test]
fn decide_json_is_byte_identical_across_runs() {
    let fixture = asset("fixtures/iwp.ttl");
    let args = [
        "decide",
        fixture.to_str().unwrap(),
        "ccpo:iwp1",
        "--format",
        "json",
    ];
    let first = eolcycle(&args);
    let second = eolcycle(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(parsed["final"], "StrongReuseSuggestion");
    assert_eq!(parsed["atEoL"], true);
}

#[test]
fn decide_agrees_with_the_cq6_query() {
    let query_output = eolcycle(&[
        "query",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "--file",
        asset("cq/cq6.rq").to_str().unwrap(),
        "--infer",
        "--format",
        "tsv",
    ]);
    let routes_via_query: Vec<String> = stdout(&query_output)
        .lines()
        .skip(1)
        .map(|l| l.trim_start_matches("ccpo:").to_string())
        .collect();

    let decide_output = eolcycle(&[
        "decide",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "ccpo:iwp1",
        "--format",
        "json",
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&decide_output)).unwrap();
    let routes_via_decide: Vec<String> = report["derivedRoutes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();

    assert_eq!(routes_via_query, routes_via_decide);
    // The final recommendation is the priority resolution of those routes.
    assert_eq!(report["final"], routes_via_decide[0].as_str());
}

#[test]
fn explain_narrates_the_derivation() {
    let output = eolcycle(&[
        "explain",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "ccpo:iwp1",
    ]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    let rule1_pos = text.find("Rule1").expect("Rule1 appears");
    let rule2_pos = text.find("Rule2.i").expect("Rule2.i appears");
    assert!(rule1_pos < rule2_pos, "derivation order preserved");
    assert!(text.contains("?diff=1"));

    let young = eolcycle(&[
        "explain",
        asset("fixtures/iwp_not_at_eol.ttl").to_str().unwrap(),
        "ccpo:iwp2",
    ]);
    assert_eq!(code(&young), 0);
    assert!(stdout(&young).contains("not at end-of-life (diff=5"));
    assert!(stdout(&young).contains("no rules fired"));
}

#[test]
fn custom_ruleset_flag_replaces_the_default() {
    let dir = std::env::temp_dir().join("eolcycle-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let ruleset = dir.join("sla.rules");
    std::fs::write(
        &ruleset,
        "EoL: Product(?p) ^ referenceServiceLife(?p,?r) ^ actualServiceLife(?p,?a) ^ swrlb:subtract(?d,?r,?a) ^ swrlb:lessThanOrEqual(?d,1) -> atEoL(?p,true)\nSLA1: Product(?p) ^ atEoL(?p,true) -> suggestedEoLRoute(?p,SendToLandfill)\n",
    )
    .unwrap();
    let output = eolcycle(&[
        "decide",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        "ccpo:iwp1",
        "--ruleset",
        ruleset.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);
    assert!(stdout(&output).contains("final route: SendToLandfill"));
}

#[test]
fn env_variable_overrides_the_format() {
    let output = Command::new(env!("CARGO_BIN_EXE_eolcycle"))
        .args([
            "validate",
            asset("fixtures/iwp.ttl").to_str().unwrap(),
        ])
        .env("EOLCYCLE_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(code(&output), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(parsed["errors"].as_array().unwrap().len(), 0);
    assert!(parsed["checked"].as_u64().unwrap() > 0);
}

#[test]
fn help_exits_zero_and_bad_usage_exits_one() {
    let help = eolcycle(&["--help"]);
    assert_eq!(code(&help), 0);
    let none = eolcycle(&[]);
    assert_eq!(code(&none), 1);
    let bad_flag = eolcycle(&["validate", "--no-such-flag"]);
    assert_eq!(code(&bad_flag), 1);
}

#[test]
fn multiple_data_files_merge_into_one_graph() {
    let output = eolcycle(&[
        "query",
        asset("fixtures/iwp.ttl").to_str().unwrap(),
        asset("fixtures/iwp_not_at_eol.ttl").to_str().unwrap(),
        "--query",
        "PREFIX ccpo: <http://www.semanticweb.org/ccpo#>\nSELECT ?p WHERE { ?p ccpo:referenceServiceLife 25 }",
        "--format",
        "tsv",
    ]);
    assert_eq!(code(&output), 0);
    let body = stdout(&output);
    assert!(body.contains("ccpo:iwp1"));
    assert!(body.contains("ccpo:iwp2"));
}

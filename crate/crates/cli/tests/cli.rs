use std::path::PathBuf;
use std::process::{Command, Output};

use revelation_cli::config::{ScenarioConfig, SweepGrid};
use revelation_cli::report::analyze_labor;
use revelation_cli::sweep::run_sweep;
use revelation_cli::{parse_config, run_scenario, AnalyzeOptions, ScenarioReport};
use revelation_core::labor::LaborParams;
use revelation_core::rational::q;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn revcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revcheck"))
        .args(args)
        .output()
        .unwrap()
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn canonical_labor_exits_with_violation() {
    let o = revcheck(&[
        "analyze",
        scenario("canonical_labor.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let report: ScenarioReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report.violation && report.implemented && !report.truthful_is_bne);
}

#[test]
fn zero_cost_labor_exits_clean() {
    let o = revcheck(&[
        "analyze",
        scenario("zero_cost_labor.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: ScenarioReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!report.violation);
}

#[test]
fn inverted_productivities_exit_with_diagnostic() {
    let f = write_temp(
        r#"{"kind":"labor","theta_low":"2","theta_high":"1","education":"1","wage":"3/2"}"#,
    );
    let o = revcheck(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("theta_high must exceed theta_low"),
        "{}",
        stderr(&o)
    );
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_json_reports_position() {
    let f = write_temp("{\n  \"kind\": \"labor\",\n  \"wage\": \n}");
    let o = revcheck(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn bad_values_name_the_field() {
    let f = write_temp(r#"{"kind":"labor","theta_low":1,"theta_high":2,"education":1,"wage":1.5}"#);
    let o = revcheck(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("`wage`") && stderr(&o).contains("p/q"),
        "{}",
        stderr(&o)
    );

    let text = std::fs::read_to_string(scenario("labor_generic.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["utility"][3]["value"] = "1/0".into();
    let f = write_temp(&v.to_string());
    let o = revcheck(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("utility[3].value"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(
        revcheck(&["analyze", "/nonexistent/scenario.json"])
            .status
            .code(),
        Some(1)
    );
    let path = scenario("canonical_labor.json");
    assert_eq!(
        revcheck(&["analyze", path.to_str().unwrap(), "--prior-high", "0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        revcheck(&["analyze", path.to_str().unwrap(), "--prior-high", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(revcheck(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(revcheck(&["--help"]).status.code(), Some(0));
}

#[test]
fn prior_flag_keeps_the_violation() {
    let path = scenario("canonical_labor.json");
    for p in ["1/10", "9/10"] {
        let o = revcheck(&["analyze", path.to_str().unwrap(), "--prior-high", p]);
        assert_eq!(o.status.code(), Some(2));
        let report: ScenarioReport = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(
            report.labor.unwrap().params.prior_high,
            vec![p.parse().unwrap(); 2]
        );
    }
}

#[test]
fn generic_encoding_of_labor_matches_builtin() {
    let text = std::fs::read_to_string(scenario("labor_generic.json")).unwrap();
    let cfg = parse_config(&text).unwrap();
    let generic = run_scenario(&cfg, &AnalyzeOptions::default()).unwrap();
    let labor = analyze_labor(&LaborParams::canonical(), false).unwrap();
    assert_eq!(generic.audit, labor.audit);
    assert_eq!(generic.truthful_witness, labor.truthful_witness);
    assert_eq!(generic.chain, labor.chain);

    // without a candidate the search finds the separating profile
    let ScenarioConfig::Generic(mut g) = cfg else {
        panic!()
    };
    g.profile = None;
    let searched = run_scenario(&ScenarioConfig::Generic(g), &AnalyzeOptions::default()).unwrap();
    assert_eq!(searched.indirect_equilibrium, labor.indirect_equilibrium);
    assert!(searched.violation);

    let o = revcheck(&["analyze", scenario("labor_generic.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generic_tables_must_be_total() {
    let text = std::fs::read_to_string(scenario("labor_generic.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["utility"].as_array_mut().unwrap().pop();
    let f = write_temp(&v.to_string());
    let o = revcheck(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("utility"), "{}", stderr(&o));

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["scf"][0]["outcome"] = "(9,9)".into();
    let f = write_temp(&v.to_string());
    let o = revcheck(&["analyze", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("scf[0]"), "{}", stderr(&o));
}

#[test]
fn profile_cap_guards_search() {
    let text = std::fs::read_to_string(scenario("labor_generic.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("profile");
    let f = write_temp(&v.to_string());
    let o = revcheck(&[
        "analyze",
        f.path().to_str().unwrap(),
        "--max-profiles",
        "15",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("too large"), "{}", stderr(&o));
    let o = revcheck(&[
        "analyze",
        f.path().to_str().unwrap(),
        "--max-profiles",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_round_trips() {
    for zero in [false, true] {
        for c in [q(0, 1), q(1, 2), q(1, 1)] {
            let r = analyze_labor(&LaborParams::canonical().with_misreport_cost(c), zero).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<ScenarioReport>(&text).unwrap(), r);
        }
    }
}

#[test]
fn sweep_examples() {
    let o = revcheck(&["sweep", scenario("sweep.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let cells: Vec<Vec<String>> = rows
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    assert_eq!(cells.len(), 9);
    let find = |w: &str, c: &str| {
        cells
            .iter()
            .find(|r| r[0] == w && r[1] == c)
            .unwrap()
            .clone()
    };
    assert_eq!(find("3/2", "0")[5], "true");
    let below = find("1/2", "0");
    assert_eq!((below[2].as_str(), below[5].as_str()), ("false", "false"));
    let high = find("3/2", "1");
    assert_eq!((high[4].as_str(), high[5].as_str()), ("true", "false"));
    // w outermost
    let order: Vec<(&str, &str)> = cells
        .iter()
        .map(|r| (r[0].as_str(), r[1].as_str()))
        .collect();
    assert_eq!(order[..3], [("1/2", "0"), ("1/2", "1/2"), ("1/2", "1")]);
}

#[test]
fn sweep_order_is_input_order() {
    let grid: SweepGrid = serde_json::from_str(
        r#"{"w_values":["19/10","11/10","3/2"],"cmis_values":["1","0"],"fixed":{"theta_low":1,"theta_high":2,"education":1}}"#,
    )
    .unwrap();
    let rows = run_sweep(&grid);
    let order: Vec<(String, String)> = rows
        .iter()
        .map(|r| (r.w.clone(), r.c_mis.clone()))
        .collect();
    let expected: Vec<(String, String)> = ["19/10", "11/10", "3/2"]
        .iter()
        .flat_map(|w| {
            ["1", "0"]
                .iter()
                .map(move |c| (w.to_string(), c.to_string()))
        })
        .collect();
    assert_eq!(order, expected);
    assert_eq!(rows, run_sweep(&grid));
}

#[test]
fn matrices_markdown() {
    let o = revcheck(&[
        "matrices",
        scenario("canonical_labor.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert_eq!(md.matches("## Case").count(), 4);
    // case 1 diagonal at w = 3/2
    assert!(md.contains("| theta_L | (3/4, 3/4) | (0, 3/2) |"));
    // case 4 off-diagonals at c_mis = 1/2
    assert!(md.contains("| theta_L | (3/4, 3/4) | (0, 1) |"));
    assert!(md.contains("| theta_H | (1, 0) | (1/4, 1/4) |"));

    let o = revcheck(&[
        "matrices",
        scenario("zero_cost_labor.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["cases"][0]["cells"], doc["cases"][1]["cells"]);

    let o = revcheck(&["matrices", scenario("labor_generic.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn other_formats() {
    let path = scenario("canonical_labor.json");
    let o = revcheck(&["analyze", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("kind,implemented,truthful_is_bne,violation"));
    let o = revcheck(&["analyze", path.to_str().unwrap(), "--format", "md"]);
    assert!(stdout(&o).contains("| violation | true |"));
    let o = revcheck(&[
        "sweep",
        scenario("sweep.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 9);
}

#[test]
fn reproduce_paper_passes_and_repeats() {
    let a = revcheck(&["reproduce-paper"]);
    let b = revcheck(&["reproduce-paper"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["all_pass"], true);
}

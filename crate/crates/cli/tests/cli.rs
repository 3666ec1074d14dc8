use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn grushin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grushin")).args(args).env_remove("GRUSHIN_OUT_DIR").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Splits on whitespace; `@name` expands to the fixture path.
fn argv(line: &str) -> Vec<String> {
    line.split_whitespace().map(|t| t.strip_prefix('@').map(fixture).unwrap_or_else(|| t.to_string())).collect()
}

#[test]
fn exit_code_matrix() {
    let cases = [
        ("eval --map @joukovski.json --point 2,0.5", 0),
        ("eval --map @joukovski.json --point 0,0", 2),
        ("eval --map @bad_unknown_field.json --point 1,1", 2),
        ("verify --map @identity.json --domain @square.json", 0),
        ("verify --map @joukovski.json --domain @joukovski_domain.json --resolution 16", 0),
        ("verify --map @shifted.json --domain @square.json", 1),
        ("verify --map @identity.json --domain @bad_degenerate_rect.json", 2),
        ("length --alpha 1 --curve @segment.json", 0),
        ("length --alpha 0 --curve @segment.json", 2),
        ("length --alpha 1 --curve @bad_syntax.json", 2),
        ("admissible --alpha 1 --curve @cusp.json", 0),
        ("admissible --alpha 1 --curve @diagonal.json", 1),
        ("admissible --alpha 1 --curve @cusp.json --levels 2", 2),
        ("push-curve --map @joukovski.json --curve @arc.json", 0),
        ("push-curve --map @bad_affine_zero.json --curve @arc.json", 2),
        ("distort --map @joukovski.json --curve @arc.json", 0),
        ("distort --map @joukovski.json --curve @missing.json", 2),
        ("distance --alpha 1 --from 1,0 --to 3,0", 0),
        ("distance --alpha 1 --from 1,0 --to 3,0 --knots 1", 2),
        ("classify-entire --map @dilation.json", 0),
        ("classify-entire --map @joukovski.json", 1),
        ("classify-entire --map @bad_alpha.json", 2),
        ("axis-components --domain @staircase.json", 0),
        ("axis-components --domain @identity.json", 2),
        ("obstruct --first @staircase.json --second @staircase.json", 0),
        ("obstruct --first @staircase.json --second @staircase_prime.json", 1),
        ("obstruct --first @staircase.json --second @bad_degenerate_rect.json", 2),
        ("grid --map @identity.json --domain @unit_square.json --resolution 2", 0),
        ("grid --map @identity.json --domain @unit_square.json --resolution 0", 2),
        ("no-such-command", 2),
        ("", 2),
    ];
    let mut failures = Vec::new();
    for (line, want) in cases {
        let args = argv(line);
        let out = grushin(&args.iter().map(String::as_str).collect::<Vec<_>>());
        if code(&out) != want {
            failures.push(format!("{line}: expected {want}, got {} ({})", code(&out), stderr(&out).trim()));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn verify_identity_reports_pass() {
    let out = grushin(&["verify", "--map", &fixture("identity.json"), "--domain", &fixture("square.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"]["verdict"], "pass");
}

#[test]
fn verify_shifted_map_names_the_zero_set() {
    let out = grushin(&["verify", "--map", &fixture("shifted.json"), "--domain", &fixture("square.json")]);
    assert_eq!(code(&out), 1);
    let reasons = json(&out)["verdict"]["reasons"].clone();
    assert!(reasons.as_array().unwrap().iter().any(|r| r == "zero_set_discrepancy"), "{reasons}");
}

#[test]
fn obstruct_staircases_prints_certificate() {
    let out =
        grushin(&["obstruct", "--first", &fixture("staircase.json"), "--second", &fixture("staircase_prime.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["outcome"], "obstruction");
    assert_eq!(v["certificate"]["kind"], "side_degree_mismatch");
    assert_eq!(v["certificate"]["first"], serde_json::json!([1, 1, 1, 3]));
    assert_eq!(v["certificate"]["second"], serde_json::json!([1, 1, 2, 2]));
}

#[test]
fn horizontal_distance_bounds() {
    let out = grushin(&["distance", "--alpha", "1", "--from", "1,0", "--to", "3,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let upper = v["distance_upper"].as_f64().unwrap();
    assert_eq!(v["lower_bound"].as_f64().unwrap(), 2.0);
    assert!((2.0..=2.0 * (1.0 + 1e-3)).contains(&upper), "{upper}");
}

#[test]
fn negative_coordinates_parse() {
    let out = grushin(&["eval", "--map", &fixture("dilation.json"), "--point", "-1.5,-0.25"]);
    assert_eq!(code(&out), 0);
    let image = &json(&out)["values"][0]["image"];
    // a = 8 at α = 2 scales x by 8^{1/3} = 2 and y by 8.
    assert_eq!(image[0].as_f64().unwrap(), -3.0);
    assert_eq!(image[1].as_f64().unwrap(), -2.0);
}

#[test]
fn joukovski_eval_matches_direct_formula() {
    let out = grushin(&["eval", "--map", &fixture("joukovski.json"), "--point", "2,0.5"]);
    let image = &json(&out)["values"][0]["image"];
    // Meyerson at α = 1: x̃ = x|x|/2, then z + 1/z, then back with x = sign(u)√(2|u|).
    let (u, v) = (2.0f64, 0.5f64);
    let r2 = u * u + v * v;
    let (wu, wv) = (u + u / r2, v - v / r2);
    let want = [wu.signum() * (2.0 * wu.abs()).sqrt(), wv];
    for k in 0..2 {
        let got = image[k].as_f64().unwrap();
        assert!((got - want[k]).abs() <= 1e-14 * want[k].abs().max(1.0), "{got} vs {}", want[k]);
    }
}

#[test]
fn diagnostics_name_the_offending_field() {
    let out = grushin(&["axis-components", "--domain", &fixture("bad_degenerate_rect.json")]);
    assert!(stderr(&out).contains("rectangle 1"), "{}", stderr(&out));

    let out = grushin(&["eval", "--map", &fixture("bad_affine_zero.json"), "--point", "1,1"]);
    let msg = stderr(&out);
    assert!(msg.contains("expr.inner") && msg.contains("a != 0"), "{msg}");

    let out = grushin(&["eval", "--map", &fixture("bad_unknown_field.json"), "--point", "1,1"]);
    assert!(stderr(&out).contains("unknown field `colour`"), "{}", stderr(&out));

    let out = grushin(&["length", "--alpha", "1", "--curve", &fixture("bad_syntax.json")]);
    assert!(stderr(&out).contains("line 4 column 3"), "{}", stderr(&out));
}

#[test]
fn reports_are_deterministic() {
    let runs: [&[&str]; 3] = [
        &["distance", "--alpha", "0.5", "--from", "-1,0.5", "--to", "2,-1", "--knots", "17", "--seed", "9"],
        &["verify", "--map", &fixture("joukovski.json"), "--domain", &fixture("joukovski_domain.json")],
        &["distort", "--map", &fixture("joukovski.json"), "--curve", &fixture("arc.json")],
    ];
    for args in runs {
        let a = grushin(args);
        let b = grushin(args);
        assert_eq!(code(&a), 0, "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn pushed_curve_is_a_curve_document() {
    let dir = tempfile::tempdir().unwrap();
    let pushed = dir.path().join("pushed.json");
    let out = grushin(&[
        "--out",
        pushed.to_str().unwrap(),
        "push-curve",
        "--map",
        &fixture("dilation.json"),
        "--curve",
        &fixture("segment.json"),
        "--samples",
        "8",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let length = grushin(&["length", "--alpha", "2", "--curve", pushed.to_str().unwrap()]);
    assert_eq!(code(&length), 0, "{}", stderr(&length));
    // The dilation by 2 doubles the length 2 of the horizontal segment.
    assert_eq!(json(&length)["value"].as_f64().unwrap(), 4.0);
}

fn grid_rows(csv: &str) -> Vec<Vec<f64>> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,g1,g2,wbar_abs,det_dalpha"));
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn identity_grid_on_unit_square() {
    let out = grushin(&[
        "grid",
        "--map",
        &fixture("identity.json"),
        "--domain",
        &fixture("unit_square.json"),
        "--resolution",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows = grid_rows(&csv);
    let centres: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(centres, vec![(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]);
    for r in &rows {
        assert_eq!((r[2], r[3]), (r[0], r[1]));
        assert_eq!(r[4], 0.0);
        assert_eq!(r[5], 1.0);
    }
    let first = csv.lines().nth(1).unwrap();
    let mantissa = first.split(',').next().unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
}

#[test]
fn joukovski_grid_has_vanishing_wbar() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_grushin"))
        .args(["--out", "grid.csv", "grid", "--map", &fixture("joukovski.json")])
        .args(["--domain", &fixture("joukovski_domain.json"), "--resolution", "24"])
        .env("GRUSHIN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let rows = grid_rows(&std::fs::read_to_string(dir.path().join("grid.csv")).unwrap());
    assert_eq!(rows.len(), 24 * 24);
    for r in &rows {
        assert!(r[4] <= 1e-10, "wbar {} at ({}, {})", r[4], r[0], r[1]);
        assert!(r[5] > 0.0);
    }
}

#[test]
fn unwritable_output_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("grid.csv");
    let out = grushin(&[
        "--out",
        target.to_str().unwrap(),
        "grid",
        "--map",
        &fixture("identity.json"),
        "--domain",
        &fixture("unit_square.json"),
        "--resolution",
        "2",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cannot write"), "{}", stderr(&out));
}

#[test]
fn axis_components_are_exact() {
    let out = grushin(&["axis-components", "--domain", &fixture("staircase.json")]);
    let v = json(&out);
    let intervals: Vec<(String, String)> = v["axis_components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["y_min"].as_str().unwrap().to_string(), c["y_max"].as_str().unwrap().to_string()))
        .collect();
    let want = [("1", "2"), ("-1", "0"), ("-3", "-2")];
    assert_eq!(intervals, want.map(|(a, b)| (a.to_string(), b.to_string())));
    assert_eq!(v["side_degrees"], serde_json::json!([3, 1, 1, 1]));
}

#[test]
fn text_format_lists_leaves() {
    let out = grushin(&["--format", "text", "length", "--alpha", "1", "--curve", &fixture("segment.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "value = 2.0"), "{text}");
}

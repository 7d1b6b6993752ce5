//! Configuration parsing, canonical round trip, emission and the binary.

use std::path::PathBuf;
use std::process::Command as Process;

use proptest::prelude::*;
use stripelab_cli::config::{
    AxisSpec, Command, DiagramParams, InlineReaction, InlineSystem, PlaneKind, ReactionTerm, ScanModel, ScanParams,
    SystemConfig,
};
use stripelab_cli::emit::{boundaries_csv, GRID_HEADER};
use stripelab_cli::run::{build_system, diagram_grid, execute};
use stripelab_cli::{emit_config, grid_csv, parse_config, plot_svg, ConfigError, RunConfig};
use stripelab_core::presets::designed_example;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stripelab-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const DESIGNED: &str = r#"
// Designed example, κ̃–α plane.
{
  "system": { "preset": "designed_example", "epsilon": 0.4 },
  /* plane parameters */
  "command": { "diagram": {
      "plane": "kappa-alpha",
      "x": { "min": -0.3, "max": 0.3, "count": 2 },
      "y": { "min": 0.0, "max": 0.2, "count": 2 },
      "beta": 0.2
  } },
  "output_dir": "figs"
}
"#;

#[test]
fn designed_preset_matches_the_system_definition() {
    let cfg = parse_config(DESIGNED).unwrap();
    assert_eq!(cfg.system, SystemConfig::DesignedExample { epsilon: 0.4 });
    assert_eq!(cfg.system.spec().unwrap(), designed_example(0.4));
    let Command::Diagram(d) = &cfg.command else { panic!("{cfg:?}") };
    assert_eq!((d.theta, d.q, d.kappa), (1.0, None, 0.0));
    assert_eq!(cfg.output_dir, PathBuf::from("figs"));
}

#[test]
fn klausmeier_preset_uses_the_standard_parameters() {
    let cfg = parse_config(r#"{"system": {"preset": "klausmeier", "a": 2.8}, "command": "coeffs"}"#).unwrap();
    let spec = cfg.system.spec().unwrap();
    let expected = stripelab_core::presets::Klausmeier::<f64>::standard(2.8);
    assert_eq!((expected.m, expected.d), (0.45, 500.0));
    assert_eq!(spec, expected.spec().unwrap());
    assert_eq!(spec.diffusion, [500.0, 1.0]);
    // `m` and `d` are fixed by the preset.
    let err = parse_config(r#"{"system": {"preset": "klausmeier", "m": 0.5}, "command": "verify"}"#).unwrap_err();
    assert!(matches!(err, ConfigError::UnknownKey { ref key, .. } if key == "m"), "{err:?}");
}

#[test]
fn malformed_number_reports_its_location() {
    let text = "{\n  \"system\": { \"preset\": \"designed_example\", \"epsilon\": 0.4.1 },\n  \"command\": \"verify\"\n}";
    match parse_config(text).unwrap_err() {
        ConfigError::Parse { line, column, .. } => {
            assert_eq!(line, 2);
            assert!((55..=62).contains(&column), "{column}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn comments_do_not_shift_error_locations() {
    let text = "/* a\n b */ {\"system\": {\"preset\": \"designed_example\"}, // c\n \"command\": \"verify\", \"bogus\": 1}";
    match parse_config(text).unwrap_err() {
        ConfigError::UnknownKey { key, line, .. } => assert_eq!((key.as_str(), line), ("bogus", 3)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected_everywhere() {
    for text in [
        r#"{"system": {"preset": "designed_example"}, "command": "verify", "extra": 1}"#,
        r#"{"system": {"preset": "designed_example", "eps": 1}, "command": "verify"}"#,
        r#"{"system": {"preset": "designed_example"}, "command": {"diagram": {"plane": "q-alpha",
            "x": {"min": 0, "max": 1, "count": 2}, "y": {"min": 0, "max": 1, "count": 2, "step": 1}}}}"#,
    ] {
        assert!(matches!(parse_config(text), Err(ConfigError::UnknownKey { .. })), "{text}");
    }
}

#[test]
fn range_errors() {
    let base = |x: &str| {
        format!(
            r#"{{"system": {{"preset": "designed_example"}}, "command": {{"diagram": {{"plane": "kappa-alpha",
            "x": {x}, "y": {{"min": 0, "max": 1, "count": 2}}}}}}}}"#
        )
    };
    for x in [r#"{"min": 0, "max": 1, "count": 1}"#, r#"{"min": 1, "max": 0, "count": 5}"#] {
        assert!(matches!(parse_config(&base(x)), Err(ConfigError::Range { .. })), "{x}");
    }
    // Non-finite numbers are not JSON.
    assert!(matches!(parse_config(&base(r#"{"min": NaN, "max": 1, "count": 2}"#)), Err(ConfigError::Parse { .. })));
    let bad = [
        r#"{"system": {"preset": "designed_example"}, "command": {"oracle": {"scenario": "pentagon"}}}"#,
        r#"{"system": {"preset": "designed_example"}, "command": {"oracle": {"scenario": "hex", "eps_list": [0.01, 0.02]}}}"#,
        r#"{"system": {"preset": "klausmeier", "a": 0.5}, "command": "verify"}"#,
        r#"{"system": {"preset": "designed_example"}, "command": {"scan": {"model": "klausmeier", "beta": 0,
            "kappa": {"min": 0.4, "max": 0.5, "count": 2}, "a": {"min": 2.7, "max": 2.8, "count": 2}}}}"#,
    ];
    for text in bad {
        assert!(matches!(parse_config(text), Err(ConfigError::Range { .. })), "{text}");
    }
}

#[test]
fn inline_system_agrees_with_the_preset() {
    let cfg = parse_config(
        r#"{
        "system": {
          "preset": "inline",
          "diffusion": [1, 3.5],
          "linear": [[3, -1], [14, -3.5]],
          "unfolding": [[1, 4], [-0.2, 1]],
          "quadratic": [[0.4, 0, 0.1], [0.4, 0, 0.1]],
          "cubic": [[0, 0, -1, 0], [0, 0, 1, 0]]
        },
        "command": "coeffs"
    }"#,
    )
    .unwrap();
    let inline = build_system(&cfg.system).unwrap();
    let preset = designed_example(0.4).validate().unwrap();
    assert_eq!(inline.d, preset.d);
    assert_eq!(inline.l, preset.l);
    assert!((inline.m.0[1][0] - preset.m.0[1][0]).abs() < 1e-15);
    assert_eq!(inline.q, preset.q);
    assert_eq!(inline.k, preset.k);
}

#[test]
fn two_by_two_grid_is_five_lines_and_deterministic() {
    let cfg = parse_config(DESIGNED).unwrap();
    let Command::Diagram(d) = &cfg.command else { unreachable!() };
    let sys = build_system(&cfg.system).unwrap();
    let grid = diagram_grid(&sys, d).unwrap();
    let csv = grid_csv(&grid);
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    assert_eq!(csv.lines().next().unwrap(), GRID_HEADER);
    // Row-major with x fastest.
    let xs: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(xs, ["-0.3", "0.3", "-0.3", "0.3"]);
    assert_eq!(grid_csv(&diagram_grid(&sys, d).unwrap()), csv);
    let svg = plot_svg(&grid, "t", ("x", "y"));
    assert_eq!(plot_svg(&diagram_grid(&sys, d).unwrap(), "t", ("x", "y")), svg);
}

#[test]
fn quasihex_unstable_cells_are_eckhaus_unstable_beyond_the_covering_threshold() {
    let sys = designed_example(0.4).validate().unwrap();
    let p = DiagramParams {
        plane: PlaneKind::KappaAlpha,
        x: AxisSpec { min: -0.3, max: 0.3, count: 61 },
        y: AxisSpec { min: -0.05, max: 0.45, count: 101 },
        beta: 0.56,
        kappa: 0.0,
        q: Some(-0.215),
        theta: 1.0,
        ell_square: 0.0,
    };
    let grid = diagram_grid(&sys, &p).unwrap();
    let qh: Vec<_> = grid.labels.iter().filter(|l| l.quasihex_unstable).collect();
    assert!(!qh.is_empty());
    assert!(qh.iter().all(|l| l.eckhaus_unstable));
}

#[test]
fn plot_layers_paths_and_legend() {
    let cfg = parse_config(DESIGNED).unwrap();
    let Command::Diagram(d) = &cfg.command else { unreachable!() };
    let mut grid = diagram_grid(&build_system(&cfg.system).unwrap(), d).unwrap();
    let svg = plot_svg(&grid, "designed", ("κ̃", "α"));
    for id in ["layer-eckhaus", "layer-zigzag", "layer-square", "layer-hex", "layer-quasihex", "legend", "boundaries"] {
        assert!(svg.contains(&format!("id=\"{id}\"")), "{id}");
    }
    assert!(svg.contains("<path"));
    assert!(!svg.contains("http://") || svg.matches("http://").count() == 1);
    grid.boundaries.clear();
    let bare = plot_svg(&grid, "designed", ("κ̃", "α"));
    assert!(!bare.contains("<path") && bare.contains("layer-stable"));
    assert_eq!(boundaries_csv(&[]), "name,segment,x,y\n");
}

fn arb_axis() -> impl Strategy<Value = AxisSpec> {
    (-1e3f64..1e3, 1e-6f64..1e3, 2usize..500).prop_map(|(min, w, count)| AxisSpec { min, max: min + w, count })
}

fn arb_system() -> impl Strategy<Value = SystemConfig> {
    prop_oneof![
        (-2.0f64..2.0).prop_map(|epsilon| SystemConfig::DesignedExample { epsilon }),
        proptest::option::of(1.0f64..4.0).prop_map(|a| SystemConfig::Klausmeier { a }),
        (0.1f64..10.0, proptest::collection::vec((0usize..2, 0usize..2, 0usize..2, -5.0f64..5.0), 0..5)).prop_map(
            |(d, terms)| SystemConfig::Inline(InlineSystem {
                diffusion: [1.0, d],
                linear: Some([[1.0, -2.0], [3.0, d]]),
                unfolding: None,
                quadratic: Some([[0.1, 0.2, 0.3], [0.4, 0.5, d]]),
                cubic: None,
                reaction: Some(InlineReaction {
                    terms: terms
                        .into_iter()
                        .map(|(component, u, v, coef)| ReactionTerm { component, u, v, coef })
                        .collect(),
                    base: [0.5, d],
                }),
            })
        ),
    ]
}

fn arb_command() -> impl Strategy<Value = Command> {
    prop_oneof![
        Just(Command::Verify),
        Just(Command::Coeffs),
        (arb_axis(), arb_axis(), -1.0f64..1.0, proptest::option::of(-1.0f64..1.0), 0.01f64..1.0).prop_map(
            |(x, y, beta, q, theta)| Command::Diagram(DiagramParams {
                plane: PlaneKind::QAlpha,
                x,
                y,
                beta,
                kappa: beta / 3.0,
                q,
                theta,
                ell_square: 0.0,
            })
        ),
        (-200.0f64..200.0).prop_map(|beta| Command::Scan(ScanParams {
            model: ScanModel::Klausmeier,
            ..ScanParams::default_for(beta)
        })),
    ]
}

proptest! {
    #[test]
    fn canonical_round_trip(system in arb_system(), command in arb_command(), dir in "[a-z]{1,8}") {
        // Scans need the klausmeier preset.
        let system = if matches!(command, Command::Scan(_)) { SystemConfig::Klausmeier { a: None } } else { system };
        let cfg = RunConfig { system, command, output_dir: PathBuf::from(dir) };
        prop_assume!(cfg.validate().is_ok());
        let text = emit_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg.clone());
        prop_assert_eq!(emit_config(&parse_config(&text).unwrap()), text);
    }
}

#[test]
fn execute_writes_identical_bytes_on_rerun() {
    let cfg = parse_config(DESIGNED).unwrap();
    let (a, b) = (scratch("rerun-a"), scratch("rerun-b"));
    let ra = execute(&cfg, &a).unwrap();
    let rb = execute(&cfg, &b).unwrap();
    assert_eq!(ra.lines, rb.lines);
    let names: Vec<_> = ra.files.iter().map(|f| f.file_name().unwrap().to_owned()).collect();
    assert!(names.iter().any(|n| n == "diagram_kappa-alpha.csv"));
    assert!(names.iter().any(|n| n == "diagram_kappa-alpha.svg"));
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
    let back = parse_config(&std::fs::read_to_string(a.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(back, cfg);
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_stripelab"))
}

#[test]
fn binary_exit_codes_and_output_override() {
    let dir = scratch("bin");
    let out = binary().arg("coeffs").env("STRIPELAB_OUT", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let coeffs = std::fs::read_to_string(dir.join("coeffs.csv")).unwrap();
    assert!(coeffs.contains("rho_beta,0.112\n") && coeffs.contains("rho_kappa,-2.8\n"), "{coeffs}");
    assert!(coeffs.contains("k0,-1.28\n"));

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"system\": {\"preset\": \"designed_example\"}, \"command\": \"verify\", }").unwrap();
    let out = binary().args(["verify", "--config"]).arg(&bad).env("STRIPELAB_OUT", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    // Valid configuration but no Turing point: numerical failure.
    let off = dir.join("off.json");
    std::fs::write(&off, r#"{"system": {"preset": "klausmeier", "a": 2.0}, "command": "verify"}"#).unwrap();
    let out = binary().args(["run", "--config"]).arg(&off).env("STRIPELAB_OUT", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = binary().args(["diagram", "--plane", "beta-alphatilde", "--kappa", "0.1", "--q", "-0.215"])
        .env("STRIPELAB_OUT", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("diagram_beta-alphatilde.svg").exists());
    let csv = std::fs::read_to_string(dir.join("diagram_beta-alphatilde.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 121 * 121);
}

#[test]
fn small_klausmeier_scan_writes_grid_log_and_plot() {
    let dir = scratch("scan");
    let cfg_path = dir.join("scan.json");
    std::fs::write(
        &cfg_path,
        r#"{
  "system": {"preset": "klausmeier"},
  "command": {"scan": {"model": "klausmeier", "beta": 0,
      "kappa": {"min": 0.42, "max": 0.44, "count": 3},
      "a": {"min": 2.87, "max": 2.89, "count": 3}}}
}"#,
    )
    .unwrap();
    let out = binary().args(["scan", "--beta", "0", "--config"]).arg(&cfg_path).env("STRIPELAB_OUT", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("scan_klausmeier_beta0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    // Top row (largest a) has no stripe; the bottom row is rhomb-unstable.
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert!(rows[6..].iter().all(|r| r[2] == "0"));
    assert!(rows[..3].iter().all(|r| r[2] == "1" && r[6] == "1"));
    let log = std::fs::read_to_string(dir.join("scan_klausmeier_beta0.log")).unwrap();
    assert_eq!(log.lines().count(), 9);
    assert!(log.lines().all(|l| l.starts_with("cell=") && l.contains("residual=")));
    assert!(dir.join("scan_klausmeier_beta0.svg").exists());
}

use std::path::PathBuf;
use std::process::Command;

use edgeworth::commands::{self, Engine, OracleOptions};
use edgeworth::config::{parse_n_list, parse_spec, parse_sv, Grid};
use edgeworth::manifest::{Cell, Manifest, Table};
use edgeworth::CliError;
use edgeworth_core::correction::Evaluator;
use edgeworth_core::{DensitySpec, OracleConfig};
use proptest::prelude::*;

fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgeworth"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("edgeworth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn nums(t: &Table, col: &str) -> Vec<f64> {
    t.column(col).unwrap().iter().map(|c| c.as_f64().unwrap()).collect()
}

#[test]
fn spec_grammar() {
    let s = parse_spec("# comment\nform = pareto-sym\nalpha=3 # trailing\n\n").unwrap();
    assert_eq!(s.lines(), vec!["alpha=3", "form=pareto-sym"]);
    assert!(s.spec.is_standardized());

    let s = parse_spec("form=rv-sym\nalpha=3.5\nL=log:2").unwrap();
    assert!(s.spec.is_symmetric());
    let s = parse_spec("form=two-sided\nbeta=3.5\ngamma=4\nL_plus=const:2\nL_minus=log:1:3").unwrap();
    assert!(!s.spec.is_symmetric());
    let s = parse_spec("form=pareto-sym\nalpha=3\na_f=1\nb_f=1").unwrap();
    assert!(s.spec.is_standardized());
}

#[test]
fn spec_grammar_errors() {
    let parse = |t: &str| parse_spec(t).unwrap_err();
    for bad in [
        "alpha=3",
        "form=cauchy\nalpha=3",
        "form=pareto-sym",
        "form=pareto-sym\nalpha=three",
        "form=pareto-sym\nalpha=3\nalpha=4",
        "form=pareto-sym\nalpha 3",
        "form=pareto-sym\nalpha=3\nL=const:1",
        "form=pareto-sym\nalpha=3\na_f=1",
        "form=rv-sym\nalpha=3\nL=exp:1",
        "form=rv-sym\nalpha=3\nL=const:-1",
        "form=rv-sym\nalpha=3\nL=log:1:0.5",
    ] {
        assert!(matches!(parse(bad), CliError::Parse(_)), "{bad}");
    }
    for bad in ["form=pareto-sym\nalpha=1.5", "form=rv-sym\nalpha=2\nL=const:1"] {
        assert!(matches!(parse(bad), CliError::Domain(_)), "{bad}");
    }
    assert!(parse_sv("const:0").is_err());
}

#[test]
fn grid_and_n_list() {
    let g = Grid::parse("-3:3:121").unwrap();
    let p = g.points();
    assert_eq!(p.len(), 121);
    assert_eq!((p[0], p[120]), (-3.0, 3.0));
    assert!((g.spacing() - 0.05).abs() < 1e-15);
    assert_eq!(Grid::parse(&g.to_string()).unwrap(), g);
    assert_eq!(Grid::parse("1:1:1").unwrap().points(), vec![1.0]);
    for bad in ["1:0:3", "0:1", "0:1:0", "0:1:x", "0:2:1"] {
        assert!(Grid::parse(bad).is_err(), "{bad}");
    }
    assert_eq!(parse_n_list("1, 5,30").unwrap(), vec![1, 5, 30]);
    assert!(parse_n_list("0").is_err());
    assert!(parse_n_list("3,,4").is_err());
}

#[test]
fn expand_shape_and_case_tag() {
    let spec = parse_spec("form=pareto-sym\nalpha=3").unwrap();
    let out = commands::expand(&spec, &[20], Grid::parse("-3:3:121").unwrap(), None).unwrap();
    assert_eq!(out.table.rows.len(), 121);
    assert_eq!(out.table.columns, vec!["x", "n", "gaussian", "correction", "total", "case_tag"]);
    assert!(out.table.column("case_tag").unwrap().iter().all(|c| **c == Cell::Text("symmetric-odd".into())));
}

#[test]
fn expand_round_trips_through_csv() {
    let spec = parse_spec("form=pareto-sym\nalpha=6.5").unwrap();
    let grid = Grid::parse("-4:4:33").unwrap();
    let out = commands::expand(&spec, &[7, 50], grid, None).unwrap();
    let table = Table::parse(&out.render()).unwrap();
    assert_eq!(table.columns, vec!["x", "n", "gaussian", "edgeworth_g4", "edgeworth_g6", "correction", "total", "case_tag"]);
    let ev = Evaluator::new(&spec.spec).unwrap();
    for row in &table.rows {
        let v: Vec<f64> = row[..7].iter().map(|c| c.as_f64().unwrap()).collect();
        let (x, n) = (v[0], v[1] as u64);
        assert!((v[6] - v[2] * (1.0 + v[3] + v[4]) - v[5]).abs() <= 1e-15);
        let r = ev.eval(x, n).unwrap();
        assert_eq!(v[2], r.gaussian);
        assert_eq!(v[5], r.correction);
        assert_eq!(v[6], r.total);
    }
}

#[test]
fn orders_zero_keeps_gaussian_and_correction() {
    let spec = parse_spec("form=pareto-sym\nalpha=6.5").unwrap();
    let out = commands::expand(&spec, &[10], Grid::parse("-2:2:9").unwrap(), Some(0)).unwrap();
    assert_eq!(out.table.columns, vec!["x", "n", "gaussian", "correction", "total", "case_tag"]);
    for r in &out.table.rows {
        let (g, f, t) = (r[2].as_f64().unwrap(), r[3].as_f64().unwrap(), r[4].as_f64().unwrap());
        assert_eq!(t, g + f);
    }
    assert_eq!(out.manifest.option("orders"), Some("0"));
}

#[test]
fn manifest_round_trip() {
    let spec = parse_spec("form=two-sided\nbeta=3.5\ngamma=4.5\nL_plus=const:2\nL_minus=const:1").unwrap();
    let out = commands::expand(&spec, &[10, 40], Grid::parse("-1:1:5").unwrap(), Some(4)).unwrap();
    let text = out.render();
    let m = Manifest::parse(&text).unwrap();
    assert_eq!(m.command, "expand");
    assert_eq!(m.spec_lines, spec.lines());
    assert_eq!(m.n, vec![10, 40]);
    assert_eq!(m.grid, Grid::parse("-1:1:5").unwrap());
    assert_eq!(m.option("orders"), Some("4"));
    assert!(m.wall_clock_s.is_some());
    let again = commands::rerun(&text).unwrap();
    assert_eq!(again.table.render(), out.table.render());
}

#[test]
fn oracle_config_survives_the_manifest() {
    let cfg = OracleConfig { mc_samples: 12345, mc_seed: 99, kde_bandwidth: 0.25, inversion_t_max: 80.0, ..Default::default() };
    let back = commands::oracle_from_pairs(&commands::oracle_pairs(&cfg)).unwrap();
    assert_eq!(back, cfg);
    assert!(commands::oracle_from_pairs(&[("bogus".into(), "1".into())]).is_err());
}

#[test]
fn rerun_reproduces_oracle_and_compare() {
    let spec = parse_spec("form=pareto-sym\nalpha=3").unwrap();
    let grid = Grid::parse("-2:2:9").unwrap();
    let cfg = OracleConfig { mc_samples: 20_000, ..Default::default() };
    for engine in [Engine::Inversion, Engine::Conv, Engine::Mc] {
        let out = commands::oracle(&spec, &[5], grid, &OracleOptions { engine, config: cfg.clone() }).unwrap();
        let again = commands::rerun(&out.render()).unwrap();
        assert_eq!(again.table.render(), out.table.render(), "{engine:?}");
    }
    let out = commands::compare(&spec, &[20], grid, &cfg).unwrap();
    let again = commands::rerun(&out.render()).unwrap();
    assert_eq!(again.table.render(), out.table.render());
    assert!(out.summary.unwrap().starts_with("max|corrected_err| = "));
}

#[test]
fn compare_columns_and_regions() {
    let spec = parse_spec("form=pareto-sym\nalpha=3").unwrap();
    let n = 20u64;
    let bound = (n as f64).ln().sqrt();
    let out = commands::compare(&spec, &[n], Grid::parse("-3:3:25").unwrap(), &OracleConfig::default()).unwrap();
    assert_eq!(
        out.table.columns,
        vec!["x", "n", "oracle", "gaussian_err", "edgeworth_err", "corrected_err", "tail_equivalent", "region"]
    );
    let xs = nums(&out.table, "x");
    let regions = out.table.column("region").unwrap();
    for (x, r) in xs.iter().zip(regions) {
        let want = if x.abs() <= 1.0 {
            "central"
        } else if x.abs() <= bound {
            "moderate"
        } else {
            "large"
        };
        assert_eq!(*r, Cell::Text(want.into()), "x={x}");
    }
    let tails = nums(&out.table, "tail_equivalent");
    for (x, t) in xs.iter().zip(tails) {
        assert_eq!(t.is_nan(), *x == 0.0);
    }
}

#[test]
fn oracle_columns() {
    let spec = parse_spec("form=pareto-sym\nalpha=3").unwrap();
    let grid = Grid::parse("-1:1:3").unwrap();
    let cfg = OracleConfig { mc_samples: 10_000, ..Default::default() };
    let inv = commands::oracle(&spec, &[1], grid, &OracleOptions { engine: Engine::Inversion, config: cfg.clone() }).unwrap();
    assert_eq!(inv.table.columns, vec!["x", "n", "density", "engine"]);
    for (x, d) in nums(&inv.table, "x").into_iter().zip(nums(&inv.table, "density")) {
        assert!((d - spec.spec.density(x)).abs() < 1e-7);
    }
    let mc = commands::oracle(&spec, &[1], grid, &OracleOptions { engine: Engine::Mc, config: cfg }).unwrap();
    assert_eq!(mc.table.columns, vec!["x", "n", "density", "engine", "stderr"]);
    assert!(nums(&mc.table, "stderr").iter().all(|&s| s > 0.0));
}

#[test]
fn binary_expand_and_exit_codes() {
    let out = bin()
        .args(["expand", spec_path("pareto3.spec").to_str().unwrap(), "--n", "20", "--grid", "-3:3:121"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# edgeworth "));
    assert_eq!(Table::parse(&text).unwrap().rows.len(), 121);

    let missing = bin().args(["expand", "/nonexistent/spec"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let bad = tmp("bad.spec");
    std::fs::write(&bad, "form=lognormal\n").unwrap();
    let r = bin().args(["expand", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(r.status.code(), Some(2));

    std::fs::write(&bad, "form=pareto-sym\nalpha=1.5\n").unwrap();
    let r = bin().args(["expand", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stderr).contains("alpha"));

    let r = bin().args(["expand", spec_path("pareto3.spec").to_str().unwrap(), "--grid", "1:0:3"]).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
    let r = bin().args(["oracle", spec_path("pareto3.spec").to_str().unwrap(), "--engine", "guess"]).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn quadrature_failures_map_to_exit_4() {
    let e = edgeworth_core::Error::QuadratureNonConvergence { panels: 1, error_estimate: 1.0 };
    assert_eq!(CliError::from(e).exit_code(), 4);
    assert_eq!(CliError::from(edgeworth_core::Error::MomentDiverges { order: 3, index: 3.0 }).exit_code(), 3);
}

#[test]
fn binary_compare_summary_and_rerun() {
    let csv = tmp("compare.csv");
    let r = bin()
        .args(["compare", spec_path("pareto3.spec").to_str().unwrap(), "--n", "20", "--grid", "0:2:11", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("max|corrected_err| = "));
    let first = std::fs::read_to_string(&csv).unwrap();
    let r = bin().arg("rerun").arg(&csv).output().unwrap();
    assert!(r.status.success());
    let second = String::from_utf8(r.stdout).unwrap();
    assert_eq!(Table::parse(&first).unwrap().render(), Table::parse(&second).unwrap().render());
}

#[test]
fn binary_mc_is_reproducible_byte_for_byte() {
    let run = |threads: &str| {
        let r = bin()
            .env("EDGEWORTH_THREADS", threads)
            .args(["oracle", spec_path("pareto3.spec").to_str().unwrap(), "--engine", "mc", "--n", "5"])
            .args(["--grid", "-2:2:21", "--samples", "50000", "--seed", "7"])
            .output()
            .unwrap();
        assert!(r.status.success());
        Table::parse(&String::from_utf8(r.stdout).unwrap()).unwrap().render()
    };
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_numbers_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
        let mut t = Table::new(&["v"]);
        t.rows.push(vec![Cell::Num(v)]);
        let back = Table::parse(&t.render()).unwrap();
        prop_assert_eq!(back.rows[0][0].as_f64().unwrap(), v);
    }

    #[test]
    fn expand_identity_holds(alpha in 2.3f64..7.0, n in 2u64..2000, x in -5.0f64..5.0) {
        let spec = DensitySpec::pareto(alpha).unwrap();
        let r = Evaluator::new(&spec).unwrap().eval(x, n).unwrap();
        let sum: f64 = r.edgeworth_terms.iter().map(|t| t.1).sum();
        prop_assert!((r.total - r.gaussian * (1.0 + sum) - r.correction).abs() <= 1e-15);
    }
}

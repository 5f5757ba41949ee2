use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polarmol::scan::config::{FieldConfig, GridSpec, RunConfig, Spacing, StarkConfig};
use proptest::prelude::*;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polarmol"))
}

fn run(cmd: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    fs::create_dir_all(out).unwrap();
    let cfg = out.join("run.toml");
    fs::write(&cfg, config).unwrap();
    bin()
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

/// Data rows of a CSV file: header comments and the name row removed.
fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let names = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (names, rows)
}

fn column(names: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = names.iter().position(|n| n == name).unwrap();
    rows.iter().map(|r| r[i].clone()).collect()
}

fn num(col: &[String]) -> Vec<f64> {
    col.iter().map(|x| x.parse().unwrap()).collect()
}

const STARK: &str = "[grids.beta]\nmin = 0.0\nmax = 0.3\ncount = 13\n\n[stark]\n";
const ZERO_FIELD: &str = "[grids.r]\nspacing = \"log\"\nmin = 3.0\nmax = 400.0\ncount = 30\n\n[surfaces]\nmode = \"zero_field\"\ntheta = 0.7\n";
const AC: &str = "[fields]\ndelta = 3e-6\nomega_rabi = 7.5e-7\n\n[grids.r]\nmin = 0.6\nmax = 2.5\ncount = 24\n\n[surfaces]\nmode = \"ac\"\nr_unit = \"r_c\"\n";
const TRACE: &str = "[fields]\nomega_perp = 15e-6\n\n[grids.rho]\nspacing = \"log\"\nmin = 8.0\nmax = 120.0\ncount = 25\n\n[eff2d]\nmode = \"gaussian_trace\"\nbetas = [0.0, 0.1, 0.15, 0.2, 0.3, 0.4]\n";
const BANDS: &str = "[fields]\nbeta = 0.1\ndelta = 3e-6\nomega_rabi = 7.5e-7\nomega_perp = 15e-6\n\n[grids.rho]\nmin = 24.0\nmax = 480.0\ncount = 16\n\n[eff2d]\nmode = \"z_bands\"\nkmax = 2\nn_osc = 40\n";
const INSTANTON: &str = "[grids.omega_ratio]\nspacing = \"log\"\nmin = 0.1\nmax = 2.0\ncount = 4\n\n[instanton]\n\n[[instanton.physical]]\nbeta = 0.3333333333333333\nomega_perp_hz = 150e3\n";
const TABLES: &str = "[tables]\n";
const SCALES: &str = "[fields]\nbeta = 0.2\ndelta = 3e-6\nomega_perp = 15e-6\n";

fn all_commands() -> Vec<(&'static str, &'static str)> {
    vec![
        ("stark", STARK),
        ("surfaces", ZERO_FIELD),
        ("surfaces", AC),
        ("eff2d", TRACE),
        ("eff2d", BANDS),
        ("instanton", INSTANTON),
        ("tables", TABLES),
        ("scales", SCALES),
    ]
}

fn manifest(dir: &Path, cmd: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{cmd}.manifest.json"))).unwrap())
        .unwrap()
}

fn grid_spec() -> impl Strategy<Value = GridSpec> {
    (0.01f64..10.0, 0.01f64..10.0, 1usize..50, any::<bool>()).prop_map(|(a, w, count, log)| {
        GridSpec {
            spacing: if log { Spacing::Log } else { Spacing::Linear },
            min: a,
            max: a + w,
            count,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        beta in proptest::option::of(0.0f64..1.0),
        delta in proptest::option::of(1e-8f64..1e-3),
        q in -1i32..=1,
        v2 in -1.0f64..1.0,
        grids in proptest::collection::btree_map("[a-z]{1,6}", grid_spec(), 0..4),
        jmax in 2u32..40,
    ) {
        let cfg = RunConfig {
            fields: FieldConfig { beta, delta, q, v2, ..Default::default() },
            grids: grids.into_iter().collect::<BTreeMap<_, _>>(),
            stark: Some(StarkConfig { jmax, ..Default::default() }),
            ..Default::default()
        };
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml(), text);
    }
}

#[test]
fn unknown_key_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let o = run(
        "stark",
        "[fields]\nbeta = 0.1\nbetta = 0.2\n",
        d.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("betta"));
    let o = run(
        "stark",
        "[grids.beta]\nmin = 1.0\nmax = 0.5\ncount = 3\n[stark]\n",
        d.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grids.beta"));
    let o = run(
        "surfaces",
        "[grids.r]\nmin = 1.0\nmax = 5.0\ncount = 3\n",
        d.path(),
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unconverged_basis_is_a_convergence_error() {
    let d = TempDir::new().unwrap();
    let cfg = BANDS
        .replace("n_osc = 40", "n_osc = 8")
        .replace("min = 24.0", "min = 5.0");
    let o = run("eff2d", &cfg, d.path(), &[]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn failed_points_give_partial_exit() {
    let d = TempDir::new().unwrap();
    let cfg = TRACE
        .replace("min = 8.0", "min = 0.05")
        .replace("count = 25", "count = 6");
    let o = run("eff2d", &cfg, d.path(), &[]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let m = manifest(d.path(), "eff2d");
    let fails = m["failures"].as_array().unwrap();
    assert!(!fails.is_empty());
    let (names, rows) = csv_rows(&d.path().join("eff2d.csv"));
    let status = column(&names, &rows, "status");
    let v2d = column(&names, &rows, "v2d");
    assert_eq!(
        status.iter().filter(|s| *s == "failed").count(),
        fails.len()
    );
    for (s, v) in status.iter().zip(&v2d) {
        assert_eq!(s == "failed", v == "nan");
    }
}

/// Every file of a run, with the thread-dependent `run` block dropped from manifests.
fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let p: PathBuf = e.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().to_string();
        let text = fs::read_to_string(&p).unwrap();
        let text = if name.ends_with(".manifest.json") {
            let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
            v.as_object_mut().unwrap().remove("run");
            v.to_string()
        } else {
            text
        };
        out.insert(name, text);
    }
    out
}

#[test]
fn outputs_identical_across_thread_counts() {
    for format in ["csv", "json"] {
        for (cmd, cfg) in all_commands() {
            let a = TempDir::new().unwrap();
            let b = TempDir::new().unwrap();
            let oa = run(cmd, cfg, a.path(), &["--threads", "1", "--format", format]);
            let ob = run(cmd, cfg, b.path(), &["--threads", "8", "--format", format]);
            assert_eq!(
                oa.status.code(),
                Some(0),
                "{cmd}: {}",
                String::from_utf8_lossy(&oa.stderr)
            );
            assert_eq!(ob.status.code(), Some(0));
            assert_eq!(snapshot(a.path()), snapshot(b.path()), "{cmd} {format}");
            assert_eq!(manifest(b.path(), cmd)["run"]["threads"], 8);
        }
    }
}

#[test]
fn manifest_lists_every_file() {
    for (cmd, cfg) in all_commands() {
        let d = TempDir::new().unwrap();
        let o = run(cmd, cfg, d.path(), &[]);
        assert_eq!(o.status.code(), Some(0));
        let m = manifest(d.path(), cmd);
        let hash = m["manifest_sha256"].as_str().unwrap().to_string();
        assert_eq!(hash.len(), 64);
        assert!(m["config_toml"].as_str().is_some() && m["constants"]["debye_c_m"].is_number());
        for f in m["files"].as_array().unwrap() {
            let path = d.path().join(f["path"].as_str().unwrap());
            let text = fs::read_to_string(&path).unwrap();
            assert!(text.contains(&format!("# manifest_sha256 {hash}")));
            let (names, rows) = csv_rows(&path);
            assert_eq!(rows.len() as u64, f["rows"].as_u64().unwrap(), "{path:?}");
            let cols = f["columns"].as_array().unwrap();
            assert_eq!(cols.len(), names.len());
            for c in cols {
                assert!(!c["reference"].as_str().unwrap().is_empty());
                assert!(!c["unit"].as_str().unwrap().is_empty());
            }
            assert!(rows.iter().all(|r| r.len() == names.len()));
        }
    }
}

#[test]
fn stark_table_content() {
    let d = TempDir::new().unwrap();
    assert_eq!(run("stark", STARK, d.path(), &[]).status.code(), Some(0));
    let (names, rows) = csv_rows(&d.path().join("stark.csv"));
    assert_eq!(rows.len(), 13);
    let beta = num(&column(&names, &rows, "beta"));
    let delta = num(&column(&names, &rows, "delta"));
    let e00 = num(&column(&names, &rows, "E_0_0"));
    assert_eq!((beta[0], delta[0], e00[0]), (0.0, 0.0, 0.0));
    let k = beta.iter().position(|&b| (b - 0.05).abs() < 1e-12).unwrap();
    let want = 3.0 * beta[k] * beta[k] / 20.0;
    assert!((delta[k] - want).abs() < 1e-3 * want);
    assert!(column(&names, &rows, "cutoff_ok").iter().all(|c| c == "1"));
}

#[test]
fn zero_field_surfaces_content() {
    let d = TempDir::new().unwrap();
    assert_eq!(
        run("surfaces", ZERO_FIELD, d.path(), &[]).status.code(),
        Some(0)
    );
    let (names, rows) = csv_rows(&d.path().join("surfaces.csv"));
    let labels: std::collections::BTreeSet<String> =
        column(&names, &rows, "label").into_iter().collect();
    assert_eq!(labels.len(), 16);
    assert_eq!(rows.len(), 16 * 30);
    let r = num(&column(&names, &rows, "r"));
    let e = num(&column(&names, &rows, "energy"));
    let far: Vec<f64> = r
        .iter()
        .zip(&e)
        .filter(|(r, _)| **r > 399.0)
        .map(|(_, e)| *e)
        .collect();
    assert_eq!(far.len(), 16);
    for x in far {
        let near = [0.0, 2.0, 4.0]
            .iter()
            .map(|a| (x - a).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(near < 1e-7, "{x}");
    }
}

#[test]
fn tables_content() {
    let d = TempDir::new().unwrap();
    assert_eq!(run("tables", TABLES, d.path(), &[]).status.code(), Some(0));
    let (names, rows) = csv_rows(&d.path().join("tables_2.csv"));
    assert_eq!(rows.len(), 16);
    let n0 = rows.iter().position(|r| r[0] == "0").unwrap();
    let c6 = num(&column(&names, &rows, "c6x6_analytic"));
    assert_eq!(c6[n0], -1.0);
    let (_, rows1) = csv_rows(&d.path().join("tables_1.csv"));
    assert_eq!(rows1.len(), 3 * 6);
}

#[test]
fn trace_grows_with_field() {
    let d = TempDir::new().unwrap();
    assert_eq!(run("eff2d", TRACE, d.path(), &[]).status.code(), Some(0));
    let (names, rows) = csv_rows(&d.path().join("eff2d.csv"));
    let beta = num(&column(&names, &rows, "beta"));
    let rho = num(&column(&names, &rows, "rho"));
    let v = num(&column(&names, &rows, "v2d"));
    let mut by_rho: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for i in 0..rows.len() {
        by_rho
            .entry(rho[i].to_bits())
            .or_default()
            .push((beta[i], v[i]));
    }
    assert_eq!(by_rho.len(), 25);
    for pts in by_rho.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(pts.windows(2).all(|w| w[1].1 > w[0].1), "{pts:?}");
    }
}

#[test]
fn json_output_parses() {
    let d = TempDir::new().unwrap();
    let cfg = TRACE
        .replace("min = 8.0", "min = 0.05")
        .replace("count = 25", "count = 6");
    let o = run("eff2d", &cfg, d.path(), &["--format", "json"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("eff2d.json")).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().any(|r| r[2].is_null()));
    assert_eq!(
        v["columns"].as_array().unwrap().len(),
        rows[0].as_array().unwrap().len()
    );
}

#[test]
fn sample_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        RunConfig::load(&p).unwrap_or_else(|e| panic!("{p:?}: {e}"));
        n += 1;
    }
    assert!(n >= 8);
}

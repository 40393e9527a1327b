use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use twophoton_cli::{config_from_csv, emit_plot_script, run_scan, CliError, ScanConfig};

const HARMONIC: &str = r#"
[potential]
kind = "harmonic"
omega = 1.0

[energies]
min = 0.2
max = 3.0
points = 57

[method]
kind = "closed-form"

[numerics]
points = 400
"#;

const BOX_ALL: &str = r#"
[potential]
kind = "box"
size = "1"

[geometry]
theta = 1.5707963267948966
chi2 = 1.5707963267948966

[states]
final = [[2, 2, 1]]

[energies]
min = 31.0
max = 200.0
points = 24
spacing = "log"

[method]
kind = "all"
order = 2
oracle = "sum-over-states"

[numerics]
points = 200
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twophoton"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn cfg(text: &str) -> ScanConfig {
    ScanConfig::from_toml(text).unwrap()
}

#[test]
fn harmonic_scan_shape() {
    let ds = run_scan(&cfg(HARMONIC)).unwrap();
    assert_eq!(ds.rows.len(), 57);
    let first = &ds.rows[0];
    assert!(first.m.norm_sqr() < 2e-3);
    let flagged: Vec<f64> = ds.rows.iter().filter(|r| r.flag == "resonance").map(|r| r.e1).collect();
    assert_eq!(flagged, vec![1.0]);
    let last = ds.rows.last().unwrap();
    assert!((last.m.norm_sqr() - (1.0f64 + 1.0 / 8.0).powi(2)).abs() < 1e-5);
}

#[test]
fn scans_are_deterministic_across_thread_counts() {
    let c = cfg(BOX_ALL);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_scan(&c).unwrap().to_csv_string().unwrap());
    let b = many.install(|| run_scan(&c).unwrap().to_csv_string().unwrap());
    assert_eq!(a, b);
}

#[test]
fn method_all_columns_and_oracle_agreement() {
    let ds = run_scan(&cfg(BOX_ALL)).unwrap();
    let cols = ds.columns();
    assert_eq!(cols, ["E1", "E2", "final", "ReM", "ImM", "absM2", "absM2_n1", "absM2_n2", "oracle_ReM", "oracle_ImM", "oracle_absM2", "flag"]);
    for r in &ds.rows {
        assert!(r.oracle.is_some());
        assert!(r.orders[0] == r.orders[1], "box partials beyond order 1 are constant");
    }
}

#[test]
fn header_round_trips_the_configuration() {
    for text in [HARMONIC, BOX_ALL] {
        let c = cfg(text);
        let csv = run_scan(&c).unwrap().to_csv_string().unwrap();
        assert!(csv.starts_with("# twophoton scan; damping: off"));
        assert_eq!(config_from_csv(&csv).unwrap(), c);
    }
}

#[test]
fn validation_messages_name_the_field() {
    let bad = HARMONIC.replace("min = 0.2", "min = -1.0");
    match ScanConfig::from_toml(&bad) {
        Err(CliError::Validation(m)) => assert!(m.contains("energies.min"), "{m}"),
        other => panic!("{other:?}"),
    }
    let closed_box = BOX_ALL.replace("kind = \"all\"", "kind = \"closed-form\"");
    assert!(matches!(ScanConfig::from_toml(&closed_box), Err(CliError::Validation(_))));
    let unknown = format!("{HARMONIC}\n[extra]\nx = 1\n");
    assert!(ScanConfig::from_toml(&unknown).is_err());
}

#[test]
fn plot_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    fs::write(&h, run_scan(&cfg(HARMONIC)).unwrap().to_csv_string().unwrap()).unwrap();
    let script = fs::read_to_string(emit_plot_script(&h, None).unwrap()).unwrap();
    assert!(script.contains("set arrow from 1e0"));
    assert_eq!(script.matches(" with ").count(), 1);

    let b = dir.path().join("b.csv");
    fs::write(&b, run_scan(&cfg(BOX_ALL)).unwrap().to_csv_string().unwrap()).unwrap();
    let script = fs::read_to_string(emit_plot_script(&b, Some(&dir.path().join("b.gp"))).unwrap()).unwrap();
    assert_eq!(script.matches(" with ").count(), 4);
    assert!(script.contains("title 'oracle'"));

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "# nothing\nE1,E2,final,ReM,ImM,absM2,flag\n").unwrap();
    assert!(matches!(emit_plot_script(&empty, None), Err(CliError::Validation(_))));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", HARMONIC);
    let out = dir.path().join("out.csv");
    let st = bin().args(["scan", good.to_str().unwrap(), "-o", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));

    let bad = write(dir.path(), "bad.toml", &HARMONIC.replace("points = 57", "points = 1"));
    let st = bin().args(["scan", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stderr).contains("energies.points"));

    assert_eq!(bin().args(["golden", "constant_box"]).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(["golden", "no-such-corpus"]).status().unwrap().code(), Some(1));

    let corpus = dir.path().join("mutated");
    fs::create_dir(&corpus).unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus/morse_appendix");
    for e in fs::read_dir(src).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), corpus.join(e.file_name())).unwrap();
    }
    let o1 = corpus.join("O1.txt");
    let t = fs::read_to_string(&o1).unwrap();
    let flipped = match t.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{t}"),
    };
    fs::write(&o1, flipped).unwrap();
    let run = bin().args(["golden", corpus.to_str().unwrap()]).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stdout).contains("O1: FAIL"));

    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(bin().args(["plot", empty.to_str().unwrap()]).status().unwrap().code(), Some(1));
    assert_eq!(bin().args(["plot", out.to_str().unwrap()]).status().unwrap().code(), Some(0));
}

#[test]
fn rerunning_the_echoed_configuration_reproduces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_scan(&cfg(BOX_ALL)).unwrap().to_csv_string().unwrap();
    let echoed = config_from_csv(&first).unwrap();
    let again = run_scan(&echoed).unwrap().to_csv_string().unwrap();
    assert_eq!(first, again);
    let p = write(dir.path(), "again.csv", &again);
    assert!(p.exists());
}

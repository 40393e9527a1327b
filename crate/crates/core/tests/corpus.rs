use std::fs;
use std::path::Path;

use twophoton::corpus::{load_dir, resolve, run_golden};

fn shipped(id: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(id)
}

fn copy_corpus(id: &str, to: &Path) {
    for entry in fs::read_dir(shipped(id)).unwrap() {
        let e = entry.unwrap();
        fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

#[test]
fn shipped_morse_corpus_passes() {
    let r = run_golden(&load_dir(&shipped("morse_appendix")).unwrap()).unwrap();
    assert_eq!(r.passed(), 6);
}

#[test]
fn constant_box_corpus_passes() {
    assert!(run_golden(&resolve("constant_box").unwrap()).unwrap().all_pass());
}

#[test]
fn one_flipped_sign_fails_one_order() {
    let dir = tempfile::tempdir().unwrap();
    copy_corpus("morse_appendix", dir.path());
    let o3 = dir.path().join("O3.txt");
    let text = fs::read_to_string(&o3).unwrap();
    let flipped = match text.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None => format!("-{text}"),
    };
    fs::write(&o3, flipped).unwrap();
    let r = run_golden(&load_dir(dir.path()).unwrap()).unwrap();
    let failing: Vec<usize> = r.orders.iter().filter(|o| !o.pass).map(|o| o.order).collect();
    assert_eq!(failing, vec![3]);
}

#[test]
fn missing_corpus_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(resolve(dir.path().join("nope").to_str().unwrap()).is_err());
    copy_corpus("constant_box", dir.path());
    fs::remove_file(dir.path().join("O4.txt")).unwrap();
    assert!(load_dir(dir.path()).is_err());
}

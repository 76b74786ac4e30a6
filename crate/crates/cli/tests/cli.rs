use std::path::PathBuf;
use std::process::{Command, Output};

fn contcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contcalc"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("CONTCALC_MAX_CELLS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Regenerate with `CONTCALC_BLESS=1 cargo test -p contcalc --test cli`.
fn check_golden(name: &str, args: &[&str]) {
    let first = contcalc(args);
    let second = contcalc(args);
    assert_eq!(first.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout, "{args:?} is not byte-stable");
    let path = golden(name);
    if std::env::var_os("CONTCALC_BLESS").is_some() {
        std::fs::write(&path, &first.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(stdout(&first), expected, "{args:?} differs from {name}");
}

#[test]
fn golden_leibniz() {
    check_golden("check_leibniz.json", &["check", "leibniz", "--json"]);
}

#[test]
fn golden_chain_counterexample() {
    check_golden("check_chain_bz2.json", &["check", "chain", "--counterexample", "bz2", "--json"]);
}

#[test]
fn golden_mu_list() {
    check_golden("mu_list_4.json", &["mu", "--signature", "list", "--depth", "4", "--json"]);
}

#[test]
fn signature_files_match_builtins() {
    let a = contcalc(&["mu", "--signature", "list", "--depth", "3", "--json"]);
    let b = contcalc(&["mu", "--signature", "../../signatures/list.cont", "--depth", "3", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let t = contcalc(&["mu", "--signature", "../../signatures/tree.cont", "--depth", "4", "--check", "rule"]);
    assert!(stdout(&t).contains("rule_hole_shapes: 105"));
}

#[test]
fn zipper_prints_layers() {
    let o = contcalc(&["zipper", "--signature", "list2", "--tree", "a[b[a[nil]]]", "--path", "0.0.@0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("layer 0: a[_]"));
    assert!(text.contains("layer 1: b[_]"));
    assert!(text.contains("focus: a[nil]"));
    let root = contcalc(&["zipper", "--tree", "cons[nil]", "--path", "@0", "--json"]);
    assert!(stdout(&root).contains("\"layers\": []"));
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["zipper", "--tree", "cons[nil]", "--path", "0.@0"][..],
        &["zipper", "--tree", "cons[nil, nil]", "--path", "@0"],
        &["mu", "--signature", "nope"],
        &["check", "nope"],
        &["derive", "list", "--index", "y"],
        &["counterexample", "nope"],
    ] {
        assert_eq!(contcalc(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn file_pairs_and_counterexamples() {
    let dir = tempdir();
    let f = dir.join("f.cont");
    let g = dir.join("g.cont");
    std::fs::write(&f, "container f (x) over {x}\nshape s { x: 1; }\n").unwrap();
    std::fs::write(&g, "container g (x) over {x}\nshape t { x: BZ2; }\n").unwrap();
    let o = contcalc(&["check", "chain", "--lhs", f.to_str().unwrap(), "--rhs", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = contcalc(&["counterexample", "twisted"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rule_strong: false"));
    let bag = contcalc(&["check", "bag", "--max-size", "3", "--json"]);
    assert!(stdout(&bag).contains("\"bag3_derivative_orders\": [\n      1,\n      1,\n      2\n    ]"));
    let twisted_mu = contcalc(&["check", "mu", "--signature", "twisted", "--depth", "2"]);
    assert_eq!(twisted_mu.status.code(), Some(0));
}

#[test]
fn derive_writes_a_signature() {
    let dir = tempdir();
    let out = dir.join("d.cont");
    let o = contcalc(&["derive", "list", "--out", out.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("{ x: 0; rec: 1; }"));
    let again = contcalc(&["derive", out.to_str().unwrap(), "--index", "rec"]);
    assert_eq!(again.status.code(), Some(0));
    assert!(stdout(&again).contains("shapes: 1"));
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("contcalc-cli-{}-{:?}", std::process::id(), std::thread::current().id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

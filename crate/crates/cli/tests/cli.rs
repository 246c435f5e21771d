use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultraconv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn checks_a_lawful_space() {
    let o = run(&["check", &fixture("sierpinski.toml"), "S"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for law in ["typing", "functoriality", "associativity", "principal-collapse"] {
        assert!(out.contains(&format!("PASS {law} (")), "{out}");
    }
    assert!(out.ends_with("result: pass\n"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["check".to_string(), fixture("sierpinski.toml"), "S".into()],
        vec!["--format".into(), "structured".into(), "groth".into(), "roundtrip".into(), fixture("sierpinski.toml"), "S".into()],
        vec!["--seed".into(), "7".into(), "suite".into(), "--cases".into(), "4".into()],
        vec!["lazy".into(), "run".into(), fixture("queries.q")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    }
}

#[test]
fn dangling_reference_is_a_resolve_error() {
    let o = run(&["validate", &fixture("dangling.toml")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown category `Missing`"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn unmarked_mutation_is_a_validation_error() {
    let o = run(&["validate", &fixture("unmarked.toml")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("`B` fails typing") && err.contains("comp(f:u->v@1:0, id_u:u->u@1:0)"), "{err}");
}

#[test]
fn marked_invalid_space_fails_its_check() {
    let o = run(&["check", &fixture("broken.toml"), "B"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL typing") && out.contains("at comp(f:u->v@1:0, id_u:u->u@1:0)"), "{out}");
    // other commands refuse it
    let o = run(&["opens", &fixture("broken.toml"), "B"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn associativity_witness_names_the_table_entries() {
    let o = run(&["check", &fixture("idempotent.toml"), "Y"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let at = out.find("FAIL associativity").expect("associativity fails");
    assert!(out[at..].contains("at comp(e:b->b@1:0, e:b->b@1:0)"), "{out}");
    assert_eq!(run(&["check", &fixture("idempotent.toml"), "X"]).status.code(), Some(0));
}

#[test]
fn groth_roundtrip_over_sierpinski() {
    let o = run(&["groth", "roundtrip", &fixture("sierpinski.toml"), "S"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("étale maps: 11") && out.contains("set-valued maps: 18"), "{out}");
}

#[test]
fn pretopos_constructions() {
    let f = fixture("sierpinski.toml");
    for args in [
        vec!["pretopos", "terminal", &f, "S"],
        vec!["pretopos", "product", &f, "F", "G"],
        vec!["pretopos", "equalizer", &f, "id", "swap"],
        vec!["--bound", "4", "pretopos", "coproduct", &f, "F", "G"],
        vec!["pretopos", "image", &f, "toOne"],
        vec!["pretopos", "quotient", &f, "all"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}{}", stdout(&o), stderr(&o));
    }
    // the coproduct needs fibres of size 3
    let o = run(&["pretopos", "coproduct", &f, "F", "G"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds the bound 2"));
}

#[test]
fn etale_commands() {
    let f = fixture("sierpinski.toml");
    let o = run(&["etale", "lift", &f, "E", "u.1", "f: u -> v"]);
    assert!(stdout(&o).contains("lift: f:u.1->v.0@1:0"), "{}", stdout(&o));
    let o = run(&["etale", "image", &f, "E", "u.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("{u.1} is not open"));
    let o = run(&["etale", "subobjects", &f, "E"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("opens: (5)"));
    assert_eq!(run(&["etale", "invert", &f, "Id"]).status.code(), Some(0));
    assert_eq!(run(&["etale", "invert", &f, "E"]).status.code(), Some(1));
    assert_eq!(run(&["etale", "pullback", &f, "E", "atV"]).status.code(), Some(0));
}

#[test]
fn lazy_run_prints_the_trace() {
    let o = run(&["lazy", "run", &fixture("queries.q")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("prefix=000;period=1;pattern=1 YES"), "{out}");
    assert!(out.contains("prefix=0001;period=1;pattern=0 NO"), "{out}");
}

#[test]
fn structured_format_is_json() {
    let o = run(&["--format", "structured", "--timing", "istop", &fixture("sierpinski.toml"), "T"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json");
    assert_eq!(v["command"], "istop T");
    assert_eq!(v["verdicts"][0]["passed"], true);
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn uf_commands() {
    let o = run(&["uf", "tensor", "2:1", "3:2"]);
    assert!(stdout(&o).contains("index: 6:5"));
    assert_eq!(run(&["uf", "qri", "0,0,1", "3:2"]).status.code(), Some(0));
    assert_eq!(run(&["uf", "push", "0,1", "3:2"]).status.code(), Some(2));
}

#[test]
fn documents_survive_a_rewrite() {
    let dir = tempfile::tempdir().unwrap();
    let doc = ultraconv_cli::doc::Document::load(fixture("sierpinski.toml").as_ref()).unwrap();
    let copy = dir.path().join("copy.toml");
    std::fs::write(&copy, doc.to_toml()).unwrap();
    let a = run(&["check", &fixture("sierpinski.toml"), "S"]);
    let b = run(&["check", copy.to_str().unwrap(), "S"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&run(&["validate", copy.to_str().unwrap()])).contains("declarations: 16"));
}

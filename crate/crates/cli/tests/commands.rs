use std::path::{Path, PathBuf};
use std::process::Command;

use topicforge_core::LabeledMatrix;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn tf(ws: &Path, args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_topicforge"))
        .env_remove("TOPICFORGE_SERVER")
        .env("TOPICFORGE_WORKSPACE", ws)
        .args(args)
        .output()
        .unwrap();
    Out {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(ws: &Path, args: &[&str]) -> String {
    let out = tf(ws, args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_reports_shape_and_top_terms() {
    let ws = tempfile::tempdir().unwrap();
    let out = ok(ws.path(), &["ingest", path(&fixture("animals")), "--min-count", "1"]);
    assert!(out.starts_with("animals: 5 x 4\n"), "{out}");
    assert!(out.contains("venom       95"), "{out}");
    assert!(ws.path().join("corpora/animals.json").is_file());
}

#[test]
fn ingest_errors_map_to_exit_codes() {
    let ws = tempfile::tempdir().unwrap();
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(tf(ws.path(), &["ingest", path(empty.path())]).code, 2);
    assert_eq!(tf(ws.path(), &["ingest", "/no/such/dir"]).code, 2);
    let tiny = tf(ws.path(), &["ingest", path(&fixture("three")), "--min-count", "4"]);
    assert_eq!(tiny.code, 3, "{}", tiny.stderr);
    assert!(tiny.stderr.contains("no term survives"));
    assert_eq!(tf(ws.path(), &["ingest", path(&fixture("three")), "--name", "bad name"]).code, 5);
    assert_eq!(tf(ws.path(), &["ingest", path(&fixture("movies.csv")), "--no-stem"]).code, 5);
}

#[test]
fn queries_on_the_animal_fixture() {
    let ws = tempfile::tempdir().unwrap();
    ok(ws.path(), &["ingest", path(&fixture("animals")), "--min-count", "1", "--no-stem", "--name", "animals"]);

    let out = ok(ws.path(), &["query", "animals", "--docs", "Jellyfish,Snail"]);
    let values: Vec<(&str, &str)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split_whitespace();
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    for (term, want) in [("venom", "33"), ("death", "9"), ("danger", "6"), ("survive", "2"), ("madagascar", "2")] {
        assert!(values.contains(&(term, want)), "{term} in {out}");
    }

    assert_eq!(ok(ws.path(), &["query", "animals", "--exclusive"]), "madagascar → Snail\n");
    let json = ok(ws.path(), &["--json", "query", "animals", "--terms", "madagascar"]);
    // documents load in file-name order
    assert!(json.starts_with(r#"{"labels":["Cobra","Jellyfish","Octopus","Snail"],"values":[0.0,0.0,0.0,2.0]"#), "{json}");
    assert!(ok(ws.path(), &["query", "animals", "--sparsity"]).starts_with("sparsity: 0.35"));
    let diff = ok(ws.path(), &["query", "animals", "--diff", "Cobra,Jellyfish"]);
    assert!(diff.contains("venom       12"), "{diff}");

    assert_eq!(tf(ws.path(), &["query", "animals", "--docs", "Nonexistent"]).code, 4);
    assert_eq!(tf(ws.path(), &["query", "nothing", "--docs", "Snail"]).code, 4);
    assert_eq!(tf(ws.path(), &["query", "animals", "--diff", "Snail"]).code, 5);
    assert_eq!(tf(ws.path(), &["query", "animals", "--docs", ","]).code, 5);
    assert_eq!(tf(ws.path(), &["query", "animals", "--docs", "Snail", "--sparsity"]).code, 5);
}

#[test]
fn factorize_and_topics_on_movies() {
    let ws = tempfile::tempdir().unwrap();
    ok(ws.path(), &["ingest", path(&fixture("movies.csv"))]);
    let out = ok(ws.path(), &["factorize", "movies", "--rank", "2", "--restarts", "20", "--seed", "1"]);
    let residual: f64 = out.split("residual ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(residual <= 1.59, "{out}");
    assert!(out.starts_with("movies-r2: "));

    let json = ok(ws.path(), &["--json", "topics", "movies-r2", "--top-k", "2"]);
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mut groups: Vec<Vec<String>> = report["topics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let mut g: Vec<String> = t["top_terms"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| p[0].as_str().unwrap().to_string())
                .collect();
            g.sort();
            g
        })
        .collect();
    groups.sort();
    assert_eq!(groups, vec![vec!["Alien", "Jaws"], vec!["Animal House", "Life of Brian"]]);

    let csv = ok(ws.path(), &["topics", "movies-r2", "--rank-one", "1"]);
    let m = LabeledMatrix::read_csv(csv.as_bytes()).unwrap();
    assert_eq!(m.shape(), (5, 4));
    assert!(csv.starts_with(",Cindy,Dora,Alice,Becky\n"));

    let text = ok(ws.path(), &["topics", "movies-r2", "--name", "1=Horror"]);
    assert!(text.starts_with("Horror"), "{text}");
    // the name is persisted
    assert!(ok(ws.path(), &["topics", "movies-r2"]).starts_with("Horror"));
    assert_eq!(tf(ws.path(), &["topics", "movies-r2", "--name", "2=Horror"]).code, 4);
    assert_eq!(tf(ws.path(), &["topics", "movies-r2", "--rank-one", "3"]).code, 4);
    assert_eq!(tf(ws.path(), &["topics", "movies-r2", "--name", "Horror"]).code, 5);
    assert_eq!(tf(ws.path(), &["topics", "movies-r2", "--top-k", "0"]).code, 5);
    assert_eq!(tf(ws.path(), &["topics", "nothing"]).code, 4);
    assert_eq!(tf(ws.path(), &["factorize", "movies", "--rank", "99"]).code, 5);
    assert_eq!(tf(ws.path(), &["factorize", "movies", "--rank", "0"]).code, 5);
    assert_eq!(tf(ws.path(), &["factorize", "movies"]).code, 5);
}

#[test]
fn factorize_is_deterministic() {
    let ws = tempfile::tempdir().unwrap();
    ok(ws.path(), &["ingest", path(&fixture("movies.csv"))]);
    let args = ["factorize", "movies", "--rank", "3", "--restarts", "8", "--seed", "5", "--name", "run"];
    ok(ws.path(), &args);
    let first = std::fs::read(ws.path().join("factorizations/run.json")).unwrap();
    ok(ws.path(), &args);
    let second = std::fs::read(ws.path().join("factorizations/run.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn export_round_trips_through_ingest() {
    let ws = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    ok(ws.path(), &["ingest", path(&fixture("three")), "--min-count", "1", "--name", "three"]);
    let csv = out.path().join("three.csv");
    let json = out.path().join("three.json");
    ok(ws.path(), &["export", "matrix", "three", "-o", path(&csv)]);
    ok(ws.path(), &["export", "matrix", "three", "--format", "json", "-o", path(&json)]);
    ok(ws.path(), &["ingest", path(&csv), "--name", "from-csv"]);
    ok(ws.path(), &["ingest", path(&json), "--name", "from-json"]);

    let load = |name: &str| {
        let text = ok(ws.path(), &["--json", "export", "matrix", name]);
        serde_json::from_str::<LabeledMatrix>(&text).unwrap()
    };
    let original = load("three");
    assert!(original.label_aligned_equal(&load("from-csv"), 0.0));
    assert!(original.label_aligned_equal(&load("from-json"), 0.0));
}

#[test]
fn factorization_exports() {
    let ws = tempfile::tempdir().unwrap();
    ok(ws.path(), &["ingest", path(&fixture("movies.csv"))]);
    ok(ws.path(), &["factorize", "movies", "--rank", "2", "--max-iters", "50", "--tol", "0"]);
    let residuals = ok(ws.path(), &["export", "residuals", "movies-r2"]);
    assert!(residuals.starts_with("iteration,residual\n"));
    assert_eq!(residuals.lines().count(), 51);
    let w = ok(ws.path(), &["export", "w", "movies-r2"]);
    assert!(w.starts_with(",topic-1,topic-2\n"));
    let h = ok(ws.path(), &["export", "h", "movies-r2", "--format", "json"]);
    assert!(h.starts_with(r#"{"rows":["topic-1","topic-2"],"cols":["Cindy""#));
    let full = ok(ws.path(), &["export", "factorization", "movies-r2"]);
    assert!(full.starts_with(r#"{"corpus":"movies""#));
    assert_eq!(tf(ws.path(), &["export", "factorization", "movies-r2", "--format", "csv"]).code, 5);
}

#[test]
fn usage_errors_exit_5_and_help_exits_0() {
    let ws = tempfile::tempdir().unwrap();
    assert_eq!(tf(ws.path(), &["frobnicate"]).code, 5);
    assert_eq!(tf(ws.path(), &["factorize", "x", "--rank", "two"]).code, 5);
    let help = tf(ws.path(), &["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("ingest"));
}

#[test]
fn unreachable_server_is_an_io_error() {
    let ws = tempfile::tempdir().unwrap();
    let out = tf(ws.path(), &["--server", "http://127.0.0.1:9", "query", "c1", "--sparsity"]);
    assert_eq!(out.code, 2, "{}", out.stderr);
}

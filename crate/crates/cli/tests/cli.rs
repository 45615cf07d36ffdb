use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn proxima(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxima"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_docs(dir: &Path, docs: &[(&str, &str)]) {
    fs::create_dir_all(dir).unwrap();
    for (name, body) in docs {
        fs::write(dir.join(format!("{name}.txt")), body).unwrap();
    }
}

const SPEC: &str = "num_categories = 3\ndocs_per_category = 20\ndoc_length = 60\n";

fn synth(tmp: &TempDir, seed: &str) -> (std::path::PathBuf, std::path::PathBuf) {
    let spec = tmp.path().join("spec.toml");
    fs::write(&spec, SPEC).unwrap();
    let corpus = tmp.path().join(format!("synth-{seed}.corpus"));
    let cats = tmp.path().join(format!("synth-{seed}.cats"));
    let o = proxima(&[
        "gen-synth",
        p(&spec),
        "-o",
        p(&corpus),
        "--categories",
        p(&cats),
        "--seed",
        seed,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    (corpus, cats)
}

#[test]
fn index_is_deterministic_and_reports_counts() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(
        &input,
        &[
            ("one", "الكرة في الملعب"),
            ("two", "alpha beta gamma"),
            ("three", "السوق والأسهم"),
        ],
    );
    fs::write(input.join("ignored.md"), "not indexed").unwrap();
    let first = tmp.path().join("a.corpus");
    let second = tmp.path().join("b.corpus");
    let o = proxima(&["index", p(&input), "-o", p(&first)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).starts_with("indexed 3 documents"),
        "{}",
        stdout(&o)
    );
    assert!(proxima(&["index", p(&input), "-o", p(&second)])
        .status
        .success());
    let a = fs::read(&first).unwrap();
    assert_eq!(a, fs::read(&second).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("two\t-\talpha beta gamma\n"));
}

#[test]
fn index_reads_a_labeled_manifest() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(&input, &[("s1", "match goal"), ("e1", "market bourse")]);
    fs::write(
        input.join("manifest.tsv"),
        "s1.txt\tsport\ne1.txt\teconomy\nmissing.txt\tsport\n",
    )
    .unwrap();
    let out = tmp.path().join("c.corpus");
    let o = proxima(&["index", p(&input), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning: skipping"), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("e1\teconomy\tmarket bourse"));
    assert!(text.contains("s1\tsport\tmatch goal"));
}

#[test]
fn index_of_empty_dir_fails() {
    let tmp = TempDir::new().unwrap();
    let o = proxima(&[
        "index",
        p(tmp.path()),
        "-o",
        p(&tmp.path().join("x.corpus")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no documents"), "{}", stderr(&o));
}

#[test]
fn query_ranks_with_hand_computed_similarity() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(&input, &[("doc", "alpha beta gamma")]);
    let corpus = tmp.path().join("c.corpus");
    assert!(proxima(&["index", p(&input), "-o", p(&corpus)])
        .status
        .success());

    // k = 5: relevance 0.8, 1, 0.8 over three positions
    let o = proxima(&["query", p(&corpus), "beta"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\tdoc\t0.866667\n");

    // k = 2: 0.5, 1, 0.5
    let o = proxima(&["query", p(&corpus), "beta", "--k", "2"]);
    assert_eq!(stdout(&o), "1\tdoc\t0.666667\n");

    // NEAR/3 is the min of both terms under width 3: (1/3 + 2/3 + 1/3) / 3
    let o = proxima(&["query", p(&corpus), "alpha NEAR/3 gamma"]);
    assert_eq!(stdout(&o), "1\tdoc\t0.444444\n");

    let o = proxima(&["query", p(&corpus), "delta"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn query_ties_break_by_doc_id() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(&input, &[("b", "x y"), ("a", "y x"), ("c", "y")]);
    let corpus = tmp.path().join("c.corpus");
    assert!(proxima(&["index", p(&input), "-o", p(&corpus)])
        .status
        .success());
    let o = proxima(&["query", p(&corpus), "y"]);
    assert_eq!(
        stdout(&o),
        "1\tc\t1.000000\n2\ta\t0.900000\n3\tb\t0.900000\n"
    );
}

#[test]
fn query_file_prints_each_rendered_query() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(&input, &[("doc", "alpha beta gamma")]);
    let corpus = tmp.path().join("c.corpus");
    assert!(proxima(&["index", p(&input), "-o", p(&corpus)])
        .status
        .success());
    let queries = tmp.path().join("q.txt");
    fs::write(&queries, "beta\n\nalpha or gamma and beta\n").unwrap();
    let o = proxima(&["query", p(&corpus), "--query-file", p(&queries)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# beta\n1\tdoc\t"), "{out}");
    assert!(out.contains("# (alpha OR (gamma AND beta))\n"), "{out}");
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(&input, &[("doc", "alpha beta")]);
    let corpus = tmp.path().join("c.corpus");
    assert!(proxima(&["index", p(&input), "-o", p(&corpus)])
        .status
        .success());

    for bad in [
        "alpha AND",
        "(alpha",
        "alpha NEAR beta",
        "alpha NEAR/0 beta",
        "OR",
    ] {
        let o = proxima(&["query", p(&corpus), bad]);
        assert_eq!(o.status.code(), Some(2), "query {bad:?}");
        assert!(stderr(&o).contains("error"), "{}", stderr(&o));
    }
    assert_eq!(
        proxima(&["query", p(&corpus), "alpha", "--k", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        proxima(&["query", p(&corpus), "alpha", "--mode", "bm25"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(proxima(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(proxima(&["classify", p(&corpus)]).status.code(), Some(2));
}

#[test]
fn missing_files_exit_1() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.corpus");
    assert_eq!(
        proxima(&["query", p(&missing), "alpha"]).status.code(),
        Some(1)
    );
    let spec = tmp.path().join("nope.toml");
    let o = proxima(&["gen-synth", p(&spec), "-o", p(&missing)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_synth_is_seed_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (c1, k1) = synth(&tmp, "42");
    let spec = tmp.path().join("spec.toml");
    let c2 = tmp.path().join("again.corpus");
    let o = proxima(&["gen-synth", p(&spec), "-o", p(&c2), "--seed", "42"]);
    assert!(o.status.success());
    let k2 = tmp.path().join("again.categories");
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    assert_eq!(fs::read(&k1).unwrap(), fs::read(&k2).unwrap());
    let cats = fs::read_to_string(&k1).unwrap();
    assert_eq!(cats.matches("category:").count(), 3);
    let (c3, _) = synth(&tmp, "7");
    assert_ne!(fs::read(&c1).unwrap(), fs::read(&c3).unwrap());
}

#[test]
fn invalid_spec_exits_2() {
    let tmp = TempDir::new().unwrap();
    let spec = tmp.path().join("bad.toml");
    let out = tmp.path().join("x.corpus");
    for body in [
        "doc_length = 0",
        "injection_rate = 2.0",
        "colour = \"red\"",
        "num_categories = [",
    ] {
        fs::write(&spec, body).unwrap();
        let o = proxima(&["gen-synth", p(&spec), "-o", p(&out)]);
        assert_eq!(o.status.code(), Some(2), "{body}: {}", stderr(&o));
    }
}

#[test]
fn classify_and_eval_on_synthetic_corpus() {
    let tmp = TempDir::new().unwrap();
    let (corpus, cats) = synth(&tmp, "42");
    let o = proxima(&["classify", p(&corpus), "--categories", p(&cats)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 60);
    assert!(lines.iter().all(|l| l.split('\t').count() == 3));

    for mode in ["standard", "rbf"] {
        let args = [
            "eval",
            p(&corpus),
            "--categories",
            p(&cats),
            "--mode",
            mode,
            "--format",
            "records",
        ];
        let one = proxima(&[&args[..], &["--workers", "1"]].concat());
        let four = proxima(&[&args[..], &["--workers", "4"]].concat());
        assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
        assert_eq!(stdout(&one), stdout(&four));
        let records = stdout(&one);
        assert_eq!(records.lines().count(), 3, "{records}");
        assert!(records.lines().all(|l| l.split('\t').count() == 4));
    }
    let o = proxima(&["eval", p(&corpus), "--categories", p(&cats)]);
    assert!(stdout(&o).contains("macro"), "{}", stdout(&o));
}

#[test]
fn eval_requires_labels_and_known_categories() {
    let tmp = TempDir::new().unwrap();
    let (_, cats) = synth(&tmp, "42");
    let input = tmp.path().join("docs");
    write_docs(&input, &[("doc", "alpha beta")]);
    let unlabeled = tmp.path().join("u.corpus");
    assert!(proxima(&["index", p(&input), "-o", p(&unlabeled)])
        .status
        .success());
    let o = proxima(&["eval", p(&unlabeled), "--categories", p(&cats)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("corpus has no labels"),
        "{}",
        stderr(&o)
    );

    let stray = tmp.path().join("s.corpus");
    fs::write(&stray, "#proxima-corpus v1\nd7\tweather\talpha\n").unwrap();
    let o = proxima(&["eval", p(&stray), "--categories", p(&cats)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d7"), "{}", stderr(&o));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("docs");
    write_docs(&input, &[("doc", "alpha beta gamma")]);
    let corpus = tmp.path().join("c.corpus");
    assert!(proxima(&["index", p(&input), "-o", p(&corpus)])
        .status
        .success());
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# narrow\nk = 2\n").unwrap();
    let o = proxima(&["--config", p(&cfg), "query", p(&corpus), "beta"]);
    assert_eq!(stdout(&o), "1\tdoc\t0.666667\n");
    let o = proxima(&["--config", p(&cfg), "query", p(&corpus), "beta", "--k", "5"]);
    assert_eq!(stdout(&o), "1\tdoc\t0.866667\n");
    fs::write(&cfg, "width = 3\n").unwrap();
    assert_eq!(
        proxima(&["--config", p(&cfg), "query", p(&corpus), "beta"])
            .status
            .code(),
        Some(2)
    );
}

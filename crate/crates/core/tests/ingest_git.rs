use std::fs;
use std::path::Path;
use std::process::Command;

use editmine::ingest::{mine, walk, GitRepo, IngestError, MineConfig, Parsers, RevisionSource};

fn git(repo: &Path, args: &[&str]) {
    let status = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args([
            "-c",
            "user.name=test",
            "-c",
            "user.email=test@example.com",
            "-c",
            "commit.gpgsign=false",
        ])
        .args(args)
        .output()
        .expect("git runs");
    assert!(
        status.status.success(),
        "git {args:?}: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn init(repo: &Path) {
    fs::create_dir_all(repo).unwrap();
    git(repo, &["init", "-q"]);
}

fn commit(repo: &Path, message: &str) {
    git(repo, &["add", "-A"]);
    git(repo, &["commit", "-q", "--allow-empty", "-m", message]);
}

fn call(receiver: &str, arg: &str) -> String {
    format!(r#"(unit (expr (call {receiver} (name "equals") {arg})))"#)
}

#[test]
fn one_modified_file_is_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("toy");
    init(&repo);
    let before = call(r#"(id "s")"#, r#"(lit:string "x")"#);
    let after = call(r#"(lit:string "x")"#, r#"(id "s")"#);
    fs::write(repo.join("Main.ast"), &before).unwrap();
    commit(&repo, "first");
    fs::write(repo.join("Main.ast"), &after).unwrap();
    commit(&repo, "second");

    let source = GitRepo::new(&repo);
    assert_eq!(source.project(), "toy");
    let records = walk(&source, &Parsers::default()).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].path, "Main.ast");
    assert_eq!(records[0].project, "toy");
    assert_eq!(
        records[0].before.to_string(),
        editmine::ast::parse_tree(&before).unwrap().to_string()
    );
    assert_eq!(
        records[0].after.to_string(),
        editmine::ast::parse_tree(&after).unwrap().to_string()
    );

    let sources: Vec<Box<dyn RevisionSource>> = vec![Box::new(source)];
    let clusters = mine(&sources, &Parsers::default(), &MineConfig::default()).unwrap();
    let edits: usize = clusters.iter().map(|c| c.len()).sum();
    assert_eq!(edits, 1);
    assert_eq!(clusters[0].members()[0].provenance.path, "Main.ast");
}

#[test]
fn added_files_are_not_changes() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("toy");
    init(&repo);
    fs::write(repo.join("A.ast"), "(unit (x))").unwrap();
    commit(&repo, "first");
    fs::write(repo.join("B.ast"), "(unit (y))").unwrap();
    fs::write(repo.join("notes.txt"), "unrelated").unwrap();
    commit(&repo, "second");
    let records = walk(&GitRepo::new(&repo), &Parsers::default()).unwrap();
    assert!(records.is_empty());
}

#[test]
fn ten_commits_with_seven_modifications() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("history");
    init(&repo);
    let v = |n: u32| format!(r#"(unit (expr (call (id "v") (name "m{n}"))))"#);
    let w = |p: &str| repo.join(p);

    fs::write(w("a.ast"), v(0)).unwrap();
    fs::write(w("b.ast"), v(0)).unwrap();
    commit(&repo, "c0: add a, b");
    fs::write(w("a.ast"), v(1)).unwrap();
    commit(&repo, "c1: modify a");
    fs::write(w("a.ast"), v(2)).unwrap();
    fs::write(w("b.ast"), v(2)).unwrap();
    commit(&repo, "c2: modify a, b");
    fs::write(w("c.ast"), v(0)).unwrap();
    commit(&repo, "c3: add c");
    fs::write(w("c.ast"), v(3)).unwrap();
    commit(&repo, "c4: modify c");
    git(&repo, &["mv", "b.ast", "d.ast"]);
    commit(&repo, "c5: rename b to d");
    fs::write(w("d.ast"), v(5)).unwrap();
    commit(&repo, "c6: modify d");
    fs::write(w("readme.txt"), "one").unwrap();
    commit(&repo, "c7: text only");
    fs::write(w("a.ast"), v(7)).unwrap();
    commit(&repo, "c8: modify a");
    fs::write(w("a.ast"), v(8)).unwrap();
    fs::remove_file(w("c.ast")).unwrap();
    commit(&repo, "c9: modify a, delete c");

    let records = walk(&GitRepo::new(&repo), &Parsers::default()).unwrap();
    let paths: Vec<&str> = records.iter().map(|r| r.path.as_str()).collect();
    assert_eq!(
        paths,
        ["a.ast", "a.ast", "b.ast", "c.ast", "d.ast", "a.ast", "a.ast"]
    );
    // oldest first, one record per (commit, file)
    let commits: std::collections::BTreeSet<&str> =
        records.iter().map(|r| r.commit.as_str()).collect();
    assert_eq!(commits.len(), 6);
}

#[test]
fn first_parent_history_skips_merged_branch_commits() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("merge");
    init(&repo);
    fs::write(repo.join("a.ast"), "(unit (x))").unwrap();
    commit(&repo, "base");
    git(&repo, &["checkout", "-q", "-b", "side"]);
    fs::write(repo.join("a.ast"), "(unit (y))").unwrap();
    commit(&repo, "side 1");
    fs::write(repo.join("a.ast"), "(unit (z))").unwrap();
    commit(&repo, "side 2");
    git(&repo, &["checkout", "-q", "-"]);
    git(&repo, &["merge", "-q", "--no-ff", "-m", "merge", "side"]);

    let records = walk(&GitRepo::new(&repo), &Parsers::default()).unwrap();
    // the merge is one change from x to z on the first-parent chain
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].before.to_string(), "(unit (x))");
    assert_eq!(records[0].after.to_string(), "(unit (z))");
}

#[test]
fn detect_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!GitRepo::detect(dir.path()));
    let err = walk(&GitRepo::new(dir.path()), &Parsers::default()).unwrap_err();
    assert!(matches!(err, IngestError::Git { .. }), "{err}");
    let missing = walk(
        &GitRepo::new(dir.path().join("absent")),
        &Parsers::default(),
    )
    .unwrap_err();
    assert!(matches!(missing, IngestError::Io { .. }), "{missing}");
}

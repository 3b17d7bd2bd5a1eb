//! Revision histories in, parsed before/after file pairs out.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rayon::prelude::*;

use crate::ast::{parse_tree, ParseError, Tree};
use crate::cluster::{cluster_all, Cluster, ClusterConfig};
use crate::extract::{extract_edits, ConcreteEdit, ExtractConfig, Provenance};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("git {args}: {message}")]
    Git { args: String, message: String },
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_owned(),
        source,
    }
}

/// One modified file between a revision and its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileChange {
    pub commit: String,
    pub path: String,
    pub before: String,
    pub after: String,
}

/// A history of one project.
pub trait RevisionSource: Send + Sync {
    fn project(&self) -> &str;

    /// Modified files of each consecutive revision pair, oldest first.
    /// Only files for which `wanted` holds are read.
    fn changes(&self, wanted: &dyn Fn(&str) -> bool) -> Result<Vec<FileChange>, IngestError>;
}

/// A directory of `<case>/before.<ext>` and `<case>/after.<ext>` pairs, one
/// case per revision pair, visited in name order.
#[derive(Clone, Debug)]
pub struct PairsDir {
    root: PathBuf,
    project: String,
}

impl PairsDir {
    /// The project id is the directory name.
    pub fn new(root: impl Into<PathBuf>) -> PairsDir {
        let root = root.into();
        let project = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| root.display().to_string());
        PairsDir { root, project }
    }
}

impl RevisionSource for PairsDir {
    fn project(&self) -> &str {
        &self.project
    }

    fn changes(&self, wanted: &dyn Fn(&str) -> bool) -> Result<Vec<FileChange>, IngestError> {
        let mut cases: Vec<PathBuf> = fs::read_dir(&self.root)
            .map_err(io_error(&self.root))?
            .map(|e| e.map(|e| e.path()).map_err(io_error(&self.root)))
            .collect::<Result<Vec<_>, _>>()?;
        cases.retain(|p| p.is_dir());
        cases.sort();

        let mut out = Vec::new();
        for case in cases {
            let commit = case
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let mut names: Vec<String> = fs::read_dir(&case)
                .map_err(io_error(&case))?
                .filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|n| n.starts_with("before.") && wanted(n))
                .collect();
            names.sort();
            for name in names {
                let after_name = format!("after.{}", &name["before.".len()..]);
                let after_path = case.join(&after_name);
                if !after_path.is_file() {
                    log::debug!("{}: no {after_name}, skipped", case.display());
                    continue;
                }
                let before_path = case.join(&name);
                out.push(FileChange {
                    commit: commit.clone(),
                    path: format!("{commit}.{}", &name["before.".len()..]),
                    before: fs::read_to_string(&before_path).map_err(io_error(&before_path))?,
                    after: fs::read_to_string(&after_path).map_err(io_error(&after_path))?,
                });
            }
        }
        Ok(out)
    }
}

/// A git working copy, read through the `git` command. Each commit on the
/// first-parent chain of `HEAD` is paired with its first parent; renamed,
/// added and deleted files are ignored.
#[derive(Clone, Debug)]
pub struct GitRepo {
    root: PathBuf,
    project: String,
}

impl GitRepo {
    pub fn new(root: impl Into<PathBuf>) -> GitRepo {
        let root = root.into();
        let project = fs::canonicalize(&root)
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| root.display().to_string());
        GitRepo { root, project }
    }

    /// Is `path` the top of a git working copy?
    pub fn detect(path: &Path) -> bool {
        path.join(".git").exists()
    }

    fn git(&self, args: &[&str]) -> Result<String, IngestError> {
        let output = Command::new("git")
            .arg("-C")
            .arg(&self.root)
            .args(args)
            .output()
            .map_err(io_error(&self.root))?;
        if !output.status.success() {
            return Err(IngestError::Git {
                args: args.join(" "),
                message: String::from_utf8_lossy(&output.stderr).trim().to_owned(),
            });
        }
        Ok(String::from_utf8_lossy(&output.stdout).into_owned())
    }
}

impl RevisionSource for GitRepo {
    fn project(&self) -> &str {
        &self.project
    }

    fn changes(&self, wanted: &dyn Fn(&str) -> bool) -> Result<Vec<FileChange>, IngestError> {
        if !self.root.is_dir() {
            return Err(IngestError::Io {
                path: self.root.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            });
        }
        let history = self.git(&[
            "rev-list",
            "--first-parent",
            "--reverse",
            "--parents",
            "HEAD",
        ])?;
        let mut out = Vec::new();
        for line in history.lines() {
            let mut ids = line.split_whitespace();
            let (Some(commit), Some(parent)) = (ids.next(), ids.next()) else {
                continue;
            };
            let listing = self.git(&[
                "diff-tree",
                "-r",
                "--no-renames",
                "--diff-filter=M",
                "--name-only",
                "-z",
                parent,
                commit,
            ])?;
            let mut paths: Vec<&str> = listing
                .split('\0')
                .filter(|p| !p.is_empty() && wanted(p))
                .collect();
            paths.sort_unstable();
            for path in paths {
                out.push(FileChange {
                    commit: commit.to_owned(),
                    path: path.to_owned(),
                    before: self.git(&["show", &format!("{parent}:{path}")])?,
                    after: self.git(&["show", &format!("{commit}:{path}")])?,
                });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AdapterError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("parser command failed: {0}")]
    Command(String),
}

/// Turns file contents into a tree.
pub trait ParserAdapter: Send + Sync {
    fn claims(&self, path: &str) -> bool;
    fn parse(&self, text: &str) -> Result<Tree, AdapterError>;
}

fn has_extension(path: &str, extensions: &[String]) -> bool {
    Path::new(path)
        .extension()
        .is_some_and(|e| extensions.iter().any(|x| x.as_str() == e))
}

/// Files already in the s-expression tree format.
#[derive(Clone, Debug)]
pub struct SexpAdapter {
    pub extensions: Vec<String>,
}

impl Default for SexpAdapter {
    fn default() -> Self {
        SexpAdapter {
            extensions: vec!["ast".into()],
        }
    }
}

impl ParserAdapter for SexpAdapter {
    fn claims(&self, path: &str) -> bool {
        has_extension(path, &self.extensions)
    }

    fn parse(&self, text: &str) -> Result<Tree, AdapterError> {
        Ok(parse_tree(text)?)
    }
}

/// An external program that reads source text on stdin and prints the
/// s-expression tree on stdout.
#[derive(Clone, Debug)]
pub struct CommandAdapter {
    pub program: String,
    pub args: Vec<String>,
    pub extensions: Vec<String>,
}

impl ParserAdapter for CommandAdapter {
    fn claims(&self, path: &str) -> bool {
        has_extension(path, &self.extensions)
    }

    fn parse(&self, text: &str) -> Result<Tree, AdapterError> {
        let fail = |e: std::io::Error| AdapterError::Command(format!("{}: {e}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(fail)?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = text.to_owned();
        let feeder = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let output = child.wait_with_output().map_err(fail)?;
        feeder
            .join()
            .map_err(|_| AdapterError::Command("stdin writer panicked".into()))?
            .map_err(fail)?;
        if !output.status.success() {
            return Err(AdapterError::Command(format!(
                "{} exited with {}: {}",
                self.program,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        Ok(parse_tree(&String::from_utf8_lossy(&output.stdout))?)
    }
}

/// Adapters tried in order; the first that claims a path parses it.
pub struct Parsers(pub Vec<Box<dyn ParserAdapter>>);

impl Default for Parsers {
    fn default() -> Self {
        Parsers(vec![Box::new(SexpAdapter::default())])
    }
}

impl Parsers {
    fn for_path(&self, path: &str) -> Option<&dyn ParserAdapter> {
        self.0.iter().find(|a| a.claims(path)).map(|a| a.as_ref())
    }

    pub fn claims(&self, path: &str) -> bool {
        self.for_path(path).is_some()
    }
}

/// A parsed before/after pair of one file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub project: String,
    pub commit: String,
    pub path: String,
    pub before: Tree,
    pub after: Tree,
}

/// Parse every modified file of `source`. Files that fail to parse are
/// logged and skipped.
pub fn walk(source: &dyn RevisionSource, parsers: &Parsers) -> Result<Vec<Record>, IngestError> {
    let changes = source.changes(&|p| parsers.claims(p))?;
    let mut out = Vec::with_capacity(changes.len());
    for change in changes {
        let adapter = parsers.for_path(&change.path).expect("filtered by claims");
        let parsed = adapter
            .parse(&change.before)
            .and_then(|b| Ok((b, adapter.parse(&change.after)?)));
        match parsed {
            Ok((before, after)) => out.push(Record {
                project: source.project().to_owned(),
                commit: change.commit,
                path: change.path,
                before,
                after,
            }),
            Err(e) => log::warn!(
                "{} {} {}: skipped: {e}",
                source.project(),
                change.commit,
                change.path
            ),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct MineConfig {
    pub extract: ExtractConfig,
    pub cluster: ClusterConfig,
    /// Worker threads for diffing; `None` uses rayon's default.
    pub workers: Option<usize>,
}

/// Concrete edits of one record, with provenance filled in.
pub fn record_edits(record: &Record, config: &ExtractConfig) -> Vec<ConcreteEdit> {
    let mut edits = extract_edits(&record.before, &record.after, config);
    for e in &mut edits {
        e.provenance = Provenance {
            project: record.project.clone(),
            commit: record.commit.clone(),
            path: record.path.clone(),
            span: e.provenance.span,
        };
    }
    edits
}

/// Walk every source, extract concrete edits and cluster them all.
pub fn mine(
    sources: &[Box<dyn RevisionSource>],
    parsers: &Parsers,
    config: &MineConfig,
) -> Result<Vec<Cluster>, IngestError> {
    let mut records = Vec::new();
    for source in sources {
        records.extend(walk(source.as_ref(), parsers)?);
    }
    let run = || {
        let edits: Vec<ConcreteEdit> = records
            .par_iter()
            .map(|r| record_edits(r, &config.extract))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        log::info!("{} records, {} concrete edits", records.len(), edits.len());
        cluster_all(edits, &config.cluster)
    };
    match config.workers {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(run)),
        None => Ok(run()),
    }
}

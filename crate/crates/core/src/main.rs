use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use editmine::ast::parse_tree;
use editmine::catalog::{
    aggregate, export_catalog, filter_catalog, import_catalog, render_rules, PatternCatalog,
};
use editmine::cluster::ClusterConfig;
use editmine::extract::ExtractConfig;
use editmine::ingest::{
    mine, CommandAdapter, GitRepo, MineConfig, PairsDir, Parsers, RevisionSource,
};
use editmine::pattern::apply_pattern;

/// Mine repeated single-location edit patterns from revision histories.
#[derive(Parser)]
#[command(name = "editmine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine repositories (git working copies or pairs directories) into a catalog.
    Mine(MineArgs),
    /// Re-filter an existing catalog.
    Filter(FilterArgs),
    /// Print a catalog as before/after rule blocks.
    Render {
        catalog: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Try every catalog rule on every subtree of a tree file.
    Apply { catalog: PathBuf, file: PathBuf },
    /// Print coverage and catalog size.
    Stats { catalog: PathBuf },
}

#[derive(Args)]
struct Thresholds {
    /// Keep patterns seen in at least this many projects.
    #[arg(long, default_value_t = 3)]
    min_projects: usize,
    /// Keep patterns with at least this many edits.
    #[arg(long, default_value_t = 2)]
    min_edits: usize,
    /// Keep rename-only and vacuous patterns.
    #[arg(long)]
    keep_spurious: bool,
}

#[derive(Args)]
struct MineArgs {
    #[arg(required = true)]
    repos: Vec<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    d_cap_depth: u32,
    #[command(flatten)]
    thresholds: Thresholds,
    /// Largest component (in low-level edits) still treated as one edit.
    #[arg(long, default_value_t = 20)]
    max_component_edits: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// External parser: reads source on stdin, prints an s-expression tree.
    #[arg(long, requires = "parser_ext")]
    parser_cmd: Option<String>,
    /// File extensions handled by --parser-cmd (repeatable).
    #[arg(long)]
    parser_ext: Vec<String>,
}

#[derive(Args)]
struct FilterArgs {
    catalog: PathBuf,
    #[command(flatten)]
    thresholds: Thresholds,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_catalog(path: &Path) -> Result<PatternCatalog> {
    import_catalog(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn run_mine(args: MineArgs) -> Result<()> {
    let mut parsers = Parsers::default();
    if let Some(cmd) = args.parser_cmd {
        let mut words = cmd.split_whitespace().map(str::to_owned);
        let program = words.next().context("--parser-cmd is empty")?;
        parsers.0.insert(
            0,
            Box::new(CommandAdapter {
                program,
                args: words.collect(),
                extensions: args.parser_ext,
            }),
        );
    }
    let sources: Vec<Box<dyn RevisionSource>> = args
        .repos
        .iter()
        .map(|p| -> Box<dyn RevisionSource> {
            if GitRepo::detect(p) {
                Box::new(GitRepo::new(p))
            } else {
                Box::new(PairsDir::new(p))
            }
        })
        .collect();
    let depth = args.d_cap_depth as usize;
    let config = MineConfig {
        extract: ExtractConfig {
            max_component_edits: args.max_component_edits,
        },
        cluster: ClusterConfig {
            depth,
            ..ClusterConfig::default()
        },
        workers: args.workers,
    };
    let clusters = mine(&sources, &parsers, &config)?;
    let t = &args.thresholds;
    let catalog = filter_catalog(
        &aggregate(&clusters, depth),
        t.min_projects,
        t.min_edits,
        !t.keep_spurious,
    );
    log::info!(
        "{} clusters, {} patterns kept",
        clusters.len(),
        catalog.len()
    );
    emit(args.out.as_deref(), &export_catalog(&catalog))
}

fn run_apply(catalog: &Path, file: &Path) -> Result<()> {
    let catalog = load_catalog(catalog)?;
    let tree = parse_tree(&read(file)?).with_context(|| format!("parsing {}", file.display()))?;
    let mut out = String::new();
    for node in tree.preorder() {
        for (k, entry) in catalog.entries.iter().enumerate() {
            if let Some(rewritten) = apply_pattern(&entry.pattern, node) {
                let at = node
                    .span()
                    .map_or("?".to_owned(), |s| format!("{}:{}", s.line, s.column));
                out.push_str(&format!(
                    "rule {} at {at}\n  - {node}\n  + {rewritten}\n",
                    k + 1
                ));
                break;
            }
        }
    }
    if out.is_empty() {
        out.push_str("no match\n");
    }
    emit(None, &out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mine(args) => run_mine(args),
        Command::Filter(args) => {
            let t = &args.thresholds;
            let catalog = filter_catalog(
                &load_catalog(&args.catalog)?,
                t.min_projects,
                t.min_edits,
                !t.keep_spurious,
            );
            emit(args.out.as_deref(), &export_catalog(&catalog))
        }
        Command::Render { catalog, out } => {
            emit(out.as_deref(), &render_rules(&load_catalog(&catalog)?))
        }
        Command::Apply { catalog, file } => run_apply(&catalog, &file),
        Command::Stats { catalog } => {
            let catalog = load_catalog(&catalog)?;
            let c = catalog.meta.coverage;
            let (num, den) = c.ratio();
            emit(
                None,
                &format!(
                    "patterns: {}\nedits: {}\ncovered: {} ({num}/{den} = {:.1}%)\n",
                    catalog.len(),
                    c.total_edits,
                    c.covered_edits,
                    100.0 * c.fraction()
                ),
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

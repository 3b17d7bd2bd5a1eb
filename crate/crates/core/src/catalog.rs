//! Cross-project pattern catalog: aggregation, filtering, coverage and the
//! two file formats.
//!
//! The structured format is line-delimited JSON. The first line holds the
//! mining metadata; each further line is one entry, with templates in the
//! canonical s-expression form.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ast::{parse_template, HoleId, Template};
use crate::cluster::Cluster;
use crate::extract::Provenance;
use crate::pattern::EditPattern;

pub const FORMAT_VERSION: u32 = 1;

/// Edits in multi-member clusters over all edits, kept as integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub total_edits: usize,
    pub covered_edits: usize,
}

impl Coverage {
    /// 0 when there are no edits.
    pub fn fraction(&self) -> f64 {
        if self.total_edits == 0 {
            0.0
        } else {
            self.covered_edits as f64 / self.total_edits as f64
        }
    }

    /// The fraction in lowest terms; `(0, 1)` when empty.
    pub fn ratio(&self) -> (usize, usize) {
        if self.total_edits == 0 {
            return (0, 1);
        }
        let g = gcd(self.covered_edits, self.total_edits);
        (self.covered_edits / g, self.total_edits / g)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn report_coverage(clusters: &[Cluster]) -> Coverage {
    Coverage {
        total_edits: clusters.iter().map(Cluster::len).sum(),
        covered_edits: clusters
            .iter()
            .filter(|c| c.len() > 1)
            .map(Cluster::len)
            .sum(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogMeta {
    pub version: u32,
    pub tool_version: String,
    pub dcap_depth: usize,
    pub min_projects: usize,
    pub min_edits: usize,
    pub drop_spurious: bool,
    pub coverage: Coverage,
}

impl Default for CatalogMeta {
    fn default() -> Self {
        CatalogMeta {
            version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            dcap_depth: 1,
            min_projects: 0,
            min_edits: 0,
            drop_spurious: false,
            coverage: Coverage::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub pattern: EditPattern,
    pub edit_count: usize,
    pub projects: Vec<String>,
    pub hash: String,
}

impl CatalogEntry {
    fn new(pattern: EditPattern) -> CatalogEntry {
        let projects: BTreeSet<&str> = pattern
            .support()
            .iter()
            .map(|p| p.project.as_str())
            .collect();
        CatalogEntry {
            edit_count: pattern.support().len(),
            projects: projects.into_iter().map(str::to_owned).collect(),
            hash: pattern_hash(&pattern),
            pattern,
        }
    }

    pub fn project_count(&self) -> usize {
        self.projects.len()
    }
}

/// Hex SHA-256 of the canonical templates and hole map.
pub fn pattern_hash(pattern: &EditPattern) -> String {
    let mut h = Sha256::new();
    h.update(pattern.before().to_string());
    h.update("\n");
    h.update(pattern.after().to_string());
    for (o, i) in pattern.hole_map() {
        h.update(format!("\n{o}={i}"));
    }
    h.finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternCatalog {
    pub meta: CatalogMeta,
    pub entries: Vec<CatalogEntry>,
}

impl PatternCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One entry per cluster, most widespread first: project count, then edit
/// count (both descending), then pattern hash, then cluster order.
pub fn aggregate(clusters: &[Cluster], dcap_depth: usize) -> PatternCatalog {
    let mut entries: Vec<CatalogEntry> = clusters
        .iter()
        .map(|c| CatalogEntry::new(c.pattern().clone()))
        .collect();
    entries.sort_by(|a, b| {
        (Reverse(a.project_count()), Reverse(a.edit_count), &a.hash).cmp(&(
            Reverse(b.project_count()),
            Reverse(b.edit_count),
            &b.hash,
        ))
    });
    PatternCatalog {
        meta: CatalogMeta {
            dcap_depth,
            coverage: report_coverage(clusters),
            ..CatalogMeta::default()
        },
        entries,
    }
}

fn is_identifier(kind: &str) -> bool {
    kind == "id" || kind.starts_with("id:")
}

/// The two sides differ only in the label of one identifier leaf.
pub fn is_pure_rename(pattern: &EditPattern) -> bool {
    fn diffs(
        a: &Template,
        b: &Template,
        map: &BTreeMap<HoleId, HoleId>,
        found: &mut usize,
    ) -> bool {
        match (a, b) {
            (Template::Hole(x), Template::Hole(y)) => map.get(y) == Some(x),
            (
                Template::Node {
                    kind: ka,
                    label: la,
                    children: ca,
                },
                Template::Node {
                    kind: kb,
                    label: lb,
                    children: cb,
                },
            ) => {
                if ka != kb || ca.len() != cb.len() {
                    return false;
                }
                if la != lb {
                    if !(ca.is_empty() && is_identifier(ka)) {
                        return false;
                    }
                    *found += 1;
                }
                ca.iter().zip(cb).all(|(x, y)| diffs(x, y, map, found))
            }
            _ => false,
        }
    }
    let mut found = 0;
    diffs(
        pattern.before(),
        pattern.after(),
        pattern.hole_map(),
        &mut found,
    ) && found == 1
}

fn spurious(pattern: &EditPattern) -> bool {
    pattern.is_vacuous() || is_pure_rename(pattern)
}

/// Keep entries seen in at least `min_projects` projects and `min_edits`
/// edits; with `drop_spurious`, also drop renames and vacuous patterns.
pub fn filter_catalog(
    catalog: &PatternCatalog,
    min_projects: usize,
    min_edits: usize,
    drop_spurious: bool,
) -> PatternCatalog {
    PatternCatalog {
        meta: CatalogMeta {
            min_projects,
            min_edits,
            drop_spurious,
            ..catalog.meta.clone()
        },
        entries: catalog
            .entries
            .iter()
            .filter(|e| e.project_count() >= min_projects && e.edit_count >= min_edits)
            .filter(|e| !(drop_spurious && spurious(&e.pattern)))
            .cloned()
            .collect(),
    }
}

#[derive(Serialize, Deserialize)]
struct EntryLine {
    before: String,
    after: String,
    hole_map: Vec<(u32, u32)>,
    edit_count: usize,
    project_count: usize,
    projects: Vec<String>,
    hash: String,
    support: Vec<Provenance>,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("empty catalog document (no metadata line)")]
    MissingMeta,
    #[error("unsupported catalog format version {0}")]
    Version(u32),
}

/// Serialize to the line-delimited structured format.
pub fn export_catalog(catalog: &PatternCatalog) -> String {
    let mut out = serde_json::to_string(&catalog.meta).expect("metadata serializes");
    out.push('\n');
    for e in &catalog.entries {
        let line = EntryLine {
            before: e.pattern.before().to_string(),
            after: e.pattern.after().to_string(),
            hole_map: e
                .pattern
                .hole_map()
                .iter()
                .map(|(o, i)| (o.0, i.0))
                .collect(),
            edit_count: e.edit_count,
            project_count: e.project_count(),
            projects: e.projects.clone(),
            hash: e.hash.clone(),
            support: e.pattern.support().to_vec(),
        };
        out.push_str(&serde_json::to_string(&line).expect("entry serializes"));
        out.push('\n');
    }
    out
}

/// Parse the structured format. Counts and hashes are checked against the
/// entry's own support and templates.
pub fn import_catalog(text: &str) -> Result<PatternCatalog, CatalogError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(CatalogError::MissingMeta)?;
    let meta: CatalogMeta = serde_json::from_str(first).map_err(|e| CatalogError::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    if meta.version != FORMAT_VERSION {
        return Err(CatalogError::Version(meta.version));
    }
    let mut entries = Vec::new();
    for (i, text) in lines {
        let bad = |message: String| CatalogError::Malformed {
            line: i + 1,
            message,
        };
        let line: EntryLine = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let before = parse_template(&line.before).map_err(|e| bad(format!("before: {e}")))?;
        let after = parse_template(&line.after).map_err(|e| bad(format!("after: {e}")))?;
        let hole_map = line
            .hole_map
            .iter()
            .map(|&(o, i)| (HoleId(o), HoleId(i)))
            .collect();
        let pattern = EditPattern::new(before, after, hole_map, line.support)
            .map_err(|e| bad(e.to_string()))?;
        let entry = CatalogEntry::new(pattern);
        if entry.edit_count != line.edit_count
            || entry.project_count() != line.project_count
            || entry.projects != line.projects
        {
            return Err(bad("counts disagree with support".into()));
        }
        if entry.hash != line.hash {
            return Err(bad("hash disagrees with templates".into()));
        }
        entries.push(entry);
    }
    Ok(PatternCatalog { meta, entries })
}

/// Human-readable before/after blocks.
pub fn render_rules(catalog: &PatternCatalog) -> String {
    let mut out = String::new();
    for (k, e) in catalog.entries.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "# rule {}: {} edits in {} projects ({})  [{}]",
            k + 1,
            e.edit_count,
            e.project_count(),
            e.projects.join(", "),
            &e.hash[..12]
        );
        let _ = writeln!(out, "@before\n{}", e.pattern.before());
        let mapping: Vec<String> = e
            .pattern
            .hole_map()
            .iter()
            .filter(|(o, i)| o != i)
            .map(|(o, i)| format!("{o} := {i}"))
            .collect();
        if !mapping.is_empty() {
            let _ = writeln!(out, "@where {}", mapping.join(", "));
        }
        let _ = writeln!(out, "@after\n{}", e.pattern.after());
    }
    out
}

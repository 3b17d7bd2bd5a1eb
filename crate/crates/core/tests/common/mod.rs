// Not every test binary uses every helper.
#![allow(dead_code)]

pub mod corpus;
pub mod oracle;
pub mod trees;

use editmine::ast::{parse_template, parse_tree, Template, Tree};
use editmine::cluster::Cluster;
use editmine::pattern::apply_pattern;

pub fn t(text: &str) -> Tree {
    parse_tree(text).unwrap_or_else(|e| panic!("bad tree {text:?}: {e}"))
}

pub fn tpl(text: &str) -> Template {
    parse_template(text).unwrap_or_else(|e| panic!("bad template {text:?}: {e}"))
}

pub fn same_up_to_renaming(a: &Template, b: &Template) -> bool {
    a.canonicalize().0 == b.canonicalize().0
}

/// Members whose before tree the cluster's pattern does not rewrite to the
/// after tree, as readable lines.
pub fn replay_failures(clusters: &[Cluster]) -> Vec<String> {
    let mut out = Vec::new();
    for (k, c) in clusters.iter().enumerate() {
        for m in c.members() {
            if apply_pattern(c.pattern(), m.before()).as_ref() != Some(m.after()) {
                out.push(format!("cluster {k}: {} -> {}", m.before(), m.after()));
            }
        }
    }
    out
}

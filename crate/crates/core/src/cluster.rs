//! Greedy clustering of concrete edits into groups that share a pattern.
//!
//! Edits are first bucketed by the d-caps of their before and after trees.
//! Within a bucket each edit joins the existing cluster that can absorb it
//! at the lowest anti-unification cost, or starts a new one.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::antiunify::au2;
use crate::ast::{size, HoleId, Template, Tree};
use crate::extract::ConcreteEdit;
use crate::pattern::{anchors_compatible, extend_pattern, learn_pattern, AnchorSet, EditPattern};

/// Truncate `tree` at depth `d` (root at depth 0): every node at depth `d`
/// and every leaf above it becomes a fresh hole. Holes are numbered in
/// preorder and never shared.
pub fn dcap(tree: &Tree, d: usize) -> Template {
    fn go(tree: &Tree, depth: usize, d: usize, next: &mut u32) -> Template {
        if depth >= d || tree.is_leaf() {
            *next += 1;
            return Template::Hole(HoleId(*next));
        }
        Template::Node {
            kind: tree.kind().to_owned(),
            label: tree.label().map(str::to_owned),
            children: tree
                .children()
                .iter()
                .map(|c| go(c, depth + 1, d, next))
                .collect(),
        }
    }
    go(tree, 0, d, &mut 0)
}

/// Bucket key: d-caps of the before and after trees.
pub type DCapKey = (Template, Template);

pub fn dcap_key(edit: &ConcreteEdit, d: usize) -> DCapKey {
    (dcap(edit.before(), d), dcap(edit.after(), d))
}

/// A group of edits explained by one pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    members: Vec<ConcreteEdit>,
    pattern: EditPattern,
    dcap_key: DCapKey,
}

impl Cluster {
    fn singleton(edit: ConcreteEdit, dcap_key: DCapKey) -> Cluster {
        let pattern =
            learn_pattern(std::slice::from_ref(&edit)).expect("one edit always has a pattern");
        Cluster {
            members: vec![edit],
            pattern,
            dcap_key,
        }
    }

    pub fn members(&self) -> &[ConcreteEdit] {
        &self.members
    }

    pub fn pattern(&self) -> &EditPattern {
        &self.pattern
    }

    pub fn dcap_key(&self) -> &DCapKey {
        &self.dcap_key
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ClusterConfig {
    /// d-cap depth. 0 puts every edit in one bucket.
    pub depth: usize,
    pub anchors: AnchorSet,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            depth: 1,
            anchors: AnchorSet::default(),
        }
    }
}

fn cost_part(template: &Template, tree: &Tree) -> usize {
    let (joint, old, new) = au2(template, &Template::from(tree));
    let holes = joint.holes();
    let total: usize = holes
        .iter()
        .map(|&h| size(old.get(h).expect("bound")) + size(new.get(h).expect("bound")))
        .sum();
    total - holes.len()
}

/// Cost of adding `edit` to `cluster`: on each side, the total size of what
/// the new holes stand for in both substitutions, minus the number of holes.
pub fn cost(edit: &ConcreteEdit, cluster: &Cluster) -> usize {
    let (input, output) = cost_parts(edit, cluster);
    input + output
}

/// The before-side and after-side terms of [`cost`].
pub fn cost_parts(edit: &ConcreteEdit, cluster: &Cluster) -> (usize, usize) {
    (
        cost_part(cluster.pattern.before(), edit.before()),
        cost_part(cluster.pattern.after(), edit.after()),
    )
}

/// Clusters of one bucket, plus the number of pattern checks performed.
#[derive(Clone, Debug)]
pub struct BucketResult {
    pub clusters: Vec<Cluster>,
    pub pattern_checks: usize,
}

/// Greedily cluster edits that share a d-cap key, in input order. Ties in
/// cost go to the cluster created first.
pub fn cluster_bucket(edits: Vec<ConcreteEdit>, config: &ClusterConfig) -> BucketResult {
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut pattern_checks = 0;
    for edit in edits {
        let mut best: Option<(usize, usize, EditPattern)> = None;
        for (i, c) in clusters.iter().enumerate() {
            if !anchors_compatible(&c.members[0], &edit, &config.anchors) {
                continue;
            }
            pattern_checks += 1;
            let Ok(pattern) = extend_pattern(&c.pattern, &edit) else {
                continue;
            };
            let k = cost(&edit, c);
            if best.as_ref().is_none_or(|(b, _, _)| k < *b) {
                best = Some((k, i, pattern));
            }
        }
        match best {
            Some((_, i, pattern)) => {
                clusters[i].members.push(edit);
                clusters[i].pattern = pattern;
            }
            None => {
                let key = dcap_key(&edit, config.depth);
                clusters.push(Cluster::singleton(edit, key));
            }
        }
    }
    BucketResult {
        clusters,
        pattern_checks,
    }
}

/// Partition `edits` by d-cap key and cluster each bucket. Buckets keep the
/// order of their first edit; buckets run in parallel.
pub fn cluster_all(edits: Vec<ConcreteEdit>, config: &ClusterConfig) -> Vec<Cluster> {
    let mut index: HashMap<DCapKey, usize> = HashMap::new();
    let mut buckets: Vec<Vec<ConcreteEdit>> = Vec::new();
    for edit in edits {
        let key = dcap_key(&edit, config.depth);
        let next = buckets.len();
        let b = *index.entry(key).or_insert(next);
        if b == next {
            buckets.push(Vec::new());
        }
        buckets[b].push(edit);
    }
    let results: Vec<BucketResult> = buckets
        .into_par_iter()
        .map(|bucket| cluster_bucket(bucket, config))
        .collect();
    results.into_iter().flat_map(|r| r.clusters).collect()
}

//! Grouping low-level edits into connected components and lifting each
//! component to a before/after subtree pair.
//!
//! Two edits are connected when the nodes they act on are the same node,
//! share a parent, or one is the parent of the other. A node that exists in
//! both trees may have two parents (before and after a move); either counts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ast::{Span, Tree};
use crate::diff::{diff, EditScript, Flat, TreeEdit};

/// Where a concrete edit was observed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    pub project: String,
    pub commit: String,
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<Span>,
}

/// A before/after pair of subtrees at one code location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteEdit {
    before: Tree,
    after: Tree,
    pub provenance: Provenance,
}

impl ConcreteEdit {
    /// `None` when `before` and `after` are structurally equal.
    pub fn new(before: Tree, after: Tree, provenance: Provenance) -> Option<ConcreteEdit> {
        (before != after).then_some(ConcreteEdit {
            before,
            after,
            provenance,
        })
    }

    pub fn before(&self) -> &Tree {
        &self.before
    }

    pub fn after(&self) -> &Tree {
        &self.after
    }
}

/// A connected set of edits, by index into the script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditComponent {
    pub edits: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ExtractConfig {
    /// Components with more edits than this are bulk rewrites, not quick fixes.
    pub max_component_edits: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            max_component_edits: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum NodeKey {
    Source(usize),
    Target(usize),
}

fn target_key(script: &EditScript, d: usize) -> NodeKey {
    script
        .mapping
        .source_of(d)
        .map_or(NodeKey::Target(d), NodeKey::Source)
}

fn subject_key(script: &EditScript, edit: usize) -> NodeKey {
    let subject = script.subjects[edit];
    match (subject.source, subject.target) {
        (Some(s), _) => NodeKey::Source(s),
        (None, Some(d)) => target_key(script, d),
        (None, None) => unreachable!("every edit has a subject"),
    }
}

fn parent_keys(script: &EditScript, key: NodeKey) -> Vec<NodeKey> {
    let mut out = Vec::with_capacity(2);
    match key {
        NodeKey::Source(s) => {
            out.extend(script.source_parent(s).map(NodeKey::Source));
            if let Some(p) = script
                .mapping
                .target_of(s)
                .and_then(|d| script.target_parent(d))
            {
                let p = target_key(script, p);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        NodeKey::Target(d) => out.extend(script.target_parent(d).map(|p| target_key(script, p))),
    }
    out
}

/// Are edits `a` and `b` directly connected?
pub fn related(script: &EditScript, a: usize, b: usize) -> bool {
    let (x, y) = (subject_key(script, a), subject_key(script, b));
    if x == y {
        return true;
    }
    let (px, py) = (parent_keys(script, x), parent_keys(script, y));
    px.contains(&y) || py.contains(&x) || px.iter().any(|p| py.contains(p))
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Partition the script's edits into connected components, ordered by their
/// first edit.
pub fn components(script: &EditScript) -> Vec<EditComponent> {
    let n = script.len();
    let mut sets = DisjointSet((0..n).collect());
    // first edit seen acting on a node / under a parent
    let mut on_node: HashMap<NodeKey, usize> = HashMap::new();
    let mut under: HashMap<NodeKey, usize> = HashMap::new();
    for e in 0..n {
        let key = subject_key(script, e);
        if let Some(&o) = on_node.get(&key) {
            sets.union(e, o);
        } else {
            on_node.insert(key, e);
        }
        // a child of this node was edited
        if let Some(&o) = under.get(&key) {
            sets.union(e, o);
        }
        for p in parent_keys(script, key) {
            // a sibling was edited
            if let Some(&o) = under.get(&p) {
                sets.union(e, o);
            } else {
                under.insert(p, e);
            }
            // the parent itself was edited
            if let Some(&o) = on_node.get(&p) {
                sets.union(e, o);
            }
        }
    }
    // edits on a node seen before any edit under it
    for e in 0..n {
        let key = subject_key(script, e);
        if let Some(&o) = under.get(&key) {
            sets.union(e, o);
        }
    }

    let mut groups: Vec<EditComponent> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for e in 0..n {
        let root = sets.find(e);
        let g = *index.entry(root).or_insert_with(|| {
            groups.push(EditComponent { edits: Vec::new() });
            groups.len() - 1
        });
        groups[g].edits.push(e);
    }
    groups
}

struct Lifter<'a> {
    script: &'a EditScript,
    src: Flat<'a>,
    dst: Flat<'a>,
}

/// Root of a lifted component, by preorder index in source and target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Anchor {
    source: usize,
    target: usize,
}

impl<'a> Lifter<'a> {
    fn new(script: &'a EditScript, source: &'a Tree, target: &'a Tree) -> Lifter<'a> {
        Lifter {
            script,
            src: Flat::new(source),
            dst: Flat::new(target),
        }
    }

    /// Lowest mapped source node, not a leaf on both sides, whose subtree
    /// holds every source-side point touched by the component and whose
    /// counterpart's subtree holds every target-side point. `None` if that
    /// node is a root.
    fn anchor(&self, component: &EditComponent) -> Option<Anchor> {
        let mut src_points = Vec::new();
        let mut dst_points = Vec::new();
        for &e in &component.edits {
            let subject = self.script.subjects[e];
            match &self.script.edits[e] {
                TreeEdit::Update { .. } => {
                    src_points.extend(subject.source);
                    dst_points.extend(subject.target);
                }
                TreeEdit::Insert { .. } => {
                    let d = subject.target?;
                    dst_points.push(d);
                    dst_points.push(self.dst.parent[d]?);
                }
                TreeEdit::Delete { .. } => {
                    let s = subject.source?;
                    src_points.push(s);
                    src_points.push(self.src.parent[s]?);
                }
                TreeEdit::Move { .. } => {
                    let (s, d) = (subject.source?, subject.target?);
                    src_points.extend([s, self.src.parent[s]?]);
                    dst_points.extend([d, self.dst.parent[d]?]);
                }
            }
        }
        let mapping = &self.script.mapping;
        for &p in &dst_points {
            let mut d = p;
            loop {
                if let Some(s) = mapping.source_of(d) {
                    src_points.push(s);
                    break;
                }
                d = self.dst.parent[d]?;
            }
        }
        let mut a = src_points
            .iter()
            .copied()
            .reduce(|x, y| self.src.lca(x, y))?;
        loop {
            if let Some(b) = mapping.target_of(a) {
                let covers = dst_points.iter().all(|&p| self.dst.contains(b, p));
                let interior = !self.src.is_leaf(a) || !self.dst.is_leaf(b);
                if covers && interior {
                    if a == 0 || b == 0 {
                        return None;
                    }
                    return Some(Anchor {
                        source: a,
                        target: b,
                    });
                }
            }
            a = self.src.parent[a]?;
        }
    }

    fn edit_at(&self, anchor: Anchor) -> Option<ConcreteEdit> {
        let before = self.src.nodes[anchor.source];
        let after = self.dst.nodes[anchor.target];
        let provenance = Provenance {
            span: before.span(),
            ..Provenance::default()
        };
        ConcreteEdit::new(before.clone(), after.clone(), provenance)
    }
}

/// Lift one component to a concrete edit rooted at the lowest mapped
/// interior node covering all of it. Returns `None` when that node is the
/// root of either tree, or when the two subtrees are equal.
pub fn lift(
    component: &EditComponent,
    script: &EditScript,
    source: &Tree,
    target: &Tree,
) -> Option<ConcreteEdit> {
    let lifter = Lifter::new(script, source, target);
    lifter.edit_at(lifter.anchor(component)?)
}

/// Diff two versions of a file and return its concrete edits in source
/// order. Components too large are dropped; when one lifted edit lies inside
/// another, only the outer one is kept.
pub fn extract_edits(source: &Tree, target: &Tree, config: &ExtractConfig) -> Vec<ConcreteEdit> {
    let script = diff(source, target);
    if script.is_empty() {
        return Vec::new();
    }
    let lifter = Lifter::new(&script, source, target);
    let mut anchors: Vec<Anchor> = components(&script)
        .iter()
        .filter(|c| c.edits.len() <= config.max_component_edits)
        .filter_map(|c| lifter.anchor(c))
        .collect();
    anchors.sort_by_key(|a| a.source);
    anchors.dedup();

    let mut out = Vec::new();
    let mut last_outer: Option<usize> = None;
    for anchor in anchors {
        if last_outer.is_some_and(|o| lifter.src.contains(o, anchor.source)) {
            continue;
        }
        last_outer = Some(anchor.source);
        out.extend(lifter.edit_at(anchor));
    }
    out
}

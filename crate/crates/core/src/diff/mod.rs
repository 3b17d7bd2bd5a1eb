//! Tree differencing: a node mapping between two trees and an edit script
//! (insert / delete / update / move) that turns the first into the second.
//!
//! Insert and delete work on leaves only; whole subtrees are built top-down
//! and removed bottom-up. Paths are child-index sequences into a document
//! whose top level holds the tree at index 0, so `/0` is the root. This lets
//! a script replace the root when the two roots differ in kind.

mod flat;
mod generate;
mod matcher;

use std::fmt;

use crate::ast::Tree;

pub(crate) use flat::Flat;

/// Child-index path from the document top level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> NodePath {
        NodePath(vec![0])
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

/// Kind and label of a single node, without children.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodePayload {
    pub kind: String,
    pub label: Option<String>,
}

impl NodePayload {
    pub fn new(kind: impl Into<String>, label: Option<&str>) -> NodePayload {
        NodePayload {
            kind: kind.into(),
            label: label.map(str::to_owned),
        }
    }

    pub fn of(tree: &Tree) -> NodePayload {
        NodePayload::new(tree.kind(), tree.label())
    }

    fn to_leaf(&self) -> Tree {
        Tree::from_parts(self.kind.clone(), self.label.clone(), Vec::new())
    }
}

impl fmt::Display for NodePayload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_leaf(), f)
    }
}

/// One low-level tree operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeEdit {
    /// Insert a leaf as child `position` of `parent`; later children shift right.
    Insert {
        node: NodePayload,
        parent: NodePath,
        position: usize,
    },
    /// Delete the leaf at child `position` of `parent`.
    Delete {
        node: NodePayload,
        parent: NodePath,
        position: usize,
    },
    /// Replace the payload of the node at `path`.
    Update {
        path: NodePath,
        from: NodePayload,
        to: NodePayload,
    },
    /// Detach the subtree at `path`, then insert it as child `position` of
    /// `parent`. `parent` is resolved after the detach.
    Move {
        path: NodePath,
        parent: NodePath,
        position: usize,
    },
}

impl fmt::Display for TreeEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeEdit::Insert {
                node,
                parent,
                position,
            } => write!(f, "insert({node}, {parent}, {position})"),
            TreeEdit::Delete {
                node,
                parent,
                position,
            } => write!(f, "delete({node}, {parent}, {position})"),
            TreeEdit::Update { path, from, to } => write!(f, "update({path}, {from} -> {to})"),
            TreeEdit::Move {
                path,
                parent,
                position,
            } => write!(f, "move({path}, {parent}, {position})"),
        }
    }
}

/// The node an edit acts on, by preorder index in the source and/or target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EditSubject {
    pub source: Option<usize>,
    pub target: Option<usize>,
}

/// Partial bijection between source and target preorder indexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMapping {
    pub(crate) src_to_dst: Vec<Option<usize>>,
    pub(crate) dst_to_src: Vec<Option<usize>>,
}

impl NodeMapping {
    pub(crate) fn empty(src: usize, dst: usize) -> NodeMapping {
        NodeMapping {
            src_to_dst: vec![None; src],
            dst_to_src: vec![None; dst],
        }
    }

    pub(crate) fn link(&mut self, s: usize, d: usize) {
        debug_assert!(self.src_to_dst[s].is_none() && self.dst_to_src[d].is_none());
        self.src_to_dst[s] = Some(d);
        self.dst_to_src[d] = Some(s);
    }

    pub fn target_of(&self, source: usize) -> Option<usize> {
        self.src_to_dst.get(source).copied().flatten()
    }

    pub fn source_of(&self, target: usize) -> Option<usize> {
        self.dst_to_src.get(target).copied().flatten()
    }

    /// Mapped pairs in source preorder.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.src_to_dst
            .iter()
            .enumerate()
            .filter_map(|(s, d)| d.map(|d| (s, d)))
    }

    pub fn len(&self) -> usize {
        self.pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An ordered edit sequence together with the mapping that produced it.
#[derive(Clone, Debug)]
pub struct EditScript {
    pub edits: Vec<TreeEdit>,
    pub subjects: Vec<EditSubject>,
    pub mapping: NodeMapping,
    pub(crate) source_parent: Vec<Option<usize>>,
    pub(crate) target_parent: Vec<Option<usize>>,
}

impl EditScript {
    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Parent of a source node, by preorder index.
    pub fn source_parent(&self, node: usize) -> Option<usize> {
        self.source_parent.get(node).copied().flatten()
    }

    /// Parent of a target node, by preorder index.
    pub fn target_parent(&self, node: usize) -> Option<usize> {
        self.target_parent.get(node).copied().flatten()
    }
}

impl fmt::Display for EditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for edit in &self.edits {
            writeln!(f, "{edit}")?;
        }
        Ok(())
    }
}

/// Compute a mapping and an edit script from `source` to `target`.
pub fn diff(source: &Tree, target: &Tree) -> EditScript {
    let src = Flat::new(source);
    let dst = Flat::new(target);
    let mapping = matcher::match_trees(&src, &dst);
    let (edits, subjects) = generate::generate(&src, &dst, &mapping);
    EditScript {
        edits,
        subjects,
        mapping,
        source_parent: src.parent,
        target_parent: dst.parent,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("edit {index} ({edit}): no node at {path}")]
    InvalidPath {
        index: usize,
        edit: String,
        path: NodePath,
    },
    #[error("edit {index} ({edit}): position {position} out of range")]
    InvalidPosition {
        index: usize,
        edit: String,
        position: usize,
    },
    #[error("edit {index} ({edit}): node is not a leaf")]
    NotALeaf { index: usize, edit: String },
    #[error("edit {index} ({edit}): found {found} at the target position")]
    PayloadMismatch {
        index: usize,
        edit: String,
        found: String,
    },
    #[error("script left {0} top-level trees, expected exactly one")]
    NotSingleRoot(usize),
}

/// Apply `script` to `source`.
pub fn apply(script: &EditScript, source: &Tree) -> Result<Tree, ApplyError> {
    apply_edits(&script.edits, source)
}

/// Apply a bare sequence of edits to `source`.
pub fn apply_edits(edits: &[TreeEdit], source: &Tree) -> Result<Tree, ApplyError> {
    let mut doc = vec![source.clone()];
    for (index, edit) in edits.iter().enumerate() {
        apply_one(&mut doc, index, edit)?;
    }
    if doc.len() != 1 {
        return Err(ApplyError::NotSingleRoot(doc.len()));
    }
    Ok(doc.pop().expect("one tree"))
}

fn node_mut<'a>(doc: &'a mut [Tree], path: &[usize]) -> Option<&'a mut Tree> {
    let (first, rest) = path.split_first()?;
    let mut node = doc.get_mut(*first)?;
    for &i in rest {
        node = node.children_mut().get_mut(i)?;
    }
    Some(node)
}

fn siblings_mut<'a>(doc: &'a mut Vec<Tree>, parent: &[usize]) -> Option<&'a mut Vec<Tree>> {
    if parent.is_empty() {
        Some(doc)
    } else {
        node_mut(doc, parent).map(Tree::children_mut)
    }
}

fn apply_one(doc: &mut Vec<Tree>, index: usize, edit: &TreeEdit) -> Result<(), ApplyError> {
    let bad_path = |path: &NodePath| ApplyError::InvalidPath {
        index,
        edit: edit.to_string(),
        path: path.clone(),
    };
    let bad_position = |position: usize| ApplyError::InvalidPosition {
        index,
        edit: edit.to_string(),
        position,
    };
    match edit {
        TreeEdit::Insert {
            node,
            parent,
            position,
        } => {
            let siblings = siblings_mut(doc, &parent.0).ok_or_else(|| bad_path(parent))?;
            if *position > siblings.len() {
                return Err(bad_position(*position));
            }
            siblings.insert(*position, node.to_leaf());
        }
        TreeEdit::Delete {
            node,
            parent,
            position,
        } => {
            let siblings = siblings_mut(doc, &parent.0).ok_or_else(|| bad_path(parent))?;
            let victim = siblings
                .get(*position)
                .ok_or_else(|| bad_position(*position))?;
            if !victim.is_leaf() {
                return Err(ApplyError::NotALeaf {
                    index,
                    edit: edit.to_string(),
                });
            }
            if NodePayload::of(victim) != *node {
                return Err(ApplyError::PayloadMismatch {
                    index,
                    edit: edit.to_string(),
                    found: NodePayload::of(victim).to_string(),
                });
            }
            siblings.remove(*position);
        }
        TreeEdit::Update { path, to, .. } => {
            let target = node_mut(doc, &path.0).ok_or_else(|| bad_path(path))?;
            target.set_payload(to.kind.clone(), to.label.clone());
        }
        TreeEdit::Move {
            path,
            parent,
            position,
        } => {
            let (last, up) = path.0.split_last().ok_or_else(|| bad_path(path))?;
            let from = siblings_mut(doc, up).ok_or_else(|| bad_path(path))?;
            if *last >= from.len() {
                return Err(bad_path(path));
            }
            let subtree = from.remove(*last);
            let to = siblings_mut(doc, &parent.0).ok_or_else(|| bad_path(parent))?;
            if *position > to.len() {
                return Err(bad_position(*position));
            }
            to.insert(*position, subtree);
        }
    }
    Ok(())
}

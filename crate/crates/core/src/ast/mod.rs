//! Ordered, labeled syntax trees and templates with holes.
//!
//! A [`Tree`] is a concrete syntax tree: every node has a kind, leaves may
//! carry a textual label, and child order is significant. A [`Template`] has
//! the same shape but any leaf position may be a [`HoleId`]. A
//! [`Substitution`] binds holes to subtrees.
//!
//! Structural equality compares kind, label and children only. Source spans
//! ride along as metadata and never take part in equality or hashing.

mod sexp;

pub use sexp::{parse_template, parse_tree, ParseError};

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

/// Kind used for the optional type-annotation child (always the first child).
pub const TYPE_ANNOTATION_KIND: &str = "type-ann";

/// Location of a node in the text it was parsed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    /// Byte offset of the first character.
    pub start: usize,
    /// Byte offset one past the last character.
    pub end: usize,
    /// 1-based line of `start`.
    pub line: usize,
    /// 1-based column (in chars) of `start`.
    pub column: usize,
}

/// A hole identifier, rendered `?N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HoleId(pub u32);

impl fmt::Display for HoleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// A concrete syntax tree. Contains no holes.
#[derive(Clone, Debug)]
pub struct Tree {
    kind: String,
    label: Option<String>,
    children: Vec<Tree>,
    span: Option<Span>,
}

impl Tree {
    /// A leaf node with an optional label.
    pub fn leaf(kind: impl Into<String>, label: Option<&str>) -> Tree {
        Tree {
            kind: kind.into(),
            label: label.map(str::to_owned),
            children: Vec::new(),
            span: None,
        }
    }

    /// A leaf node carrying `label`.
    pub fn labeled(kind: impl Into<String>, label: impl Into<String>) -> Tree {
        Tree {
            kind: kind.into(),
            label: Some(label.into()),
            children: Vec::new(),
            span: None,
        }
    }

    /// An unlabeled node with the given children.
    pub fn node(kind: impl Into<String>, children: Vec<Tree>) -> Tree {
        Tree {
            kind: kind.into(),
            label: None,
            children,
            span: None,
        }
    }

    pub(crate) fn from_parts(kind: String, label: Option<String>, children: Vec<Tree>) -> Tree {
        debug_assert!(label.is_none() || children.is_empty());
        Tree {
            kind,
            label,
            children,
            span: None,
        }
    }

    pub fn with_span(mut self, span: Span) -> Tree {
        self.span = Some(span);
        self
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn span(&self) -> Option<Span> {
        self.span
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// The type-annotation child, if the first child is one.
    pub fn type_annotation(&self) -> Option<&Tree> {
        self.children
            .first()
            .filter(|c| c.kind == TYPE_ANNOTATION_KIND)
    }

    /// Number of leaf nodes.
    pub fn size(&self) -> usize {
        size(self)
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }

    /// Longest root-to-leaf path counted in nodes (a leaf has height 1).
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Tree::height).max().unwrap_or(0)
    }

    /// Follow a sequence of child indexes from this node.
    pub fn at(&self, path: &[usize]) -> Option<&Tree> {
        path.iter().try_fold(self, |node, &i| node.children.get(i))
    }

    pub(crate) fn children_mut(&mut self) -> &mut Vec<Tree> {
        &mut self.children
    }

    pub(crate) fn set_payload(&mut self, kind: String, label: Option<String>) {
        self.kind = kind;
        self.label = label;
    }

    /// Preorder traversal.
    pub fn preorder(&self) -> impl Iterator<Item = &Tree> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Tree) -> bool {
        self.kind == other.kind && self.label == other.label && self.children == other.children
    }
}

impl Eq for Tree {}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.label.hash(state);
        self.children.hash(state);
    }
}

/// A tree whose leaves may be holes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Template {
    Hole(HoleId),
    Node {
        kind: String,
        label: Option<String>,
        children: Vec<Template>,
    },
}

impl Template {
    pub fn hole(id: u32) -> Template {
        Template::Hole(HoleId(id))
    }

    pub fn node(kind: impl Into<String>, children: Vec<Template>) -> Template {
        Template::Node {
            kind: kind.into(),
            label: None,
            children,
        }
    }

    pub fn labeled(kind: impl Into<String>, label: impl Into<String>) -> Template {
        Template::Node {
            kind: kind.into(),
            label: Some(label.into()),
            children: Vec::new(),
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Template::Hole(_))
    }

    /// Distinct hole ids, in first-occurrence preorder.
    pub fn holes(&self) -> Vec<HoleId> {
        let mut seen = Vec::new();
        self.visit_holes(&mut |h| {
            if !seen.contains(&h) {
                seen.push(h);
            }
        });
        seen
    }

    /// Number of hole positions, counting repeats.
    pub fn hole_occurrences(&self) -> usize {
        let mut n = 0;
        self.visit_holes(&mut |_| n += 1);
        n
    }

    fn visit_holes(&self, f: &mut impl FnMut(HoleId)) {
        match self {
            Template::Hole(h) => f(*h),
            Template::Node { children, .. } => children.iter().for_each(|c| c.visit_holes(f)),
        }
    }

    pub fn size(&self) -> usize {
        size(self)
    }

    /// The tree this template denotes, if it has no holes.
    pub fn to_tree(&self) -> Option<Tree> {
        match self {
            Template::Hole(_) => None,
            Template::Node {
                kind,
                label,
                children,
            } => Some(Tree::from_parts(
                kind.clone(),
                label.clone(),
                children
                    .iter()
                    .map(Template::to_tree)
                    .collect::<Option<_>>()?,
            )),
        }
    }

    /// Rename every hole through `f`.
    pub fn rename_holes(&self, f: &impl Fn(HoleId) -> HoleId) -> Template {
        match self {
            Template::Hole(h) => Template::Hole(f(*h)),
            Template::Node {
                kind,
                label,
                children,
            } => Template::Node {
                kind: kind.clone(),
                label: label.clone(),
                children: children.iter().map(|c| c.rename_holes(f)).collect(),
            },
        }
    }

    /// Renumber holes 1, 2, ... in first-occurrence preorder. Returns the
    /// renumbered template and the map from old ids to new ones.
    pub fn canonicalize(&self) -> (Template, BTreeMap<HoleId, HoleId>) {
        let renaming: BTreeMap<HoleId, HoleId> = self
            .holes()
            .into_iter()
            .zip(1..)
            .map(|(old, new)| (old, HoleId(new)))
            .collect();
        let renamed = self.rename_holes(&|h| renaming[&h]);
        (renamed, renaming)
    }

    /// Follow a sequence of child indexes.
    pub fn at(&self, path: &[usize]) -> Option<&Template> {
        path.iter().try_fold(self, |node, &i| match node {
            Template::Node { children, .. } => children.get(i),
            Template::Hole(_) => None,
        })
    }
}

impl From<&Tree> for Template {
    fn from(t: &Tree) -> Template {
        Template::Node {
            kind: t.kind.clone(),
            label: t.label.clone(),
            children: t.children.iter().map(Template::from).collect(),
        }
    }
}

impl From<Tree> for Template {
    fn from(t: Tree) -> Template {
        Template::from(&t)
    }
}

/// Read-only view shared by trees and templates.
pub trait Term: Clone + Eq + Hash {
    fn hole(&self) -> Option<HoleId>;
    fn kind(&self) -> Option<&str>;
    fn label(&self) -> Option<&str>;
    fn children(&self) -> &[Self];
    fn to_template(&self) -> Template;
}

impl Term for Tree {
    fn hole(&self) -> Option<HoleId> {
        None
    }
    fn kind(&self) -> Option<&str> {
        Some(&self.kind)
    }
    fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
    fn children(&self) -> &[Tree] {
        &self.children
    }
    fn to_template(&self) -> Template {
        Template::from(self)
    }
}

impl Term for Template {
    fn hole(&self) -> Option<HoleId> {
        match self {
            Template::Hole(h) => Some(*h),
            Template::Node { .. } => None,
        }
    }
    fn kind(&self) -> Option<&str> {
        match self {
            Template::Hole(_) => None,
            Template::Node { kind, .. } => Some(kind),
        }
    }
    fn label(&self) -> Option<&str> {
        match self {
            Template::Hole(_) => None,
            Template::Node { label, .. } => label.as_deref(),
        }
    }
    fn children(&self) -> &[Template] {
        match self {
            Template::Hole(_) => &[],
            Template::Node { children, .. } => children,
        }
    }
    fn to_template(&self) -> Template {
        self.clone()
    }
}

/// Number of leaf positions; a hole counts as one leaf.
pub fn size<T: Term>(t: &T) -> usize {
    if t.children().is_empty() {
        1
    } else {
        t.children().iter().map(size).sum()
    }
}

/// A binding of holes to terms (trees, unless stated otherwise).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution<T = Tree>(BTreeMap<HoleId, T>);

impl<T> Default for Substitution<T> {
    fn default() -> Self {
        Substitution(BTreeMap::new())
    }
}

impl<T> Substitution<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, hole: HoleId, value: T) -> Option<T> {
        self.0.insert(hole, value)
    }

    pub fn get(&self, hole: HoleId) -> Option<&T> {
        self.0.get(&hole)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (HoleId, &T)> {
        self.0.iter().map(|(h, t)| (*h, t))
    }

    pub fn holes(&self) -> impl Iterator<Item = HoleId> + '_ {
        self.0.keys().copied()
    }
}

impl<T> FromIterator<(HoleId, T)> for Substitution<T> {
    fn from_iter<I: IntoIterator<Item = (HoleId, T)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstituteError {
    #[error("substitution has no binding for hole {0}")]
    MissingBinding(HoleId),
}

/// Match `template` against `term`. Holes in `term` (when it is itself a
/// template) are opaque leaves: they are matched only by template holes.
///
/// Returns the substitution `alpha` with `alpha(template) == term`, if any.
pub fn match_term<T: Term>(template: &Template, term: &T) -> Option<Substitution<T>> {
    let mut alpha = Substitution::new();
    match_into(template, term, &mut alpha).then_some(alpha)
}

fn match_into<T: Term>(template: &Template, term: &T, alpha: &mut Substitution<T>) -> bool {
    match template {
        Template::Hole(h) => match alpha.get(*h) {
            Some(bound) => bound == term,
            None => {
                alpha.insert(*h, term.clone());
                true
            }
        },
        Template::Node {
            kind,
            label,
            children,
        } => {
            term.hole().is_none()
                && term.kind() == Some(kind.as_str())
                && term.label() == label.as_deref()
                && term.children().len() == children.len()
                && children
                    .iter()
                    .zip(term.children())
                    .all(|(p, c)| match_into(p, c, alpha))
        }
    }
}

/// Match a template against a concrete tree.
pub fn match_tree(template: &Template, tree: &Tree) -> Option<Substitution> {
    match_term(template, tree)
}

/// Replace every hole of `template` by its binding.
pub fn substitute(template: &Template, alpha: &Substitution) -> Result<Tree, SubstituteError> {
    match template {
        Template::Hole(h) => alpha
            .get(*h)
            .cloned()
            .ok_or(SubstituteError::MissingBinding(*h)),
        Template::Node {
            kind,
            label,
            children,
        } => Ok(Tree::from_parts(
            kind.clone(),
            label.clone(),
            children
                .iter()
                .map(|c| substitute(c, alpha))
                .collect::<Result<_, _>>()?,
        )),
    }
}

/// Like [`substitute`], binding holes to templates.
pub fn substitute_template(
    template: &Template,
    alpha: &Substitution<Template>,
) -> Result<Template, SubstituteError> {
    match template {
        Template::Hole(h) => alpha
            .get(*h)
            .cloned()
            .ok_or(SubstituteError::MissingBinding(*h)),
        Template::Node {
            kind,
            label,
            children,
        } => Ok(Template::Node {
            kind: kind.clone(),
            label: label.clone(),
            children: children
                .iter()
                .map(|c| substitute_template(c, alpha))
                .collect::<Result<_, _>>()?,
        }),
    }
}

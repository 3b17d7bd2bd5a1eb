//! Edit patterns: a before template, an after template and a map from the
//! after holes to before holes.
//!
//! A set of concrete edits admits a pattern exactly when generalizing the
//! before trees and the after trees separately gives templates whose after
//! holes each bind, edit by edit, the same subtrees as some before hole.

use std::collections::{BTreeMap, HashMap};

use crate::antiunify::{au2, au_refs};
use crate::ast::{match_tree, substitute, HoleId, Substitution, Template, Tree};
use crate::extract::{ConcreteEdit, Provenance};

/// A rewrite rule `before ↦ after`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditPattern {
    before: Template,
    after: Template,
    hole_map: BTreeMap<HoleId, HoleId>,
    support: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LearnError {
    #[error("no edits to learn from")]
    Empty,
    #[error("after-template hole {0} matches no before-template hole")]
    Inconsistent(HoleId),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("after-template hole {0} is not mapped to a before-template hole")]
    UnmappedHole(HoleId),
    #[error("hole map points at {0}, which is not in the before template")]
    DanglingHole(HoleId),
}

impl EditPattern {
    /// Assemble a pattern, checking that every after hole is mapped to a
    /// hole that occurs in `before`.
    pub fn new(
        before: Template,
        after: Template,
        hole_map: BTreeMap<HoleId, HoleId>,
        support: Vec<Provenance>,
    ) -> Result<EditPattern, PatternError> {
        let before_holes = before.holes();
        for h in after.holes() {
            let target = hole_map.get(&h).ok_or(PatternError::UnmappedHole(h))?;
            if !before_holes.contains(target) {
                return Err(PatternError::DanglingHole(*target));
            }
        }
        Ok(EditPattern {
            before,
            after,
            hole_map,
            support,
        })
    }

    pub fn before(&self) -> &Template {
        &self.before
    }

    pub fn after(&self) -> &Template {
        &self.after
    }

    pub fn hole_map(&self) -> &BTreeMap<HoleId, HoleId> {
        &self.hole_map
    }

    pub fn support(&self) -> &[Provenance] {
        &self.support
    }

    /// The before template is a bare hole, so the rule fires on anything.
    pub fn is_vacuous(&self) -> bool {
        self.before.is_hole()
    }
}

/// Learn the pattern shared by `edits`, or report that none exists.
pub fn learn_pattern(edits: &[ConcreteEdit]) -> Result<EditPattern, LearnError> {
    let befores: Vec<&Tree> = edits.iter().map(ConcreteEdit::before).collect();
    let afters: Vec<&Tree> = edits.iter().map(ConcreteEdit::after).collect();
    let input = au_refs(&befores).ok_or(LearnError::Empty)?;
    let output = au_refs(&afters).ok_or(LearnError::Empty)?;

    fn tuple(subs: &[Substitution], h: HoleId) -> Vec<&Tree> {
        subs.iter()
            .map(|alpha| alpha.get(h).expect("every hole is bound"))
            .collect()
    }
    // lowest input hole per tuple
    let mut by_tuple: HashMap<Vec<&Tree>, HoleId> = HashMap::new();
    let mut input_holes = input.template.holes();
    input_holes.sort_unstable();
    for h in input_holes {
        by_tuple.entry(tuple(&input.substitutions, h)).or_insert(h);
    }

    let mut hole_map = BTreeMap::new();
    for h in output.template.holes() {
        let source = by_tuple
            .get(&tuple(&output.substitutions, h))
            .ok_or(LearnError::Inconsistent(h))?;
        hole_map.insert(h, *source);
    }
    Ok(EditPattern {
        before: input.template,
        after: output.template,
        hole_map,
        support: edits.iter().map(|e| e.provenance.clone()).collect(),
    })
}

/// Learn the pattern of `pattern`'s support plus `edit` from the cached
/// templates alone. Gives the same result as [`learn_pattern`] over the
/// whole set: a sub-template of a least general template is itself the least
/// general template of its column, so template-vs-tree keys identify the
/// same positions as full tuples do.
pub fn extend_pattern(
    pattern: &EditPattern,
    edit: &ConcreteEdit,
) -> Result<EditPattern, LearnError> {
    let (before, in_old, in_new) = au2(&pattern.before, &Template::from(edit.before()));
    let (after, out_old, out_new) = au2(&pattern.after, &Template::from(edit.after()));

    let mut by_key: HashMap<(&Template, &Template), HoleId> = HashMap::new();
    let mut input_holes = before.holes();
    input_holes.sort_unstable();
    for h in input_holes {
        let key = (in_old.get(h).expect("bound"), in_new.get(h).expect("bound"));
        by_key.entry(key).or_insert(h);
    }
    let mut hole_map = BTreeMap::new();
    for h in after.holes() {
        // express the old side in before-template hole names
        let old = out_old
            .get(h)
            .expect("bound")
            .rename_holes(&|x| pattern.hole_map[&x]);
        let key = (&old, out_new.get(h).expect("bound"));
        let source = by_key.get(&key).ok_or(LearnError::Inconsistent(h))?;
        hole_map.insert(h, *source);
    }
    let mut support = pattern.support.clone();
    support.push(edit.provenance.clone());
    Ok(EditPattern {
        before,
        after,
        hole_map,
        support,
    })
}

/// Rewrite `tree` with `pattern`; `None` when the before template does not
/// match.
pub fn apply_pattern(pattern: &EditPattern, tree: &Tree) -> Option<Tree> {
    let alpha = match_tree(&pattern.before, tree)?;
    let beta: Substitution = pattern
        .hole_map
        .iter()
        .map(|(&out, &inp)| {
            (
                out,
                alpha
                    .get(inp)
                    .expect("mapped hole occurs in before")
                    .clone(),
            )
        })
        .collect();
    Some(substitute(&pattern.after, &beta).expect("every after hole is mapped"))
}

/// Does `pattern` explain `edit` exactly?
pub fn explains(pattern: &EditPattern, edit: &ConcreteEdit) -> bool {
    apply_pattern(pattern, edit.before()).as_ref() == Some(edit.after())
}

/// Positions anti-unification may not generalize inside a cluster: a child
/// of kind `child_kind` under a node of kind `parent_kind`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorSet(pub Vec<(String, String)>);

impl Default for AnchorSet {
    fn default() -> Self {
        AnchorSet(vec![("call".into(), "name".into())])
    }
}

impl AnchorSet {
    pub fn none() -> AnchorSet {
        AnchorSet(Vec::new())
    }

    fn guards(&self, parent: &Tree, child: &Tree) -> bool {
        self.0
            .iter()
            .any(|(p, c)| parent.kind() == p && child.kind() == c)
    }
}

/// False when generalizing the two before trees would turn an anchor
/// position (by default the method name of a call) into a hole.
pub fn anchors_compatible(a: &ConcreteEdit, b: &ConcreteEdit, anchors: &AnchorSet) -> bool {
    fn walk(x: &Tree, y: &Tree, anchors: &AnchorSet) -> bool {
        let kept = x.kind() == y.kind()
            && x.label() == y.label()
            && x.children().len() == y.children().len();
        if !kept {
            return true;
        }
        x.children().iter().zip(y.children()).all(|(cx, cy)| {
            let guarded = anchors.guards(x, cx) || anchors.guards(y, cy);
            !(guarded && cx != cy) && walk(cx, cy, anchors)
        })
    }
    walk(a.before(), b.before(), anchors)
}

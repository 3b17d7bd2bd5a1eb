//! Brute-force oracles. They enumerate candidate templates directly and
//! share no code with the library's generalization or learning routines;
//! only template matching is reused.

use std::collections::HashSet;

use editmine::ast::{match_term, HoleId, Template, Tree};

/// A template made from a tree by cutting an antichain of subtrees.
#[derive(Clone, Debug)]
pub struct Cut {
    /// Holes numbered 1.. in preorder, one per cut position.
    pub template: Template,
    /// The cut subtrees, in hole order.
    pub subtrees: Vec<Tree>,
}

fn number_holes(t: &Template, next: &mut u32) -> Template {
    match t {
        Template::Hole(_) => {
            *next += 1;
            Template::hole(*next)
        }
        Template::Node {
            kind,
            label,
            children,
        } => Template::Node {
            kind: kind.clone(),
            label: label.clone(),
            children: children.iter().map(|c| number_holes(c, next)).collect(),
        },
    }
}

fn raw_cuts(t: &Tree) -> Vec<(Template, Vec<Tree>)> {
    let mut out = vec![(Template::hole(0), vec![t.clone()])];
    let mut partial: Vec<(Vec<Template>, Vec<Tree>)> = vec![(Vec::new(), Vec::new())];
    for child in t.children() {
        let options = raw_cuts(child);
        let mut next = Vec::with_capacity(partial.len() * options.len());
        for (kids, subs) in &partial {
            for (tpl, cut) in &options {
                let mut kids = kids.clone();
                kids.push(tpl.clone());
                let mut subs = subs.clone();
                subs.extend(cut.iter().cloned());
                next.push((kids, subs));
            }
        }
        partial = next;
    }
    for (children, subs) in partial {
        out.push((
            Template::Node {
                kind: t.kind().to_owned(),
                label: t.label().map(str::to_owned),
                children,
            },
            subs,
        ));
    }
    out
}

/// Every cut of `t`, each cut position its own hole. Includes the bare hole
/// and the hole-free copy of `t`.
pub fn cuts(t: &Tree) -> Vec<Cut> {
    raw_cuts(t)
        .into_iter()
        .map(|(tpl, subtrees)| Cut {
            template: number_holes(&tpl, &mut 0),
            subtrees,
        })
        .collect()
}

/// All set partitions of `items`, as block index per item.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn go(n: usize, blocks: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for b in 0..=blocks {
            current.push(b);
            go(n, blocks.max(b + 1), current, out);
            current.pop();
        }
    }
    go(n, 0, &mut current, &mut out);
    out
}

/// Every template `τ` with `τ` matching `t`: a cut of `t` with any merging
/// of holes whose subtrees are equal.
pub fn generalizations(t: &Tree) -> Vec<Template> {
    let mut out = Vec::new();
    for cut in cuts(t) {
        let n = cut.subtrees.len();
        for blocks in partitions(n) {
            let consistent = (0..n).all(|i| {
                (0..n).all(|j| blocks[i] != blocks[j] || cut.subtrees[i] == cut.subtrees[j])
            });
            if consistent {
                let id = |h: HoleId| HoleId(blocks[h.0 as usize - 1] as u32 + 1);
                out.push(cut.template.rename_holes(&id));
            }
        }
    }
    out
}

/// Outcome of comparing a proposed generalization against brute force.
#[derive(Debug)]
pub enum LggVerdict {
    Ok,
    /// The proposal does not generalize both inputs.
    NotCommon,
    /// A common generalization the proposal is not an instance of.
    NotLeast(Template),
}

/// Checks that `proposed` is a least general common generalization of `a`
/// and `b`: it generalizes both, and every common generalization found by
/// enumeration generalizes it. Equivalently it equals, up to hole renaming,
/// the unique most specific element of the candidate set.
pub fn check_lgg(a: &Tree, b: &Tree, proposed: &Template) -> LggVerdict {
    let canon = proposed.canonicalize().0;
    if match_term(&canon, a).is_none() || match_term(&canon, b).is_none() {
        return LggVerdict::NotCommon;
    }
    let mut found = false;
    for c in generalizations(a) {
        if match_term(&c, b).is_none() {
            continue;
        }
        if match_term(&c, &canon).is_none() {
            return LggVerdict::NotLeast(c);
        }
        found |= c.canonicalize().0 == canon;
    }
    if found {
        LggVerdict::Ok
    } else {
        LggVerdict::NotCommon
    }
}

/// Whether some rewrite rule `before ↦ after` with a hole map explains
/// every `(before, after)` pair. Sharing inside a template is never needed
/// for existence, so cuts with distinct holes suffice on both sides: a pair
/// of cuts works when each after hole's bindings across the edits coincide
/// with those of some hole of the same before cut.
pub fn rule_exists(edits: &[(Tree, Tree)]) -> bool {
    let Some((first_before, first_after)) = edits.first() else {
        return false;
    };
    rule_exists_with(&cuts(first_before), &cuts(first_after), edits)
}

/// [`rule_exists`] with the cuts of the first edit's trees precomputed.
pub fn rule_exists_with(before_cuts: &[Cut], after_cuts: &[Cut], edits: &[(Tree, Tree)]) -> bool {
    let before: Vec<HashSet<Vec<Tree>>> = before_cuts
        .iter()
        .filter_map(|cut| hole_tuples(cut, edits.iter().map(|e| &e.0)))
        .map(|tuples| tuples.into_iter().collect())
        .collect();
    after_cuts
        .iter()
        .filter_map(|cut| hole_tuples(cut, edits.iter().map(|e| &e.1)))
        .any(|needed| {
            before
                .iter()
                .any(|have| needed.iter().all(|t| have.contains(t)))
        })
}

/// For a cut matching every tree, the per-hole binding tuples.
fn hole_tuples<'a>(cut: &Cut, trees: impl Iterator<Item = &'a Tree>) -> Option<Vec<Vec<Tree>>> {
    let n = cut.subtrees.len();
    let mut tuples = vec![Vec::new(); n];
    for t in trees {
        let alpha = match_term(&cut.template, t)?;
        for (h, tuple) in tuples.iter_mut().enumerate() {
            tuple.push(alpha.get(HoleId(h as u32 + 1)).expect("bound").clone());
        }
    }
    Some(tuples)
}

/// A fixed set of trees with every cut pre-matched against every tree, so
/// the rule-existence check runs on integer ids. Same search as
/// [`rule_exists`].
pub struct Universe {
    pub trees: Vec<Tree>,
    /// `matches[i][c][j]`: ids bound by the holes of cut `c` of tree `i`
    /// when matched against tree `j`, if it matches.
    matches: Vec<Vec<Vec<Option<Vec<u32>>>>>,
}

impl Universe {
    pub fn new(trees: Vec<Tree>) -> Universe {
        let mut ids: std::collections::HashMap<Tree, u32> = std::collections::HashMap::new();
        let mut intern = |t: &Tree| {
            let next = ids.len() as u32;
            *ids.entry(t.clone()).or_insert(next)
        };
        let matches = trees
            .iter()
            .map(|i| {
                cuts(i)
                    .iter()
                    .map(|cut| {
                        trees
                            .iter()
                            .map(|j| {
                                let alpha = match_term(&cut.template, j)?;
                                Some(
                                    (1..=cut.subtrees.len() as u32)
                                        .map(|h| intern(alpha.get(HoleId(h)).expect("bound")))
                                        .collect(),
                                )
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Universe { trees, matches }
    }

    /// Per-hole id tuples of cut `c` of tree `first` over `others`, if the
    /// cut matches them all.
    fn tuples(
        &self,
        first: usize,
        c: usize,
        others: impl Iterator<Item = usize>,
        out: &mut Vec<Vec<u32>>,
    ) -> bool {
        out.clear();
        for (k, j) in others.enumerate() {
            let Some(bound) = &self.matches[first][c][j] else {
                return false;
            };
            if k == 0 {
                out.extend(bound.iter().map(|&id| vec![id]));
            } else {
                out.iter_mut()
                    .zip(bound)
                    .for_each(|(tuple, &id)| tuple.push(id));
            }
        }
        true
    }

    /// Whether a rule explains every edit `(before index, after index)`.
    pub fn rule_exists(&self, edits: &[(usize, usize)]) -> bool {
        let Some(&(b0, a0)) = edits.first() else {
            return false;
        };
        let mut have = Vec::new();
        let mut before: Vec<Vec<Vec<u32>>> = Vec::new();
        for c in 0..self.matches[b0].len() {
            if self.tuples(b0, c, edits.iter().map(|e| e.0), &mut have) {
                before.push(have.clone());
            }
        }
        let mut needed = Vec::new();
        (0..self.matches[a0].len()).any(|c| {
            self.tuples(a0, c, edits.iter().map(|e| e.1), &mut needed)
                && before
                    .iter()
                    .any(|have| needed.iter().all(|t| have.contains(t)))
        })
    }
}

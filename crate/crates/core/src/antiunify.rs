//! First-order anti-unification: the least general template of a sequence
//! of terms, with one substitution per input.
//!
//! All inputs are walked in lockstep. Where their roots agree on kind,
//! label and arity the node is kept and the children are generalized;
//! anywhere else the whole position becomes a hole. Two positions get the
//! same hole exactly when their tuples of subtrees are equal. Holes in input
//! templates are opaque: any position holding one is generalized to a hole.

use std::collections::HashMap;

use crate::ast::{HoleId, Substitution, Template, Term, Tree};

/// A template together with the substitution recovering each input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generalization<T = Tree> {
    pub template: Template,
    pub substitutions: Vec<Substitution<T>>,
}

struct Walk<'a, T> {
    holes: HashMap<Vec<&'a T>, HoleId>,
    substitutions: Vec<Substitution<T>>,
}

impl<'a, T: Term> Walk<'a, T> {
    fn generalize(&mut self, column: &[&'a T]) -> Template {
        let head = column[0];
        let agree = head.hole().is_none()
            && column[1..].iter().all(|t| {
                t.hole().is_none()
                    && t.kind() == head.kind()
                    && t.label() == head.label()
                    && t.children().len() == head.children().len()
            });
        if !agree {
            return self.hole_for(column);
        }
        let children = (0..head.children().len())
            .map(|i| {
                let next: Vec<&'a T> = column.iter().map(|t| &t.children()[i]).collect();
                self.generalize(&next)
            })
            .collect();
        Template::Node {
            kind: head.kind().expect("not a hole").to_owned(),
            label: head.label().map(str::to_owned),
            children,
        }
    }

    fn hole_for(&mut self, column: &[&'a T]) -> Template {
        if let Some(&h) = self.holes.get(column) {
            return Template::Hole(h);
        }
        let h = HoleId(self.holes.len() as u32 + 1);
        self.holes.insert(column.to_vec(), h);
        for (alpha, t) in self.substitutions.iter_mut().zip(column) {
            alpha.insert(h, (*t).clone());
        }
        Template::Hole(h)
    }
}

/// Generalize all of `terms` at once. Hole ids are 1, 2, ... in
/// first-occurrence preorder. `None` for an empty input.
pub fn au_many<T: Term>(terms: &[T]) -> Option<Generalization<T>> {
    au_refs(&terms.iter().collect::<Vec<_>>())
}

/// [`au_many`] over borrowed terms.
pub fn au_refs<T: Term>(terms: &[&T]) -> Option<Generalization<T>> {
    if terms.is_empty() {
        return None;
    }
    let mut walk = Walk {
        holes: HashMap::new(),
        substitutions: vec![Substitution::new(); terms.len()],
    };
    let template = walk.generalize(terms);
    Some(Generalization {
        template,
        substitutions: walk.substitutions,
    })
}

/// Generalize two terms.
pub fn au2<T: Term>(a: &T, b: &T) -> (Template, Substitution<T>, Substitution<T>) {
    let g = au_refs(&[a, b]).expect("two inputs");
    let mut subs = g.substitutions.into_iter();
    let (sa, sb) = (subs.next().expect("first"), subs.next().expect("second"));
    (g.template, sa, sb)
}

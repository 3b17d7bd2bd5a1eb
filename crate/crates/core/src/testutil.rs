//! Shared generators for unit tests.

use proptest::prelude::*;

use crate::ast::{parse_tree, Template, Tree};

pub fn t(text: &str) -> Tree {
    parse_tree(text).unwrap_or_else(|e| panic!("bad test tree {text:?}: {e}"))
}

pub fn tpl(text: &str) -> Template {
    crate::ast::parse_template(text).unwrap_or_else(|e| panic!("bad test template {text:?}: {e}"))
}

/// Trees over a small alphabet: interior kinds `a b c`, leaf kinds `x y`
/// with labels `p q r`. Labeled leaves only.
pub fn arb_tree(max_depth: u32, max_nodes: u32) -> impl Strategy<Value = Tree> {
    let leaf = (
        prop_oneof![Just("x"), Just("y")],
        prop_oneof![Just("p"), Just("q"), Just("r")],
    )
        .prop_map(|(k, l)| Tree::labeled(k, l));
    leaf.prop_recursive(max_depth, max_nodes, 4, |inner| {
        (
            prop_oneof![Just("a"), Just("b"), Just("c")],
            prop::collection::vec(inner, 1..4),
        )
            .prop_map(|(k, children)| Tree::node(k, children))
    })
}

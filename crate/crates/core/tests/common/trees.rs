//! Tree universes: exhaustive enumeration and seeded random generation.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

use editmine::ast::Tree;

/// Node alphabet. Leaves take a kind and one of `labels` (`None` for an
/// unlabeled leaf); interior nodes take a kind only.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub kinds: Vec<&'static str>,
    pub labels: Vec<Option<&'static str>>,
}

impl Alphabet {
    pub fn new(kinds: &[&'static str], labels: &[Option<&'static str>]) -> Alphabet {
        Alphabet {
            kinds: kinds.to_vec(),
            labels: labels.to_vec(),
        }
    }

    fn leaf(&self, kind: &str, label: Option<&str>) -> Tree {
        Tree::leaf(kind, label)
    }
}

/// Every tree with exactly `n` nodes.
pub fn trees_of_size(n: usize, a: &Alphabet) -> Vec<Tree> {
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if n == 1 {
        for k in &a.kinds {
            for l in &a.labels {
                out.push(a.leaf(k, *l));
            }
        }
        return out;
    }
    for forest in forests_of_size(n - 1, a) {
        for k in &a.kinds {
            out.push(Tree::node(*k, forest.clone()));
        }
    }
    out
}

/// Every nonempty sequence of trees with `n` nodes in total.
fn forests_of_size(n: usize, a: &Alphabet) -> Vec<Vec<Tree>> {
    let mut out = Vec::new();
    for first in 1..=n {
        let heads = trees_of_size(first, a);
        let tails = if first == n {
            vec![Vec::new()]
        } else {
            forests_of_size(n - first, a)
        };
        for h in &heads {
            for tail in &tails {
                let mut f = vec![h.clone()];
                f.extend(tail.iter().cloned());
                out.push(f);
            }
        }
    }
    out
}

/// Every tree with at most `n` nodes.
pub fn trees_up_to(n: usize, a: &Alphabet) -> Vec<Tree> {
    (1..=n).flat_map(|k| trees_of_size(k, a)).collect()
}

/// A random tree with exactly `n` nodes.
pub fn random_tree(rng: &mut StdRng, n: usize, a: &Alphabet) -> Tree {
    let kind = *a.kinds.choose(rng).expect("kinds");
    if n <= 1 {
        return a.leaf(kind, *a.labels.choose(rng).expect("labels"));
    }
    // split the remaining nodes among 1..=3 children
    let mut left = n - 1;
    let mut children = Vec::new();
    while left > 0 {
        let take = if children.len() == 2 {
            left
        } else {
            rng.random_range(1..=left)
        };
        children.push(random_tree(rng, take, a));
        left -= take;
    }
    Tree::node(kind, children)
}

pub fn random_tree_up_to(rng: &mut StdRng, max: usize, a: &Alphabet) -> Tree {
    let n = rng.random_range(1..=max);
    random_tree(rng, n, a)
}

fn subtree_paths(t: &Tree, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in t.children().iter().enumerate() {
        prefix.push(i);
        subtree_paths(c, prefix, out);
        prefix.pop();
    }
}

pub fn paths(t: &Tree) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    subtree_paths(t, &mut Vec::new(), &mut out);
    out
}

/// Copy of `t` with the subtree at `path` replaced.
pub fn replace_at(t: &Tree, path: &[usize], with: Tree) -> Tree {
    match path.split_first() {
        None => with,
        Some((&i, rest)) => {
            let children = t
                .children()
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    if k == i {
                        replace_at(c, rest, with.clone())
                    } else {
                        c.clone()
                    }
                })
                .collect();
            if t.is_leaf() {
                t.clone()
            } else {
                Tree::node(t.kind(), children)
            }
        }
    }
}

/// A random variation of `t` of bounded size: a few subtrees replaced by
/// random trees or by copies of other subtrees of `t`.
pub fn mutate(rng: &mut StdRng, t: &Tree, max: usize, a: &Alphabet) -> Tree {
    let mut out = t.clone();
    for _ in 0..rng.random_range(1..=3) {
        let ps = paths(&out);
        let p = ps.choose(rng).expect("root").clone();
        let src = paths(t);
        let donor = if rng.random_bool(0.4) {
            t.at(src.choose(rng).expect("root")).expect("path").clone()
        } else {
            random_tree_up_to(rng, 3, a)
        };
        let next = replace_at(&out, &p, donor);
        if next.node_count() <= max {
            out = next;
        }
    }
    out
}

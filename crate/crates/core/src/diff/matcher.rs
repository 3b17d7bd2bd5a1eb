//! Node matching between two trees.
//!
//! 1. Top-down: maximal isomorphic subtrees of height >= 2 are matched
//!    greedily, largest first, by fingerprint. Among equal candidates the one
//!    with the smallest target preorder index wins.
//! 2. Bottom-up: an unmatched interior source node is matched to the
//!    same-kind unmatched target node with the highest dice similarity over
//!    already matched descendants, provided it exceeds [`MIN_DICE`]. Roots of
//!    the same kind are always matched.
//! 3. Recovery: whenever a container pair is matched in step 2, their
//!    unmatched children are aligned by LCS, first on isomorphism and then
//!    on kind, recursively.

use std::collections::HashMap;

use super::flat::Flat;
use super::NodeMapping;

pub(crate) const MIN_HEIGHT: usize = 2;
pub(crate) const MIN_DICE: f64 = 0.5;

pub(crate) fn match_trees(src: &Flat<'_>, dst: &Flat<'_>) -> NodeMapping {
    let mut m = NodeMapping::empty(src.len(), dst.len());
    top_down(src, dst, &mut m);
    bottom_up(src, dst, &mut m);
    m
}

fn top_down(src: &Flat<'_>, dst: &Flat<'_>, m: &mut NodeMapping) {
    let mut by_fingerprint: HashMap<u64, Vec<usize>> = HashMap::new();
    for d in 0..dst.len() {
        if dst.height[d] >= MIN_HEIGHT {
            by_fingerprint
                .entry(dst.fingerprint[d])
                .or_default()
                .push(d);
        }
    }
    let mut order: Vec<usize> = (0..src.len())
        .filter(|&s| src.height[s] >= MIN_HEIGHT)
        .collect();
    order.sort_by_key(|&s| (std::cmp::Reverse(src.height[s]), s));

    for s in order {
        if m.src_to_dst[s].is_some() {
            continue;
        }
        let Some(candidates) = by_fingerprint.get(&src.fingerprint[s]) else {
            continue;
        };
        let found = candidates
            .iter()
            .copied()
            .find(|&d| m.dst_to_src[d].is_none() && src.isomorphic(s, dst, d));
        if let Some(d) = found {
            map_subtree(src, m, s, d);
        }
    }
}

/// Map two isomorphic subtrees node by node (preorder ranges line up).
fn map_subtree(src: &Flat<'_>, m: &mut NodeMapping, s: usize, d: usize) {
    for k in 0..=src.descendants[s] {
        m.link(s + k, d + k);
    }
}

fn bottom_up(src: &Flat<'_>, dst: &Flat<'_>, m: &mut NodeMapping) {
    for s in src.postorder() {
        if m.src_to_dst[s].is_some() || src.is_leaf(s) {
            if s == 0 {
                match_roots(src, dst, m);
            }
            continue;
        }
        if let Some(d) = best_container(src, dst, m, s) {
            m.link(s, d);
            recover(src, dst, m, s, d);
        } else if s == 0 {
            match_roots(src, dst, m);
        }
    }
}

fn match_roots(src: &Flat<'_>, dst: &Flat<'_>, m: &mut NodeMapping) {
    if src.len() == 0 || dst.len() == 0 {
        return;
    }
    if m.src_to_dst[0].is_none()
        && m.dst_to_src[0].is_none()
        && src.nodes[0].kind() == dst.nodes[0].kind()
    {
        m.link(0, 0);
        recover(src, dst, m, 0, 0);
    }
}

fn best_container(src: &Flat<'_>, dst: &Flat<'_>, m: &NodeMapping, s: usize) -> Option<usize> {
    let kind = src.nodes[s].kind();
    let mut candidates: Vec<usize> = Vec::new();
    for k in 1..=src.descendants[s] {
        let Some(mut d) = m.src_to_dst[s + k] else {
            continue;
        };
        while let Some(p) = dst.parent[d] {
            d = p;
            if m.dst_to_src[d].is_none()
                && !dst.is_leaf(d)
                && dst.nodes[d].kind() == kind
                && !candidates.contains(&d)
            {
                candidates.push(d);
            }
        }
    }
    candidates.sort_unstable();

    let mut best: Option<(f64, usize)> = None;
    for d in candidates {
        let common = (1..=src.descendants[s])
            .filter(|&k| matches!(m.src_to_dst[s + k], Some(x) if dst.contains(d, x) && x != d))
            .count();
        let total = src.descendants[s] + dst.descendants[d];
        let dice = 2.0 * common as f64 / total as f64;
        if dice > MIN_DICE && best.is_none_or(|(b, _)| dice > b) {
            best = Some((dice, d));
        }
    }
    best.map(|(_, d)| d)
}

fn recover(src: &Flat<'_>, dst: &Flat<'_>, m: &mut NodeMapping, s: usize, d: usize) {
    let free_src = |m: &NodeMapping| -> Vec<usize> {
        src.children[s]
            .iter()
            .copied()
            .filter(|&c| m.src_to_dst[c].is_none())
            .collect()
    };
    let free_dst = |m: &NodeMapping| -> Vec<usize> {
        dst.children[d]
            .iter()
            .copied()
            .filter(|&c| m.dst_to_src[c].is_none())
            .collect()
    };

    let (a, b) = (free_src(m), free_dst(m));
    for (x, y) in lcs(&a, &b, |x, y| src.isomorphic(x, dst, y)) {
        map_subtree(src, m, x, y);
    }

    let (a, b) = (free_src(m), free_dst(m));
    for (x, y) in lcs(&a, &b, |x, y| src.nodes[x].kind() == dst.nodes[y].kind()) {
        m.link(x, y);
        recover(src, dst, m, x, y);
    }
}

/// Longest common subsequence of `a` and `b` under `eq`, as index pairs.
pub(crate) fn lcs(
    a: &[usize],
    b: &[usize],
    eq: impl Fn(usize, usize) -> bool,
) -> Vec<(usize, usize)> {
    let (n, k) = (a.len(), b.len());
    if n == 0 || k == 0 {
        return Vec::new();
    }
    let mut table = vec![vec![0u32; k + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..k).rev() {
            table[i][j] = if eq(a[i], b[j]) {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(table[0][0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < k {
        if eq(a[i], b[j]) && table[i][j] == table[i + 1][j + 1] + 1 {
            out.push((a[i], b[j]));
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

//! Edit script generation from a node mapping.
//!
//! The script is produced by replaying it on a working copy of the source,
//! so every path is valid at the moment its edit runs. Paths address a
//! document whose top level holds the tree at index 0.
//!
//! Order: all updates; then, walking the target breadth-first, inserts and
//! moves that put each target node's counterpart under the right parent at
//! the right position; finally deletes, bottom-up.

use std::collections::HashSet;

use super::flat::Flat;
use super::{EditSubject, NodeMapping, NodePath, NodePayload, TreeEdit};

const DOC: usize = 0;

struct Work {
    payload: Vec<NodePayload>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Work {
    fn from_source(src: &Flat<'_>) -> Work {
        let n = src.len() + 1;
        let mut work = Work {
            payload: Vec::with_capacity(n),
            parent: Vec::with_capacity(n),
            children: Vec::with_capacity(n),
        };
        work.payload.push(NodePayload::new("<document>", None));
        work.parent.push(None);
        work.children
            .push(if src.len() > 0 { vec![1] } else { vec![] });
        for i in 0..src.len() {
            work.payload.push(NodePayload::of(src.nodes[i]));
            work.parent.push(Some(src.parent[i].map_or(DOC, |p| p + 1)));
            work.children
                .push(src.children[i].iter().map(|c| c + 1).collect());
        }
        work
    }

    fn index_in_parent(&self, id: usize) -> usize {
        let parent = self.parent[id].expect("attached node");
        self.children[parent]
            .iter()
            .position(|&c| c == id)
            .expect("child listed under its parent")
    }

    fn path(&self, mut id: usize) -> NodePath {
        let mut path = Vec::new();
        while id != DOC {
            path.push(self.index_in_parent(id));
            id = self.parent[id].expect("attached node");
        }
        path.reverse();
        NodePath(path)
    }

    fn detach(&mut self, id: usize) {
        let k = self.index_in_parent(id);
        let parent = self.parent[id].take().expect("attached node");
        self.children[parent].remove(k);
    }

    fn attach(&mut self, id: usize, parent: usize, k: usize) {
        self.children[parent].insert(k, id);
        self.parent[id] = Some(parent);
    }

    fn push_leaf(&mut self, payload: NodePayload) -> usize {
        self.payload.push(payload);
        self.parent.push(None);
        self.children.push(Vec::new());
        self.payload.len() - 1
    }
}

pub(crate) fn generate(
    src: &Flat<'_>,
    dst: &Flat<'_>,
    m: &NodeMapping,
) -> (Vec<TreeEdit>, Vec<EditSubject>) {
    let mut work = Work::from_source(src);
    let mut edits = Vec::new();
    let mut subjects = Vec::new();

    for (s, d) in m.pairs() {
        if src.nodes[s].label() != dst.nodes[d].label() {
            let to = NodePayload::of(dst.nodes[d]);
            edits.push(TreeEdit::Update {
                path: work.path(s + 1),
                from: work.payload[s + 1].clone(),
                to: to.clone(),
            });
            subjects.push(EditSubject {
                source: Some(s),
                target: Some(d),
            });
            work.payload[s + 1] = to;
        }
    }

    // counterpart of each target node in the working tree
    let mut partner: Vec<Option<usize>> = (0..dst.len())
        .map(|d| m.dst_to_src[d].map(|s| s + 1))
        .collect();

    let align = |work: &mut Work,
                 partner: &mut Vec<Option<usize>>,
                 edits: &mut Vec<TreeEdit>,
                 subjects: &mut Vec<EditSubject>,
                 parent: usize,
                 targets: &[usize]| {
        let keep = in_order_children(work, partner, parent, targets);
        let mut prev: Option<usize> = None;
        for &x in targets {
            let slot = |work: &Work| prev.map_or(0, |p| work.index_in_parent(p) + 1);
            match partner[x] {
                None => {
                    let payload = NodePayload::of(dst.nodes[x]);
                    let k = slot(work);
                    let w = work.push_leaf(payload.clone());
                    edits.push(TreeEdit::Insert {
                        node: payload,
                        parent: work.path(parent),
                        position: k,
                    });
                    subjects.push(EditSubject {
                        source: None,
                        target: Some(x),
                    });
                    work.attach(w, parent, k);
                    partner[x] = Some(w);
                }
                Some(w) if keep.contains(&w) => {}
                Some(w) => {
                    let from = work.path(w);
                    work.detach(w);
                    let k = slot(work);
                    edits.push(TreeEdit::Move {
                        path: from,
                        parent: work.path(parent),
                        position: k,
                    });
                    subjects.push(EditSubject {
                        source: Some(w - 1),
                        target: Some(x),
                    });
                    work.attach(w, parent, k);
                }
            }
            prev = partner[x];
        }
    };

    if dst.len() > 0 {
        align(
            &mut work,
            &mut partner,
            &mut edits,
            &mut subjects,
            DOC,
            &[0],
        );
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(y) = queue.pop_front() {
            let z = partner[y].expect("visited target nodes have a counterpart");
            align(
                &mut work,
                &mut partner,
                &mut edits,
                &mut subjects,
                z,
                &dst.children[y],
            );
            queue.extend(dst.children[y].iter().copied());
        }
    }

    let mut doomed = Vec::new();
    postorder(&work, DOC, &mut doomed);
    for id in doomed {
        if id == DOC || id > src.len() || m.src_to_dst[id - 1].is_some() {
            continue;
        }
        let path = work.path(id);
        let (position, parent) = path.0.split_last().expect("non-document node");
        edits.push(TreeEdit::Delete {
            node: work.payload[id].clone(),
            parent: NodePath(parent.to_vec()),
            position: *position,
        });
        subjects.push(EditSubject {
            source: Some(id - 1),
            target: None,
        });
        work.detach(id);
    }

    (edits, subjects)
}

/// Counterparts already under `parent` whose relative order agrees with
/// `targets`: the longest increasing run of their current positions.
fn in_order_children(
    work: &Work,
    partner: &[Option<usize>],
    parent: usize,
    targets: &[usize],
) -> HashSet<usize> {
    let present: Vec<(usize, usize)> = targets
        .iter()
        .filter_map(|&x| partner[x])
        .filter(|&w| work.parent[w] == Some(parent))
        .map(|w| (work.index_in_parent(w), w))
        .collect();
    longest_increasing(&present)
        .into_iter()
        .map(|i| present[i].1)
        .collect()
}

/// Indexes of a longest strictly increasing subsequence by `.0`.
fn longest_increasing(items: &[(usize, usize)]) -> Vec<usize> {
    // tails[len - 1] = index of the smallest tail of an increasing run of length len
    let mut tails: Vec<usize> = Vec::new();
    let mut back: Vec<Option<usize>> = vec![None; items.len()];
    for i in 0..items.len() {
        let len = tails.partition_point(|&t| items[t].0 < items[i].0);
        back[i] = len.checked_sub(1).map(|l| tails[l]);
        if len == tails.len() {
            tails.push(i);
        } else {
            tails[len] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = back[i];
    }
    out.reverse();
    out
}

fn postorder(work: &Work, id: usize, out: &mut Vec<usize>) {
    for &c in &work.children[id] {
        postorder(work, c, out);
    }
    out.push(id);
}

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::ast::Tree;

/// Preorder-indexed view of a tree. Node `i`'s descendants occupy
/// `i + 1 ..= i + descendants[i]`.
pub(crate) struct Flat<'a> {
    pub nodes: Vec<&'a Tree>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub height: Vec<usize>,
    pub depth: Vec<usize>,
    pub descendants: Vec<usize>,
    pub fingerprint: Vec<u64>,
}

impl<'a> Flat<'a> {
    pub fn new(root: &'a Tree) -> Flat<'a> {
        let mut flat = Flat {
            nodes: Vec::new(),
            parent: Vec::new(),
            children: Vec::new(),
            height: Vec::new(),
            depth: Vec::new(),
            descendants: Vec::new(),
            fingerprint: Vec::new(),
        };
        flat.visit(root, None, 0);
        flat
    }

    fn visit(&mut self, node: &'a Tree, parent: Option<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.parent.push(parent);
        self.children
            .push(Vec::with_capacity(node.children().len()));
        self.height.push(1);
        self.depth.push(depth);
        self.descendants.push(0);
        self.fingerprint.push(0);

        let mut hasher = DefaultHasher::new();
        node.kind().hash(&mut hasher);
        node.label().hash(&mut hasher);
        node.children().len().hash(&mut hasher);
        let mut height = 0;
        for child in node.children() {
            let c = self.visit(child, Some(id), depth + 1);
            self.children[id].push(c);
            height = height.max(self.height[c]);
            self.fingerprint[c].hash(&mut hasher);
        }
        self.height[id] = height + 1;
        self.descendants[id] = self.nodes.len() - id - 1;
        self.fingerprint[id] = hasher.finish();
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    /// Is `a` an ancestor of `b` (or `b` itself)?
    pub fn contains(&self, a: usize, b: usize) -> bool {
        a <= b && b <= a + self.descendants[a]
    }

    pub fn isomorphic(&self, i: usize, other: &Flat<'_>, j: usize) -> bool {
        self.fingerprint[i] == other.fingerprint[j] && self.nodes[i] == other.nodes[j]
    }

    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        if self.len() > 0 {
            self.post(0, &mut out);
        }
        out
    }

    fn post(&self, i: usize, out: &mut Vec<usize>) {
        for &c in &self.children[i] {
            self.post(c, out);
        }
        out.push(i);
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent");
            b = self.parent[b].expect("non-root has a parent");
        }
        a
    }
}

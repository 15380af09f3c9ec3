//! Canonical labeling by partition refinement and backtracking.
//!
//! The search tree individualizes one vertex of the first non-singleton
//! cell at each node and refines to an equitable partition. Leaves are
//! compared by their relabeled adjacency rows; the largest one is the
//! canonical labeling. Automorphisms found when two leaves coincide prune
//! the tree in two ways: children lying in the same orbit (under the found
//! automorphisms fixing the current prefix) are skipped, and a leaf
//! equivalent to the first or best leaf abandons the subtree back to the
//! point where the two paths diverge.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{bit, Bits, Graph};
use crate::graph6;

/// Isomorphism-invariant representative: the graph6 code of the
/// canonically relabeled graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub order: usize,
    pub code: String,
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

/// Result of a canonical labeling run.
#[derive(Debug, Clone)]
pub struct Labeling {
    /// `position[v]` is the canonical index of vertex `v`.
    pub position: Vec<usize>,
    /// Automorphisms found during the search; they generate the full group.
    pub generators: Vec<Vec<usize>>,
}

impl Labeling {
    /// Vertex occupying each canonical position.
    pub fn order(&self) -> Vec<usize> {
        let mut lab = vec![0; self.position.len()];
        for (v, &p) in self.position.iter().enumerate() {
            lab[p] = v;
        }
        lab
    }

    /// Orbit representative (smallest member) for each vertex.
    pub fn orbits(&self) -> Vec<usize> {
        let n = self.position.len();
        let mut uf = UnionFind::new(n);
        for gen in &self.generators {
            for (v, &w) in gen.iter().enumerate() {
                uf.union(v, w);
            }
        }
        (0..n).map(|v| uf.min_member(v)).collect()
    }
}

pub fn canonical_labeling(g: &Graph) -> Labeling {
    let n = g.order();
    let mut search = Search {
        g,
        first: None,
        best: None,
        autos: Vec::new(),
    };
    let mut cells = if n == 0 {
        Vec::new()
    } else {
        vec![g.vertex_mask()]
    };
    refine(g, &mut cells);
    let mut prefix = Vec::with_capacity(n);
    search.visit(&cells, &mut prefix);
    let best = search.best.expect("search tree has at least one leaf");
    let mut position = vec![0; n];
    for (p, &v) in best.lab.iter().enumerate() {
        position[v] = p;
    }
    Labeling {
        position,
        generators: search.autos,
    }
}

/// The canonically relabeled graph.
pub fn canonical_graph(g: &Graph) -> Graph {
    g.permuted(&canonical_labeling(g).position)
}

pub fn canonicalize(g: &Graph) -> CanonicalForm {
    CanonicalForm {
        order: g.order(),
        code: graph6::encode(&canonical_graph(g)),
    }
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    g.order() == h.order() && g.size() == h.size() && canonicalize(g) == canonicalize(h)
}

/// Orbit representative of each vertex under the automorphism group.
pub fn automorphism_orbits(g: &Graph) -> Vec<usize> {
    canonical_labeling(g).orbits()
}

/// Splits cells against every cell until the partition is equitable.
///
/// Cells are split by neighbor count into the splitter, groups in ascending
/// count order, so the result only depends on the partition structure.
pub(crate) fn refine(g: &Graph, cells: &mut Vec<u64>) {
    let mut s = 0;
    let mut next = Vec::with_capacity(cells.len());
    while s < cells.len() {
        let splitter = cells[s];
        let mut split = false;
        next.clear();
        for &cell in cells.iter() {
            if cell & (cell - 1) == 0 {
                next.push(cell);
                continue;
            }
            let mut by_count = [0u64; 65];
            let mut seen = 0u128;
            for v in Bits(cell) {
                let c = (g.neighbors(v) & splitter).count_ones() as usize;
                by_count[c] |= bit(v);
                seen |= 1u128 << c;
            }
            if seen.count_ones() > 1 {
                split = true;
            }
            let mut rest = seen;
            while rest != 0 {
                let c = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next.push(by_count[c]);
            }
        }
        std::mem::swap(cells, &mut next);
        s = if split { 0 } else { s + 1 };
    }
}

#[derive(Clone)]
struct Leaf {
    lab: Vec<usize>,
    cert: Vec<u64>,
    prefix: Vec<usize>,
}

struct Search<'a> {
    g: &'a Graph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Explores the subtree at a node; `Some(d)` asks the caller to unwind to
    /// the ancestor at depth `d` and continue with its next child.
    fn visit(&mut self, cells: &[u64], prefix: &mut Vec<usize>) -> Option<usize> {
        let Some(t) = cells.iter().position(|c| c & (c - 1) != 0) else {
            return self.leaf(cells, prefix);
        };
        let depth = prefix.len();
        let mut tried = 0u64;
        for v in Bits(cells[t]) {
            if tried != 0 && self.equivalent_to_tried(v, tried, prefix) {
                continue;
            }
            tried |= bit(v);
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..t]);
            child.push(bit(v));
            child.push(cells[t] & !bit(v));
            child.extend_from_slice(&cells[t + 1..]);
            refine(self.g, &mut child);
            prefix.push(v);
            let jump = self.visit(&child, prefix);
            prefix.pop();
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }

    fn equivalent_to_tried(&self, v: usize, tried: u64, prefix: &[usize]) -> bool {
        let n = self.g.order();
        let mut uf = UnionFind::new(n);
        let mut any = false;
        for a in &self.autos {
            if prefix.iter().all(|&p| a[p] == p) {
                any = true;
                for (x, &y) in a.iter().enumerate() {
                    uf.union(x, y);
                }
            }
        }
        if !any {
            return false;
        }
        let root = uf.find(v);
        Bits(tried).any(|u| uf.find(u) == root)
    }

    fn leaf(&mut self, cells: &[u64], prefix: &[usize]) -> Option<usize> {
        let g = self.g;
        let n = g.order();
        let lab: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
        let mut pos = vec![0usize; n];
        for (p, &v) in lab.iter().enumerate() {
            pos[v] = p;
        }
        let cert: Vec<u64> = lab
            .iter()
            .map(|&v| Bits(g.neighbors(v)).fold(0u64, |row, w| row | bit(pos[w])))
            .collect();
        let leaf = Leaf {
            lab,
            cert,
            prefix: prefix.to_vec(),
        };
        let Some(first) = &self.first else {
            self.best = Some(leaf.clone());
            self.first = Some(leaf);
            return None;
        };
        if leaf.cert == first.cert {
            let auto = automorphism_between(&first.lab, &leaf.lab);
            let d = common_prefix(&first.prefix, &leaf.prefix);
            self.autos.push(auto);
            return Some(d);
        }
        let best = self.best.as_ref().expect("best is set with first");
        match leaf.cert.cmp(&best.cert) {
            Ordering::Equal => {
                let auto = automorphism_between(&best.lab, &leaf.lab);
                let d = common_prefix(&best.prefix, &leaf.prefix);
                self.autos.push(auto);
                Some(d)
            }
            Ordering::Greater => {
                self.best = Some(leaf);
                None
            }
            Ordering::Less => None,
        }
    }
}

fn automorphism_between(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut map = vec![0; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        map[a] = b;
    }
    map
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Unions by attaching the larger root under the smaller one, so roots
    /// are always the minimum of their class.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }

    pub(crate) fn min_member(&mut self, x: usize) -> usize {
        self.find(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_labeled(n: usize) -> impl Iterator<Item = Graph> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        (0u64..1 << pairs.len()).map(move |mask| {
            let edges: Vec<_> = Bits(mask).map(|b| pairs[b]).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        fn rec(cur: &mut Vec<usize>, used: u64, n: usize, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for v in 0..n {
                if used & bit(v) == 0 {
                    cur.push(v);
                    rec(cur, used | bit(v), n, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), 0, n, &mut out);
        out
    }

    #[test]
    fn path_relabeling() {
        let a = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges(3, &[(1, 2), (2, 0)]).unwrap();
        assert_eq!(canonicalize(&a), canonicalize(&b));
        assert_ne!(canonicalize(&Graph::complete(3).unwrap()), canonicalize(&a));
    }

    #[test]
    fn four_vertex_classes() {
        let forms: std::collections::HashSet<_> =
            all_labeled(4).map(|g| canonicalize(&g)).collect();
        assert_eq!(forms.len(), 11);
    }

    #[test]
    fn class_counts_up_to_six() {
        for (n, classes) in [(0, 1), (1, 1), (2, 2), (3, 4), (5, 34), (6, 156)] {
            let forms: std::collections::HashSet<_> =
                all_labeled(n).map(|g| canonicalize(&g)).collect();
            assert_eq!(forms.len(), classes, "n = {n}");
        }
    }

    #[test]
    fn isomorphism_examples() {
        let c4 = Graph::cycle(4).unwrap();
        let k22 = Graph::complete_bipartite(2, 2).unwrap();
        assert!(is_isomorphic(&c4, &k22));
        let p4 = Graph::path(4).unwrap();
        let star = Graph::complete_bipartite(1, 3).unwrap();
        assert!(!is_isomorphic(&p4, &star));
    }

    #[test]
    fn isomorphism_matches_permutation_search_on_six_vertices() {
        let perms = permutations(6);
        let brute = |g: &Graph, h: &Graph| perms.iter().any(|p| &g.permuted(p) == h);
        // T(6,3) against the complement of C6, which is the triangular prism
        let t63 = Graph::turan(6, 3).unwrap();
        let mut c6c = Graph::complete(6).unwrap();
        for (u, v) in Graph::cycle(6).unwrap().edges() {
            c6c.remove_edge(u, v);
        }
        assert_eq!(is_isomorphic(&t63, &c6c), brute(&t63, &c6c));
        assert!(!is_isomorphic(&t63, &c6c));
        let k33 = Graph::complete_bipartite(3, 3).unwrap();
        let relabeled = k33.permuted(&[3, 0, 4, 1, 5, 2]);
        assert_eq!(is_isomorphic(&k33, &relabeled), brute(&k33, &relabeled));
        let prism = Graph::from_edges(
            6,
            &[
                (0, 1),
                (1, 2),
                (0, 2),
                (3, 4),
                (4, 5),
                (3, 5),
                (0, 3),
                (1, 4),
                (2, 5),
            ],
        )
        .unwrap();
        assert!(is_isomorphic(&prism, &c6c));
        assert!(brute(&prism, &c6c));
    }

    #[test]
    fn orbits_match_brute_force() {
        for n in 1..=6 {
            let perms = permutations(n);
            for g in all_labeled(n).step_by(if n == 6 { 7 } else { 1 }) {
                let orbits = automorphism_orbits(&g);
                let brute: Vec<usize> = (0..n)
                    .map(|v| {
                        perms
                            .iter()
                            .filter(|p| g.permuted(p) == g)
                            .map(|p| p[v])
                            .min()
                            .unwrap()
                    })
                    .collect();
                assert_eq!(orbits, brute, "{g:?}");
            }
        }
    }

    #[test]
    fn symmetric_graphs_finish() {
        for g in [
            Graph::empty(64).unwrap(),
            Graph::complete(64).unwrap(),
            Graph::complete_bipartite(32, 32).unwrap(),
            Graph::matching(32).unwrap(),
            Graph::cycle(64).unwrap(),
            Graph::turan(60, 6).unwrap(),
        ] {
            let lab = canonical_labeling(&g);
            let orbits = lab.orbits();
            assert!(orbits.iter().all(|&o| o == 0), "vertex-transitive");
            let h = g.permuted(&(0..g.order()).rev().collect::<Vec<_>>());
            assert_eq!(canonicalize(&g), canonicalize(&h));
        }
    }
}

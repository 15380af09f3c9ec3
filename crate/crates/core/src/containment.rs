//! Subgraph containment (not induced), a dedicated linear-forest embedder,
//! and triangle statistics.
//!
//! Both searches skip host vertices that are twins of an already tried
//! candidate at the same node: swapping two unused twins is an automorphism
//! that fixes the partial embedding, so their subtrees are equivalent.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bit, Bits, Graph, MAX_ORDER};

/// Ordered path orders `v_1 >= v_2 >= ... >= v_k`, each at least 3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LinearForestSpec {
    path_orders: Vec<usize>,
}

impl LinearForestSpec {
    pub fn new(mut path_orders: Vec<usize>) -> Result<Self> {
        if path_orders.is_empty() {
            return Err(Error::InvalidParameters(
                "a linear forest needs at least one path".into(),
            ));
        }
        if let Some(v) = path_orders.iter().find(|&&v| v < 3) {
            return Err(Error::InvalidParameters(format!(
                "path order {v} is below 3; every component needs at least 3 vertices"
            )));
        }
        path_orders.sort_unstable_by(|a, b| b.cmp(a));
        Ok(LinearForestSpec { path_orders })
    }

    /// `k` copies of `P_l`.
    pub fn uniform(k: usize, l: usize) -> Result<Self> {
        LinearForestSpec::new(vec![l; k])
    }

    pub fn path_orders(&self) -> &[usize] {
        &self.path_orders
    }

    /// Number of components `k`.
    pub fn components(&self) -> usize {
        self.path_orders.len()
    }

    /// `floor(v_i / 2)` per component.
    pub fn half_lengths(&self) -> Vec<usize> {
        self.path_orders.iter().map(|v| v / 2).collect()
    }

    /// `l = sum floor(v_i / 2)`.
    pub fn ell(&self) -> usize {
        self.path_orders.iter().map(|v| v / 2).sum()
    }

    /// Indices of even-order paths.
    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.components())
            .filter(|&i| self.path_orders[i] % 2 == 0)
            .collect()
    }

    /// Indices of odd-order paths.
    pub fn odd_indices(&self) -> Vec<usize> {
        (0..self.components())
            .filter(|&i| self.path_orders[i] % 2 == 1)
            .collect()
    }

    pub fn has_even_path(&self) -> bool {
        self.path_orders.iter().any(|v| v % 2 == 0)
    }

    /// Total vertex count `h`.
    pub fn order(&self) -> usize {
        self.path_orders.iter().sum()
    }

    /// Whether all components are `P_3`.
    pub fn is_all_p3(&self) -> bool {
        self.path_orders.iter().all(|&v| v == 3)
    }

    /// Whether all components have the same order.
    pub fn is_uniform(&self) -> bool {
        self.path_orders.windows(2).all(|w| w[0] == w[1])
    }

    /// The forest as a graph, longest path first.
    pub fn graph(&self) -> Result<Graph> {
        let mut g = Graph::empty(0)?;
        for &v in &self.path_orders {
            g = g.union(&Graph::path(v)?)?;
        }
        Ok(g)
    }
}

impl TryFrom<Vec<usize>> for LinearForestSpec {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        LinearForestSpec::new(v)
    }
}

impl From<LinearForestSpec> for Vec<usize> {
    fn from(s: LinearForestSpec) -> Vec<usize> {
        s.path_orders
    }
}

impl FromStr for LinearForestSpec {
    type Err = Error;

    /// Comma-separated path orders, e.g. `"4,5"` for `P_4 ∪ P_5`.
    fn from_str(s: &str) -> Result<Self> {
        let orders = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidParameters(format!("bad forest spec {s:?}")))?;
        LinearForestSpec::new(orders)
    }
}

impl fmt::Display for LinearForestSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.path_orders.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Twin masks: for each vertex, the other members of its twin class.
///
/// False twins share an open neighborhood and true twins a closed one; a
/// vertex cannot have nontrivial classes of both kinds, and any permutation
/// inside a class is an automorphism.
pub(crate) fn twin_classes(g: &Graph) -> [u64; MAX_ORDER] {
    let mut twins = [0u64; MAX_ORDER];
    let n = g.order();
    for u in 0..n {
        for v in u + 1..n {
            let (nu, nv) = (g.neighbors(u), g.neighbors(v));
            if nu == nv || nu | bit(u) == nv | bit(v) {
                twins[u] |= bit(v);
                twins[v] |= bit(u);
            }
        }
    }
    twins
}

/// Whether `pattern` is a (not necessarily induced) subgraph of `host`.
pub fn contains_subgraph(host: &Graph, pattern: &Graph) -> bool {
    if !cheap_bounds_ok(host, pattern) {
        return false;
    }
    Matcher::new(host, pattern, None).run()
}

/// Whether `host` has a copy of `pattern` that uses `root`.
pub fn contains_subgraph_through(host: &Graph, pattern: &Graph, root: usize) -> bool {
    let orbits = crate::canon::automorphism_orbits(pattern);
    let reps: Vec<usize> = (0..pattern.order()).filter(|&p| orbits[p] == p).collect();
    contains_subgraph_through_reps(host, pattern, &reps, root)
}

/// As [`contains_subgraph_through`], with one pattern vertex per
/// automorphism orbit supplied by the caller.
pub(crate) fn contains_subgraph_through_reps(
    host: &Graph,
    pattern: &Graph,
    reps: &[usize],
    root: usize,
) -> bool {
    if pattern.order() == 0 || !cheap_bounds_ok(host, pattern) {
        return false;
    }
    reps.iter()
        .filter(|&&p| pattern.degree(p) <= host.degree(root))
        .any(|&p| Matcher::new(host, pattern, Some((p, root))).run())
}

fn cheap_bounds_ok(host: &Graph, pattern: &Graph) -> bool {
    if pattern.order() > host.order() || pattern.size() > host.size() {
        return false;
    }
    let mut hd = host.degrees();
    let mut pd = pattern.degrees();
    hd.sort_unstable_by(|a, b| b.cmp(a));
    pd.sort_unstable_by(|a, b| b.cmp(a));
    pd.iter().zip(&hd).all(|(p, h)| p <= h)
}

struct Matcher<'a> {
    host: &'a Graph,
    /// Pattern vertices with at least one edge or the fixed start, in search order.
    order: Vec<usize>,
    /// For each search position, the earlier positions adjacent to it.
    back: Vec<Vec<usize>>,
    /// Host vertices whose degree admits the pattern vertex at each position.
    degree_ok: Vec<u64>,
    /// Pattern vertices left out of the search (isolated ones).
    spare: usize,
    twins: [u64; MAX_ORDER],
    image: Vec<usize>,
    fixed: Option<usize>,
}

impl<'a> Matcher<'a> {
    fn new(host: &'a Graph, pattern: &Graph, fixed: Option<(usize, usize)>) -> Self {
        let pn = pattern.order();
        let mut placed = 0u64;
        let mut order = Vec::with_capacity(pn);
        if let Some((p, _)) = fixed {
            order.push(p);
            placed |= bit(p);
        }
        let active = (0..pn).filter(|&v| pattern.degree(v) > 0).count()
            + usize::from(fixed.is_some_and(|(p, _)| pattern.degree(p) == 0));
        while order.len() < active {
            let next = (0..pn)
                .filter(|&v| placed & bit(v) == 0 && pattern.degree(v) > 0)
                .max_by_key(|&v| {
                    (
                        (pattern.neighbors(v) & placed).count_ones(),
                        pattern.degree(v),
                        std::cmp::Reverse(v),
                    )
                })
                .expect("active vertices remain");
            order.push(next);
            placed |= bit(next);
        }
        let mut pos = [usize::MAX; MAX_ORDER];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                Bits(pattern.neighbors(v))
                    .map(|w| pos[w])
                    .filter(|&j| j < i)
                    .collect()
            })
            .collect();
        let degree_ok = order
            .iter()
            .map(|&v| {
                let d = pattern.degree(v);
                (0..host.order())
                    .filter(|&h| host.degree(h) >= d)
                    .fold(0, |m, h| m | bit(h))
            })
            .collect();
        Matcher {
            host,
            spare: pn - order.len(),
            order,
            back,
            degree_ok,
            twins: twin_classes(host),
            image: Vec::with_capacity(pn),
            fixed: fixed.map(|(_, h)| h),
        }
    }

    fn run(&mut self) -> bool {
        match self.fixed {
            Some(h) => {
                if self.degree_ok[0] & bit(h) == 0 {
                    return false;
                }
                self.image.push(h);
                self.extend(1, bit(h))
            }
            None => self.extend(0, 0),
        }
    }

    fn extend(&mut self, i: usize, used: u64) -> bool {
        if i == self.order.len() {
            let free = (self.host.vertex_mask() & !used).count_ones() as usize;
            return free >= self.spare;
        }
        let mut cand = self.host.vertex_mask() & !used & self.degree_ok[i];
        for &j in &self.back[i] {
            cand &= self.host.neighbors(self.image[j]);
        }
        let mut tried = 0u64;
        for c in Bits(cand) {
            if self.twins[c] & tried != 0 {
                continue;
            }
            tried |= bit(c);
            self.image.push(c);
            let found = self.extend(i + 1, used | bit(c));
            self.image.pop();
            if found {
                return true;
            }
        }
        false
    }
}

/// Whether `host` contains vertex-disjoint paths of the given orders.
pub fn contains_linear_forest(host: &Graph, spec: &LinearForestSpec) -> bool {
    contains_paths(host, spec.path_orders())
}

/// Disjoint paths of arbitrary orders (order 1 and 2 allowed).
pub(crate) fn contains_paths(host: &Graph, orders: &[usize]) -> bool {
    let mut orders: Vec<usize> = orders.iter().copied().filter(|&v| v > 0).collect();
    orders.sort_unstable_by(|a, b| b.cmp(a));
    let total: usize = orders.iter().sum();
    if total > host.order() {
        return false;
    }
    let edges_needed: usize = orders.iter().map(|v| v - 1).sum();
    if edges_needed > host.size() {
        return false;
    }
    let mut suffix = vec![0; orders.len() + 1];
    for i in (0..orders.len()).rev() {
        suffix[i] = suffix[i + 1] + orders[i];
    }
    let n = host.order();
    let (mut deg1, mut deg2) = (0u64, 0u64);
    for v in 0..n {
        if host.degree(v) >= 1 {
            deg1 |= bit(v);
        }
        if host.degree(v) >= 2 {
            deg2 |= bit(v);
        }
    }
    let twins = twin_classes(host);
    let mut classes = Vec::new();
    let mut seen = 0u64;
    for v in 0..n {
        if seen & bit(v) == 0 && twins[v] != 0 {
            let class = twins[v] | bit(v);
            seen |= class;
            classes.push(class);
        }
    }
    let mut search = PathSearch {
        host,
        orders: &orders,
        suffix,
        deg1,
        deg2,
        twins,
        classes,
        failed: HashSet::new(),
    };
    search.start_path(0, 0)
}

const MEMO_CAP: usize = 1 << 20;

struct PathSearch<'a> {
    host: &'a Graph,
    orders: &'a [usize],
    /// Vertices still needed from path `i` onwards.
    suffix: Vec<usize>,
    deg1: u64,
    deg2: u64,
    twins: [u64; MAX_ORDER],
    classes: Vec<u64>,
    /// Failed `(path index, used set up to twin swaps)` states.
    failed: HashSet<(usize, u64)>,
}

impl PathSearch<'_> {
    fn canonical_used(&self, used: u64) -> u64 {
        let mut out = used;
        for &class in &self.classes {
            let k = (used & class).count_ones();
            if k == 0 {
                continue;
            }
            out &= !class;
            let mut rest = class;
            for _ in 0..k {
                out |= rest & rest.wrapping_neg();
                rest &= rest - 1;
            }
        }
        out
    }

    fn start_path(&mut self, p: usize, used: u64) -> bool {
        if p == self.orders.len() {
            return true;
        }
        let free = self.host.vertex_mask() & !used;
        if (free.count_ones() as usize) < self.suffix[p] {
            return false;
        }
        let len = self.orders[p];
        if len == 1 {
            // remaining paths are all single vertices
            return true;
        }
        let key = (p, self.canonical_used(used));
        if p > 0 && self.failed.contains(&key) {
            return false;
        }
        let cand = free & self.deg1;
        let mut tried = 0u64;
        let mut found = false;
        for c in Bits(cand) {
            if self.twins[c] & tried != 0 {
                continue;
            }
            tried |= bit(c);
            if self.grow(p, 1, c, used | bit(c)) {
                found = true;
                break;
            }
        }
        if !found && p > 0 && self.failed.len() < MEMO_CAP {
            self.failed.insert(key);
        }
        found
    }

    /// Path `p` has `placed` vertices ending at `end`.
    fn grow(&mut self, p: usize, placed: usize, end: usize, used: u64) -> bool {
        let len = self.orders[p];
        if placed == len {
            return self.start_path(p + 1, used);
        }
        let interior = placed + 1 < len;
        let mut cand = self.host.neighbors(end) & !used;
        if interior {
            cand &= self.deg2;
        }
        let mut tried = 0u64;
        for c in Bits(cand) {
            if self.twins[c] & tried != 0 {
                continue;
            }
            tried |= bit(c);
            if self.grow(p, placed + 1, c, used | bit(c)) {
                return true;
            }
        }
        false
    }
}

/// Triangle counts: total and per edge `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleStats {
    pub total: usize,
    pub per_edge: BTreeMap<(usize, usize), usize>,
}

pub fn triangle_stats(g: &Graph) -> TriangleStats {
    let per_edge: BTreeMap<(usize, usize), usize> = g
        .edges()
        .map(|(u, v)| {
            (
                (u, v),
                (g.neighbors(u) & g.neighbors(v)).count_ones() as usize,
            )
        })
        .collect();
    let total = per_edge.values().sum::<usize>() / 3;
    TriangleStats { total, per_edge }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgraph_examples() {
        let k4 = Graph::complete(4).unwrap();
        let k3 = Graph::complete(3).unwrap();
        assert!(contains_subgraph(&k4, &k3));
        assert!(!contains_subgraph(
            &Graph::complete_bipartite(2, 6).unwrap(),
            &k3
        ));
        assert!(contains_subgraph(&k3, &Graph::empty(0).unwrap()));
        assert!(contains_subgraph(
            &Graph::empty(2).unwrap(),
            &Graph::empty(2).unwrap()
        ));
        assert!(!contains_subgraph(
            &Graph::empty(1).unwrap(),
            &Graph::empty(2).unwrap()
        ));
        let k2_k1 = Graph::complete(2)
            .unwrap()
            .union(&Graph::empty(1).unwrap())
            .unwrap();
        assert!(!contains_subgraph(&Graph::complete(2).unwrap(), &k2_k1));
        assert!(contains_subgraph(&Graph::path(3).unwrap(), &k2_k1));
    }

    #[test]
    fn rooted_containment() {
        // triangle 0-1-2 plus pendant 3 on vertex 2
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let k3 = Graph::complete(3).unwrap();
        assert!(contains_subgraph_through(&g, &k3, 0));
        assert!(!contains_subgraph_through(&g, &k3, 3));
        let p3 = Graph::path(3).unwrap();
        assert!(contains_subgraph_through(&g, &p3, 3));
    }

    #[test]
    fn forest_examples() {
        let p7 = Graph::path(7).unwrap();
        assert!(contains_linear_forest(&p7, &"3,3".parse().unwrap()));
        let k26 = Graph::complete_bipartite(2, 6).unwrap();
        assert!(!contains_linear_forest(&k26, &"4,4".parse().unwrap()));
        let mut g = Graph::complete_bipartite(3, 17).unwrap();
        g.add_edge(3, 4);
        assert!(!contains_linear_forest(&g, &"5,5".parse().unwrap()));
        // the same host contains two disjoint P_4: one crosses the extra edge
        assert!(contains_linear_forest(&g, &"4,4".parse().unwrap()));
    }

    #[test]
    fn forest_spec_parsing() {
        let s: LinearForestSpec = "4,5".parse().unwrap();
        assert_eq!(s.path_orders(), &[5, 4]);
        assert_eq!(s.ell(), 4);
        assert_eq!(s.even_indices(), vec![1]);
        assert_eq!(s.odd_indices(), vec![0]);
        assert_eq!(s.order(), 9);
        assert!("2,5".parse::<LinearForestSpec>().is_err());
        assert!("".parse::<LinearForestSpec>().is_err());
        assert!("3,3,3".parse::<LinearForestSpec>().unwrap().is_all_p3());
    }

    #[test]
    fn triangles() {
        assert_eq!(triangle_stats(&Graph::complete(4).unwrap()).total, 4);
        let b3 = triangle_stats(&Graph::book(3).unwrap());
        assert_eq!(b3.total, 3);
        assert_eq!(b3.per_edge[&(0, 1)], 3);
        assert_eq!(b3.per_edge.values().sum::<usize>(), 3 * b3.total);
    }
}

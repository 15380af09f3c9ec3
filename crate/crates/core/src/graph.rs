//! Simple undirected graphs on at most 64 vertices.
//!
//! Each adjacency row is one machine word. Every named construction uses a
//! fixed vertex layout so callers can address parts by index:
//!
//! * `K_m`, `I_k`: vertices `0..m`.
//! * `P_l`: the path `0-1-...-(l-1)`.
//! * `C_m`: the cycle `0-1-...-(m-1)-0`.
//! * `M_s`: edges `(0,1), (2,3), ...` on `2s` vertices.
//! * `M_k^t`: the same matching of size `t`, followed by `k - 2t` isolated vertices.
//! * `K_{a,b}`: part of size `a` first (`0..a`), then `a..a+b`.
//! * `T(n,k)`: parts in contiguous blocks, larger parts (`ceil(n/k)`) first.
//! * `B_t`: spine edge `(0,1)`, pages `2..t+2` each joined to both spine vertices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// Iterate the set bits of a word, lowest first.
#[derive(Clone, Copy)]
pub struct Bits(pub u64);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

#[inline]
pub(crate) fn bit(v: usize) -> u64 {
    1u64 << v
}

/// Mask with the low `n` bits set.
#[inline]
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: [u64; MAX_ORDER],
}

impl Graph {
    /// The edgeless graph `I_n`.
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::OrderOverflow(n));
        }
        Ok(Graph {
            n,
            adj: [0; MAX_ORDER],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidParameters(format!(
                    "edge ({u},{v}) is not valid on {n} vertices"
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Build from adjacency rows; rows must be symmetric with a zero diagonal.
    pub fn from_rows(rows: &[u64]) -> Result<Self> {
        let mut g = Graph::empty(rows.len())?;
        let mask = low_mask(rows.len());
        for (v, &row) in rows.iter().enumerate() {
            if row & !mask != 0 || row & bit(v) != 0 {
                return Err(Error::InvalidParameters(format!("bad adjacency row {v}")));
            }
            g.adj[v] = row;
        }
        for u in 0..g.n {
            for v in Bits(g.adj[u]) {
                if g.adj[v] & bit(u) == 0 {
                    return Err(Error::InvalidParameters("asymmetric adjacency".into()));
                }
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn size(&self) -> usize {
        self.rows()
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.adj[..self.n]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    /// Mask of all vertices.
    #[inline]
    pub fn vertex_mask(&self) -> u64 {
        low_mask(self.n)
    }

    /// Adds the edge `uv`. Panics on a loop or an out-of-range vertex.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n && u != v, "invalid edge ({u},{v})");
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "invalid edge ({u},{v})");
        self.adj[u] &= !bit(v);
        self.adj[v] &= !bit(u);
    }

    /// Appends an isolated vertex and returns its index.
    pub fn add_vertex(&mut self) -> Result<usize> {
        if self.n == MAX_ORDER {
            return Err(Error::OrderOverflow(MAX_ORDER + 1));
        }
        self.n += 1;
        Ok(self.n - 1)
    }

    /// Edges `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| Bits(self.adj[u] & !low_mask(u + 1)).map(move |v| (u, v)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn isolated_mask(&self) -> u64 {
        (0..self.n)
            .filter(|&v| self.adj[v] == 0)
            .fold(0, |m, v| m | bit(v))
    }

    pub fn has_isolated_vertices(&self) -> bool {
        self.isolated_mask() != 0
    }

    /// Subgraph induced by `mask`, relabeled in increasing vertex order.
    pub fn induced(&self, mask: u64) -> Graph {
        let mask = mask & self.vertex_mask();
        let verts: Vec<usize> = Bits(mask).collect();
        let mut pos = [usize::MAX; MAX_ORDER];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph {
            n: verts.len(),
            adj: [0; MAX_ORDER],
        };
        for (i, &v) in verts.iter().enumerate() {
            for w in Bits(self.adj[v] & mask) {
                g.adj[i] |= bit(pos[w]);
            }
        }
        g
    }

    /// Number of edges with both ends in `mask`.
    pub fn edges_within(&self, mask: u64) -> usize {
        Bits(mask)
            .map(|v| (self.adj[v] & mask).count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// The graph with its isolated vertices deleted.
    pub fn without_isolates(&self) -> Graph {
        self.induced(self.vertex_mask() & !self.isolated_mask())
    }

    /// Relabel: vertex `v` becomes `perm[v]`. `perm` must be a permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph {
            n: self.n,
            adj: [0; MAX_ORDER],
        };
        for v in 0..self.n {
            let mut row = 0;
            for w in Bits(self.adj[v]) {
                row |= bit(perm[w]);
            }
            g.adj[perm[v]] = row;
        }
        g
    }

    /// Disjoint union; vertices of `self` come first.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        let n = self.n + other.n;
        let mut g = Graph::empty(n)?;
        g.adj[..self.n].copy_from_slice(&self.adj[..self.n]);
        for v in 0..other.n {
            g.adj[self.n + v] = other.adj[v] << self.n;
        }
        Ok(g)
    }

    /// Join `self + other`: disjoint union plus all cross edges.
    pub fn join(&self, other: &Graph) -> Result<Graph> {
        let mut g = self.union(other)?;
        let left = low_mask(self.n);
        let right = low_mask(g.n) & !left;
        for v in 0..self.n {
            g.adj[v] |= right;
        }
        for v in self.n..g.n {
            g.adj[v] |= left;
        }
        Ok(g)
    }

    pub fn complete(m: usize) -> Result<Graph> {
        let mut g = Graph::empty(m)?;
        let all = g.vertex_mask();
        for v in 0..m {
            g.adj[v] = all & !bit(v);
        }
        Ok(g)
    }

    pub fn path(l: usize) -> Result<Graph> {
        let mut g = Graph::empty(l)?;
        for v in 1..l {
            g.add_edge(v - 1, v);
        }
        Ok(g)
    }

    pub fn cycle(m: usize) -> Result<Graph> {
        if m < 3 {
            return Err(Error::InvalidParameters(format!(
                "C_{m} needs at least 3 vertices"
            )));
        }
        let mut g = Graph::path(m)?;
        g.add_edge(0, m - 1);
        Ok(g)
    }

    /// `M_k^t`: a matching of size `t` on `k` vertices.
    pub fn partial_matching(k: usize, t: usize) -> Result<Graph> {
        if 2 * t > k {
            return Err(Error::InvalidParameters(format!(
                "a matching of size {t} does not fit on {k} vertices"
            )));
        }
        let mut g = Graph::empty(k)?;
        for i in 0..t {
            g.add_edge(2 * i, 2 * i + 1);
        }
        Ok(g)
    }

    pub fn matching(s: usize) -> Result<Graph> {
        Graph::partial_matching(2 * s, s)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
        Graph::empty(a)?.join(&Graph::empty(b)?)
    }

    /// Turán graph `T(n,k)`.
    pub fn turan(n: usize, k: usize) -> Result<Graph> {
        if k == 0 {
            return Err(Error::InvalidParameters("T(n,k) needs k >= 1".into()));
        }
        let mut g = Graph::empty(n)?;
        let mut part = vec![0usize; n];
        let (q, r) = (n / k, n % k);
        let mut v = 0;
        for p in 0..k {
            let len = if p < r { q + 1 } else { q };
            for _ in 0..len {
                part[v] = p;
                v += 1;
            }
        }
        for u in 0..n {
            for w in u + 1..n {
                if part[u] != part[w] {
                    g.add_edge(u, w);
                }
            }
        }
        Ok(g)
    }

    /// Book graph `B_t = K_2 + I_t`.
    pub fn book(t: usize) -> Result<Graph> {
        Graph::complete(2)?.join(&Graph::empty(t)?)
    }

    pub fn clique_number(&self) -> usize {
        fn grow(g: &Graph, cand: u64, size: usize, best: &mut usize) {
            if cand == 0 {
                *best = (*best).max(size);
                return;
            }
            if size + cand.count_ones() as usize <= *best {
                return;
            }
            let mut rest = cand;
            while rest != 0 {
                if size + rest.count_ones() as usize <= *best {
                    return;
                }
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                grow(g, rest & g.adj[v], size + 1, best);
            }
        }
        let mut best = 0;
        grow(self, self.vertex_mask(), 0, &mut best);
        best
    }

    /// Whether the graph is a disjoint union of paths; returns the path orders
    /// in non-increasing order when it is.
    pub fn linear_forest_components(&self) -> Option<Vec<usize>> {
        if self.max_degree() > 2 {
            return None;
        }
        let mut seen = 0u64;
        let mut orders = Vec::new();
        for s in 0..self.n {
            if seen & bit(s) != 0 {
                continue;
            }
            let mut comp = bit(s);
            let mut frontier = bit(s);
            while frontier != 0 {
                let mut next = 0;
                for v in Bits(frontier) {
                    next |= self.adj[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            seen |= comp;
            let verts = comp.count_ones() as usize;
            if self.edges_within(comp) != verts - 1 {
                return None;
            }
            orders.push(verts);
        }
        orders.sort_unstable_by(|a, b| b.cmp(a));
        Some(orders)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({} vertices; ", self.n)?;
        let edges: Vec<String> = self.edges().map(|(u, v)| format!("{u}-{v}")).collect();
        write!(f, "{})", edges.join(" "))
    }
}

/// Named graph families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NamedGraph {
    Complete { m: usize },
    Empty { k: usize },
    Path { l: usize },
    Matching { s: usize },
    PartialMatching { k: usize, t: usize },
    CompleteBipartite { a: usize, b: usize },
    Turan { n: usize, k: usize },
    Book { t: usize },
    Cycle { m: usize },
}

impl NamedGraph {
    /// Parses shorthand such as `K4`, `I3`, `P5`, `M2`, `M6,2`, `K3,5`,
    /// `T7,3`, `B2`, `C5`.
    pub fn parse(s: &str) -> Result<NamedGraph> {
        let bad = || Error::InvalidParameters(format!("unrecognized graph shorthand {s:?}"));
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let nums: Vec<usize> = chars
            .as_str()
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let named = match (head.to_ascii_uppercase(), nums.as_slice()) {
            ('K', [m]) => NamedGraph::Complete { m: *m },
            ('K', [a, b]) => NamedGraph::CompleteBipartite { a: *a, b: *b },
            ('I', [k]) => NamedGraph::Empty { k: *k },
            ('P', [l]) => NamedGraph::Path { l: *l },
            ('M', [s]) => NamedGraph::Matching { s: *s },
            ('M', [k, t]) => NamedGraph::PartialMatching { k: *k, t: *t },
            ('T', [n, k]) => NamedGraph::Turan { n: *n, k: *k },
            ('B', [t]) => NamedGraph::Book { t: *t },
            ('C', [m]) => NamedGraph::Cycle { m: *m },
            _ => return Err(bad()),
        };
        Ok(named)
    }

    pub fn build(&self) -> Result<Graph> {
        construct_named(*self)
    }
}

impl fmt::Display for NamedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedGraph::Complete { m } => write!(f, "K{m}"),
            NamedGraph::Empty { k } => write!(f, "I{k}"),
            NamedGraph::Path { l } => write!(f, "P{l}"),
            NamedGraph::Matching { s } => write!(f, "M{s}"),
            NamedGraph::PartialMatching { k, t } => write!(f, "M{k},{t}"),
            NamedGraph::CompleteBipartite { a, b } => write!(f, "K{a},{b}"),
            NamedGraph::Turan { n, k } => write!(f, "T{n},{k}"),
            NamedGraph::Book { t } => write!(f, "B{t}"),
            NamedGraph::Cycle { m } => write!(f, "C{m}"),
        }
    }
}

pub fn construct_named(kind: NamedGraph) -> Result<Graph> {
    match kind {
        NamedGraph::Complete { m } => Graph::complete(m),
        NamedGraph::Empty { k } => Graph::empty(k),
        NamedGraph::Path { l } => Graph::path(l),
        NamedGraph::Matching { s } => Graph::matching(s),
        NamedGraph::PartialMatching { k, t } => Graph::partial_matching(k, t),
        NamedGraph::CompleteBipartite { a, b } => Graph::complete_bipartite(a, b),
        NamedGraph::Turan { n, k } => Graph::turan(n, k),
        NamedGraph::Book { t } => Graph::book(t),
        NamedGraph::Cycle { m } => Graph::cycle(m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Union,
    Join,
}

pub fn combine(op: CombineOp, g: &Graph, h: &Graph) -> Result<Graph> {
    match op {
        CombineOp::Union => g.union(h),
        CombineOp::Join => g.join(h),
    }
}

/// `C(n, 2)` with overflow checking.
pub fn choose2(n: u128) -> Result<u128> {
    if n < 2 {
        return Ok(0);
    }
    n.checked_mul(n - 1)
        .map(|x| x / 2)
        .ok_or(Error::Overflow("C(n,2)"))
}

/// Edge count of the Turán graph `T(n,k)`; `C(n,2)` whenever `k >= n`.
pub fn turan_edge_count(n: u64, k: u64) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidParameters("T(n,k) needs k >= 1".into()));
    }
    let (n, k) = (n as u128, k as u128);
    let (q, r) = (n / k, n % k);
    let inside = r
        .checked_mul(choose2(q + 1)?)
        .and_then(|a| {
            (k - r)
                .checked_mul(choose2(q).ok()?)
                .and_then(|b| a.checked_add(b))
        })
        .ok_or(Error::Overflow("e(T(n,k))"))?;
    Ok(choose2(n)? - inside)
}

//! Derived invariants of a forbidden graph `F`: chromatic number, matching
//! number, edge control number, `sigma`, the vertex-deletion families, and
//! the two three-condition predicates that decide the `+1` constants.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::containment::{contains_subgraph, triangle_stats, LinearForestSpec};
use crate::error::{Error, Result};
use crate::family::ForbiddenFamily;
use crate::graph::{bit, Bits, Graph, MAX_ORDER};

pub fn chromatic_number(g: &Graph) -> usize {
    let n = g.order();
    if n == 0 {
        return 0;
    }
    let lower = g.clique_number();
    let upper = dsatur_greedy(g);
    (lower..upper)
        .find(|&k| is_colorable(g, k))
        .unwrap_or(upper)
}

fn dsatur_greedy(g: &Graph) -> usize {
    let n = g.order();
    let mut color = vec![usize::MAX; n];
    let mut sat = vec![0u64; n];
    let mut used = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == usize::MAX)
            .max_by_key(|&v| (sat[v].count_ones(), g.degree(v), std::cmp::Reverse(v)))
            .expect("uncolored vertex");
        let c = (!sat[v]).trailing_zeros() as usize;
        color[v] = c;
        used = used.max(c + 1);
        for w in Bits(g.neighbors(v)) {
            sat[w] |= bit(c);
        }
    }
    used
}

/// Exact `k`-colorability by DSATUR-ordered backtracking with color
/// symmetry breaking.
pub fn is_colorable(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, k: usize, color: &mut [usize], colored: usize, max_used: usize) -> bool {
        let n = g.order();
        if colored == n {
            return true;
        }
        let mut best = None;
        let mut best_key = (0, 0);
        let mut best_sat = 0u64;
        for v in 0..n {
            if color[v] != usize::MAX {
                continue;
            }
            let sat = Bits(g.neighbors(v))
                .filter(|&w| color[w] != usize::MAX)
                .fold(0u64, |s, w| s | bit(color[w]));
            let key = (sat.count_ones() + 1, g.degree(v) as u32 + 1);
            if best.is_none() || key > best_key {
                best = Some(v);
                best_key = key;
                best_sat = sat;
            }
        }
        let v = best.expect("uncolored vertex");
        let limit = k.min(max_used + 1);
        for c in 0..limit {
            if best_sat & bit(c) != 0 {
                continue;
            }
            color[v] = c;
            if go(g, k, color, colored + 1, max_used.max(c + 1)) {
                return true;
            }
        }
        color[v] = usize::MAX;
        false
    }
    if g.order() == 0 {
        return true;
    }
    if k == 0 {
        return false;
    }
    let mut color = vec![usize::MAX; g.order()];
    go(g, k, &mut color, 0, 0)
}

/// Maximum matching by Edmonds' blossom algorithm; `mate[v]` is the partner.
pub fn maximum_matching(g: &Graph) -> Vec<Option<usize>> {
    const NONE: usize = usize::MAX;
    let n = g.order();
    let mut mate = vec![NONE; n];
    // greedy start
    for u in 0..n {
        if mate[u] == NONE {
            if let Some(v) = Bits(g.neighbors(u)).find(|&v| mate[v] == NONE) {
                mate[u] = v;
                mate[v] = u;
            }
        }
    }
    let mut parent = vec![NONE; n];
    let mut base = vec![0; n];
    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        // BFS for an augmenting path from `root`
        parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in base.iter_mut().enumerate() {
            *b = i;
        }
        let mut used = 0u64;
        let mut queue = vec![root];
        used |= bit(root);
        let mut head = 0;
        let mut end = NONE;
        'bfs: while head < queue.len() {
            let v = queue[head];
            head += 1;
            for to in Bits(g.neighbors(v)) {
                if base[v] == base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                    // odd cycle: contract the blossom
                    let cur = lca(&base, &mate, &parent, v, to);
                    let mut blossom = 0u64;
                    mark_path(&base, &mate, &mut parent, &mut blossom, v, cur, to);
                    mark_path(&base, &mate, &mut parent, &mut blossom, to, cur, v);
                    for i in 0..n {
                        if blossom & bit(base[i]) != 0 {
                            base[i] = cur;
                            if used & bit(i) == 0 {
                                used |= bit(i);
                                queue.push(i);
                            }
                        }
                    }
                } else if parent[to] == NONE {
                    parent[to] = v;
                    if mate[to] == NONE {
                        end = to;
                        break 'bfs;
                    }
                    let m = mate[to];
                    used |= bit(m);
                    queue.push(m);
                }
            }
        }
        let mut v = end;
        while v != NONE {
            let pv = parent[v];
            let ppv = mate[pv];
            mate[v] = pv;
            mate[pv] = v;
            v = ppv;
        }
    }

    fn lca(base: &[usize], mate: &[usize], parent: &[usize], mut a: usize, mut b: usize) -> usize {
        let mut seen = 0u64;
        loop {
            a = base[a];
            seen |= bit(a);
            if mate[a] == NONE {
                break;
            }
            a = parent[mate[a]];
        }
        loop {
            b = base[b];
            if seen & bit(b) != 0 {
                return b;
            }
            b = parent[mate[b]];
        }
    }

    fn mark_path(
        base: &[usize],
        mate: &[usize],
        parent: &mut [usize],
        blossom: &mut u64,
        mut v: usize,
        b: usize,
        mut child: usize,
    ) {
        while base[v] != b {
            *blossom |= bit(base[v]) | bit(base[mate[v]]);
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    }

    mate.into_iter()
        .map(|m| if m == NONE { None } else { Some(m) })
        .collect()
}

pub fn matching_number(g: &Graph) -> usize {
    maximum_matching(g).iter().filter(|m| m.is_some()).count() / 2
}

/// Minimum edge control sets: every edge outside the set shares an end with
/// an edge inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeControl {
    pub beta1: usize,
    /// All minimum control sets, each as sorted `(u, v)` pairs with `u < v`.
    pub witnesses: Vec<Vec<(usize, usize)>>,
}

pub fn edge_control_number(g: &Graph) -> EdgeControl {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() {
        return EdgeControl {
            beta1: 0,
            witnesses: vec![Vec::new()],
        };
    }
    // a maximal matching is a control set, so the answer is at most nu
    let nu = matching_number(g);
    for size in 1..=nu {
        let mut witnesses = Vec::new();
        let mut chosen = Vec::with_capacity(size);
        control_sets(&edges, 0, size, 0, &mut chosen, &mut witnesses);
        if !witnesses.is_empty() {
            return EdgeControl {
                beta1: size,
                witnesses,
            };
        }
    }
    unreachable!("a maximum matching is an edge control set")
}

/// Enumerates `size`-subsets of `edges` (indices increasing from `from`)
/// whose endpoints cover every edge.
fn control_sets(
    edges: &[(usize, usize)],
    from: usize,
    size: usize,
    covered: u64,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    let uncovered = edges
        .iter()
        .find(|&&(u, v)| covered & (bit(u) | bit(v)) == 0);
    let Some(&(a, b)) = uncovered else {
        if chosen.len() == size {
            out.push(chosen.iter().map(|&i| edges[i]).collect());
        }
        // a covering set can be padded, but minimum sets are found at the smallest size
        return;
    };
    if chosen.len() == size {
        return;
    }
    let ends = bit(a) | bit(b);
    for i in from..edges.len() {
        let (u, v) = edges[i];
        if edges[i..]
            .iter()
            .all(|&(x, y)| (bit(x) | bit(y)) & ends == 0)
        {
            return;
        }
        chosen.push(i);
        control_sets(edges, i + 1, size, covered | bit(u) | bit(v), chosen, out);
        chosen.pop();
    }
}

/// `sigma(F)`: the largest `t` with `I_{v(F)} + M_t` free of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sigma {
    Finite(usize),
    Infinite,
}

impl Sigma {
    pub fn finite(self) -> Option<usize> {
        match self {
            Sigma::Finite(s) => Some(s),
            Sigma::Infinite => None,
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Finite(s) => write!(f, "{s}"),
            Sigma::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sigma::Finite(v) => s.serialize_u64(*v as u64),
            Sigma::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// The host `I_r + M_t` used by [`sigma`].
pub fn independent_plus_matching(r: usize, t: usize) -> Result<Graph> {
    Graph::empty(r)?.join(&Graph::matching(t)?)
}

/// A finite `sigma` never exceeds `v(F)`, so checking up to `t = v(F) + 1`
/// decides finiteness.
pub fn sigma(f: &Graph) -> Result<Sigma> {
    if f.size() == 0 {
        return Err(Error::Precondition(
            "sigma needs a graph with at least one edge".into(),
        ));
    }
    let r = f.order();
    let needed = r + 2 * (r + 1);
    if needed > MAX_ORDER {
        return Err(Error::OrderOverflow(needed));
    }
    for t in 1..=r + 1 {
        if contains_subgraph(&independent_plus_matching(r, t)?, f) {
            return Ok(Sigma::Finite(t - 1));
        }
    }
    Ok(Sigma::Infinite)
}

/// Edge budget for the `H_i` families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Finite(usize),
    Unbounded,
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Finite(i) => write!(f, "{i}"),
            Budget::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Which `G` family: deleting a set spanning no edge (1) or at most one (2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GVariant {
    One,
    Two,
}

impl GVariant {
    fn max_edges(self) -> usize {
        match self {
            GVariant::One => 0,
            GVariant::Two => 1,
        }
    }
}

/// `{ F[V \ S] : accept(S) }`, deduplicated but not reduced.
fn deletion_family(f: &Graph, accept: impl Fn(u64) -> bool) -> ForbiddenFamily {
    let n = f.order();
    assert!(
        n < 32,
        "vertex-deletion families are limited to 31 vertices"
    );
    let all = f.vertex_mask();
    let mut seen = HashSet::new();
    for s in 0..(1u64 << n) {
        if accept(s) {
            seen.insert(f.induced(all & !s));
        }
    }
    ForbiddenFamily::new(seen)
}

pub fn family_g_unreduced(f: &Graph, variant: GVariant) -> ForbiddenFamily {
    let limit = variant.max_edges();
    deletion_family(f, |s| f.edges_within(s) <= limit)
}

/// `G_1(F)` or `G_2(F)`, reduced to subgraph-minimal members.
pub fn family_g(f: &Graph, variant: GVariant) -> ForbiddenFamily {
    family_g_unreduced(f, variant).reduce()
}

pub fn family_h_unreduced(f: &Graph, budget: Budget) -> ForbiddenFamily {
    let limit = match budget {
        Budget::Finite(i) => i,
        Budget::Unbounded => f.order() / 2,
    };
    deletion_family(f, |s| {
        Bits(s).all(|v| (f.neighbors(v) & s).count_ones() <= 1) && f.edges_within(s) <= limit
    })
}

/// `H_i(F)` (or `H(F)` for an unbounded budget), reduced.
pub fn family_h(f: &Graph, budget: Budget) -> ForbiddenFamily {
    family_h_unreduced(f, budget).reduce()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedProfile {
    pub order: usize,
    pub size: usize,
    pub chi: usize,
    pub omega: usize,
    pub max_degree: usize,
    pub nu: usize,
    pub beta1: usize,
    pub n_triangles: usize,
    /// `None` when the host `I_v + M_{v+1}` would exceed the order cap.
    pub sigma: Option<Sigma>,
    /// Minimum over single-edge control sets `{u1 u2}` of
    /// `min(d(u1), d(u2))`; only defined when `beta1 == 1`.
    pub f_value: Option<usize>,
    pub has_isolates: bool,
}

pub fn derived_profile(f: &Graph) -> Result<DerivedProfile> {
    if f.size() == 0 {
        return Err(Error::Precondition(
            "the profile needs a graph with at least one edge".into(),
        ));
    }
    let control = edge_control_number(f);
    let f_value = (control.beta1 == 1).then(|| {
        control
            .witnesses
            .iter()
            .map(|w| {
                let (u, v) = w[0];
                f.degree(u).min(f.degree(v))
            })
            .min()
            .expect("at least one witness")
    });
    Ok(DerivedProfile {
        order: f.order(),
        size: f.size(),
        chi: chromatic_number(f),
        omega: f.clique_number(),
        max_degree: f.max_degree(),
        nu: matching_number(f),
        beta1: control.beta1,
        n_triangles: triangle_stats(f).total,
        sigma: match sigma(f) {
            Ok(s) => Some(s),
            Err(Error::OrderOverflow(_)) => None,
            Err(e) => return Err(e),
        },
        f_value,
        has_isolates: f.has_isolated_vertices(),
    })
}

/// Which condition satisfied a property predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyCondition {
    /// (1) the path length is even (`P`), or some component is even (`R`).
    Parity,
    /// (2) `v(F)` is at most the small-part size plus two.
    SmallOrder,
    /// (3) a single triangle whose control edge has a low-degree endpoint.
    SingleTriangle,
}

impl PropertyCondition {
    pub fn number(self) -> u8 {
        match self {
            PropertyCondition::Parity => 1,
            PropertyCondition::SmallOrder => 2,
            PropertyCondition::SingleTriangle => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub holds: bool,
    pub condition: Option<PropertyCondition>,
}

fn check_single_edge_hypotheses(profile: &DerivedProfile) -> Result<usize> {
    if profile.beta1 != 1 {
        return Err(Error::Precondition(format!(
            "the property needs beta1(F) = 1, got {}",
            profile.beta1
        )));
    }
    if profile.chi < 3 {
        return Err(Error::Precondition(format!(
            "the property needs chi(F) >= 3, got {}",
            profile.chi
        )));
    }
    if profile.has_isolates {
        return Err(Error::Precondition(
            "F must have no isolated vertices".into(),
        ));
    }
    Ok(profile.f_value.expect("defined when beta1 = 1"))
}

/// The three conditions evaluated in order against `budget`, the quantity
/// `k*floor(l/2)` (or `sum l_i` for a linear forest).
fn evaluate_conditions(
    profile: &DerivedProfile,
    parity: bool,
    budget: usize,
) -> Result<PropertyVerdict> {
    let f_value = check_single_edge_hypotheses(profile)?;
    let condition = if parity {
        Some(PropertyCondition::Parity)
    } else if profile.order <= budget + 1 {
        Some(PropertyCondition::SmallOrder)
    } else if profile.n_triangles == 1 && f_value <= budget {
        Some(PropertyCondition::SingleTriangle)
    } else {
        None
    };
    Ok(PropertyVerdict {
        holds: condition.is_some(),
        condition,
    })
}

/// Property `P` of the triple `(F, k, l)`.
pub fn property_p(f: &Graph, k: usize, ell: usize) -> Result<PropertyVerdict> {
    property_p_with(&derived_profile(f)?, k, ell)
}

pub fn property_p_with(profile: &DerivedProfile, k: usize, ell: usize) -> Result<PropertyVerdict> {
    evaluate_conditions(profile, ell % 2 == 0, k * (ell / 2))
}

/// Property `R` of the pair `(F, H)`.
pub fn property_r(f: &Graph, spec: &LinearForestSpec) -> Result<PropertyVerdict> {
    property_r_with(&derived_profile(f)?, spec)
}

pub fn property_r_with(
    profile: &DerivedProfile,
    spec: &LinearForestSpec,
) -> Result<PropertyVerdict> {
    if spec.components() < 2 {
        return Err(Error::Precondition(
            "the forest needs at least two components".into(),
        ));
    }
    if spec.is_all_p3() {
        return Err(Error::Precondition("the forest must not be kP3".into()));
    }
    evaluate_conditions(profile, spec.has_even_path(), spec.ell())
}

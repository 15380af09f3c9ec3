//! Exhaustive ground truth for small orders: isomorph-free generation of
//! family-free graphs by canonical vertex augmentation, and exact `ex(m, F)`.
//!
//! Each graph on `j + 1` vertices has one canonical parent, obtained by
//! deleting a vertex of maximum `(degree, neighbor degree sum)` chosen by
//! canonical position. Children are generated one per `Aut(parent)`-orbit of
//! neighborhoods and kept only when the new vertex is in the orbit of that
//! distinguished vertex. Freeness is inherited by induced subgraphs, so
//! branches that contain a family member are cut at once, and only copies
//! through the new vertex need to be searched.
//!
//! Checkpoint files are JSON lines: a header object
//! `{"m", "family_key", "split_level", "subtrees"}` followed by one
//! [`SubtreeRecord`] per finished subtree. A resumed run skips recorded
//! subtrees, so its result matches an uninterrupted one.

use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canon::{canonical_labeling, canonicalize, CanonicalForm};
use crate::error::{Error, Result};
use crate::family::{is_free_through, ForbiddenFamily};
use crate::graph::{bit, Bits, Graph};
use crate::graph6;

pub const MAX_DEFAULT_ORDER: usize = 10;
pub const MAX_LONG_RUN_ORDER: usize = 11;
pub const DEFAULT_WITNESS_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExValue {
    Edges(u64),
    /// No graph on `m` vertices avoids the family.
    Infeasible,
}

impl ExValue {
    pub fn edges(self) -> Option<u64> {
        match self {
            ExValue::Edges(e) => Some(e),
            ExValue::Infeasible => None,
        }
    }
}

impl fmt::Display for ExValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExValue::Edges(e) => write!(f, "{e}"),
            ExValue::Infeasible => f.write_str("infeasible"),
        }
    }
}

impl Serialize for ExValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExValue::Edges(e) => s.serialize_u64(*e),
            ExValue::Infeasible => s.serialize_str("infeasible"),
        }
    }
}

impl<'de> Deserialize<'de> for ExValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Edges(u64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Edges(e) => Ok(ExValue::Edges(e)),
            Raw::Tag(t) if t == "infeasible" => Ok(ExValue::Infeasible),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("unknown ex value {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Accepted nodes of the augmentation tree, leaves included.
    pub nodes: u64,
    /// Family-free graphs on the target order.
    pub leaves: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub m: usize,
    pub family_key: String,
    pub ex_value: ExValue,
    pub witness_count: u64,
    /// Canonical graph6 codes of extremal graphs, smallest first, capped.
    pub witnesses: Vec<String>,
    pub stats: SearchStats,
    /// Set when the node budget ran out; the value is then only a lower bound.
    pub partial: bool,
}

impl OracleResult {
    pub fn witness_graphs(&self) -> Vec<Graph> {
        self.witnesses
            .iter()
            .map(|c| graph6::decode_str(c).expect("oracle emits valid graph6"))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub witness_cap: usize,
    /// Stop after this many tree nodes and mark the result partial.
    pub node_budget: Option<u64>,
    /// Permits `m = 11`.
    pub long_run: bool,
    pub checkpoint: Option<PathBuf>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            witness_cap: DEFAULT_WITNESS_CAP,
            node_budget: None,
            long_run: false,
            checkpoint: None,
        }
    }
}

fn check_range(m: usize, long_run: bool) -> Result<()> {
    let cap = if long_run {
        MAX_LONG_RUN_ORDER
    } else {
        MAX_DEFAULT_ORDER
    };
    if m == 0 || m > cap {
        let hint = if !long_run && m == MAX_LONG_RUN_ORDER {
            " (11 needs the long-run flag)"
        } else {
            ""
        };
        return Err(Error::OracleRange(format!(
            "order {m} is outside 1..={cap}{hint}"
        )));
    }
    Ok(())
}

struct Augmenter<'a> {
    family: &'a ForbiddenFamily,
}

impl Augmenter<'_> {
    /// Accepted family-free children of `g`, in deterministic order.
    fn children(&self, g: &Graph) -> Vec<Graph> {
        let j = g.order();
        let reps = if j == 0 {
            vec![0]
        } else {
            subset_orbit_representatives(j, &canonical_labeling(g).generators)
        };
        let mut out = Vec::new();
        for s in reps {
            let mut h = g.clone();
            let v = h.add_vertex().expect("orders stay below the cap");
            for w in Bits(s) {
                h.add_edge(v, w);
            }
            if is_canonical_extension(&h, v) && is_free_through(&h, self.family, v) {
                out.push(h);
            }
        }
        out
    }
}

/// One subset of `0..n` per orbit of the group generated by `generators`.
fn subset_orbit_representatives(n: usize, generators: &[Vec<usize>]) -> Vec<u64> {
    let total = 1usize << n;
    if generators.is_empty() {
        return (0..total as u64).collect();
    }
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    let mut stack = Vec::new();
    for s in 0..total {
        if seen[s] {
            continue;
        }
        reps.push(s as u64);
        seen[s] = true;
        stack.push(s as u64);
        while let Some(t) = stack.pop() {
            for gen in generators {
                let img = Bits(t).fold(0u64, |acc, v| acc | bit(gen[v])) as usize;
                if !seen[img] {
                    seen[img] = true;
                    stack.push(img as u64);
                }
            }
        }
    }
    reps
}

fn deletion_key(g: &Graph, v: usize) -> (usize, usize) {
    (g.degree(v), Bits(g.neighbors(v)).map(|w| g.degree(w)).sum())
}

/// Whether `v` is in the orbit of the canonical deletion vertex of `h`.
fn is_canonical_extension(h: &Graph, v: usize) -> bool {
    let keys: Vec<_> = (0..h.order()).map(|w| deletion_key(h, w)).collect();
    let best = *keys.iter().max().expect("nonempty graph");
    if keys[v] != best {
        return false;
    }
    let candidates: Vec<usize> = (0..h.order()).filter(|&w| keys[w] == best).collect();
    if candidates.len() == 1 {
        return true;
    }
    let lab = canonical_labeling(h);
    let chosen = *candidates
        .iter()
        .max_by_key(|&&w| lab.position[w])
        .expect("nonempty candidates");
    let orbits = lab.orbits();
    orbits[chosen] == orbits[v]
}

/// Budget shared by parallel workers.
struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn take(&self) -> bool {
        let used = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        if self.limit.is_some_and(|l| used > l) {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

fn dfs(
    aug: &Augmenter,
    g: &Graph,
    m: usize,
    budget: &Budget,
    nodes: &mut u64,
    visit: &mut dyn FnMut(&Graph),
) {
    if g.order() == m {
        visit(g);
        return;
    }
    for child in aug.children(g) {
        if !budget.take() {
            return;
        }
        *nodes += 1;
        dfs(aug, &child, m, budget, nodes, visit);
    }
}

/// Level at which the tree is cut into parallel subtrees. The first levels
/// hold only a handful of nodes, so the cut sits a few levels above the
/// leaves.
fn split_level(m: usize) -> usize {
    if m >= 7 {
        m - 3
    } else {
        m
    }
}

/// Nodes at `level`, generated sequentially in deterministic order.
fn frontier(aug: &Augmenter, level: usize, budget: &Budget, nodes: &mut u64) -> Vec<Graph> {
    let mut layer = vec![Graph::empty(0).expect("order 0")];
    for _ in 0..level {
        let mut next = Vec::new();
        for g in &layer {
            for child in aug.children(g) {
                if !budget.take() {
                    return Vec::new();
                }
                *nodes += 1;
                next.push(child);
            }
        }
        layer = next;
    }
    layer
}

#[derive(Debug, Clone, Default)]
pub struct EnumerationStats {
    pub nodes: u64,
    pub leaves: u64,
    pub partial: bool,
}

/// Calls `visitor` once per isomorphism class of `family`-free graphs on
/// `m` vertices. The visitor may run on several threads at once.
pub fn enumerate_free_graphs(
    m: usize,
    family: &ForbiddenFamily,
    long_run: bool,
    visitor: &(dyn Fn(&Graph) + Sync),
) -> Result<EnumerationStats> {
    check_range(m, long_run)?;
    let aug = Augmenter { family };
    let budget = Budget {
        limit: None,
        used: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
    };
    let mut nodes = 0;
    let roots = frontier(&aug, split_level(m), &budget, &mut nodes);
    let counts: Vec<(u64, u64)> = roots
        .par_iter()
        .map(|root| {
            let mut nodes = 0;
            let mut leaves = 0;
            dfs(&aug, root, m, &budget, &mut nodes, &mut |g| {
                leaves += 1;
                visitor(g);
            });
            (nodes, leaves)
        })
        .collect();
    Ok(EnumerationStats {
        nodes: nodes + counts.iter().map(|c| c.0).sum::<u64>(),
        leaves: counts.iter().map(|c| c.1).sum(),
        partial: false,
    })
}

/// Canonical forms of every `family`-free class on `m` vertices, sorted.
pub fn free_graph_classes(m: usize, family: &ForbiddenFamily) -> Result<Vec<CanonicalForm>> {
    let found = Mutex::new(Vec::new());
    enumerate_free_graphs(m, family, false, &|g| {
        let form = canonicalize(g);
        found.lock().expect("collector lock").push(form);
    })?;
    let mut forms = found.into_inner().expect("collector lock");
    forms.sort();
    Ok(forms)
}

/// Best value seen in one subtree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtreeRecord {
    pub subtree: usize,
    /// Largest edge count among free leaves, if any leaf was reached.
    pub max_edges: Option<u64>,
    pub count: u64,
    pub witnesses: Vec<String>,
    pub nodes: u64,
    pub leaves: u64,
}

impl SubtreeRecord {
    fn offer(&mut self, g: &Graph, cap: usize) {
        let e = g.size() as u64;
        match self.max_edges {
            Some(best) if e < best => return,
            Some(best) if e == best => self.count += 1,
            _ => {
                self.max_edges = Some(e);
                self.count = 1;
                self.witnesses.clear();
            }
        }
        insert_capped(&mut self.witnesses, canonicalize(g).code, cap);
    }

    fn merge(&mut self, other: &SubtreeRecord, cap: usize) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        let Some(e) = other.max_edges else { return };
        match self.max_edges {
            Some(best) if e < best => return,
            Some(best) if e == best => self.count += other.count,
            _ => {
                self.max_edges = Some(e);
                self.count = other.count;
                self.witnesses.clear();
            }
        }
        for w in &other.witnesses {
            insert_capped(&mut self.witnesses, w.clone(), cap);
        }
    }
}

/// Keeps `list` sorted by canonical order (length, then code) and at most `cap` long.
fn insert_capped(list: &mut Vec<String>, code: String, cap: usize) {
    let key = |c: &String| (c.len(), c.clone());
    let pos = list.partition_point(|c| key(c) < key(&code));
    if list.get(pos) == Some(&code) || pos >= cap {
        return;
    }
    list.insert(pos, code);
    list.truncate(cap);
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct CheckpointHeader {
    m: usize,
    family_key: String,
    split_level: usize,
    subtrees: usize,
}

struct Checkpoint {
    file: Mutex<File>,
    done: HashMap<usize, SubtreeRecord>,
}

impl Checkpoint {
    fn open(path: &PathBuf, header: &CheckpointHeader) -> Result<Self> {
        let io = |e: std::io::Error| Error::Cache(format!("checkpoint {}: {e}", path.display()));
        let mut done = HashMap::new();
        let exists = path.exists() && std::fs::metadata(path).map_err(io)?.len() > 0;
        if exists {
            let reader = BufReader::new(File::open(path).map_err(io)?);
            let mut lines = reader.lines();
            let first = lines
                .next()
                .transpose()
                .map_err(io)?
                .ok_or_else(|| Error::Cache("empty checkpoint".into()))?;
            let found: CheckpointHeader = serde_json::from_str(&first)
                .map_err(|e| Error::Cache(format!("checkpoint header: {e}")))?;
            if &found != header {
                return Err(Error::Cache(format!(
                    "checkpoint {} belongs to a different search",
                    path.display()
                )));
            }
            for line in lines {
                let line = line.map_err(io)?;
                // a torn final line from an interrupted run is ignored
                if let Ok(rec) = serde_json::from_str::<SubtreeRecord>(&line) {
                    done.insert(rec.subtree, rec);
                }
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io)?;
        if !exists {
            let line = serde_json::to_string(header).expect("header serializes");
            writeln!(file, "{line}").map_err(io)?;
        }
        Ok(Checkpoint {
            file: Mutex::new(file),
            done,
        })
    }

    fn record(&self, rec: &SubtreeRecord) -> Result<()> {
        let line = serde_json::to_string(rec).expect("record serializes");
        let mut f = self.file.lock().expect("checkpoint lock");
        writeln!(f, "{line}")
            .and_then(|_| f.flush())
            .map_err(|e| Error::Cache(format!("checkpoint write: {e}")))
    }
}

/// Exact `ex(m, family)` with extremal witnesses.
pub fn max_edges_free(
    m: usize,
    family: &ForbiddenFamily,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    check_range(m, opts.long_run)?;
    let start = Instant::now();
    let family_key = family.key();
    if family.is_empty() {
        let k = Graph::complete(m)?;
        return Ok(OracleResult {
            m,
            family_key,
            ex_value: ExValue::Edges(k.size() as u64),
            witness_count: 1,
            witnesses: vec![canonicalize(&k).code]
                .into_iter()
                .take(opts.witness_cap)
                .collect(),
            stats: SearchStats::default(),
            partial: false,
        });
    }
    let aug = Augmenter { family };
    let budget = Budget {
        limit: opts.node_budget,
        used: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
    };
    let level = split_level(m);
    let mut frontier_nodes = 0;
    let roots = frontier(&aug, level, &budget, &mut frontier_nodes);
    let checkpoint = match &opts.checkpoint {
        Some(path) => Some(Checkpoint::open(
            path,
            &CheckpointHeader {
                m,
                family_key: family_key.clone(),
                split_level: level,
                subtrees: roots.len(),
            },
        )?),
        None => None,
    };
    let cap = opts.witness_cap;
    let records: Vec<Result<SubtreeRecord>> = roots
        .par_iter()
        .enumerate()
        .map(|(i, root)| {
            if let Some(done) = checkpoint.as_ref().and_then(|c| c.done.get(&i)) {
                return Ok(done.clone());
            }
            let mut rec = SubtreeRecord {
                subtree: i,
                ..SubtreeRecord::default()
            };
            let mut nodes = 0;
            let mut leaves = 0;
            dfs(&aug, root, m, &budget, &mut nodes, &mut |g| {
                leaves += 1;
                rec.offer(g, cap);
            });
            rec.nodes = nodes;
            rec.leaves = leaves;
            if let Some(c) = &checkpoint {
                if !budget.exhausted.load(Ordering::Relaxed) {
                    c.record(&rec)?;
                }
            }
            Ok(rec)
        })
        .collect();
    let mut total = SubtreeRecord {
        nodes: frontier_nodes,
        ..SubtreeRecord::default()
    };
    for rec in records {
        total.merge(&rec?, cap);
    }
    let partial = budget.exhausted.load(Ordering::Relaxed);
    Ok(OracleResult {
        m,
        family_key,
        ex_value: total.max_edges.map_or(ExValue::Infeasible, ExValue::Edges),
        witness_count: total.count,
        witnesses: total.witnesses,
        stats: SearchStats {
            nodes: total.nodes,
            leaves: total.leaves,
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
        partial,
    })
}

/// Where an `ex` value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExSource {
    Oracle,
    Cache,
    ClosedForm,
}

/// Persistent memo of `ex(m, family)` keyed by the family key.
pub trait ExStore: Sync {
    fn get(&self, m: usize, family_key: &str) -> Result<Option<ExValue>>;
    /// Records a finished result; a different value for a stored key is an error.
    fn put(&self, m: usize, family_key: &str, value: ExValue, witness_count: u64) -> Result<()>;
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    entries: Mutex<HashMap<(usize, String), ExValue>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        MemoryStore::default()
    }
}

impl ExStore for MemoryStore {
    fn get(&self, m: usize, family_key: &str) -> Result<Option<ExValue>> {
        let map = self.entries.lock().expect("store lock");
        Ok(map.get(&(m, family_key.to_string())).copied())
    }

    fn put(&self, m: usize, family_key: &str, value: ExValue, _witness_count: u64) -> Result<()> {
        let mut map = self.entries.lock().expect("store lock");
        match map.insert((m, family_key.to_string()), value) {
            Some(old) if old != value => Err(Error::Cache(format!(
                "conflicting values {old} and {value} for ex({m}, {family_key})"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExLookup {
    pub value: ExValue,
    pub source: ExSource,
}

/// Cache-first `ex(m, family)`; the family is reduced before keying.
pub fn ex_family(store: &dyn ExStore, m: usize, family: &ForbiddenFamily) -> Result<ExLookup> {
    let family = if family.is_reduced() {
        family.clone()
    } else {
        family.reduce()
    };
    let key = family.key();
    if let Some(value) = store.get(m, &key)? {
        return Ok(ExLookup {
            value,
            source: ExSource::Cache,
        });
    }
    let res = max_edges_free(m, &family, &OracleOptions::default())?;
    if res.partial {
        return Err(Error::BudgetExhausted {
            nodes: res.stats.nodes,
        });
    }
    store.put(m, &key, res.ex_value, res.witness_count)?;
    Ok(ExLookup {
        value: res.ex_value,
        source: ExSource::Oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn single(g: Graph) -> ForbiddenFamily {
        ForbiddenFamily::single(&g)
    }

    fn exact(m: usize, fam: &ForbiddenFamily) -> ExValue {
        max_edges_free(m, fam, &OracleOptions::default())
            .unwrap()
            .ex_value
    }

    /// Every labeled graph on `m` vertices, filtered and reduced to classes.
    fn brute_classes(m: usize, fam: &ForbiddenFamily) -> BTreeSet<CanonicalForm> {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        (0u64..1 << pairs.len())
            .map(|mask| {
                let edges: Vec<_> = Bits(mask).map(|b| pairs[b]).collect();
                Graph::from_edges(m, &edges).unwrap()
            })
            .filter(|g| crate::family::is_free(g, fam))
            .map(|g| canonicalize(&g))
            .collect()
    }

    #[test]
    fn class_counts() {
        let none = ForbiddenFamily::new([]);
        for (m, want) in [
            (1, 1),
            (2, 2),
            (3, 4),
            (4, 11),
            (5, 34),
            (6, 156),
            (7, 1044),
        ] {
            let stats = enumerate_free_graphs(m, &none, false, &|_| {}).unwrap();
            assert_eq!(stats.leaves, want, "m = {m}");
        }
        let k3 = single(Graph::complete(3).unwrap());
        assert_eq!(free_graph_classes(5, &k3).unwrap().len(), 14);
    }

    #[test]
    fn pruned_generation_matches_filtering() {
        let families = [
            ForbiddenFamily::new([]),
            single(Graph::complete(3).unwrap()),
            single(Graph::path(4).unwrap()),
            single(Graph::cycle(4).unwrap()),
            ForbiddenFamily::new([Graph::complete(4).unwrap(), Graph::cycle(5).unwrap()]),
            single(Graph::from_edges(3, &[(0, 1)]).unwrap()),
        ];
        for fam in &families {
            for m in 1..=6 {
                let got: BTreeSet<_> = free_graph_classes(m, fam).unwrap().into_iter().collect();
                assert_eq!(got, brute_classes(m, fam), "m = {m}, family {}", fam.key());
            }
        }
    }

    #[test]
    fn ex_examples() {
        assert_eq!(
            exact(5, &single(Graph::path(3).unwrap())),
            ExValue::Edges(2)
        );
        assert_eq!(
            exact(6, &single(Graph::complete(3).unwrap())),
            ExValue::Edges(9)
        );
        assert_eq!(
            exact(6, &single(Graph::path(4).unwrap())),
            ExValue::Edges(6)
        );
        assert_eq!(
            exact(4, &single(Graph::empty(3).unwrap())),
            ExValue::Infeasible
        );
        assert_eq!(
            exact(2, &single(Graph::empty(3).unwrap())),
            ExValue::Edges(1)
        );
        assert_eq!(exact(4, &ForbiddenFamily::new([])), ExValue::Edges(6));
        let k1 = single(Graph::empty(1).unwrap());
        assert_eq!(exact(1, &k1), ExValue::Infeasible);
    }

    #[test]
    fn witnesses_are_extremal_and_free() {
        let fam = single(Graph::complete(3).unwrap());
        let res = max_edges_free(7, &fam, &OracleOptions::default()).unwrap();
        assert_eq!(res.ex_value, ExValue::Edges(12));
        assert_eq!(res.witness_count, 1);
        for w in res.witness_graphs() {
            assert_eq!(w.size(), 12);
            assert!(crate::family::is_free(&w, &fam));
        }
        let c4 = single(Graph::cycle(4).unwrap());
        let res = max_edges_free(
            6,
            &c4,
            &OracleOptions {
                witness_cap: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(res.ex_value, ExValue::Edges(7));
        assert_eq!(res.witnesses.len(), 1);
        assert!(res.witness_count >= 1);
    }

    #[test]
    fn range_and_budget() {
        let fam = single(Graph::complete(3).unwrap());
        assert!(matches!(
            max_edges_free(0, &fam, &OracleOptions::default()),
            Err(Error::OracleRange(_))
        ));
        assert!(matches!(
            max_edges_free(11, &fam, &OracleOptions::default()),
            Err(Error::OracleRange(_))
        ));
        let res = max_edges_free(
            8,
            &fam,
            &OracleOptions {
                node_budget: Some(50),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(res.partial);
        let store = MemoryStore::new();
        assert!(ex_family(&store, 4, &single(Graph::empty(3).unwrap())).is_ok());
    }

    #[test]
    fn deterministic_and_resumable() {
        let fam = single(Graph::cycle(4).unwrap());
        let strip = |mut r: OracleResult| {
            r.stats.elapsed_ms = 0;
            r
        };
        let a = strip(max_edges_free(8, &fam, &OracleOptions::default()).unwrap());
        let b = strip(max_edges_free(8, &fam, &OracleOptions::default()).unwrap());
        assert_eq!(a, b);
        let dir = std::env::temp_dir().join(format!("turan-ckpt-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let opts = OracleOptions {
            checkpoint: Some(dir.clone()),
            ..Default::default()
        };
        let first = strip(max_edges_free(8, &fam, &opts).unwrap());
        // drop half the recorded subtrees to simulate an interrupted run
        let text = std::fs::read_to_string(&dir).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let keep = 1 + (lines.len() - 1) / 2;
        std::fs::write(&dir, lines[..keep].join("\n") + "\n").unwrap();
        let resumed = strip(max_edges_free(8, &fam, &opts).unwrap());
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(first.ex_value, a.ex_value);
        assert_eq!(resumed.ex_value, a.ex_value);
        assert_eq!(resumed.witnesses, a.witnesses);
        assert_eq!(resumed.witness_count, a.witness_count);
    }

    #[test]
    fn cache_first_lookup() {
        let store = MemoryStore::new();
        let fam = single(Graph::complete(3).unwrap());
        let a = ex_family(&store, 6, &fam).unwrap();
        assert_eq!((a.value, a.source), (ExValue::Edges(9), ExSource::Oracle));
        let b = ex_family(&store, 6, &fam).unwrap();
        assert_eq!((b.value, b.source), (ExValue::Edges(9), ExSource::Cache));
        assert!(store.put(6, &fam.key(), ExValue::Edges(8), 1).is_err());
    }

    #[test]
    fn ex_value_serde() {
        assert_eq!(serde_json::to_string(&ExValue::Edges(3)).unwrap(), "3");
        assert_eq!(
            serde_json::to_string(&ExValue::Infeasible).unwrap(),
            "\"infeasible\""
        );
        let v: ExValue = serde_json::from_str("\"infeasible\"").unwrap();
        assert_eq!(v, ExValue::Infeasible);
    }
}

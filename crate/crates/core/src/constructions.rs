//! Lower-bound constructions and their machine certificates.
//!
//! Layouts put the small part first (`0..s`) and the large part after it.
//! An extra large-part edge always joins the first two large-part vertices.

use serde::Serialize;

use crate::containment::LinearForestSpec;
use crate::error::{Error, Result};
use crate::family::{FamilyMember, ForbiddenFamily};
use crate::graph::{choose2, Graph, MAX_ORDER};
use crate::graph6;
use crate::invariants::{family_g, family_h, Budget, GVariant};
use crate::oracle::{ex_family, max_edges_free, ExStore, ExValue, OracleOptions};

/// The complete bipartite frame `K_{s, n-s}` and the graph it must avoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BipartiteHost {
    /// `k P_l`, small part `k*floor(l/2) - 1`.
    PathPacking { k: usize, ell: usize },
    /// A general linear forest, small part `sum floor(v_i/2) - 1`.
    Forest { spec: LinearForestSpec },
}

impl BipartiteHost {
    pub fn forest(&self) -> Result<LinearForestSpec> {
        match self {
            BipartiteHost::PathPacking { k, ell } => LinearForestSpec::uniform(*k, *ell),
            BipartiteHost::Forest { spec } => Ok(spec.clone()),
        }
    }

    pub fn small_part(&self) -> Result<usize> {
        let half = self.forest()?.ell();
        if half < 2 {
            return Err(Error::InvalidParameters(
                "the forest needs at least two half-lengths for a nonempty small part".into(),
            ));
        }
        Ok(half - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WitnessKind {
    /// `K_{s, n-s}` alone.
    CompleteBipartite { host: BipartiteHost },
    /// `K_{s, n-s}` plus one large-part edge.
    G0 { host: BipartiteHost },
    /// An extremal `G_1(F)`-free graph in the small part.
    H1 { host: BipartiteHost },
    /// An extremal `G_2(F)`-free graph in the small part, plus one large-part edge.
    H2 { host: BipartiteHost },
    /// `I_{k-1} + M^i_{n-k+1}` with an extremal `H_i(F)`-free graph on the
    /// `k - 1` side (edgeless when no `F` is given). `i = None` takes the
    /// largest matching together with `H(F)`.
    IndependentMatching { k: usize, i: Option<usize> },
    /// `K_{k-1} + M^{floor((n-k+1)/2)}_{n-k+1}`.
    CliqueMatching { k: usize },
}

impl WitnessKind {
    pub fn name(&self) -> &'static str {
        let forest = |h: &BipartiteHost| matches!(h, BipartiteHost::Forest { .. });
        match self {
            WitnessKind::CompleteBipartite { .. } => "K_ab",
            WitnessKind::G0 { host } if forest(host) => "G0'",
            WitnessKind::G0 { .. } => "G0",
            WitnessKind::H1 { host } if forest(host) => "H1'",
            WitnessKind::H1 { .. } => "H1",
            WitnessKind::H2 { host } if forest(host) => "H2'",
            WitnessKind::H2 { .. } => "H2",
            WitnessKind::IndependentMatching { .. } => "IM",
            WitnessKind::CliqueMatching { .. } => "KM",
        }
    }

    fn needs_forbidden(&self) -> bool {
        matches!(self, WitnessKind::H1 { .. } | WitnessKind::H2 { .. })
    }
}

/// A construction request: the kind, the forbidden graph `F` (if any) and `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCase {
    pub kind: WitnessKind,
    pub forbidden: Option<Graph>,
    pub n: u64,
}

impl WitnessCase {
    /// Size of the side that carries the embedded graph.
    pub fn small_part(&self) -> Result<usize> {
        match &self.kind {
            WitnessKind::CompleteBipartite { host }
            | WitnessKind::G0 { host }
            | WitnessKind::H1 { host }
            | WitnessKind::H2 { host } => host.small_part(),
            WitnessKind::IndependentMatching { k, .. } | WitnessKind::CliqueMatching { k } => {
                if *k < 2 {
                    return Err(Error::InvalidParameters(format!(
                        "k = {k} must be at least 2"
                    )));
                }
                Ok(k - 1)
            }
        }
    }

    /// The family the embedded small-part graph must avoid.
    pub fn small_part_family(&self) -> Result<Option<ForbiddenFamily>> {
        let f = match (&self.forbidden, self.kind.needs_forbidden()) {
            (Some(f), _) => f,
            (None, true) => {
                return Err(Error::InvalidParameters(format!(
                    "{} needs a forbidden graph",
                    self.kind.name()
                )))
            }
            (None, false) => return Ok(None),
        };
        Ok(match &self.kind {
            WitnessKind::H1 { .. } => Some(family_g(f, GVariant::One)),
            WitnessKind::H2 { .. } => Some(family_g(f, GVariant::Two)),
            WitnessKind::IndependentMatching { i, .. } => {
                let budget = i.map_or(Budget::Unbounded, Budget::Finite);
                Some(family_h(f, budget))
            }
            _ => None,
        })
    }

    /// `{F, H}` for the graph `H` the construction has to avoid.
    pub fn theorem_family(&self) -> Result<ForbiddenFamily> {
        let pattern = match &self.kind {
            WitnessKind::CompleteBipartite { host }
            | WitnessKind::G0 { host }
            | WitnessKind::H1 { host }
            | WitnessKind::H2 { host } => host.forest()?.graph()?,
            WitnessKind::IndependentMatching { k, .. } | WitnessKind::CliqueMatching { k } => {
                LinearForestSpec::uniform(*k, 3)?.graph()?
            }
        };
        Ok(ForbiddenFamily::new(
            self.forbidden.iter().cloned().chain([pattern]),
        ))
    }

    /// Number of large-part matching edges.
    fn matching_edges(&self) -> Result<u64> {
        let s = self.small_part()? as u64;
        let rest = self.n - s;
        Ok(match &self.kind {
            WitnessKind::G0 { .. } | WitnessKind::H2 { .. } => 1,
            WitnessKind::CompleteBipartite { .. } | WitnessKind::H1 { .. } => 0,
            WitnessKind::IndependentMatching { i: Some(i), .. } => {
                if *i as u64 > rest / 2 {
                    return Err(Error::InvalidParameters(format!(
                        "{i} matching edges do not fit on {rest} vertices"
                    )));
                }
                *i as u64
            }
            WitnessKind::IndependentMatching { i: None, .. }
            | WitnessKind::CliqueMatching { .. } => rest / 2,
        })
    }

    fn check_order(&self) -> Result<usize> {
        let s = self.small_part()?;
        let min = s as u64
            + match self.kind {
                WitnessKind::G0 { .. } | WitnessKind::H2 { .. } => 2,
                _ => 1,
            };
        if self.n < min {
            return Err(Error::InvalidParameters(format!(
                "{} needs n >= {min}, got {}",
                self.kind.name(),
                self.n
            )));
        }
        Ok(s)
    }
}

/// Where a materialized witness came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub name: &'static str,
    pub kind: WitnessKind,
    pub n: u64,
    pub small_part: usize,
    /// graph6 of `F`, if the case has one.
    pub forbidden: Option<String>,
    /// Key of the family the embedded graph avoids.
    pub small_part_family: Option<String>,
    /// graph6 of the embedded small-part graph (vertices `0..s`).
    pub embedded: Option<String>,
    pub matching_edges: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltWitness {
    pub graph: Graph,
    pub construction: Construction,
}

/// The embedded graph: first oracle witness, or the complete/edgeless graph
/// where the case fixes it.
fn embedded_graph(case: &WitnessCase, s: usize) -> Result<(Graph, Option<String>)> {
    match (&case.kind, case.small_part_family()?) {
        (WitnessKind::CliqueMatching { .. }, _) => Ok((Graph::complete(s)?, None)),
        (_, None) => Ok((Graph::empty(s)?, None)),
        (_, Some(fam)) => {
            let res = max_edges_free(s, &fam, &OracleOptions::default())?;
            if res.partial {
                return Err(Error::BudgetExhausted {
                    nodes: res.stats.nodes,
                });
            }
            match res.witnesses.first() {
                Some(code) => Ok((graph6::decode_str(code)?, Some(fam.key()))),
                None => Err(Error::Infeasible {
                    m: s,
                    family: fam.key(),
                }),
            }
        }
    }
}

pub fn build_witness(case: &WitnessCase) -> Result<BuiltWitness> {
    let s = case.check_order()?;
    if case.n > MAX_ORDER as u64 {
        return Err(Error::OrderOverflow(case.n as usize));
    }
    let n = case.n as usize;
    let t = case.matching_edges()? as usize;
    let (inner, family_key) = embedded_graph(case, s)?;
    let mut g = Graph::empty(n)?;
    for (u, v) in inner.edges() {
        g.add_edge(u, v);
    }
    for a in 0..s {
        for b in s..n {
            g.add_edge(a, b);
        }
    }
    for j in 0..t {
        g.add_edge(s + 2 * j, s + 2 * j + 1);
    }
    let construction = Construction {
        name: case.kind.name(),
        kind: case.kind.clone(),
        n: case.n,
        small_part: s,
        forbidden: case.forbidden.as_ref().map(graph6::encode),
        small_part_family: family_key,
        embedded: (inner.size() > 0).then(|| graph6::encode(&inner)),
        matching_edges: t as u64,
    };
    Ok(BuiltWitness {
        graph: g,
        construction,
    })
}

/// Edge count of the construction at order `n`, which may exceed 64.
pub fn lower_bound_edges(case: &WitnessCase, store: &dyn ExStore) -> Result<u128> {
    let s = case.check_order()?;
    let t = case.matching_edges()? as u128;
    let inner: u128 = match (&case.kind, case.small_part_family()?) {
        (WitnessKind::CliqueMatching { .. }, _) => choose2(s as u128)?,
        (_, None) => 0,
        (_, Some(fam)) => match ex_family(store, s, &fam)?.value {
            ExValue::Edges(e) => e as u128,
            ExValue::Infeasible => {
                return Err(Error::Infeasible {
                    m: s,
                    family: fam.key(),
                })
            }
        },
    };
    let cross = (s as u128)
        .checked_mul((case.n - s as u64) as u128)
        .ok_or(Error::Overflow("construction edge count"))?;
    cross
        .checked_add(inner + t)
        .ok_or(Error::Overflow("construction edge count"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberVerdict {
    pub member: String,
    pub free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCertificate {
    /// graph6 of the witness.
    pub witness: String,
    pub construction: Option<Construction>,
    pub claimed_edges: u128,
    pub verified_edges: u128,
    pub freeness: Vec<MemberVerdict>,
    pub ok: bool,
}

pub fn verify_witness(
    w: &Graph,
    family: &ForbiddenFamily,
    claimed_edges: u128,
    construction: Option<Construction>,
) -> WitnessCertificate {
    let freeness: Vec<MemberVerdict> = family
        .members()
        .iter()
        .map(|m: &FamilyMember| MemberVerdict {
            member: m.form.code.clone(),
            free: !m.is_contained_in(w),
        })
        .collect();
    let verified_edges = w.size() as u128;
    let ok = verified_edges == claimed_edges && freeness.iter().all(|v| v.free);
    WitnessCertificate {
        witness: graph6::encode(w),
        construction,
        claimed_edges,
        verified_edges,
        freeness,
        ok,
    }
}

/// Builds, counts and checks one case against its theorem family.
pub fn certify(case: &WitnessCase, store: &dyn ExStore) -> Result<WitnessCertificate> {
    let built = build_witness(case)?;
    let claimed = lower_bound_edges(case, store)?;
    let family = case.theorem_family()?;
    Ok(verify_witness(
        &built.graph,
        &family,
        claimed,
        Some(built.construction),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::MemoryStore;

    fn packing(k: usize, ell: usize) -> BipartiteHost {
        BipartiteHost::PathPacking { k, ell }
    }

    fn case(kind: WitnessKind, f: Option<Graph>, n: u64) -> WitnessCase {
        WitnessCase {
            kind,
            forbidden: f,
            n,
        }
    }

    #[test]
    fn edge_count_examples() {
        let store = MemoryStore::new();
        let g0 = case(
            WitnessKind::G0 {
                host: packing(2, 5),
            },
            None,
            20,
        );
        assert_eq!(lower_bound_edges(&g0, &store).unwrap(), 52);
        assert_eq!(build_witness(&g0).unwrap().graph.size(), 52);
        let h1 = case(
            WitnessKind::H1 {
                host: packing(2, 4),
            },
            Some(Graph::complete(4).unwrap()),
            20,
        );
        assert_eq!(lower_bound_edges(&h1, &store).unwrap(), 53);
        assert_eq!(build_witness(&h1).unwrap().graph.size(), 53);
        let im = case(WitnessKind::IndependentMatching { k: 3, i: None }, None, 21);
        assert_eq!(lower_bound_edges(&im, &store).unwrap(), 47);
        assert_eq!(build_witness(&im).unwrap().graph.size(), 47);
        let big = case(
            WitnessKind::G0 {
                host: packing(2, 5),
            },
            None,
            1_000_000,
        );
        assert_eq!(lower_bound_edges(&big, &store).unwrap(), 2_999_992);
        assert!(matches!(build_witness(&big), Err(Error::OrderOverflow(_))));
        let spec: LinearForestSpec = "4,5".parse().unwrap();
        let kab = case(
            WitnessKind::CompleteBipartite {
                host: BipartiteHost::Forest { spec },
            },
            None,
            1_000_000,
        );
        assert_eq!(lower_bound_edges(&kab, &store).unwrap(), 3 * 999_997);
        let km = case(WitnessKind::CliqueMatching { k: 3 }, None, 100);
        assert_eq!(lower_bound_edges(&km, &store).unwrap(), 246);
    }

    #[test]
    fn certificates() {
        let store = MemoryStore::new();
        let g0 = case(
            WitnessKind::G0 {
                host: packing(2, 5),
            },
            None,
            20,
        );
        assert!(certify(&g0, &store).unwrap().ok);
        let g0_even = case(
            WitnessKind::G0 {
                host: packing(2, 4),
            },
            None,
            20,
        );
        let cert = certify(&g0_even, &store).unwrap();
        assert!(!cert.ok);
        assert_eq!(cert.claimed_edges, cert.verified_edges);
        let k317 = Graph::complete_bipartite(3, 17).unwrap();
        let cert = verify_witness(
            &k317,
            &ForbiddenFamily::single(&Graph::complete(3).unwrap()),
            51,
            None,
        );
        assert!(cert.ok);
        let cert = verify_witness(&k317, &ForbiddenFamily::new([]), 50, None);
        assert!(!cert.ok);
    }

    #[test]
    fn layout() {
        let h2 = case(
            WitnessKind::H2 {
                host: packing(2, 5),
            },
            Some(Graph::complete(5).unwrap()),
            12,
        );
        let built = build_witness(&h2).unwrap();
        let g = &built.graph;
        assert!(g.has_edge(3, 4));
        assert_eq!(built.construction.small_part, 3);
        // G_2(K_5) reduces to K_3, so the small part holds a path on 3 vertices
        assert_eq!(g.edges_within(0b111), 2);
        assert!(case(
            WitnessKind::H1 {
                host: packing(2, 5)
            },
            None,
            12
        )
        .small_part_family()
        .is_err());
    }
}

//! Forbidden families: isomorphism-deduplicated sets of graphs with optional
//! reduction to subgraph-minimal members.

use serde::{Serialize, Serializer};

use crate::canon::{automorphism_orbits, canonical_graph, CanonicalForm};
use crate::containment::{contains_paths, contains_subgraph, contains_subgraph_through_reps};
use crate::graph::Graph;
use crate::graph6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    /// Canonically labeled representative.
    pub graph: Graph,
    pub form: CanonicalForm,
    /// Path orders when the member is a linear forest.
    pub paths: Option<Vec<usize>>,
    /// One vertex per automorphism orbit, for rooted searches.
    orbit_reps: Vec<usize>,
}

impl FamilyMember {
    pub fn new(g: &Graph) -> Self {
        let graph = canonical_graph(g);
        let form = CanonicalForm {
            order: graph.order(),
            code: graph6::encode(&graph),
        };
        let paths = graph.linear_forest_components();
        let orbits = automorphism_orbits(&graph);
        let orbit_reps = (0..graph.order()).filter(|&v| orbits[v] == v).collect();
        FamilyMember {
            graph,
            form,
            paths,
            orbit_reps,
        }
    }

    /// Containment test; linear forests go through the path embedder.
    pub fn is_contained_in(&self, host: &Graph) -> bool {
        match &self.paths {
            Some(orders) if self.graph.size() > 0 => contains_paths(host, orders),
            _ => contains_subgraph(host, &self.graph),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenFamily {
    members: Vec<FamilyMember>,
    reduced: bool,
}

impl ForbiddenFamily {
    /// Deduplicates by canonical form; members are kept in canonical order.
    pub fn new<I: IntoIterator<Item = Graph>>(graphs: I) -> Self {
        let mut members: Vec<FamilyMember> =
            graphs.into_iter().map(|g| FamilyMember::new(&g)).collect();
        members.sort_by(|a, b| a.form.cmp(&b.form));
        members.dedup_by(|a, b| a.form == b.form);
        ForbiddenFamily {
            members,
            reduced: false,
        }
    }

    pub fn single(g: &Graph) -> Self {
        ForbiddenFamily::new([g.clone()])
    }

    pub fn reduced_from<I: IntoIterator<Item = Graph>>(graphs: I) -> Self {
        ForbiddenFamily::new(graphs).reduce()
    }

    /// Keeps only members that contain no other member as a subgraph.
    pub fn reduce(&self) -> Self {
        let mut by_size: Vec<&FamilyMember> = self.members.iter().collect();
        by_size.sort_by_key(|m| (m.graph.order(), m.graph.size()));
        let mut kept: Vec<FamilyMember> = Vec::new();
        for m in by_size {
            if !kept.iter().any(|k| k.is_contained_in(&m.graph)) {
                kept.push(m.clone());
            }
        }
        kept.sort_by(|a, b| a.form.cmp(&b.form));
        ForbiddenFamily {
            members: kept,
            reduced: true,
        }
    }

    /// Union of two families (unreduced).
    pub fn with(&self, other: &ForbiddenFamily) -> Self {
        ForbiddenFamily::new(
            self.members
                .iter()
                .chain(&other.members)
                .map(|m| m.graph.clone()),
        )
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn graphs(&self) -> impl Iterator<Item = &Graph> {
        self.members.iter().map(|m| &m.graph)
    }

    pub fn codes(&self) -> Vec<String> {
        self.members.iter().map(|m| m.form.code.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Comma-joined sorted canonical codes.
    pub fn key(&self) -> String {
        self.codes().join(",")
    }

    /// Whether some member is isomorphic to `g`.
    pub fn contains_member(&self, g: &Graph) -> bool {
        let form = FamilyMember::new(g).form;
        self.members.iter().any(|m| m.form == form)
    }

    /// Whether every member of `self` is also a member of `other`.
    pub fn is_subfamily_of(&self, other: &ForbiddenFamily) -> bool {
        self.members
            .iter()
            .all(|m| other.members.iter().any(|o| o.form == m.form))
    }

    /// Smallest order of an edgeless member, if any. No graph on at least
    /// that many vertices avoids the family.
    pub fn edgeless_member_order(&self) -> Option<usize> {
        self.members
            .iter()
            .filter(|m| m.graph.size() == 0)
            .map(|m| m.graph.order())
            .min()
    }
}

impl Serialize for ForbiddenFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.codes().serialize(s)
    }
}

/// Whether `host` contains no member of `family`.
pub fn is_free(host: &Graph, family: &ForbiddenFamily) -> bool {
    first_contained(host, family).is_none()
}

/// Index of the first member found in `host`.
pub fn first_contained(host: &Graph, family: &ForbiddenFamily) -> Option<usize> {
    family.members.iter().position(|m| m.is_contained_in(host))
}

/// Freeness check for a host whose vertex `root` was just added to a
/// family-free graph: only copies through `root` can exist.
pub(crate) fn is_free_through(host: &Graph, family: &ForbiddenFamily, root: usize) -> bool {
    family
        .members
        .iter()
        .all(|m| !contains_subgraph_through_reps(host, &m.graph, &m.orbit_reps, root))
}

//! Closed-form values of `ex(n, {F, H})` for path packings, `kP_3` and
//! linear forests, with branch dispatch, thresholds and the `K_r` cross-checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::constructions::{BipartiteHost, WitnessCase, WitnessKind};
use crate::containment::LinearForestSpec;
use crate::error::{Error, Result};
use crate::family::ForbiddenFamily;
use crate::graph::{choose2, turan_edge_count, Graph};
use crate::graph6;
use crate::invariants::{
    derived_profile, family_g, family_h, property_p_with, property_r_with, Budget, DerivedProfile,
    GVariant, PropertyVerdict, Sigma,
};
use crate::oracle::{ex_family, ExSource, ExStore, ExValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Smallest `n` the statement covers.
    Value(u128),
    /// The statement only says "n large enough".
    Unspecified,
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Value(v) => s.serialize_u128(*v),
            Threshold::Unspecified => s.serialize_str("unspecified"),
        }
    }
}

/// One `ex(m, family)` value consumed by a formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyTerm {
    pub name: String,
    pub m: usize,
    pub family: Vec<String>,
    pub value: ExValue,
    pub source: ExSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub value: u128,
    /// False for the path upper bound, which is not an exact value.
    pub exact: bool,
    pub branch: String,
    pub n: u64,
    pub constants: BTreeMap<String, u128>,
    pub family_terms: Vec<FamilyTerm>,
    /// Terms dropped from a maximization, with the reason.
    pub excluded: Vec<String>,
    pub threshold: Threshold,
    /// `None` when the threshold is unspecified.
    pub threshold_met: Option<bool>,
    /// The construction whose edge count matches `value`.
    pub construction: Option<WitnessKind>,
    /// graph6 of the forbidden graph the formula was applied to.
    pub forbidden: Option<String>,
    #[serde(skip)]
    pub case: Option<WitnessCase>,
}

impl Prediction {
    fn new(branch: impl Into<String>, n: u64, threshold: Threshold) -> Self {
        let threshold_met = match threshold {
            Threshold::Value(t) => Some(n as u128 >= t),
            Threshold::Unspecified => None,
        };
        Prediction {
            value: 0,
            exact: true,
            branch: branch.into(),
            n,
            constants: BTreeMap::new(),
            family_terms: Vec::new(),
            excluded: Vec::new(),
            threshold,
            threshold_met,
            construction: None,
            forbidden: None,
            case: None,
        }
    }

    fn constant(&mut self, name: &str, v: u128) {
        self.constants.insert(name.to_string(), v);
    }

    fn designate(&mut self, kind: WitnessKind, forbidden: Option<&Graph>) {
        self.forbidden = forbidden.map(graph6::encode);
        self.case = Some(WitnessCase {
            kind: kind.clone(),
            forbidden: forbidden.cloned(),
            n: self.n,
        });
        self.construction = Some(kind);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "which")]
pub enum Classical {
    /// Upper bound on `ex(n, P_l)`.
    ErdosGallai {
        ell: usize,
    },
    PathPacking {
        k: usize,
        ell: usize,
    },
    P3Packing {
        k: usize,
    },
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or(Error::Overflow("formula value"))
}

fn add(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b).ok_or(Error::Overflow("formula value"))
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    let k = k.min(n - k);
    (0..k).try_fold(1u128, |acc, i| {
        acc.checked_mul(n - i)
            .map(|x| x / (i + 1))
            .ok_or(Error::Overflow("binomial coefficient"))
    })
}

/// `s * (n - s)` after checking `n >= s`.
fn frame(n: u64, s: usize) -> Result<u128> {
    if n < s as u64 {
        return Err(Error::InvalidParameters(format!(
            "n = {n} is below the small part size {s}"
        )));
    }
    mul(s as u128, (n - s as u64) as u128)
}

/// `n >= 4 k^2 l^2 (k l + r) (floor(l/2) + 1) C(l, floor(l/2))`.
pub fn path_packing_threshold(k: usize, ell: usize, r: usize) -> Result<u128> {
    let (k, l, r) = (k as u128, ell as u128, r as u128);
    let mut t = mul(4, mul(mul(k, k)?, mul(l, l)?)?)?;
    t = mul(t, add(mul(k, l)?, r)?)?;
    t = mul(t, l / 2 + 1)?;
    mul(t, binomial(l, l / 2)?)
}

fn check_k_ell(k: usize, ell: usize, min_ell: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!(
            "k = {k} must be at least 2"
        )));
    }
    if ell < min_ell {
        return Err(Error::InvalidParameters(format!(
            "l = {ell} must be at least {min_ell}"
        )));
    }
    Ok(())
}

pub fn classical_formulas(which: Classical, n: u64) -> Result<Prediction> {
    let nn = n as u128;
    match which {
        Classical::ErdosGallai { ell } => {
            if ell < 2 {
                return Err(Error::InvalidParameters(format!(
                    "l = {ell} must be at least 2"
                )));
            }
            let mut p = Prediction::new("classical/erdos-gallai-bound", n, Threshold::Value(0));
            p.value = mul(ell as u128 - 2, nn)? / 2;
            p.exact = false;
            Ok(p)
        }
        Classical::PathPacking { k, ell } => {
            check_k_ell(k, ell, 4)?;
            let s = k * (ell / 2) - 1;
            let l = ell as u128;
            let t = add(
                2 * l,
                mul(
                    mul(2 * k as u128, l)?,
                    mul(l.div_ceil(2) + 1, binomial(l, l / 2)?)?,
                )?,
            )?;
            let mut p = Prediction::new("classical/kpl", n, Threshold::Value(t));
            let c = (ell % 2) as u128;
            p.constant("s", s as u128);
            p.constant("c_l", c);
            p.value = add(add(frame(n, s)?, choose2(s as u128)?)?, c)?;
            Ok(p)
        }
        Classical::P3Packing { k } => {
            check_k_ell(k, 3, 3)?;
            let mut p = Prediction::new("classical/kp3", n, Threshold::Value(7 * k as u128));
            let s = k - 1;
            p.value = add(
                add(choose2(s as u128)?, frame(n, s)?)?,
                (n - s as u64) as u128 / 2,
            )?;
            p.designate(WitnessKind::CliqueMatching { k }, None);
            Ok(p)
        }
    }
}

fn family_term(
    store: &dyn ExStore,
    name: String,
    m: usize,
    family: &ForbiddenFamily,
) -> Result<FamilyTerm> {
    let lookup = ex_family(store, m, family)?;
    Ok(FamilyTerm {
        name,
        m,
        family: family.codes(),
        value: lookup.value,
        source: lookup.source,
    })
}

/// Profile with the common hypotheses checked.
fn checked_profile(f: &Graph) -> Result<DerivedProfile> {
    if f.size() == 0 {
        return Err(Error::Precondition("F needs at least one edge".into()));
    }
    let profile = derived_profile(f)?;
    if profile.chi < 3 {
        return Err(Error::Precondition(format!(
            "chi(F) = {} but the formulas need chi(F) >= 3",
            profile.chi
        )));
    }
    Ok(profile)
}

/// `F` without isolated vertices, and the tag suffix recording the strip.
fn stripped(f: &Graph) -> (Graph, &'static str) {
    if f.has_isolated_vertices() {
        (f.without_isolates(), "/isolates-stripped")
    } else {
        (f.clone(), "")
    }
}

fn verdict_tag(letter: &str, v: &PropertyVerdict) -> String {
    match v.condition {
        Some(c) => format!("{letter}/cond{}", c.number()),
        None => format!("not-{letter}"),
    }
}

/// Shared body of the two bipartite-frame theorems (`s` small part, `odd`
/// whether the large part may carry an edge).
fn bipartite_frame(
    p: &mut Prediction,
    f: &Graph,
    host: BipartiteHost,
    s: usize,
    odd: bool,
    store: &dyn ExStore,
) -> Result<()> {
    let g1 = family_term(
        store,
        format!("ex({s}, G1(F))"),
        s,
        &family_g(f, GVariant::One),
    )?;
    let e1 = g1.value.edges().ok_or_else(|| {
        Error::Precondition("G1(F) contains an edgeless graph, so chi(F) <= 2".into())
    })? as u128;
    p.constant("ex_g1", e1);
    p.family_terms.push(g1);
    let mut b = e1;
    let mut kind = WitnessKind::H1 { host: host.clone() };
    if odd {
        let g2 = family_term(
            store,
            format!("ex({s}, G2(F))"),
            s,
            &family_g(f, GVariant::Two),
        )?;
        match g2.value {
            ExValue::Edges(e2) => {
                p.constant("ex_g2", e2 as u128);
                if e2 as u128 + 1 > b {
                    b = e2 as u128 + 1;
                    kind = WitnessKind::H2 { host };
                }
            }
            ExValue::Infeasible => p.excluded.push(format!(
                "1 + ex({s}, G2(F)): no G2(F)-free graph on {s} vertices"
            )),
        }
        p.family_terms.push(g2);
    }
    p.constant("b_l", b);
    p.value = add(frame(p.n, s)?, b)?;
    p.designate(kind, Some(f));
    Ok(())
}

/// `ex(n, {F, kP_l})` for `chi(F) >= 3`.
pub fn predict_kpl(
    f: &Graph,
    k: usize,
    ell: usize,
    n: u64,
    store: &dyn ExStore,
) -> Result<Prediction> {
    check_k_ell(k, ell, 4)?;
    let profile = checked_profile(f)?;
    let s = k * (ell / 2) - 1;
    if profile.beta1 >= 2 {
        let threshold = path_packing_threshold(k, ell, f.order())?;
        let parity = if ell % 2 == 0 { "even" } else { "odd" };
        let mut p = Prediction::new(
            format!("kpl/beta1>=2/{parity}"),
            n,
            Threshold::Value(threshold),
        );
        p.constant("s", s as u128);
        bipartite_frame(
            &mut p,
            f,
            BipartiteHost::PathPacking { k, ell },
            s,
            ell % 2 == 1,
            store,
        )?;
        return Ok(p);
    }
    let (g, strip) = stripped(f);
    let profile = derived_profile(&g)?;
    let verdict = property_p_with(&profile, k, ell)?;
    let threshold = path_packing_threshold(k, ell, g.order())?.max(f.order() as u128);
    let mut p = Prediction::new(
        format!("kpl/beta1=1/{}{strip}", verdict_tag("P", &verdict)),
        n,
        Threshold::Value(threshold),
    );
    let c = u128::from(!verdict.holds);
    p.constant("s", s as u128);
    p.constant("C_Fkl", c);
    p.value = add(frame(n, s)?, c)?;
    let host = BipartiteHost::PathPacking { k, ell };
    let kind = if verdict.holds {
        WitnessKind::CompleteBipartite { host }
    } else {
        WitnessKind::G0 { host }
    };
    p.designate(kind, Some(&g));
    Ok(p)
}

/// `ex(n, {F, kP_3})` for `chi(F) >= 3`.
pub fn predict_kp3(f: &Graph, k: usize, n: u64, store: &dyn ExStore) -> Result<Prediction> {
    check_k_ell(k, 3, 3)?;
    let profile = checked_profile(f)?;
    let threshold = 9 * (k * k + k + 1) as u128 + 2 * f.order() as u128;
    let s = k - 1;
    let base = frame(n, s)?;
    if n < s as u64 + 1 {
        return Err(Error::InvalidParameters(format!(
            "n = {n} must exceed k - 1 = {s}"
        )));
    }
    let half = (n - s as u64) / 2;
    let sigma = profile
        .sigma
        .ok_or_else(|| Error::OrderOverflow(3 * f.order() + 2))?;
    match sigma {
        Sigma::Infinite => {
            let mut p = Prediction::new("kp3/sigma=inf", n, Threshold::Value(threshold));
            let h = family_term(
                store,
                format!("ex({s}, H(F))"),
                s,
                &family_h(f, Budget::Unbounded),
            )?;
            let e = h.value.edges().ok_or_else(|| {
                Error::Precondition(
                    "H(F) contains an edgeless graph although sigma(F) is infinite".into(),
                )
            })? as u128;
            p.family_terms.push(h);
            p.constant("ex_h", e);
            p.constant("matching", half as u128);
            p.value = add(add(base, half as u128)?, e)?;
            p.designate(WitnessKind::IndependentMatching { k, i: None }, Some(f));
            Ok(p)
        }
        Sigma::Finite(sigma) => {
            let mut p =
                Prediction::new(format!("kp3/sigma={sigma}"), n, Threshold::Value(threshold));
            p.constant("sigma", sigma as u128);
            let mut best: Option<(u128, usize)> = None;
            for i in 0..=sigma {
                if i as u64 > half {
                    p.excluded
                        .push(format!("i = {i}: {i} matching edges do not fit"));
                    continue;
                }
                let h = family_term(
                    store,
                    format!("ex({s}, H_{i}(F))"),
                    s,
                    &family_h(f, Budget::Finite(i)),
                )?;
                match h.value {
                    ExValue::Edges(e) => {
                        let term = add(add(base, i as u128)?, e as u128)?;
                        if best.is_none_or(|(v, _)| term > v) {
                            best = Some((term, i));
                        }
                    }
                    ExValue::Infeasible => p
                        .excluded
                        .push(format!("i = {i}: no H_{i}(F)-free graph on {s} vertices")),
                }
                p.family_terms.push(h);
            }
            let (value, i_star) = best.ok_or_else(|| {
                Error::Precondition("every term of the maximization is infeasible".into())
            })?;
            p.constant("i_star", i_star as u128);
            p.value = value;
            p.designate(
                WitnessKind::IndependentMatching { k, i: Some(i_star) },
                Some(f),
            );
            Ok(p)
        }
    }
}

/// `ex(n, {F, H})` for a linear forest `H` with at least two components.
pub fn predict_linear_forest(
    f: &Graph,
    spec: &LinearForestSpec,
    n: u64,
    store: &dyn ExStore,
) -> Result<Prediction> {
    if spec.components() < 2 {
        return Err(Error::InvalidParameters(
            "the forest needs at least two components".into(),
        ));
    }
    if spec.is_all_p3() {
        return Err(Error::InvalidParameters(format!(
            "{spec} is a packing of P3; use the kP3 prediction"
        )));
    }
    let profile = checked_profile(f)?;
    if !spec.has_even_path() && spec.is_uniform() {
        let mut p = predict_kpl(f, spec.components(), spec.path_orders()[0], n, store)?;
        p.branch = format!("forest->{}", p.branch);
        return Ok(p);
    }
    let l = spec.ell();
    let s = l - 1;
    let i1 = spec.has_even_path();
    if profile.beta1 >= 2 {
        let tag = if i1 { "I1-nonempty" } else { "I1-empty" };
        let mut p = Prediction::new(format!("forest/beta1>=2/{tag}"), n, Threshold::Unspecified);
        p.constant("l", l as u128);
        bipartite_frame(
            &mut p,
            f,
            BipartiteHost::Forest { spec: spec.clone() },
            s,
            !i1,
            store,
        )?;
        return Ok(p);
    }
    let (g, strip) = stripped(f);
    let profile = derived_profile(&g)?;
    let verdict = property_r_with(&profile, spec)?;
    let mut p = Prediction::new(
        format!("forest/beta1=1/{}{strip}", verdict_tag("R", &verdict)),
        n,
        Threshold::Unspecified,
    );
    let d = u128::from(!verdict.holds);
    p.constant("l", l as u128);
    p.constant("D_FH", d);
    p.value = add(frame(n, s)?, d)?;
    let host = BipartiteHost::Forest { spec: spec.clone() };
    let kind = if verdict.holds {
        WitnessKind::CompleteBipartite { host }
    } else {
        WitnessKind::G0 { host }
    };
    p.designate(kind, Some(&g));
    Ok(p)
}

/// What a corollary cross-check is run against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CrossTarget {
    PathPacking { k: usize, ell: usize },
    P3Packing { k: usize },
    Forest { spec: LinearForestSpec },
}

impl fmt::Display for CrossTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossTarget::PathPacking { k, ell } => write!(f, "{k}P{ell}"),
            CrossTarget::P3Packing { k } => write!(f, "{k}P3"),
            CrossTarget::Forest { spec } => write!(f, "forest {spec}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub r: usize,
    pub target: CrossTarget,
    pub n: u64,
    pub general: Option<u128>,
    pub general_branch: Option<String>,
    pub general_error: Option<String>,
    pub corollary: u128,
    pub clause: &'static str,
    pub agree: bool,
}

/// The `K_r` closed form with Turán counts in place of family values.
pub fn corollary_value(r: usize, target: &CrossTarget, n: u64) -> Result<(u128, &'static str)> {
    if r < 3 {
        return Err(Error::InvalidParameters(format!(
            "r = {r} must be at least 3"
        )));
    }
    // (small part, top-edge bonus when r is large)
    let (s, bonus) = match target {
        CrossTarget::P3Packing { k } => {
            check_k_ell(*k, 3, 3)?;
            let s = k - 1;
            let base = frame(n, s)?;
            if r == 3 {
                return Ok((base, "r=3"));
            }
            let half = (n - s as u64) as u128 / 2;
            let t = turan_edge_count(s as u64, r as u64 - 3)?;
            return Ok((add(add(base, half)?, t)?, "r>=4"));
        }
        CrossTarget::PathPacking { k, ell } => {
            check_k_ell(*k, *ell, 4)?;
            (k * (ell / 2) - 1, (ell % 2) as u128)
        }
        CrossTarget::Forest { spec } => (spec.ell() - 1, u128::from(!spec.has_even_path())),
    };
    let base = frame(n, s)?;
    if r == 3 {
        Ok((base, "(i)"))
    } else if r <= s + 2 {
        Ok((
            add(base, turan_edge_count(s as u64, r as u64 - 2)?)?,
            "(ii)",
        ))
    } else {
        Ok((add(add(base, choose2(s as u128)?)?, bonus)?, "(iii)"))
    }
}

pub fn crosscheck_corollaries(
    r: usize,
    target: &CrossTarget,
    n: u64,
    store: &dyn ExStore,
) -> Result<CrosscheckReport> {
    let (corollary, clause) = corollary_value(r, target, n)?;
    let kr = Graph::complete(r)?;
    let general = match target {
        CrossTarget::PathPacking { k, ell } => predict_kpl(&kr, *k, *ell, n, store),
        CrossTarget::P3Packing { k } => predict_kp3(&kr, *k, n, store),
        CrossTarget::Forest { spec } => predict_linear_forest(&kr, spec, n, store),
    };
    let (value, branch, error) = match general {
        Ok(p) => (Some(p.value), Some(p.branch), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(CrosscheckReport {
        r,
        target: target.clone(),
        n,
        agree: value == Some(corollary),
        general: value,
        general_branch: branch,
        general_error: error,
        corollary,
        clause,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::MemoryStore;

    const BIG: u64 = 1_000_000;

    fn k(r: usize) -> Graph {
        Graph::complete(r).unwrap()
    }

    #[test]
    fn classical_examples() {
        let eg = classical_formulas(Classical::ErdosGallai { ell: 5 }, 10).unwrap();
        assert_eq!((eg.value, eg.exact), (15, false));
        let kpl = classical_formulas(Classical::PathPacking { k: 2, ell: 4 }, 100).unwrap();
        assert_eq!(kpl.value, 294);
        assert_eq!(kpl.threshold, Threshold::Value(8 + 2 * 2 * 4 * 3 * 6));
        let kp3 = classical_formulas(Classical::P3Packing { k: 3 }, 100).unwrap();
        assert_eq!(kp3.value, 246);
        assert_eq!(kp3.threshold, Threshold::Value(21));
        assert!(classical_formulas(Classical::PathPacking { k: 1, ell: 4 }, 100).is_err());
    }

    #[test]
    fn kpl_examples() {
        let store = MemoryStore::new();
        let p = predict_kpl(&k(3), 2, 5, BIG, &store).unwrap();
        assert_eq!(p.value, 2_999_991);
        assert_eq!(p.branch, "kpl/beta1=1/P/cond2");
        let p = predict_kpl(&k(4), 2, 4, BIG, &store).unwrap();
        assert_eq!((p.value, p.constants["b_l"]), (2_999_993, 2));
        let p = predict_kpl(&k(7), 2, 5, BIG, &store).unwrap();
        assert_eq!(p.value, 2_999_995);
        assert!(matches!(p.construction, Some(WitnessKind::H2 { .. })));
        assert!(predict_kpl(&Graph::cycle(4).unwrap(), 2, 4, BIG, &store).is_err());
        let b5 = predict_kpl(&Graph::book(5).unwrap(), 2, 5, BIG, &store).unwrap();
        assert_eq!(
            (b5.value, b5.branch.as_str()),
            (2_999_992, "kpl/beta1=1/not-P")
        );
    }

    #[test]
    fn kp3_examples() {
        let store = MemoryStore::new();
        assert_eq!(predict_kp3(&k(3), 3, 200, &store).unwrap().value, 396);
        assert_eq!(predict_kp3(&k(4), 3, 200, &store).unwrap().value, 495);
        let c5 = predict_kp3(&Graph::cycle(5).unwrap(), 2, 100, &store).unwrap();
        assert_eq!((c5.value, c5.constants["i_star"]), (100, 1));
        let c5 = predict_kp3(&Graph::cycle(5).unwrap(), 3, 100, &store).unwrap();
        assert_eq!(c5.value, 2 * 98 + 1);
    }

    #[test]
    fn forest_examples() {
        let store = MemoryStore::new();
        let h: LinearForestSpec = "4,5".parse().unwrap();
        assert_eq!(
            predict_linear_forest(&k(3), &h, BIG, &store).unwrap().value,
            2_999_991
        );
        assert_eq!(
            predict_linear_forest(&k(4), &h, BIG, &store).unwrap().value,
            2_999_993
        );
        let h: LinearForestSpec = "5,7".parse().unwrap();
        let p = predict_linear_forest(&k(7), &h, BIG, &store).unwrap();
        assert_eq!(p.value, 3_999_991);
        assert_eq!(p.threshold_met, None);
        let h: LinearForestSpec = "5,5".parse().unwrap();
        let p = predict_linear_forest(&k(4), &h, BIG, &store).unwrap();
        assert!(p.branch.starts_with("forest->kpl"));
        assert!(predict_linear_forest(&k(4), &"3,3".parse().unwrap(), BIG, &store).is_err());
    }

    #[test]
    fn crosscheck_examples() {
        let store = MemoryStore::new();
        let rep =
            crosscheck_corollaries(4, &CrossTarget::PathPacking { k: 2, ell: 4 }, BIG, &store)
                .unwrap();
        assert!(rep.agree);
        assert_eq!(rep.corollary, 2_999_993);
        let rep = crosscheck_corollaries(3, &CrossTarget::P3Packing { k: 3 }, 200, &store).unwrap();
        assert_eq!((rep.corollary, rep.agree), (396, true));
        let spec = "4,5".parse().unwrap();
        let rep = crosscheck_corollaries(5, &CrossTarget::Forest { spec }, BIG, &store).unwrap();
        assert_eq!(
            (rep.corollary, rep.agree),
            (3 * (BIG as u128 - 3) + 3, true)
        );
    }

    #[test]
    fn thresholds() {
        // 4 * 4 * 25 * (10 + 3) * 3 * 10
        assert_eq!(path_packing_threshold(2, 5, 3).unwrap(), 156_000);
        assert!(path_packing_threshold(2, 200, 3).is_err());
    }
}

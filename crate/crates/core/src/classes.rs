//! Structure classes, membership, member enumeration and bounded checks of
//! the class axioms.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;

use crate::amalgamation;
use crate::bits::BitMatrix;
use crate::embedding::{embeds, enumerate_embeddings, is_embedding, Embedding, IsoClasses};
use crate::error::{Error, Result};
use crate::families::complete_graph;
use crate::order::{combinations, linear_extensions, permutations};
use crate::structure::{FinStructure, Signature};

/// Default size bound for exhaustive class checks.
pub const DEFAULT_MEMBER_BOUND: usize = 4;
/// Largest size for which members are enumerated.
pub const MEMBER_BOUND_CAP: usize = 6;
/// Largest number of raw candidates examined for one size.
pub const CANDIDATE_CAP: u64 = 1 << 22;

/// A class of finite structures in a fixed signature.
pub trait StructureClass: Sync {
    fn name(&self) -> String;

    fn signature(&self) -> &Arc<Signature>;

    /// Members carry a linear order.
    fn is_ordered(&self) -> bool;

    /// Members carry a partial order.
    fn uses_partial_order(&self) -> bool;

    /// Why `a` is not a member, or `None` if it is. Order slots not used by
    /// the class are ignored.
    fn violation(&self, a: &FinStructure) -> Result<Option<String>>;

    fn contains(&self, a: &FinStructure) -> Result<bool> {
        Ok(self.violation(a)?.is_none())
    }

    /// Admissible linear orders on (the reduct of) `a`, each listed in
    /// increasing order.
    fn admissible_orders(&self, a: &FinStructure) -> Vec<Vec<usize>> {
        admissible_orders_of(a, self.uses_partial_order())
    }
}

pub(crate) fn admissible_orders_of(a: &FinStructure, partial: bool) -> Vec<Vec<usize>> {
    match a.partial_order() {
        Some(po) if partial => linear_extensions(po),
        _ => permutations(a.size()),
    }
}

/// Errors with [`Error::NotMember`] unless `a` belongs to `class`.
pub fn require_member(class: &dyn StructureClass, a: &FinStructure) -> Result<()> {
    match class.violation(a)? {
        None => Ok(()),
        Some(reason) => Err(Error::NotMember {
            class: class.name(),
            reason,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassKind {
    Graph,
    KnFree(usize),
    /// Every symbol symmetric.
    Hypergraph,
    /// Hypergraphs into which no forbidden structure embeds.
    AFree(Vec<FinStructure>),
    Poset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSpec {
    kind: ClassKind,
    ordered: bool,
    signature: Arc<Signature>,
}

impl ClassSpec {
    pub fn graphs(ordered: bool) -> Self {
        ClassSpec {
            kind: ClassKind::Graph,
            ordered,
            signature: Arc::new(Signature::graph()),
        }
    }

    pub fn kn_free(n: usize, ordered: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidClass(format!("K_n-free needs n >= 2, got {n}")));
        }
        Ok(ClassSpec {
            kind: ClassKind::KnFree(n),
            ordered,
            signature: Arc::new(Signature::graph()),
        })
    }

    pub fn hypergraphs(signature: Signature, ordered: bool) -> Result<Self> {
        check_hypergraph_signature(&signature)?;
        Ok(ClassSpec {
            kind: ClassKind::Hypergraph,
            ordered,
            signature: Arc::new(signature),
        })
    }

    /// Forbidden structures must be irreducible hypergraphs in one signature.
    pub fn a_free(forbidden: Vec<FinStructure>, ordered: bool) -> Result<Self> {
        let first = forbidden
            .first()
            .ok_or_else(|| Error::InvalidClass("no forbidden structures given".into()))?;
        let signature = first.signature().clone();
        check_hypergraph_signature(&signature)?;
        let mut stripped = Vec::with_capacity(forbidden.len());
        for f in &forbidden {
            if f.signature() != &signature {
                return Err(Error::InvalidClass(
                    "forbidden structures use different signatures".into(),
                ));
            }
            if let Some(why) = reducibility(f) {
                return Err(Error::InvalidClass(format!("forbidden structure is reducible: {why}")));
            }
            let mut g = FinStructure::new(signature.clone(), f.size());
            for s in 0..signature.len() {
                for t in f.tuples(s) {
                    g.add_tuple(s, t)?;
                }
            }
            stripped.push(g);
        }
        Ok(ClassSpec {
            kind: ClassKind::AFree(stripped),
            ordered,
            signature: Arc::new(signature),
        })
    }

    pub fn posets(ordered: bool) -> Self {
        ClassSpec {
            kind: ClassKind::Poset,
            ordered,
            signature: Arc::new(Signature::empty()),
        }
    }

    /// Parses `graph`, `kn-free:N`, `hypergraph:ARITY`, `hypergraph:FILE`,
    /// `a-free:FILE` or `poset`. Files hold structure documents.
    pub fn parse(text: &str, ordered: bool) -> Result<Self> {
        let (head, arg) = match text.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (text, None),
        };
        match (head, arg) {
            ("graph" | "graphs", None) => Ok(Self::graphs(ordered)),
            ("poset" | "posets", None) => Ok(Self::posets(ordered)),
            ("kn-free", Some(n)) => {
                let n = n
                    .parse()
                    .map_err(|_| Error::InvalidClass(format!("bad clique size `{n}`")))?;
                Self::kn_free(n, ordered)
            }
            ("hypergraph", Some(arg)) => {
                let sig = match arg.parse::<usize>() {
                    Ok(arity) => crate::families::hypergraph_signature(arity)
                        .map_err(|e| Error::InvalidClass(e.to_string()))?,
                    Err(_) => crate::doc::read_structures(Path::new(arg))?
                        .first()
                        .ok_or_else(|| Error::InvalidClass(format!("{arg} holds no structure")))?
                        .signature()
                        .clone(),
                };
                Self::hypergraphs(sig, ordered)
            }
            ("a-free", Some(path)) => Self::a_free(crate::doc::read_structures(Path::new(path))?, ordered),
            _ => Err(Error::InvalidClass(format!("unknown class `{text}`"))),
        }
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn with_ordered(&self, ordered: bool) -> Self {
        ClassSpec {
            ordered,
            ..self.clone()
        }
    }

    fn relational_violation(&self, a: &FinStructure) -> Result<Option<String>> {
        match &self.kind {
            ClassKind::Graph | ClassKind::Hypergraph => Ok(None),
            ClassKind::KnFree(n) => {
                let kn = complete_graph(*n);
                let stripped = a.without_linear_order();
                Ok(embeds(&kn, &stripped).then(|| format!("contains K_{n}")))
            }
            ClassKind::AFree(forbidden) => {
                let stripped = a.without_linear_order();
                Ok(forbidden
                    .iter()
                    .position(|f| embeds(f, &stripped))
                    .map(|i| format!("forbidden structure #{i} embeds")))
            }
            ClassKind::Poset => Ok(None),
        }
    }
}

fn check_hypergraph_signature(sig: &Signature) -> Result<()> {
    if let Some(s) = sig.symbols().iter().find(|s| !s.symmetric) {
        return Err(Error::InvalidClass(format!(
            "hypergraph symbol `{}` must be symmetric",
            s.name
        )));
    }
    Ok(())
}

/// Why `f` is not irreducible, if it is not.
fn reducibility(f: &FinStructure) -> Option<String> {
    if f.size() < 2 {
        return Some("fewer than two elements".into());
    }
    let mut covered = BitMatrix::new(f.size());
    for s in 0..f.signature().len() {
        for t in f.tuples(s) {
            for &x in t {
                for &y in t {
                    covered.set(x, y, true);
                }
            }
        }
    }
    for x in 0..f.size() {
        for y in x + 1..f.size() {
            if !covered.get(x, y) {
                return Some(format!("elements {x} and {y} share no tuple"));
            }
        }
    }
    None
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ordered {
            write!(f, "ordered ")?;
        }
        match &self.kind {
            ClassKind::Graph => write!(f, "graphs"),
            ClassKind::KnFree(n) => write!(f, "K_{n}-free graphs"),
            ClassKind::Hypergraph => write!(f, "hypergraphs"),
            ClassKind::AFree(v) => write!(f, "hypergraphs omitting {} forbidden structures", v.len()),
            ClassKind::Poset => write!(f, "posets"),
        }
    }
}

impl StructureClass for ClassSpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    fn is_ordered(&self) -> bool {
        self.ordered
    }

    fn uses_partial_order(&self) -> bool {
        self.kind == ClassKind::Poset
    }

    fn violation(&self, a: &FinStructure) -> Result<Option<String>> {
        if a.signature() != &*self.signature {
            return Err(Error::SignatureMismatch(format!(
                "structure signature does not match {}",
                self.name()
            )));
        }
        let is_poset = self.kind == ClassKind::Poset;
        if is_poset && !a.has_partial_order() {
            return Ok(Some("no partial order".into()));
        }
        if !is_poset && a.has_partial_order() {
            return Ok(Some("unexpected partial order".into()));
        }
        if self.ordered && !a.has_linear_order() {
            return Ok(Some("no linear order".into()));
        }
        self.relational_violation(a)
    }
}

/// Members of exact size `m`, one per isomorphism class, in a deterministic
/// order. Ordered classes are enumerated with the order `0 < 1 < … < m-1`.
pub fn enumerate_members(class: &dyn StructureClass, m: usize) -> Result<Vec<FinStructure>> {
    if m > MEMBER_BOUND_CAP {
        return Err(Error::BoundTooLarge {
            what: "member enumeration",
            requested: m,
            cap: MEMBER_BOUND_CAP,
        });
    }
    let sig = class.signature().clone();
    let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
    for (s, sym) in sig.symbols().iter().enumerate() {
        if sym.symmetric {
            for t in combinations(m, sym.arity) {
                slots.push((s, t));
            }
        } else {
            let total = (m as u64).checked_pow(sym.arity as u32).unwrap_or(u64::MAX);
            if total > CANDIDATE_CAP {
                return Err(too_many(m));
            }
            for code in 0..total {
                let mut t = Vec::with_capacity(sym.arity);
                let mut c = code;
                for _ in 0..sym.arity {
                    t.push((c % m as u64) as usize);
                    c /= m as u64;
                }
                t.reverse();
                slots.push((s, t));
            }
        }
    }
    let orders: Vec<Option<BitMatrix>> = if class.uses_partial_order() {
        natural_posets(m).into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let relational: u64 = if slots.len() >= 63 { u64::MAX } else { 1u64 << slots.len() };
    if relational.saturating_mul(orders.len() as u64) > CANDIDATE_CAP {
        return Err(too_many(m));
    }
    let ordered = class.is_ordered();
    let mut dedup = IsoClasses::default();
    let mut out = Vec::new();
    for po in &orders {
        for mask in 0..relational {
            let mut s = FinStructure::with_shared_signature(sig.clone(), m);
            for (bit, (sym, t)) in slots.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    s.add_tuple(*sym, t)?;
                }
            }
            if let Some(po) = po {
                s.set_partial_order(po.clone())?;
            }
            if ordered {
                s = s.with_natural_order()?;
            }
            if !class.contains(&s)? {
                continue;
            }
            if ordered || dedup.insert(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn too_many(m: usize) -> Error {
    Error::BoundTooLarge {
        what: "member candidates at this size",
        requested: m,
        cap: MEMBER_BOUND_CAP,
    }
}

/// Strict partial orders on `0..m` contained in the natural order.
fn natural_posets(m: usize) -> Vec<BitMatrix> {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut rel = BitMatrix::new(m);
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                rel.set(a, b, true);
            }
        }
        if rel.is_transitive() {
            out.push(rel);
        }
    }
    out
}

/// Members of sizes `0..=bound`, smallest first.
pub fn members_up_to(class: &dyn StructureClass, bound: usize) -> Result<Vec<FinStructure>> {
    let mut out = Vec::new();
    for m in 0..=bound {
        out.extend(enumerate_members(class, m)?);
    }
    Ok(out)
}

/// A failed class axiom.
#[derive(Clone, Debug)]
pub enum Counterexample {
    NotHereditary {
        member: FinStructure,
        subset: Vec<usize>,
        substructure: FinStructure,
    },
    JointEmbedding {
        b: FinStructure,
        c: FinStructure,
        d: FinStructure,
    },
    Amalgamation {
        a: FinStructure,
        b: FinStructure,
        c: FinStructure,
        i: Embedding,
        j: Embedding,
        reason: String,
    },
    Unreasonable {
        b: FinStructure,
        subset: Vec<usize>,
        order: Vec<usize>,
    },
}

impl Counterexample {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Counterexample::NotHereditary {
                member,
                subset,
                substructure,
            } => json!({
                "axiom": "hereditary",
                "member": member.to_value(),
                "subset": subset,
                "substructure": substructure.to_value(),
            }),
            Counterexample::JointEmbedding { b, c, d } => json!({
                "axiom": "joint-embedding",
                "B": b.to_value(), "C": c.to_value(), "D": d.to_value(),
            }),
            Counterexample::Amalgamation { a, b, c, i, j, reason } => json!({
                "axiom": "amalgamation",
                "A": a.to_value(), "B": b.to_value(), "C": c.to_value(),
                "i": i.map(), "j": j.map(), "reason": reason,
            }),
            Counterexample::Unreasonable { b, subset, order } => json!({
                "axiom": "reasonable",
                "B": b.to_value(), "subset": subset, "order": order,
            }),
        }
    }
}

/// Result of a bounded class check.
#[derive(Clone, Debug)]
pub struct ClassCheck {
    pub examined: usize,
    pub counterexample: Option<Counterexample>,
}

impl ClassCheck {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn check_bound(bound: usize) -> Result<()> {
    if bound == 0 {
        return Err(Error::InvalidArgument("bound must be at least 1".into()));
    }
    if bound > MEMBER_BOUND_CAP {
        return Err(Error::BoundTooLarge {
            what: "class check",
            requested: bound,
            cap: MEMBER_BOUND_CAP,
        });
    }
    Ok(())
}

/// Every induced substructure of every member of size at most `bound` is a member.
pub fn check_hereditary(class: &dyn StructureClass, bound: usize) -> Result<ClassCheck> {
    check_bound(bound)?;
    let mut examined = 0;
    for m in 1..=bound {
        for member in enumerate_members(class, m)? {
            for k in 0..m {
                for subset in combinations(m, k) {
                    examined += 1;
                    let sub = member.induced(&subset)?;
                    if !class.contains(&sub)? {
                        return Ok(ClassCheck {
                            examined,
                            counterexample: Some(Counterexample::NotHereditary {
                                member,
                                subset,
                                substructure: sub,
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(ClassCheck {
        examined,
        counterexample: None,
    })
}

/// The disjoint-union joint embedding of every pair of members of size at
/// most `bound` is a member.
pub fn check_jep(class: &dyn StructureClass, bound: usize) -> Result<ClassCheck> {
    check_bound(bound)?;
    let members = members_up_to(class, bound)?;
    let mut examined = 0;
    for b in &members {
        for c in &members {
            examined += 1;
            let d = amalgamation::joint_embed(b, c, class)?.d;
            if !class.contains(&d)? {
                return Ok(ClassCheck {
                    examined,
                    counterexample: Some(Counterexample::JointEmbedding {
                        b: b.clone(),
                        c: c.clone(),
                        d,
                    }),
                });
            }
        }
    }
    Ok(ClassCheck {
        examined,
        counterexample: None,
    })
}

/// For all members `A, B, C` of size at most `bound` and all embeddings
/// `i: A → B`, `j: A → C`, the canonical amalgam is a member and the
/// square commutes.
pub fn check_amalgamation(class: &dyn StructureClass, bound: usize) -> Result<ClassCheck> {
    check_bound(bound)?;
    let members = members_up_to(class, bound)?;
    let mut examined = 0;
    for a in &members {
        for b in &members {
            let is = enumerate_embeddings(a, b);
            if is.is_empty() {
                continue;
            }
            for c in &members {
                let js = enumerate_embeddings(a, c);
                for i in &is {
                    for j in &js {
                        examined += 1;
                        if let Some(reason) = amalgam_failure(class, a, b, c, i, j)? {
                            return Ok(ClassCheck {
                                examined,
                                counterexample: Some(Counterexample::Amalgamation {
                                    a: a.clone(),
                                    b: b.clone(),
                                    c: c.clone(),
                                    i: i.clone(),
                                    j: j.clone(),
                                    reason,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(ClassCheck {
        examined,
        counterexample: None,
    })
}

fn amalgam_failure(
    class: &dyn StructureClass,
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
) -> Result<Option<String>> {
    let res = if class.is_ordered() {
        amalgamation::amalgamate_ordered(a, b, c, i, j, class)
    } else {
        amalgamation::amalgamate(a, b, c, i, j, class)
    };
    let res = match res {
        Ok(r) => r,
        Err(e) => return Ok(Some(e.to_string())),
    };
    if let Some(why) = class.violation(&res.d)? {
        return Ok(Some(format!("amalgam is not a member: {why}")));
    }
    if i.then(&res.k) != j.then(&res.l) {
        return Ok(Some("square does not commute".into()));
    }
    if !is_embedding(b, &res.d, &res.k)? || !is_embedding(c, &res.d, &res.l)? {
        return Ok(Some("amalgam maps are not embeddings".into()));
    }
    Ok(None)
}

/// For all unordered members `B` of size at most `bound`, every subset `A`
/// of `B` and every admissible order on `A`, some admissible order on `B`
/// restricts to it.
pub fn check_reasonable(class: &ClassSpec, bound: usize) -> Result<ClassCheck> {
    if !class.ordered() {
        return Err(Error::InvalidClass("reasonability needs an ordered class".into()));
    }
    check_bound(bound)?;
    let reduct = class.with_ordered(false);
    let mut examined = 0;
    for m in 0..=bound {
        for b in enumerate_members(&reduct, m)? {
            let b_orders = reduct.admissible_orders(&b);
            for k in 0..=m {
                for subset in combinations(m, k) {
                    let a = b.induced(&subset)?;
                    for order in reduct.admissible_orders(&a) {
                        examined += 1;
                        // order lists positions in `subset`; lift to B's elements
                        let lifted: Vec<usize> = order.iter().map(|&x| subset[x]).collect();
                        let extends = b_orders.iter().any(|bo| {
                            let restricted: Vec<usize> = bo.iter().copied().filter(|x| subset.contains(x)).collect();
                            restricted == lifted
                        });
                        if !extends {
                            return Ok(ClassCheck {
                                examined,
                                counterexample: Some(Counterexample::Unreasonable {
                                    b,
                                    subset,
                                    order: lifted,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(ClassCheck {
        examined,
        counterexample: None,
    })
}

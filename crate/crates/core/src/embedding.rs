//! Embeddings, copies, isomorphism and ages.
//!
//! Every search here is a depth-first backtracking over the source universe
//! in index order with target candidates tried in increasing order, so the
//! enumerations come out sorted lexicographically by the universe map.
//! Candidates are pruned by per-symbol degree profiles and, for bijective
//! searches, by a joint colour refinement of both structures.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// An injective map between universes; whether it is an embedding is
/// decided against a concrete source and target by [`is_embedding`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn identity(n: usize) -> Self {
        Embedding {
            map: (0..n).collect(),
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Embedding) -> Embedding {
        Embedding {
            map: self.map.iter().map(|&x| then.map[x]).collect(),
        }
    }

    /// Inverse of a bijection onto `0..len`.
    pub fn inverse(&self) -> Option<Embedding> {
        let mut inv = vec![usize::MAX; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            if x >= inv.len() || inv[x] != usize::MAX {
                return None;
            }
            inv[x] = i;
        }
        Some(Embedding { map: inv })
    }

    /// Sorted image set.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v
    }
}

fn check_map_shape(source: &FinStructure, target: &FinStructure, map: &[usize]) -> Result<()> {
    if !source.same_signature(target) {
        return Err(Error::SignatureMismatch(
            "embedding between structures in different signatures".into(),
        ));
    }
    if map.len() != source.size() {
        return Err(Error::MalformedEmbedding(format!(
            "map has {} entries, source has {} elements",
            map.len(),
            source.size()
        )));
    }
    let mut seen = vec![false; target.size()];
    for &x in map {
        if x >= target.size() {
            return Err(Error::MalformedEmbedding(format!(
                "image {x} outside target of size {}",
                target.size()
            )));
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::MalformedEmbedding(format!("map is not injective at {x}")));
        }
    }
    Ok(())
}

/// True iff `e` preserves and reflects every relation, and every order slot
/// carried by both sides.
pub fn is_embedding(source: &FinStructure, target: &FinStructure, e: &Embedding) -> Result<bool> {
    let map = e.map();
    check_map_shape(source, target, map)?;
    let mut inv = vec![usize::MAX; target.size()];
    for (i, &x) in map.iter().enumerate() {
        inv[x] = i;
    }
    let mut buf = Vec::new();
    for s in 0..source.signature().len() {
        for t in source.tuples(s) {
            buf.clear();
            buf.extend(t.iter().map(|&x| map[x]));
            if !target.holds(s, &buf) {
                return Ok(false);
            }
        }
        for t in target.tuples(s) {
            if t.iter().all(|&x| inv[x] != usize::MAX) {
                buf.clear();
                buf.extend(t.iter().map(|&x| inv[x]));
                if !source.holds(s, &buf) {
                    return Ok(false);
                }
            }
        }
    }
    let n = source.size();
    if source.has_partial_order() && target.has_partial_order() {
        for a in 0..n {
            for b in 0..n {
                if source.precedes(a, b) != target.precedes(map[a], map[b]) {
                    return Ok(false);
                }
            }
        }
    }
    if let (Some(rs), Some(rt)) = (source.ranks(), target.ranks()) {
        for a in 0..n {
            for b in a + 1..n {
                if (rs[a] < rs[b]) != (rt[map[a]] < rt[map[b]]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

type TupleRef<'a> = (usize, &'a [usize]);

pub(crate) struct Search<'a> {
    src: &'a FinStructure,
    tgt: &'a FinStructure,
    linear: bool,
    partial: bool,
    binary: Vec<usize>,
    src_checks: Vec<Vec<TupleRef<'a>>>,
    tgt_incidence: Vec<Vec<TupleRef<'a>>>,
    candidates: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    /// Returns `None` when cheap invariants already rule out every map.
    pub(crate) fn new(src: &'a FinStructure, tgt: &'a FinStructure, bijective: bool) -> Option<Self> {
        let sig = src.signature();
        let (ns, nt) = (src.size(), tgt.size());
        if ns > nt || (bijective && ns != nt) {
            return None;
        }
        for s in 0..sig.len() {
            let (cs, ct) = (src.tuple_count(s), tgt.tuple_count(s));
            if (bijective && cs != ct) || cs > ct {
                return None;
            }
        }
        let linear = src.has_linear_order() && tgt.has_linear_order();
        let partial = src.has_partial_order() && tgt.has_partial_order();
        let mut binary = Vec::new();
        let mut src_checks: Vec<Vec<TupleRef<'a>>> = vec![Vec::new(); ns];
        let mut tgt_incidence: Vec<Vec<TupleRef<'a>>> = vec![Vec::new(); nt];
        for (s, sym) in sig.symbols().iter().enumerate() {
            if sym.arity == 2 {
                binary.push(s);
                continue;
            }
            for t in src.tuples(s) {
                let max = *t.iter().max().unwrap();
                src_checks[max].push((s, t));
            }
            for t in tgt.tuples(s) {
                let mut seen: Vec<usize> = t.to_vec();
                seen.sort_unstable();
                seen.dedup();
                for x in seen {
                    tgt_incidence[x].push((s, t));
                }
            }
        }

        let candidates: Vec<Vec<usize>> = if bijective && linear {
            let seq = tgt.linear_order().unwrap();
            (0..ns).map(|x| vec![seq[src.rank(x).unwrap()]]).collect()
        } else if bijective {
            let colours = refine(&[src, tgt]);
            let (cs, ct) = (&colours[0], &colours[1]);
            let mut hist_s: BTreeMap<u32, usize> = BTreeMap::new();
            let mut hist_t: BTreeMap<u32, usize> = BTreeMap::new();
            for &c in cs {
                *hist_s.entry(c).or_default() += 1;
            }
            for &c in ct {
                *hist_t.entry(c).or_default() += 1;
            }
            if hist_s != hist_t {
                return None;
            }
            (0..ns)
                .map(|x| (0..nt).filter(|&y| ct[y] == cs[x]).collect())
                .collect()
        } else {
            let ps = src.degree_profile();
            let pt = tgt.degree_profile();
            (0..ns)
                .map(|x| {
                    (0..nt)
                        .filter(|&y| {
                            ps[x].iter().zip(&pt[y]).all(|(a, b)| a <= b)
                                && (!linear || {
                                    let (rx, ry) = (src.rank(x).unwrap(), tgt.rank(y).unwrap());
                                    ry >= rx && nt - ry >= ns - rx
                                })
                        })
                        .collect()
                })
                .collect()
        };
        if candidates.iter().any(Vec::is_empty) {
            return None;
        }
        Some(Search {
            src,
            tgt,
            linear,
            partial,
            binary,
            src_checks,
            tgt_incidence,
            candidates,
        })
    }

    fn consistent(&self, x: usize, t: usize, map: &[usize], inv: &[usize]) -> bool {
        let (src, tgt) = (self.src, self.tgt);
        for &s in &self.binary {
            let (ms, mt) = (src.adjacency(s).unwrap(), tgt.adjacency(s).unwrap());
            if ms.get(x, x) != mt.get(t, t) {
                return false;
            }
            for (y, &u) in map.iter().enumerate() {
                if ms.get(x, y) != mt.get(t, u) || ms.get(y, x) != mt.get(u, t) {
                    return false;
                }
            }
        }
        if self.linear {
            let (rs, rt) = (src.ranks().unwrap(), tgt.ranks().unwrap());
            for (y, &u) in map.iter().enumerate() {
                if (rs[x] < rs[y]) != (rt[t] < rt[u]) {
                    return false;
                }
            }
        }
        if self.partial {
            for (y, &u) in map.iter().enumerate() {
                if src.precedes(x, y) != tgt.precedes(t, u) || src.precedes(y, x) != tgt.precedes(u, t) {
                    return false;
                }
            }
        }
        let mut buf = [0usize; crate::structure::MAX_ARITY];
        for &(s, tuple) in &self.src_checks[x] {
            let img = &mut buf[..tuple.len()];
            for (k, &e) in tuple.iter().enumerate() {
                img[k] = if e == x { t } else { map[e] };
            }
            if !tgt.holds(s, img) {
                return false;
            }
        }
        'tuples: for &(s, tuple) in &self.tgt_incidence[t] {
            let pre = &mut buf[..tuple.len()];
            for (k, &e) in tuple.iter().enumerate() {
                pre[k] = if e == t {
                    x
                } else if inv[e] != usize::MAX {
                    inv[e]
                } else {
                    continue 'tuples;
                };
            }
            if !src.holds(s, pre) {
                return false;
            }
        }
        true
    }

    /// Visits every map extending `fixed` (entries `Some(t)` force `x ↦ t`).
    pub(crate) fn run(
        &self,
        fixed: Option<&[Option<usize>]>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut map = Vec::with_capacity(self.src.size());
        let mut inv = vec![usize::MAX; self.tgt.size()];
        self.dfs(fixed, &mut map, &mut inv, visit)
    }

    fn dfs(
        &self,
        fixed: Option<&[Option<usize>]>,
        map: &mut Vec<usize>,
        inv: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let x = map.len();
        if x == self.src.size() {
            return visit(map);
        }
        let forced = fixed.and_then(|f| f[x]);
        let cands: &[usize] = &self.candidates[x];
        for &t in cands {
            if forced.is_some_and(|f| f != t) || inv[t] != usize::MAX {
                continue;
            }
            if !self.consistent(x, t, map, inv) {
                continue;
            }
            map.push(t);
            inv[t] = x;
            let flow = self.dfs(fixed, map, inv, visit);
            inv[t] = usize::MAX;
            map.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Joint colour refinement of several structures in the same signature.
/// Colours are comparable across the inputs.
pub(crate) fn refine(structs: &[&FinStructure]) -> Vec<Vec<u32>> {
    let k = structs.first().map_or(0, |s| s.signature().len());
    let incidence: Vec<Vec<Vec<TupleRef<'_>>>> = structs
        .iter()
        .map(|st| {
            let mut inc: Vec<Vec<TupleRef<'_>>> = vec![Vec::new(); st.size()];
            for s in 0..k {
                for t in st.tuples(s) {
                    let mut seen = t.to_vec();
                    seen.sort_unstable();
                    seen.dedup();
                    for x in seen {
                        inc[x].push((s, t));
                    }
                }
            }
            inc
        })
        .collect();

    // initial colours from degree profiles
    let profiles: Vec<Vec<Vec<usize>>> = structs.iter().map(|s| s.degree_profile()).collect();
    let mut ids: BTreeMap<&Vec<usize>, u32> = BTreeMap::new();
    for p in profiles.iter().flatten() {
        ids.insert(p, 0);
    }
    for (i, v) in ids.values_mut().enumerate() {
        *v = i as u32;
    }
    let mut colours: Vec<Vec<u32>> = profiles
        .iter()
        .map(|ps| ps.iter().map(|p| ids[p]).collect())
        .collect();
    let mut classes = ids.len();

    loop {
        let mut sigs: Vec<Vec<(u32, Vec<(usize, u64, Vec<u32>)>, Vec<(u8, u32)>)>> = Vec::new();
        for (si, st) in structs.iter().enumerate() {
            let c = &colours[si];
            let mut per = Vec::with_capacity(st.size());
            for x in 0..st.size() {
                let mut items: Vec<(usize, u64, Vec<u32>)> = incidence[si][x]
                    .iter()
                    .map(|&(s, t)| {
                        if st.signature().symbols()[s].symmetric {
                            let mut others: Vec<u32> = t.iter().filter(|&&e| e != x).map(|&e| c[e]).collect();
                            others.sort_unstable();
                            (s, 0, others)
                        } else {
                            let mask = t
                                .iter()
                                .enumerate()
                                .filter(|&(_, &e)| e == x)
                                .fold(0u64, |m, (i, _)| m | 1 << i);
                            (s, mask, t.iter().map(|&e| c[e]).collect())
                        }
                    })
                    .collect();
                items.sort_unstable();
                let mut po = Vec::new();
                if let Some(m) = st.partial_order() {
                    for y in 0..st.size() {
                        if m.get(x, y) {
                            po.push((0u8, c[y]));
                        }
                        if m.get(y, x) {
                            po.push((1u8, c[y]));
                        }
                    }
                    po.sort_unstable();
                }
                per.push((c[x], items, po));
            }
            sigs.push(per);
        }
        let mut ids: BTreeMap<&(u32, Vec<(usize, u64, Vec<u32>)>, Vec<(u8, u32)>), u32> = BTreeMap::new();
        for s in sigs.iter().flatten() {
            ids.insert(s, 0);
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i as u32;
        }
        let next: Vec<Vec<u32>> = sigs.iter().map(|per| per.iter().map(|s| ids[s]).collect()).collect();
        let count = ids.len();
        colours = next;
        if count == classes {
            return colours;
        }
        classes = count;
    }
}

/// Visits embeddings of `source` into `target` in lexicographic order.
pub fn for_each_embedding(
    source: &FinStructure,
    target: &FinStructure,
    fixed: Option<&[Option<usize>]>,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) {
    if !source.same_signature(target) {
        return;
    }
    if let Some(search) = Search::new(source, target, false) {
        let _ = search.run(fixed, &mut visit);
    }
}

/// All embeddings `B → A`, lexicographic in the universe map.
pub fn enumerate_embeddings(b: &FinStructure, a: &FinStructure) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_embedding(b, a, None, |m| {
        out.push(Embedding::new(m.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

pub fn first_embedding(b: &FinStructure, a: &FinStructure) -> Option<Embedding> {
    let mut out = None;
    for_each_embedding(b, a, None, |m| {
        out = Some(Embedding::new(m.to_vec()));
        ControlFlow::Break(())
    });
    out
}

pub fn embeds(b: &FinStructure, a: &FinStructure) -> bool {
    first_embedding(b, a).is_some()
}

pub fn count_embeddings(b: &FinStructure, a: &FinStructure) -> usize {
    let mut n = 0;
    for_each_embedding(b, a, None, |_| {
        n += 1;
        ControlFlow::Continue(())
    });
    n
}

/// Distinct image sets of embeddings `A → C`, sorted.
pub fn enumerate_copies(a: &FinStructure, c: &FinStructure) -> Vec<Vec<usize>> {
    let mut set = BTreeSet::new();
    for_each_embedding(a, c, None, |m| {
        let mut img = m.to_vec();
        img.sort_unstable();
        set.insert(img);
        ControlFlow::Continue(())
    });
    set.into_iter().collect()
}

/// Visits isomorphisms `A → B` in lexicographic order.
pub fn for_each_isomorphism(
    a: &FinStructure,
    b: &FinStructure,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) {
    if !a.same_signature(b)
        || a.has_linear_order() != b.has_linear_order()
        || a.has_partial_order() != b.has_partial_order()
    {
        return;
    }
    if let Some(search) = Search::new(a, b, true) {
        let _ = search.run(None, &mut visit);
    }
}

/// A witnessing isomorphism `A → B`, if one exists. Order slots must be
/// present on both sides or on neither.
pub fn are_isomorphic(a: &FinStructure, b: &FinStructure) -> Result<Option<Embedding>> {
    if !a.same_signature(b) {
        return Err(Error::SignatureMismatch(
            "isomorphism test between structures in different signatures".into(),
        ));
    }
    let mut out = None;
    for_each_isomorphism(a, b, |m| {
        out = Some(Embedding::new(m.to_vec()));
        ControlFlow::Break(())
    });
    Ok(out)
}

pub fn isomorphic(a: &FinStructure, b: &FinStructure) -> bool {
    matches!(are_isomorphic(a, b), Ok(Some(_)))
}

/// Automorphism group of `A` (all slots it carries), lexicographic.
pub fn automorphisms(a: &FinStructure) -> Vec<Embedding> {
    let mut out = Vec::new();
    for_each_isomorphism(a, a, |m| {
        out.push(Embedding::new(m.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// Induced substructures up to a size bound, one per isomorphism class.
#[derive(Clone, Debug)]
pub struct Age {
    pub bound: usize,
    pub members: Vec<FinStructure>,
}

impl Age {
    pub fn contains_copy_of(&self, s: &FinStructure) -> bool {
        self.members.iter().any(|m| isomorphic(m, s))
    }
}

/// Isomorphism-class representatives of nonempty induced substructures of
/// size at most `m`, ordered by size then by first subset.
pub fn age_up_to(a: &FinStructure, m: usize) -> Result<Age> {
    if m == 0 {
        return Err(Error::InvalidArgument("age bound must be at least 1".into()));
    }
    let mut dedup = IsoClasses::default();
    let mut members = Vec::new();
    for k in 1..=m.min(a.size()) {
        for subset in crate::order::combinations(a.size(), k) {
            let sub = a.induced(&subset)?;
            if dedup.insert(&sub) {
                members.push(sub);
            }
        }
    }
    Ok(Age { bound: m, members })
}

/// Buckets structures by cheap invariants and deduplicates by isomorphism.
#[derive(Default)]
pub(crate) struct IsoClasses {
    buckets: HashMap<Vec<usize>, Vec<FinStructure>>,
}

impl IsoClasses {
    pub(crate) fn key(s: &FinStructure) -> Vec<usize> {
        let mut key = vec![s.size(), s.has_partial_order() as usize, s.has_linear_order() as usize];
        key.extend((0..s.signature().len()).map(|i| s.tuple_count(i)));
        let mut prof = s.degree_profile();
        prof.sort();
        key.extend(prof.into_iter().flatten());
        key
    }

    /// Returns true if `s` is new up to isomorphism.
    pub(crate) fn insert(&mut self, s: &FinStructure) -> bool {
        let bucket = self.buckets.entry(Self::key(s)).or_default();
        if bucket.iter().any(|m| isomorphic(m, s)) {
            return false;
        }
        bucket.push(s.clone());
        true
    }
}

//! Finite relational structures with optional partial-order and linear-order slots.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::BitMatrix;
use crate::error::{Error, Result};

/// Largest arity accepted for a relation symbol.
pub const MAX_ARITY: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub symmetric: bool,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize, symmetric: bool) -> Self {
        Symbol {
            name: name.into(),
            arity,
            symmetric,
        }
    }
}

/// A finite relational signature. The order slots are not symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.name.is_empty() {
                return Err(Error::InvalidSignature("empty symbol name".into()));
            }
            if matches!(s.name.as_str(), "<" | "≺") {
                return Err(Error::InvalidSignature(format!(
                    "`{}` is reserved for the order slots",
                    s.name
                )));
            }
            if s.arity == 0 || s.arity > MAX_ARITY {
                return Err(Error::InvalidSignature(format!(
                    "symbol `{}` has arity {} (allowed 1..={MAX_ARITY})",
                    s.name, s.arity
                )));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(Error::InvalidSignature(format!(
                    "duplicate symbol `{}`",
                    s.name
                )));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    /// One symmetric binary symbol `E`.
    pub fn graph() -> Self {
        Signature {
            symbols: vec![Symbol::new("E", 2, true)],
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Relation {
    /// Symmetric symbols keep one sorted representative per orbit.
    tuples: BTreeSet<Vec<usize>>,
    /// Full (expanded) adjacency for binary symbols.
    adjacency: Option<BitMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct LinearOrder {
    sequence: Vec<usize>,
    rank: Vec<usize>,
}

/// A finite structure on the universe `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinStructure {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<Relation>,
    partial_order: Option<BitMatrix>,
    linear_order: Option<LinearOrder>,
}

impl FinStructure {
    pub fn new(signature: Signature, size: usize) -> Self {
        Self::with_shared_signature(Arc::new(signature), size)
    }

    pub fn with_shared_signature(signature: Arc<Signature>, size: usize) -> Self {
        let relations = signature
            .symbols()
            .iter()
            .map(|s| Relation {
                tuples: BTreeSet::new(),
                adjacency: (s.arity == 2).then(|| BitMatrix::new(size)),
            })
            .collect();
        FinStructure {
            signature,
            size,
            relations,
            partial_order: None,
            linear_order: None,
        }
    }

    /// The empty structure in the given signature.
    pub fn empty(signature: Signature) -> Self {
        Self::new(signature, 0)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub(crate) fn shared_signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn same_signature(&self, other: &FinStructure) -> bool {
        Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature
    }

    /// Adds a tuple; symmetric symbols store the sorted representative.
    pub fn add_tuple(&mut self, symbol: usize, tuple: &[usize]) -> Result<()> {
        let sym = self
            .signature
            .symbols()
            .get(symbol)
            .ok_or_else(|| Error::InvalidStructure(format!("no symbol with index {symbol}")))?;
        if tuple.len() != sym.arity {
            return Err(Error::InvalidStructure(format!(
                "tuple {tuple:?} has length {} but `{}` has arity {}",
                tuple.len(),
                sym.name,
                sym.arity
            )));
        }
        if let Some(&bad) = tuple.iter().find(|&&x| x >= self.size) {
            return Err(Error::InvalidStructure(format!(
                "element {bad} outside universe of size {}",
                self.size
            )));
        }
        let mut key = tuple.to_vec();
        if sym.symmetric {
            key.sort_unstable();
            if key.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidStructure(format!(
                    "symmetric symbol `{}` needs pairwise distinct entries, got {tuple:?}",
                    sym.name
                )));
            }
        }
        let symmetric = sym.symmetric;
        let rel = &mut self.relations[symbol];
        if let Some(adj) = rel.adjacency.as_mut() {
            adj.set(tuple[0], tuple[1], true);
            if symmetric {
                adj.set(tuple[1], tuple[0], true);
            }
        }
        rel.tuples.insert(key);
        Ok(())
    }

    pub fn add_tuple_by_name(&mut self, name: &str, tuple: &[usize]) -> Result<()> {
        let idx = self
            .signature
            .index_of(name)
            .ok_or_else(|| Error::InvalidStructure(format!("unknown symbol `{name}`")))?;
        self.add_tuple(idx, tuple)
    }

    /// Membership test for an arbitrary (not necessarily canonical) tuple.
    #[inline]
    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        let rel = &self.relations[symbol];
        if let Some(adj) = &rel.adjacency {
            return adj.get(tuple[0], tuple[1]);
        }
        if self.signature.symbols()[symbol].symmetric {
            let mut buf = [0usize; MAX_ARITY];
            let key = &mut buf[..tuple.len()];
            key.copy_from_slice(tuple);
            key.sort_unstable();
            rel.tuples.contains(&key[..])
        } else {
            rel.tuples.contains(tuple)
        }
    }

    /// Canonical tuples of a symbol (one per orbit for symmetric symbols).
    pub fn tuples(&self, symbol: usize) -> impl Iterator<Item = &[usize]> + '_ {
        self.relations[symbol].tuples.iter().map(Vec::as_slice)
    }

    pub fn tuple_count(&self, symbol: usize) -> usize {
        self.relations[symbol].tuples.len()
    }

    /// Every tuple of the relation, symmetric orbits expanded to all permutations.
    pub fn expanded_tuples(&self, symbol: usize) -> Vec<Vec<usize>> {
        let symmetric = self.signature.symbols()[symbol].symmetric;
        let mut out = Vec::new();
        for t in self.tuples(symbol) {
            if symmetric {
                crate::order::for_each_permutation(t.len(), |p| {
                    out.push(p.iter().map(|&i| t[i]).collect());
                });
            } else {
                out.push(t.to_vec());
            }
        }
        out.sort();
        out
    }

    pub(crate) fn adjacency(&self, symbol: usize) -> Option<&BitMatrix> {
        self.relations[symbol].adjacency.as_ref()
    }

    /// Installs a partial order given by generating pairs; the transitive
    /// closure is taken and must be irreflexive.
    pub fn set_partial_order_pairs(&mut self, pairs: &[(usize, usize)]) -> Result<()> {
        let mut m = BitMatrix::new(self.size);
        for &(a, b) in pairs {
            if a >= self.size || b >= self.size {
                return Err(Error::InvalidStructure(format!(
                    "order pair ({a}, {b}) outside universe of size {}",
                    self.size
                )));
            }
            m.set(a, b, true);
        }
        m.close_transitively();
        if !m.is_irreflexive() {
            return Err(Error::InvalidStructure(
                "partial order pairs contain a cycle".into(),
            ));
        }
        self.set_partial_order(m)
    }

    /// Installs a strict partial order, which must be irreflexive and transitive.
    pub fn set_partial_order(&mut self, order: BitMatrix) -> Result<()> {
        if order.len() != self.size {
            return Err(Error::InvalidStructure("partial order has the wrong size".into()));
        }
        if !order.is_irreflexive() || !order.is_transitive() {
            return Err(Error::InvalidStructure(
                "partial order must be irreflexive and transitive".into(),
            ));
        }
        if let Some(lo) = &self.linear_order {
            if let Some((a, b)) = order.pairs().find(|&(a, b)| lo.rank[a] > lo.rank[b]) {
                return Err(Error::InadmissibleOrder(format!(
                    "linear order does not extend partial order at ({a}, {b})"
                )));
            }
        }
        self.partial_order = Some(order);
        Ok(())
    }

    pub fn partial_order(&self) -> Option<&BitMatrix> {
        self.partial_order.as_ref()
    }

    pub fn has_partial_order(&self) -> bool {
        self.partial_order.is_some()
    }

    /// `a ≺ b` in the partial-order slot (false when the slot is absent).
    #[inline]
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.partial_order.as_ref().is_some_and(|m| m.get(a, b))
    }

    /// Installs a linear order listing the universe in increasing order.
    pub fn set_linear_order(&mut self, sequence: Vec<usize>) -> Result<()> {
        if sequence.len() != self.size {
            return Err(Error::InvalidStructure(format!(
                "linear order lists {} elements, universe has {}",
                sequence.len(),
                self.size
            )));
        }
        let mut rank = vec![usize::MAX; self.size];
        for (r, &x) in sequence.iter().enumerate() {
            if x >= self.size || rank[x] != usize::MAX {
                return Err(Error::InvalidStructure(
                    "linear order is not a permutation of the universe".into(),
                ));
            }
            rank[x] = r;
        }
        if let Some(po) = &self.partial_order {
            if let Some((a, b)) = po.pairs().find(|&(a, b)| rank[a] > rank[b]) {
                return Err(Error::InadmissibleOrder(format!(
                    "linear order does not extend partial order at ({a}, {b})"
                )));
            }
        }
        self.linear_order = Some(LinearOrder { sequence, rank });
        Ok(())
    }

    pub fn with_linear_order(mut self, sequence: Vec<usize>) -> Result<Self> {
        self.set_linear_order(sequence)?;
        Ok(self)
    }

    /// The same structure ordered `0 < 1 < … < n-1`.
    pub fn with_natural_order(self) -> Result<Self> {
        let n = self.size;
        self.with_linear_order((0..n).collect())
    }

    pub fn without_linear_order(&self) -> Self {
        let mut s = self.clone();
        s.linear_order = None;
        s
    }

    pub fn linear_order(&self) -> Option<&[usize]> {
        self.linear_order.as_ref().map(|l| l.sequence.as_slice())
    }

    pub fn has_linear_order(&self) -> bool {
        self.linear_order.is_some()
    }

    /// Position of `a` in the linear order.
    #[inline]
    pub fn rank(&self, a: usize) -> Option<usize> {
        self.linear_order.as_ref().map(|l| l.rank[a])
    }

    pub(crate) fn ranks(&self) -> Option<&[usize]> {
        self.linear_order.as_ref().map(|l| l.rank.as_slice())
    }

    /// `a < b` in the linear-order slot.
    #[inline]
    pub fn less(&self, a: usize, b: usize) -> Option<bool> {
        self.linear_order
            .as_ref()
            .map(|l| l.rank[a] < l.rank[b])
    }

    /// Induced substructure on `subset`; element `subset_sorted[i]` becomes `i`.
    pub fn induced(&self, subset: &[usize]) -> Result<FinStructure> {
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("subset has repeated elements".into()));
        }
        if let Some(&bad) = sorted.iter().find(|&&x| x >= self.size) {
            return Err(Error::InvalidArgument(format!(
                "element {bad} outside universe of size {}",
                self.size
            )));
        }
        let mut index = vec![usize::MAX; self.size];
        for (i, &x) in sorted.iter().enumerate() {
            index[x] = i;
        }
        let mut out = FinStructure::with_shared_signature(self.signature.clone(), sorted.len());
        for s in 0..self.relations.len() {
            for t in self.tuples(s) {
                if t.iter().all(|&x| index[x] != usize::MAX) {
                    let mapped: Vec<usize> = t.iter().map(|&x| index[x]).collect();
                    out.add_tuple(s, &mapped)?;
                }
            }
        }
        if let Some(po) = &self.partial_order {
            let mut m = BitMatrix::new(sorted.len());
            for (i, &a) in sorted.iter().enumerate() {
                for (j, &b) in sorted.iter().enumerate() {
                    if po.get(a, b) {
                        m.set(i, j, true);
                    }
                }
            }
            out.partial_order = Some(m);
        }
        if let Some(lo) = &self.linear_order {
            let seq: Vec<usize> = lo
                .sequence
                .iter()
                .filter(|&&x| index[x] != usize::MAX)
                .map(|&x| index[x])
                .collect();
            out.set_linear_order(seq)?;
        }
        Ok(out)
    }

    /// Renames every element `x` to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FinStructure> {
        if !crate::order::is_permutation(perm) || perm.len() != self.size {
            return Err(Error::InvalidArgument("relabelling is not a permutation".into()));
        }
        let mut out = FinStructure::with_shared_signature(self.signature.clone(), self.size);
        for s in 0..self.relations.len() {
            for t in self.tuples(s) {
                let mapped: Vec<usize> = t.iter().map(|&x| perm[x]).collect();
                out.add_tuple(s, &mapped)?;
            }
        }
        if let Some(po) = &self.partial_order {
            let mut m = BitMatrix::new(self.size);
            for (a, b) in po.pairs() {
                m.set(perm[a], perm[b], true);
            }
            out.partial_order = Some(m);
        }
        if let Some(lo) = &self.linear_order {
            out.set_linear_order(lo.sequence.iter().map(|&x| perm[x]).collect())?;
        }
        Ok(out)
    }

    /// Disjoint union; elements of `other` are shifted past `self`. When
    /// both carry linear orders, every element of `self` comes first.
    pub fn disjoint_union(&self, other: &FinStructure) -> Result<FinStructure> {
        if !self.same_signature(other) {
            return Err(Error::SignatureMismatch(
                "disjoint union of structures in different signatures".into(),
            ));
        }
        let off = self.size;
        let n = self.size + other.size;
        let mut out = FinStructure::with_shared_signature(self.signature.clone(), n);
        for s in 0..self.relations.len() {
            for t in self.tuples(s) {
                out.add_tuple(s, t)?;
            }
            for t in other.tuples(s) {
                let shifted: Vec<usize> = t.iter().map(|&x| x + off).collect();
                out.add_tuple(s, &shifted)?;
            }
        }
        if self.partial_order.is_some() || other.partial_order.is_some() {
            let mut m = BitMatrix::new(n);
            if let Some(po) = &self.partial_order {
                for (a, b) in po.pairs() {
                    m.set(a, b, true);
                }
            }
            if let Some(po) = &other.partial_order {
                for (a, b) in po.pairs() {
                    m.set(a + off, b + off, true);
                }
            }
            out.partial_order = Some(m);
        }
        // an empty side counts as ordered so that it stays a unit
        let l = self.linear_order().or((self.size == 0).then_some(&[][..]));
        let r = other.linear_order().or((other.size == 0).then_some(&[][..]));
        if let (Some(l), Some(r)) = (l, r) {
            if self.has_linear_order() || other.has_linear_order() {
                let seq = l.iter().copied().chain(r.iter().map(|&x| x + off)).collect();
                out.set_linear_order(seq)?;
            }
        }
        Ok(out)
    }

    /// Number of canonical tuples containing each element, per symbol, plus
    /// in/out degree in the partial order.
    pub(crate) fn degree_profile(&self) -> Vec<Vec<usize>> {
        let k = self.relations.len();
        let mut prof = vec![vec![0usize; k + 2]; self.size];
        for s in 0..k {
            for t in self.tuples(s) {
                for &x in t {
                    prof[x][s] += 1;
                }
            }
        }
        if let Some(po) = &self.partial_order {
            for (a, b) in po.pairs() {
                prof[a][k] += 1;
                prof[b][k + 1] += 1;
            }
        }
        prof
    }
}

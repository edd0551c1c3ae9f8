//! Triples of a stage and the dovetailing schedule.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::embedding::{for_each_isomorphism, IsoClasses};
use crate::error::{Error, Result};
use crate::order::combinations;
use crate::structure::FinStructure;

use super::map::PartialMap;

/// Isomorphisms taken from one `(F, G)` pair at a time.
const ISO_BATCH: usize = 64;

/// An isomorphism `φ : F → G` between induced substructures of a stage.
/// Two triples are the same iff their maps are literally equal.
#[derive(Clone, Debug, Serialize)]
pub struct Triple {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub phi: PartialMap,
    pub stage_born: usize,
    pub order_preserving: bool,
}

impl Triple {
    /// Validates `phi` as an isomorphism of induced substructures of `stage`
    /// (relations and partial order; the linear order only sets the flag).
    pub fn new(stage: &FinStructure, phi: PartialMap, stage_born: usize) -> Result<Self> {
        if let Some(why) = phi.automorphism_defect(stage, false) {
            return Err(Error::InconsistentMap(why));
        }
        Ok(Triple {
            f: phi.domain(),
            g: phi.range(),
            order_preserving: phi.preserves_order(stage),
            phi,
            stage_born,
        })
    }

    pub fn same_as(&self, other: &Triple) -> bool {
        self.phi == other.phi
    }
}

/// Lazily enumerated triples of one stage: `|F|` descending, then `F`
/// lexicographically, then `G`, then the isomorphisms in lexicographic order.
#[derive(Clone, Debug)]
pub struct TripleStream {
    stage: usize,
    base: FinStructure,
    found: Vec<Triple>,
    exhausted: bool,
    // cursor
    size: usize,
    subsets: Vec<Vec<usize>>,
    keys: Vec<Option<Vec<usize>>>,
    fi: usize,
    gi: usize,
    taken: usize,
}

impl TripleStream {
    pub fn new(structure: &FinStructure, stage: usize) -> Self {
        let base = structure.without_linear_order();
        let size = base.size();
        TripleStream {
            stage,
            subsets: combinations(size, size).collect(),
            keys: vec![None],
            base,
            found: Vec::new(),
            exhausted: false,
            size,
            fi: 0,
            gi: 0,
            taken: 0,
        }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Number of triples when the enumeration is finished.
    pub fn total(&mut self, structure: &FinStructure) -> usize {
        while self.advance(structure) {}
        self.found.len()
    }

    /// The `xi`-th triple, wrapping modulo the total count.
    pub fn get(&mut self, structure: &FinStructure, xi: usize) -> Triple {
        while self.found.len() <= xi && self.advance(structure) {}
        if xi < self.found.len() {
            return self.found[xi].clone();
        }
        self.found[xi % self.found.len()].clone()
    }

    fn key(&mut self, i: usize) -> Vec<usize> {
        if self.keys[i].is_none() {
            let sub = self.base.induced(&self.subsets[i]).expect("subset in range");
            self.keys[i] = Some(IsoClasses::key(&sub));
        }
        self.keys[i].clone().unwrap()
    }

    /// Adds at least one triple unless finished; false once finished.
    fn advance(&mut self, structure: &FinStructure) -> bool {
        loop {
            if self.exhausted {
                return false;
            }
            if self.fi >= self.subsets.len() {
                if self.size == 0 {
                    self.exhausted = true;
                    return false;
                }
                self.size -= 1;
                self.subsets = combinations(self.base.size(), self.size).collect();
                self.keys = vec![None; self.subsets.len()];
                self.fi = 0;
                self.gi = 0;
                continue;
            }
            let (fi, gi) = (self.fi, self.gi);
            if self.key(fi) != self.key(gi) {
                self.next_pair();
                continue;
            }
            let f = self.subsets[fi].clone();
            let g = self.subsets[gi].clone();
            let sf = self.base.induced(&f).expect("subset in range");
            let sg = self.base.induced(&g).expect("subset in range");
            // resume after the maps already taken from this pair
            let (skip, mut seen, mut maps) = (self.taken, 0, Vec::new());
            let mut more = false;
            for_each_isomorphism(&sf, &sg, |m| {
                seen += 1;
                if seen <= skip {
                    return ControlFlow::Continue(());
                }
                if maps.len() == ISO_BATCH {
                    more = true;
                    return ControlFlow::Break(());
                }
                maps.push(m.to_vec());
                ControlFlow::Continue(())
            });
            if more {
                self.taken += maps.len();
            } else {
                self.next_pair();
            }
            if maps.is_empty() {
                continue;
            }
            for m in maps {
                let phi = PartialMap::new(m.iter().enumerate().map(|(x, &y)| (f[x], g[y])))
                    .expect("isomorphisms are injective");
                self.found.push(Triple {
                    f: f.clone(),
                    g: g.clone(),
                    order_preserving: phi.preserves_order(structure),
                    phi,
                    stage_born: self.stage,
                });
            }
            return true;
        }
    }

    fn next_pair(&mut self) {
        self.taken = 0;
        self.gi += 1;
        if self.gi >= self.subsets.len() {
            self.gi = 0;
            self.fi += 1;
        }
    }
}

/// Cantor dovetailing: step `λ` handles `(μ, ξ)` with `μ + ξ` the
/// diagonal containing `λ` and `μ` descending along it, so `μ ≤ λ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BookKeeper;

impl BookKeeper {
    pub fn item(&self, lambda: usize) -> (usize, usize) {
        let mut d = 0;
        let mut start = 0;
        while start + d + 1 <= lambda {
            start += d + 1;
            d += 1;
        }
        let offset = lambda - start;
        (d - offset, offset)
    }

    /// The first `len` scheduled items.
    pub fn prefix(&self, len: usize) -> Vec<(usize, usize)> {
        (0..len).map(|l| self.item(l)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    #[test]
    fn bookkeeper_diagonals() {
        let b = BookKeeper;
        assert_eq!(b.prefix(6), vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for l in 0..500 {
            assert!(b.item(l).0 <= l);
        }
        // every pair recurs along the schedule once stages exist
        let items = b.prefix(300);
        assert!(items.contains(&(3, 7)));
    }

    #[test]
    fn triples_of_an_edge() {
        let e = complete_graph(2).with_natural_order().unwrap();
        let mut s = TripleStream::new(&e, 0);
        // size 2: id, swap; size 1: four maps; size 0: empty map
        assert_eq!(s.total(&e), 7);
        let t0 = s.get(&e, 0);
        assert_eq!(t0.phi, PartialMap::identity([0, 1]));
        assert!(t0.order_preserving);
        assert!(!s.get(&e, 1).order_preserving);
        assert!(s.get(&e, 6).phi.is_empty());
        assert_eq!(s.get(&e, 7).phi, t0.phi);
    }

    #[test]
    fn triples_respect_relations() {
        let p = path(3);
        let mut s = TripleStream::new(&p, 0);
        let n = s.total(&p);
        for xi in 0..n {
            let t = s.get(&p, xi);
            assert!(t.phi.automorphism_defect(&p, false).is_none());
        }
        // automorphisms 2, size-2 maps: edges 2x2x2 + non-edge 1x1x2, singletons 9, empty 1
        assert_eq!(n, 2 + 10 + 9 + 1);
    }
}

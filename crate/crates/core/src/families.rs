//! Small named structures used as fixtures and CLI shorthands.

use crate::error::Result;
use crate::structure::{FinStructure, Signature, Symbol};

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<FinStructure> {
    let mut g = FinStructure::new(Signature::graph(), n);
    for &(a, b) in edges {
        g.add_tuple(0, &[a, b])?;
    }
    Ok(g)
}

pub fn empty_graph(n: usize) -> FinStructure {
    FinStructure::new(Signature::graph(), n)
}

pub fn complete_graph(n: usize) -> FinStructure {
    let mut g = empty_graph(n);
    for a in 0..n {
        for b in a + 1..n {
            g.add_tuple(0, &[a, b]).unwrap();
        }
    }
    g
}

/// Path on `n` vertices `0 – 1 – … – n-1`.
pub fn path(n: usize) -> FinStructure {
    let mut g = empty_graph(n);
    for a in 1..n {
        g.add_tuple(0, &[a - 1, a]).unwrap();
    }
    g
}

/// Cycle on `n ≥ 3` vertices.
pub fn cycle(n: usize) -> FinStructure {
    let mut g = path(n);
    if n >= 3 {
        g.add_tuple(0, &[0, n - 1]).unwrap();
    }
    g
}

/// Complement of a graph (order slots dropped).
pub fn complement(g: &FinStructure) -> FinStructure {
    let n = g.size();
    let mut out = FinStructure::with_shared_signature(g.shared_signature().clone(), n);
    for a in 0..n {
        for b in a + 1..n {
            if !g.holds(0, &[a, b]) {
                out.add_tuple(0, &[a, b]).unwrap();
            }
        }
    }
    out
}

/// Uniform hypergraph signature with one symmetric symbol `R` of the given arity.
pub fn hypergraph_signature(arity: usize) -> Result<Signature> {
    Signature::new(vec![Symbol::new("R", arity, true)])
}

pub fn hypergraph(n: usize, arity: usize, edges: &[Vec<usize>]) -> Result<FinStructure> {
    let mut h = FinStructure::new(hypergraph_signature(arity)?, n);
    for e in edges {
        h.add_tuple(0, e)?;
    }
    Ok(h)
}

/// Poset on `0..n` generated by `pairs`.
pub fn poset_from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<FinStructure> {
    let mut p = FinStructure::new(Signature::empty(), n);
    p.set_partial_order_pairs(pairs)?;
    Ok(p)
}

/// `0 ≺ 1 ≺ … ≺ n-1`.
pub fn chain(n: usize) -> FinStructure {
    let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    poset_from_pairs(n, &pairs).unwrap()
}

pub fn antichain(n: usize) -> FinStructure {
    poset_from_pairs(n, &[]).unwrap()
}

/// The N-shaped poset `0 ≺ 2, 1 ≺ 2, 1 ≺ 3`.
pub fn n_poset() -> FinStructure {
    poset_from_pairs(4, &[(0, 2), (1, 2), (1, 3)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_edge_counts() {
        assert_eq!(complete_graph(5).tuple_count(0), 10);
        assert_eq!(path(4).tuple_count(0), 3);
        assert_eq!(cycle(5).tuple_count(0), 5);
        assert_eq!(complement(&cycle(5)).tuple_count(0), 5);
        assert!(chain(3).precedes(0, 2));
        assert_eq!(antichain(3).partial_order().unwrap().count(), 0);
        assert_eq!(hypergraph(4, 3, &[vec![0, 1, 2]]).unwrap().tuple_count(0), 1);
    }
}

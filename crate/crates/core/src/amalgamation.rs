//! Joint embedding and amalgamation of structures over a common part.
//!
//! The amalgam `D` of `i: A → B` and `j: A → C` is numbered with the
//! elements of `B` first, in index order, followed by the elements of `C`
//! outside `j(A)`, in index order. Relations are the union of the two sides
//! and a partial order, when present, is the transitive closure of the
//! union. The ordered amalgam places `k(b)` before `l(c)` for unglued `b`
//! and `c` exactly when every element of `A` below `b` is also below `c`.

use crate::bits::BitMatrix;
use crate::classes::{require_member, StructureClass};
use crate::embedding::{is_embedding, Embedding};
use crate::error::{Error, Result};
use crate::order::stable_topological_sort;
use crate::structure::FinStructure;

/// An amalgam `D` with embeddings `k: B → D` and `l: C → D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamResult {
    pub d: FinStructure,
    pub k: Embedding,
    pub l: Embedding,
}

/// Disjoint union of `B` and `C`; when ordered, `B` precedes `C`.
pub fn joint_embed(b: &FinStructure, c: &FinStructure, class: &dyn StructureClass) -> Result<AmalgamResult> {
    require_member(class, b)?;
    require_member(class, c)?;
    let d = b.disjoint_union(c)?;
    Ok(AmalgamResult {
        k: Embedding::identity(b.size()),
        l: Embedding::new((b.size()..b.size() + c.size()).collect()),
        d,
    })
}

/// Amalgam of `i: A → B` and `j: A → C` in `class`. Ordered classes are
/// handled by [`amalgamate_ordered`]; otherwise linear orders are ignored
/// and the result carries none.
pub fn amalgamate(
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
    class: &dyn StructureClass,
) -> Result<AmalgamResult> {
    if class.is_ordered() {
        return amalgamate_ordered(a, b, c, i, j, class);
    }
    let (a, b, c) = (a.without_linear_order(), b.without_linear_order(), c.without_linear_order());
    for x in [&a, &b, &c] {
        require_member(class, x)?;
    }
    free_amalgam(&a, &b, &c, i, j)
}

/// Ordered amalgam in `class`; `A`, `B`, `C` must be members carrying
/// linear orders and `i`, `j` must respect them.
pub fn amalgamate_ordered(
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
    class: &dyn StructureClass,
) -> Result<AmalgamResult> {
    for x in [a, b, c] {
        if !x.has_linear_order() {
            return Err(Error::InadmissibleOrder("ordered amalgamation needs linear orders".into()));
        }
        let x = if class.is_ordered() { x.clone() } else { x.without_linear_order() };
        require_member(class, &x)?;
    }
    let mut res = ordered_amalgam(a, b, c, i, j)?;
    if !class.is_ordered() {
        res.d = res.d.without_linear_order();
    }
    Ok(res)
}

fn check_maps(a: &FinStructure, b: &FinStructure, c: &FinStructure, i: &Embedding, j: &Embedding) -> Result<()> {
    for (name, target, e) in [("i", b, i), ("j", c, j)] {
        match is_embedding(a, target, e) {
            Ok(true) => {}
            Ok(false) => {
                return Err(Error::MalformedInput(format!("{name} is not an embedding of A")));
            }
            Err(err) => return Err(Error::MalformedInput(format!("{name}: {err}"))),
        }
    }
    Ok(())
}

/// Unordered amalgam without class checks: union of relations, closure of
/// partial orders.
pub fn free_amalgam(
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
) -> Result<AmalgamResult> {
    check_maps(a, b, c, i, j)?;
    let nb = b.size();
    let mut glued = vec![None; c.size()];
    for x in 0..a.size() {
        glued[j.apply(x)] = Some(i.apply(x));
    }
    let mut next = nb;
    let l: Vec<usize> = glued
        .iter()
        .map(|g| {
            g.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    let n = next;
    let mut d = FinStructure::with_shared_signature(b.shared_signature().clone(), n);
    for s in 0..b.signature().len() {
        for t in b.tuples(s) {
            d.add_tuple(s, t)?;
        }
        for t in c.tuples(s) {
            let mapped: Vec<usize> = t.iter().map(|&x| l[x]).collect();
            d.add_tuple(s, &mapped)?;
        }
    }
    if b.has_partial_order() || c.has_partial_order() {
        let mut po = BitMatrix::new(n);
        if let Some(m) = b.partial_order() {
            for (x, y) in m.pairs() {
                po.set(x, y, true);
            }
        }
        if let Some(m) = c.partial_order() {
            for (x, y) in m.pairs() {
                po.set(l[x], l[y], true);
            }
        }
        po.close_transitively();
        if !po.is_irreflexive() {
            return Err(Error::Precondition("partial orders of B and C disagree on A".into()));
        }
        d.set_partial_order(po)?;
    }
    Ok(AmalgamResult {
        d,
        k: Embedding::identity(nb),
        l: Embedding::new(l),
    })
}

/// Ordered amalgam without class checks.
pub fn ordered_amalgam(
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    i: &Embedding,
    j: &Embedding,
) -> Result<AmalgamResult> {
    let (Some(rb), Some(rc)) = (b.ranks(), c.ranks()) else {
        return Err(Error::InadmissibleOrder("B and C must carry linear orders".into()));
    };
    if !a.has_linear_order() {
        return Err(Error::InadmissibleOrder("A must carry a linear order".into()));
    }
    let mut res = free_amalgam(
        &a.without_linear_order(),
        &b.without_linear_order(),
        &c.without_linear_order(),
        i,
        j,
    )?;
    // order embeddings are checked on the ordered inputs
    check_maps(a, b, c, i, j)?;
    let n = res.d.size();
    let l = res.l.map().to_vec();
    let mut lt = BitMatrix::new(n);
    for x in 0..b.size() {
        for y in 0..b.size() {
            if rb[x] < rb[y] {
                lt.set(x, y, true);
            }
        }
    }
    for x in 0..c.size() {
        for y in 0..c.size() {
            if rc[x] < rc[y] {
                lt.set(l[x], l[y], true);
            }
        }
    }
    // down-sets of A are initial segments of A's order, so they compare by size
    let mut in_a_b = vec![false; b.size()];
    let mut in_a_c = vec![false; c.size()];
    for x in 0..a.size() {
        in_a_b[i.apply(x)] = true;
        in_a_c[j.apply(x)] = true;
    }
    let down_b: Vec<usize> = (0..b.size())
        .map(|y| (0..a.size()).filter(|&x| rb[i.apply(x)] < rb[y]).count())
        .collect();
    let down_c: Vec<usize> = (0..c.size())
        .map(|y| (0..a.size()).filter(|&x| rc[j.apply(x)] < rc[y]).count())
        .collect();
    for y in (0..b.size()).filter(|&y| !in_a_b[y]) {
        for z in (0..c.size()).filter(|&z| !in_a_c[z]) {
            if down_b[y] <= down_c[z] {
                lt.set(y, l[z], true);
            } else {
                lt.set(l[z], y, true);
            }
        }
    }
    if let Some(po) = res.d.partial_order() {
        for (x, y) in po.pairs() {
            lt.set(x, y, true);
        }
    }
    lt.close_transitively();
    let seq = stable_topological_sort(&lt, |x| x)
        .ok_or_else(|| Error::Precondition("forced comparisons of the ordered amalgam form a cycle".into()))?;
    res.d.set_linear_order(seq)?;
    Ok(res)
}

//! Finite windows of the Z-indexed gluing.
//!
//! Copies `A^z`, `z ∈ [-n, n]`, of a stage `A` are glued along a partial
//! automorphism `π` by `(a, z) ∼ (π(a), z - 1)` for `a ∈ dom π`. Every
//! class is a path that moves down one copy per step, so a window has
//! `(2n+1)|A| - 2n|dom π|` classes. The shift `(a, z) ↦ (a, z + 1)` is
//! well defined on classes with a point below the top copy and extends
//! `π` on copy 0.
//!
//! The structure is built by the alternating scheme: copy `k` is
//! amalgamated on top of the current window, then copy `-k` below it, for
//! `k = 1..=n`. With an order preserving `π` the ordered amalgam is used,
//! with the window (resp. copy `-k`) in the first role. Otherwise the
//! unordered amalgam is used and the order is completed by a stable
//! topological sort extending the order of copy 0 and the partial order.
//!
//! Classes are numbered so that `(a, 0)` is `a`; the remaining classes
//! follow in order of first appearance over copies `1, -1, 2, -2, …`.

use serde::Serialize;

use crate::amalgamation::{free_amalgam, ordered_amalgam};
use crate::bits::BitMatrix;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::order::{is_strict_total_order, order_matrix, stable_topological_sort};
use crate::structure::FinStructure;

use super::map::PartialMap;

/// How the linear order of a window was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMethod {
    /// Iterated ordered amalgamation.
    OrderedAmalgam,
    /// Closed-form order over a `π` that permutes its support.
    Explicit,
    /// Stable linear extension after unordered amalgamation.
    LinearExtension,
    /// The stage carries no linear order.
    Unordered,
}

/// A glued window with canonical numbering.
#[derive(Clone, Debug)]
pub struct Window {
    pub half_width: usize,
    pub base_size: usize,
    pub structure: FinStructure,
    /// The shift on classes.
    pub psi: PartialMap,
    /// Class of every node, indexed by [`Window::node`].
    pub class_of: Vec<usize>,
    /// First node `(a, z)` of every class in canonical order.
    pub origin: Vec<(usize, i64)>,
    pub order_method: OrderMethod,
}

impl Window {
    pub fn node(&self, a: usize, z: i64) -> usize {
        node_id(self.base_size, self.half_width, a, z)
    }

    pub fn class(&self, a: usize, z: i64) -> usize {
        self.class_of[self.node(a, z)]
    }

    /// Copies in canonical visiting order `0, 1, -1, 2, -2, …`.
    pub fn copy_order(&self) -> Vec<i64> {
        copy_order(self.half_width)
    }
}

fn node_id(m: usize, n: usize, a: usize, z: i64) -> usize {
    (z + n as i64) as usize * m + a
}

fn copy_order(n: usize) -> Vec<i64> {
    let mut v = vec![0i64];
    for k in 1..=n as i64 {
        v.push(k);
        v.push(-k);
    }
    v
}

/// Glues `2n+1` copies of `stage` along `pi`. The ordered amalgam is used
/// when `stage` carries a linear order and `pi` preserves it.
pub fn glue(stage: &FinStructure, pi: &PartialMap, n: usize) -> Result<Window> {
    glue_with(stage, pi, n, true)
}

pub(crate) fn glue_with(stage: &FinStructure, pi: &PartialMap, n: usize, closed_form: bool) -> Result<Window> {
    if let Some(why) = pi.automorphism_defect(stage, false) {
        return Err(Error::InconsistentMap(why));
    }
    let m = stage.size();
    let has_order = stage.has_linear_order();
    let ordered = has_order && pi.preserves_order(stage);
    let dom = pi.domain();
    let copy = if ordered { stage.clone() } else { stage.without_linear_order() };
    let base = copy.induced(&dom)?;
    let amalg = |a: &FinStructure, b: &FinStructure, c: &FinStructure, i: Vec<usize>, j: Vec<usize>| {
        let (i, j) = (Embedding::new(i), Embedding::new(j));
        if ordered {
            ordered_amalgam(a, b, c, &i, &j)
        } else {
            free_amalgam(a, b, c, &i, &j)
        }
    };

    // idx[z + n][a]: index of node (a, z) in the current window
    let mut idx: Vec<Vec<usize>> = vec![vec![usize::MAX; m]; 2 * n + 1];
    let at = |z: i64| (z + n as i64) as usize;
    idx[at(0)] = (0..m).collect();
    let mut w = copy.clone();
    for k in 1..=n as i64 {
        // copy k on top: B = window, C = copy k
        let i = dom.iter().map(|&d| idx[at(k - 1)][pi.get(d).unwrap()]).collect();
        let res = amalg(&base, &w, &copy, i, dom.clone())?;
        for row in idx.iter_mut() {
            for x in row.iter_mut().filter(|x| **x != usize::MAX) {
                *x = res.k.apply(*x);
            }
        }
        idx[at(k)] = (0..m).map(|a| res.l.apply(a)).collect();
        w = res.d;

        // copy -k below: B = copy -k, C = window
        let i = dom.iter().map(|&d| pi.get(d).unwrap()).collect();
        let j = dom.iter().map(|&d| idx[at(-k + 1)][d]).collect();
        let res = amalg(&base, &copy, &w, i, j)?;
        for row in idx.iter_mut() {
            for x in row.iter_mut().filter(|x| **x != usize::MAX) {
                *x = res.l.apply(*x);
            }
        }
        idx[at(-k)] = (0..m).map(|a| res.k.apply(a)).collect();
        w = res.d;
    }

    // canonical numbering
    let size = w.size();
    let mut perm = vec![usize::MAX; size];
    let mut origin = Vec::with_capacity(size);
    let mut next = 0;
    for z in copy_order(n) {
        for a in 0..m {
            let x = idx[at(z)][a];
            if perm[x] == usize::MAX {
                perm[x] = next;
                origin.push((a, z));
                next += 1;
            }
        }
    }
    debug_assert_eq!(next, size);
    let mut structure = w.relabel(&perm)?;
    let mut class_of = vec![0; (2 * n + 1) * m];
    for z in -(n as i64)..=n as i64 {
        for a in 0..m {
            class_of[node_id(m, n, a, z)] = perm[idx[at(z)][a]];
        }
    }

    let order_method = if !has_order {
        OrderMethod::Unordered
    } else if ordered {
        OrderMethod::OrderedAmalgam
    } else {
        // extend the order of copy 0 and the partial order
        let ranks = stage.ranks().unwrap();
        let mut lt = structure.partial_order().cloned().unwrap_or_else(|| BitMatrix::new(size));
        for a in 0..m {
            for b in 0..m {
                if ranks[a] < ranks[b] {
                    lt.set(a, b, true);
                }
            }
        }
        let key = |c: usize| (ranks[origin[c].0], origin[c].1);
        let seq = stable_topological_sort(&lt, key)
            .ok_or_else(|| Error::Precondition("stage order conflicts with the partial order".into()))?;
        structure.set_linear_order(seq)?;
        OrderMethod::LinearExtension
    };

    let mut shift = Vec::new();
    for z in -(n as i64)..n as i64 {
        for a in 0..m {
            shift.push((class_of[node_id(m, n, a, z)], class_of[node_id(m, n, a, z + 1)]));
        }
    }
    let psi = PartialMap::new(shift)?;

    let mut window = Window {
        half_width: n,
        base_size: m,
        structure,
        psi,
        class_of,
        origin,
        order_method,
    };
    if closed_form && ordered && pi.domain() == pi.range() && !pi.is_empty() {
        let lt = explicit_order(&window, stage, pi)?;
        if !is_strict_total_order(&lt) {
            return Err(Error::Precondition("closed-form order is not a strict total order".into()));
        }
        let seq = stable_topological_sort(&lt, |x| x).expect("total orders are acyclic");
        window.structure.set_linear_order(seq)?;
        window.order_method = OrderMethod::Explicit;
    }
    Ok(window)
}

/// The closed-form order on a window glued along a `π` that maps its
/// support `B` onto itself preserving order: classes meeting a common copy
/// compare inside that copy; otherwise `(a1, z1)` precedes `(a2, z2)` iff
/// `{b ∈ B : b < a1}` is a proper subset of `{b ∈ B : b < a2}`, or the two
/// are equal and `z1 < z2`.
pub fn explicit_order(window: &Window, stage: &FinStructure, pi: &PartialMap) -> Result<BitMatrix> {
    let ranks = stage
        .ranks()
        .ok_or_else(|| Error::Precondition("stage carries no linear order".into()))?;
    let support = pi.domain();
    if support != pi.range() || !pi.preserves_order(stage) {
        return Err(Error::Precondition(
            "closed-form order needs an order preserving permutation of B".into(),
        ));
    }
    let (m, n) = (window.base_size, window.half_width as i64);
    let size = window.structure.size();
    // nodes of every class, per copy
    let mut at_copy: Vec<Vec<Option<usize>>> = vec![vec![None; (2 * n + 1) as usize]; size];
    for z in -n..=n {
        for a in 0..m {
            at_copy[window.class(a, z)][(z + n) as usize] = Some(a);
        }
    }
    let down: Vec<usize> = (0..m)
        .map(|a| support.iter().filter(|&&b| ranks[b] < ranks[a]).count())
        .collect();
    let mut lt = BitMatrix::new(size);
    for x in 0..size {
        for y in 0..size {
            if x == y {
                continue;
            }
            let shared = (0..(2 * n + 1) as usize).find_map(|zi| match (at_copy[x][zi], at_copy[y][zi]) {
                (Some(a1), Some(a2)) => Some((a1, a2)),
                _ => None,
            });
            let less = match shared {
                Some((a1, a2)) => ranks[a1] < ranks[a2],
                None => {
                    let (a1, z1) = window.origin[x];
                    let (a2, z2) = window.origin[y];
                    down[a1] < down[a2] || (down[a1] == down[a2] && z1 < z2)
                }
            };
            lt.set(x, y, less);
        }
    }
    Ok(lt)
}

/// Union-find count of `∼`-classes, independent of the amalgamation.
pub fn count_classes(m: usize, pi: &PartialMap, n: usize) -> usize {
    let total = (2 * n + 1) * m;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for z in -(n as i64) + 1..=n as i64 {
        for (a, b) in pi.pairs() {
            let (u, v) = (node_id(m, n, a, z), node_id(m, n, b, z - 1));
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
    }
    (0..total).filter(|&x| find(&mut parent, x) == x).count()
}

/// Strict order matrix of a window's linear order.
pub fn window_order(window: &Window) -> Option<BitMatrix> {
    window.structure.linear_order().map(order_matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::isomorphic;
    use crate::families::*;

    #[test]
    fn edge_glued_end_to_end_is_a_path() {
        let pi = PartialMap::new([(0, 1)]).unwrap();
        let w = glue(&complete_graph(2), &pi, 1).unwrap();
        assert_eq!(w.structure.size(), 4);
        assert!(isomorphic(&w.structure, &path(4)));
        assert_eq!(count_classes(2, &pi, 1), 4);
    }

    #[test]
    fn empty_map_gives_disjoint_copies() {
        let s = complete_graph(2).with_natural_order().unwrap();
        let w = glue(&s, &PartialMap::default(), 2).unwrap();
        assert_eq!(w.structure.size(), 10);
        assert_eq!(w.structure.tuple_count(0), 5);
        assert_eq!(w.psi.len(), 8);
        assert_eq!(w.structure.induced(&[0, 1]).unwrap(), s);
    }

    #[test]
    fn full_automorphism_collapses_copies() {
        let c = cycle(5);
        let pi = PartialMap::new((0..5).map(|a| (a, (a + 1) % 5))).unwrap();
        let w = glue(&c, &pi, 2).unwrap();
        assert_eq!(w.structure, c);
        assert_eq!(w.psi, pi);
    }

    #[test]
    fn antichain_glued_on_one_point() {
        let s = antichain(2);
        let w = glue(&s, &PartialMap::identity([0]), 1).unwrap();
        assert_eq!(w.structure.size(), 4);
        assert_eq!(w.structure.partial_order().unwrap().count(), 0);
    }

    #[test]
    fn closed_form_order_matches_iterated_amalgam() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut compared = 0;
        for _ in 0..300 {
            let m = rng.gen_range(1..=5);
            let mut g = empty_graph(m);
            for a in 0..m {
                for b in a + 1..m {
                    if rng.gen_bool(0.5) {
                        g.add_tuple(0, &[a, b]).unwrap();
                    }
                }
            }
            let mut seq: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                seq.swap(i, rng.gen_range(0..=i));
            }
            let s = g.with_linear_order(seq).unwrap();
            let b: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
            if b.is_empty() {
                continue;
            }
            let pi = PartialMap::identity(b);
            let n = rng.gen_range(1..=3);
            let closed = glue(&s, &pi, n).unwrap();
            let iterated = glue_with(&s, &pi, n, false).unwrap();
            assert_eq!(closed.order_method, OrderMethod::Explicit);
            let lt = explicit_order(&closed, &s, &pi).unwrap();
            assert!(is_strict_total_order(&lt));
            assert_eq!(closed.structure.without_linear_order(), iterated.structure.without_linear_order());
            assert_eq!(window_order(&closed), window_order(&iterated));
            compared += 1;
        }
        assert!(compared > 200);
    }

    #[test]
    fn identity_gluing_shifts_the_rest() {
        let s = path(3).with_natural_order().unwrap();
        let pi = PartialMap::identity([0, 1]);
        let w = glue(&s, &pi, 1).unwrap();
        assert_eq!(w.psi.get(0), Some(0));
        assert_eq!(w.psi.get(1), Some(1));
        assert_eq!(w.psi.get(2), Some(w.class(2, 1)));
        assert_ne!(w.class(2, 1), 2);
    }
}

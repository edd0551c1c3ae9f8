//! Arrow relations `C → (B)^A_k`, Ramsey witnesses, the ordering property
//! and rigidity of ordered structures.
//!
//! A colouring assigns each copy of `A` in `C` (copies listed in
//! [`enumerate_copies`] order) a colour. The search for a bad colouring
//! backtracks over copies in that order and only visits colourings that are
//! lexicographically least in their orbit under automorphisms of `C`
//! combined with permutations of the colours. The least bad colouring is
//! least in its own orbit, so the pruned search returns the same colouring
//! as plain exhaustive enumeration.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{enumerate_members, require_member, ClassSpec, StructureClass};
use crate::embedding::{automorphisms, embeds, enumerate_copies, first_embedding, Embedding, IsoClasses};
use crate::error::{Error, Result};
use crate::order::{combinations, permutations};
use crate::structure::FinStructure;

/// Automorphism groups larger than this are not used for pruning.
pub const SYMMETRY_GROUP_CAP: usize = 5040;

/// A colouring of the copies of `A` in `C` with colours `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub copies: Vec<Vec<usize>>,
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn color_of(&self, copy: &[usize]) -> Option<usize> {
        self.copies.iter().position(|c| c == copy).map(|i| self.colors[i])
    }
}

/// Outcome of an arrow check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowReport {
    pub arrows: bool,
    /// Present when `arrows` is false and `B` has a copy in `C`.
    pub bad_coloring: Option<Coloring>,
    pub a_copies: usize,
    pub b_copies: usize,
    /// Colourings (complete or partial) visited by the search.
    pub nodes: u64,
}

/// Copies of `A`, copies of `B`, and for each `B`-copy the sorted indices
/// of the `A`-copies inside it.
struct Instance {
    a_copies: Vec<Vec<usize>>,
    b_copies: Vec<Vec<usize>>,
    b_members: Vec<Vec<usize>>,
}

impl Instance {
    fn new(c: &FinStructure, b: &FinStructure, a: &FinStructure) -> Result<Self> {
        if !c.same_signature(b) || !c.same_signature(a) {
            return Err(Error::SignatureMismatch("arrow instance mixes signatures".into()));
        }
        let a_copies = enumerate_copies(a, c);
        let b_copies = enumerate_copies(b, c);
        let index: HashMap<&[usize], usize> =
            a_copies.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let b_members = b_copies
            .iter()
            .map(|bc| {
                let sub = c.induced(bc)?;
                let mut members: Vec<usize> = enumerate_copies(a, &sub)
                    .into_iter()
                    .map(|inner| {
                        let outer: Vec<usize> = inner.iter().map(|&x| bc[x]).collect();
                        index[outer.as_slice()]
                    })
                    .collect();
                members.sort_unstable();
                Ok(members)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance {
            a_copies,
            b_copies,
            b_members,
        })
    }

    fn is_bad(&self, colors: &[usize]) -> bool {
        self.b_members.iter().all(|m| !monochromatic(m, colors))
    }
}

fn monochromatic(members: &[usize], colors: &[usize]) -> bool {
    members.windows(2).all(|w| colors[w[0]] == colors[w[1]])
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("number of colours must be at least 1".into()));
    }
    Ok(())
}

/// Decides `C → (B)^A_k`. The arrow fails by convention when `B` has no
/// copy in `C`.
pub fn arrows(c: &FinStructure, b: &FinStructure, a: &FinStructure, k: usize) -> Result<ArrowReport> {
    check_k(k)?;
    let inst = Instance::new(c, b, a)?;
    let (bad, nodes) = if inst.b_copies.is_empty() {
        (None, 0)
    } else {
        search_bad(c, &inst, k, true)
    };
    Ok(report(inst, bad, nodes))
}

/// Same verdict as [`arrows`] by enumerating all `k^N` colourings.
pub fn arrows_exhaustive(c: &FinStructure, b: &FinStructure, a: &FinStructure, k: usize) -> Result<ArrowReport> {
    check_k(k)?;
    let inst = Instance::new(c, b, a)?;
    let (bad, nodes) = if inst.b_copies.is_empty() {
        (None, 0)
    } else {
        exhaustive_bad(&inst, k)
    };
    Ok(report(inst, bad, nodes))
}

fn report(inst: Instance, bad: Option<Vec<usize>>, nodes: u64) -> ArrowReport {
    let arrows = !inst.b_copies.is_empty() && bad.is_none();
    ArrowReport {
        arrows,
        a_copies: inst.a_copies.len(),
        b_copies: inst.b_copies.len(),
        bad_coloring: bad.map(|colors| Coloring {
            colors: colors.into_iter().map(|x| x + 1).collect(),
            copies: inst.a_copies,
        }),
        nodes,
    }
}

/// The lexicographically first colouring with no monochromatic copy of `B`,
/// or `None` if every colouring has one or `B` has no copy in `C`.
pub fn find_bad_coloring(c: &FinStructure, b: &FinStructure, a: &FinStructure, k: usize) -> Result<Option<Coloring>> {
    Ok(arrows(c, b, a, k)?.bad_coloring)
}

/// Independent check that `coloring` colours every copy of `A` in `C` with
/// a colour in `1..=k` and leaves no copy of `B` monochromatic.
pub fn verify_bad_coloring(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    k: usize,
    coloring: &Coloring,
) -> bool {
    let copies = enumerate_copies(a, c);
    if coloring.copies.len() != coloring.colors.len() {
        return false;
    }
    let mut sorted = coloring.copies.clone();
    sorted.sort();
    if sorted != copies || coloring.colors.iter().any(|&x| x == 0 || x > k) {
        return false;
    }
    for bc in enumerate_copies(b, c) {
        let inside: Vec<usize> = coloring
            .copies
            .iter()
            .enumerate()
            .filter(|(_, ac)| ac.iter().all(|x| bc.contains(x)))
            .map(|(i, _)| coloring.colors[i])
            .collect();
        if inside.windows(2).all(|w| w[0] == w[1]) {
            return false;
        }
    }
    true
}

fn exhaustive_bad(inst: &Instance, k: usize) -> (Option<Vec<usize>>, u64) {
    let n = inst.a_copies.len();
    let mut colors = vec![0usize; n];
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        if inst.is_bad(&colors) {
            return (Some(colors), nodes);
        }
        // next colouring in lexicographic order
        let mut p = n;
        loop {
            if p == 0 {
                return (None, nodes);
            }
            p -= 1;
            colors[p] += 1;
            if colors[p] < k {
                break;
            }
            colors[p] = 0;
        }
    }
}

/// A group element acting on colourings: `(g·x)[p] = tau[x[inv_sigma[p]]]`.
struct Symmetry {
    inv_sigma: Vec<usize>,
    tau: Vec<usize>,
}

fn symmetries(c: &FinStructure, inst: &Instance, k: usize) -> Vec<Symmetry> {
    let n = inst.a_copies.len();
    let index: HashMap<&[usize], usize> =
        inst.a_copies.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let auts: Vec<Embedding> = {
        let mut count = 0;
        let mut out = Vec::new();
        crate::embedding::for_each_isomorphism(c, c, |m| {
            count += 1;
            if count > SYMMETRY_GROUP_CAP {
                out.clear();
                return std::ops::ControlFlow::Break(());
            }
            out.push(Embedding::new(m.to_vec()));
            std::ops::ControlFlow::Continue(())
        });
        if out.is_empty() {
            vec![Embedding::identity(c.size())]
        } else {
            out
        }
    };
    let taus = if k <= 5 { permutations(k) } else { vec![(0..k).collect()] };
    let mut out = Vec::with_capacity(auts.len() * taus.len());
    for g in &auts {
        // sigma maps copy index p to the index of g(copy p)
        let mut inv_sigma = vec![0; n];
        for (p, copy) in inst.a_copies.iter().enumerate() {
            let mut img: Vec<usize> = copy.iter().map(|&x| g.apply(x)).collect();
            img.sort_unstable();
            inv_sigma[index[img.as_slice()]] = p;
        }
        for tau in &taus {
            let identity = inv_sigma.iter().enumerate().all(|(i, &x)| i == x) && tau.iter().enumerate().all(|(i, &x)| i == x);
            if !identity {
                out.push(Symmetry {
                    inv_sigma: inv_sigma.clone(),
                    tau: tau.clone(),
                });
            }
        }
    }
    out
}

fn search_bad(c: &FinStructure, inst: &Instance, k: usize, prune: bool) -> (Option<Vec<usize>>, u64) {
    let n = inst.a_copies.len();
    let mut triggers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (bi, m) in inst.b_members.iter().enumerate() {
        match m.last() {
            Some(&t) => triggers[t].push(bi),
            // a copy of B containing no copy of A is monochromatic
            None => return (None, 0),
        }
    }
    let syms = if prune { symmetries(c, inst, k) } else { Vec::new() };
    let mut colors = Vec::with_capacity(n);
    let mut nodes = 0u64;
    let found = dfs(inst, k, &triggers, &syms, &mut colors, &mut nodes);
    (found.then_some(colors), nodes)
}

fn dfs(
    inst: &Instance,
    k: usize,
    triggers: &[Vec<usize>],
    syms: &[Symmetry],
    colors: &mut Vec<usize>,
    nodes: &mut u64,
) -> bool {
    let t = colors.len();
    if t == inst.a_copies.len() {
        return true;
    }
    for col in 0..k {
        *nodes += 1;
        colors.push(col);
        let ok = triggers[t].iter().all(|&bi| !monochromatic(&inst.b_members[bi], colors))
            && syms.iter().all(|g| !image_smaller(g, colors));
        if ok && dfs(inst, k, triggers, syms, colors, nodes) {
            return true;
        }
        colors.pop();
    }
    false
}

/// True when every completion of the prefix `x` has `g·x` lexicographically
/// smaller than `x`.
fn image_smaller(g: &Symmetry, x: &[usize]) -> bool {
    for (p, &xp) in x.iter().enumerate() {
        let q = g.inv_sigma[p];
        if q >= x.len() {
            return false;
        }
        let v = g.tau[x[q]];
        if v != xp {
            return v < xp;
        }
    }
    false
}

/// Smallest member `C` of `class` with `|C| ≤ size_bound` and
/// `C → (B)^A_k`, trying sizes upward and members in enumeration order.
pub fn find_ramsey_witness(
    a: &FinStructure,
    b: &FinStructure,
    k: usize,
    class: &dyn StructureClass,
    size_bound: usize,
) -> Result<Option<FinStructure>> {
    check_k(k)?;
    require_member(class, a)?;
    require_member(class, b)?;
    if !embeds(a, b) {
        return Err(Error::Precondition("A does not embed into B".into()));
    }
    for m in b.size()..=size_bound {
        let members = enumerate_members(class, m)?;
        let hit = members
            .par_iter()
            .map(|c| arrows(c, b, a, k).map(|r| r.arrows))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .position(|x| x);
        if let Some(i) = hit {
            return Ok(Some(members[i].clone()));
        }
    }
    Ok(None)
}

/// Smallest unordered member `D` with `|D| ≤ size_bound` such that every
/// admissible ordering of `B` embeds into every admissible ordering of `D`.
pub fn check_ordering_property(b: &FinStructure, class: &ClassSpec, size_bound: usize) -> Result<Option<FinStructure>> {
    if !class.ordered() {
        return Err(Error::InvalidClass("the ordering property needs an ordered class".into()));
    }
    let reduct = class.with_ordered(false);
    let b = b.without_linear_order();
    require_member(&reduct, &b)?;
    let mut ordered_bs = Vec::new();
    let mut dedup = IsoClasses::default();
    for order in reduct.admissible_orders(&b) {
        let ob = b.clone().with_linear_order(order)?;
        if dedup.insert(&ob) {
            ordered_bs.push(ob);
        }
    }
    for m in b.size()..=size_bound {
        let candidates = enumerate_members(&reduct, m)?;
        let hit = candidates.par_iter().position_first(|d| {
            reduct.admissible_orders(d).into_iter().all(|order| {
                let od = d.clone().with_linear_order(order).expect("admissible order");
                ordered_bs.iter().all(|ob| first_embedding(ob, &od).is_some())
            })
        });
        if let Some(i) = hit {
            return Ok(Some(candidates[i].clone()));
        }
    }
    Ok(None)
}

/// A subset mapped onto itself by an automorphism that moves one of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityCheck {
    pub subsets_checked: usize,
    pub violation: Option<(Vec<usize>, Embedding)>,
}

impl RigidityCheck {
    pub fn rigid(&self) -> bool {
        self.violation.is_none()
    }
}

/// For every subset `F` with `|F| ≤ bound`, every automorphism of `A` (all
/// slots it carries) with `g[F] = F` fixes `F` pointwise.
pub fn check_order_rigidity(a: &FinStructure, bound: usize) -> Result<RigidityCheck> {
    let auts = automorphisms(a);
    let bound = bound.min(a.size());
    let mut subsets_checked = 0;
    for size in 1..=bound {
        for f in combinations(a.size(), size) {
            subsets_checked += 1;
            for g in &auts {
                let setwise = f.iter().all(|&x| f.binary_search(&g.apply(x)).is_ok());
                if setwise && f.iter().any(|&x| g.apply(x) != x) {
                    return Ok(RigidityCheck {
                        subsets_checked,
                        violation: Some((f, g.clone())),
                    });
                }
            }
        }
    }
    Ok(RigidityCheck {
        subsets_checked,
        violation: None,
    })
}

/// One row of a Ramsey class report.
#[derive(Clone, Debug)]
pub struct RamseyRow {
    pub a: FinStructure,
    pub b: FinStructure,
    pub witness: Option<FinStructure>,
}

/// For every pair `A ≤ B` of members (up to isomorphism, `1 ≤ |A| ≤ |B| ≤
/// inst_bound`), searches a 2-colour Ramsey witness of size at most
/// `witness_bound`.
pub fn check_ramsey_class(class: &dyn StructureClass, inst_bound: usize, witness_bound: usize) -> Result<Vec<RamseyRow>> {
    if inst_bound == 0 || witness_bound == 0 {
        return Err(Error::InvalidArgument("bounds must be at least 1".into()));
    }
    let mut members = Vec::new();
    for m in 1..=inst_bound {
        members.extend(enumerate_members(class, m)?);
    }
    let mut rows = Vec::new();
    for b in &members {
        for a in &members {
            if a.size() <= b.size() && embeds(a, b) {
                let witness = find_ramsey_witness(a, b, 2, class, witness_bound)?;
                rows.push(RamseyRow {
                    a: a.clone(),
                    b: b.clone(),
                    witness,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    fn ordered(s: FinStructure) -> FinStructure {
        s.with_natural_order().unwrap()
    }

    #[test]
    fn r33_is_six() {
        let (k2, k3) = (ordered(complete_graph(2)), ordered(complete_graph(3)));
        let r6 = arrows(&ordered(complete_graph(6)), &k3, &k2, 2).unwrap();
        assert!(r6.arrows);
        let r5 = arrows(&ordered(complete_graph(5)), &k3, &k2, 2).unwrap();
        assert!(!r5.arrows);
        let bad = r5.bad_coloring.unwrap();
        assert!(verify_bad_coloring(&ordered(complete_graph(5)), &k3, &k2, 2, &bad));
    }

    #[test]
    fn pruned_and_exhaustive_agree_on_first_witness() {
        let (k2, k3) = (ordered(complete_graph(2)), ordered(complete_graph(3)));
        let k5 = ordered(complete_graph(5));
        let p = arrows(&k5, &k3, &k2, 2).unwrap();
        let e = arrows_exhaustive(&k5, &k3, &k2, 2).unwrap();
        assert_eq!(p.bad_coloring, e.bad_coloring);
        let k5u = complete_graph(5);
        let p = arrows(&k5u, &complete_graph(3), &complete_graph(2), 2).unwrap();
        let e = arrows_exhaustive(&k5u, &complete_graph(3), &complete_graph(2), 2).unwrap();
        assert_eq!(p.bad_coloring, e.bad_coloring);
        assert!(p.nodes < e.nodes);
    }

    #[test]
    fn degenerate_instances() {
        let k3 = complete_graph(3);
        let k4 = complete_graph(4);
        let r = arrows(&k3, &k4, &complete_graph(2), 2).unwrap();
        assert!(!r.arrows);
        assert!(r.bad_coloring.is_none());
        assert!(arrows(&k3, &k3, &k3, 2).unwrap().arrows);
        assert!(arrows(&k3, &k3, &complete_graph(2), 1).unwrap().arrows);
        assert!(arrows(&k3, &k3, &complete_graph(2), 0).is_err());
    }

    #[test]
    fn vertex_ramsey_witness_is_triangle() {
        let g = ClassSpec::graphs(false);
        let w = find_ramsey_witness(&empty_graph(1), &complete_graph(2), 2, &g, 5).unwrap().unwrap();
        assert!(crate::embedding::isomorphic(&w, &complete_graph(3)));
        let w = find_ramsey_witness(&complete_graph(2), &complete_graph(2), 2, &g, 5).unwrap().unwrap();
        assert_eq!(w, complete_graph(2));
    }

    #[test]
    fn ordering_property_trivial_cases() {
        let og = ClassSpec::graphs(true);
        let w = check_ordering_property(&complete_graph(2), &og, 4).unwrap().unwrap();
        assert_eq!(w.size(), 2);
        let op = ClassSpec::posets(true);
        let w = check_ordering_property(&chain(2), &op, 4).unwrap().unwrap();
        assert_eq!(w.size(), 2);
    }

    #[test]
    fn rigidity() {
        let a = ordered(complete_graph(3));
        assert!(check_order_rigidity(&a, 3).unwrap().rigid());
        assert!(!check_order_rigidity(&antichain(2), 2).unwrap().rigid());
    }
}

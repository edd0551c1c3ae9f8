//! The automorphism group of a finite structure acting on its admissible
//! linear orders.
//!
//! The space is finite and discrete, so the closure of an orbit is the
//! orbit itself.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::{ClassSpec, StructureClass};
use crate::embedding::{automorphisms, embeds, Embedding};
use crate::error::{Error, Result};
use crate::order::{is_permutation, subsets_by_size};
use crate::structure::FinStructure;

/// Largest base a flow is built on.
pub const FLOW_SIZE_CAP: usize = 8;

/// A linear order, listed in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct OrderPoint(pub Vec<usize>);

impl OrderPoint {
    pub fn new(sequence: Vec<usize>) -> Result<Self> {
        if !is_permutation(&sequence) {
            return Err(Error::InadmissibleOrder(format!("{sequence:?} is not a permutation")));
        }
        Ok(OrderPoint(sequence))
    }

    pub fn sequence(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Strict order test.
    pub fn before(&self, a: usize, b: usize) -> bool {
        let pos = |x| self.0.iter().position(|&y| y == x);
        matches!((pos(a), pos(b)), (Some(i), Some(j)) if i < j)
    }
}

/// `α` precedes `β` in `g·p` iff `g⁻¹(α)` precedes `g⁻¹(β)` in `p`.
pub fn act(g: &Embedding, p: &OrderPoint) -> OrderPoint {
    OrderPoint(p.0.iter().map(|&x| g.apply(x)).collect())
}

/// Admissible orders of `a` for `class`: all orders, or the linear
/// extensions of the partial order for poset classes.
pub fn admissible_orders(a: &FinStructure, class: &ClassSpec) -> Result<Vec<OrderPoint>> {
    let reduct = class.with_ordered(false);
    if let Some(why) = reduct.violation(a)? {
        return Err(Error::NotMember {
            class: reduct.name(),
            reason: why,
        });
    }
    Ok(reduct.admissible_orders(a).into_iter().map(OrderPoint).collect())
}

/// Points closed under the full automorphism group of the base.
#[derive(Clone, Debug)]
pub struct FiniteFlow {
    base: FinStructure,
    points: Vec<OrderPoint>,
    group: Vec<Embedding>,
}

impl FiniteFlow {
    /// The flow of all admissible orders.
    pub fn new(a: &FinStructure, class: &ClassSpec) -> Result<Self> {
        let points = admissible_orders(a, class)?;
        Self::from_points(a, points)
    }

    /// A flow on the given points, which must be closed under the group.
    pub fn from_points(a: &FinStructure, points: Vec<OrderPoint>) -> Result<Self> {
        if a.size() > FLOW_SIZE_CAP {
            return Err(Error::BoundTooLarge {
                what: "flow base size",
                requested: a.size(),
                cap: FLOW_SIZE_CAP,
            });
        }
        let base = a.without_linear_order();
        let group = automorphisms(&base);
        let points: Vec<OrderPoint> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        for p in &points {
            if p.len() != base.size() || !is_permutation(&p.0) {
                return Err(Error::InadmissibleOrder(format!("{:?} is not an order on the base", p.0)));
            }
        }
        let flow = FiniteFlow { base, points, group };
        for p in &flow.points {
            if flow.group.iter().any(|g| !flow.contains(&act(g, p))) {
                return Err(Error::InvalidArgument("points are not closed under the group".into()));
            }
        }
        Ok(flow)
    }

    /// The orbit of `p` as a flow.
    pub fn orbit_flow(a: &FinStructure, class: &ClassSpec, p: &OrderPoint) -> Result<Self> {
        let all = FiniteFlow::new(a, class)?;
        let orbit = orbit_closure(&all, p)?;
        Ok(FiniteFlow {
            base: all.base,
            points: orbit,
            group: all.group,
        })
    }

    pub fn base(&self) -> &FinStructure {
        &self.base
    }

    pub fn points(&self) -> &[OrderPoint] {
        &self.points
    }

    pub fn group(&self) -> &[Embedding] {
        &self.group
    }

    pub fn contains(&self, p: &OrderPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    fn require(&self, p: &OrderPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::InadmissibleOrder(format!("{:?} is not a point of the flow", p.0)))
        }
    }
}

/// The orbit of `p`, sorted.
pub fn orbit_closure(flow: &FiniteFlow, p: &OrderPoint) -> Result<Vec<OrderPoint>> {
    flow.require(p)?;
    let set: BTreeSet<OrderPoint> = flow.group.par_iter().map(|g| act(g, p)).collect();
    Ok(set.into_iter().collect())
}

/// Orbits of the flow, each sorted, in order of their least point.
pub fn orbits(flow: &FiniteFlow) -> Vec<Vec<OrderPoint>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in &flow.points {
        if seen.contains(p) {
            continue;
        }
        let orbit = orbit_closure(flow, p).expect("points of the flow");
        seen.extend(orbit.iter().cloned());
        out.push(orbit);
    }
    out
}

/// Every orbit is the whole point set.
pub fn is_minimal(flow: &FiniteFlow) -> Result<bool> {
    if flow.points.is_empty() {
        return Err(Error::InvalidArgument("empty flow".into()));
    }
    Ok(orbits(flow).len() == 1)
}

/// Points fixed by every automorphism that fixes `p`.
pub fn fixed_points_of_order_stabilizer(flow: &FiniteFlow, p: &OrderPoint) -> Result<Vec<OrderPoint>> {
    flow.require(p)?;
    let stabilizer: Vec<&Embedding> = flow.group.iter().filter(|g| &act(g, p) == p).collect();
    Ok(flow
        .points
        .iter()
        .filter(|q| stabilizer.iter().all(|g| &act(g, q) == *q))
        .cloned()
        .collect())
}

/// True iff every induced substructure of size at most `m`, ordered by
/// `candidate`, embeds into `a` ordered by `reference`.
pub fn in_orbit_closure_age_criterion(
    a: &FinStructure,
    reference: &OrderPoint,
    candidate: &OrderPoint,
    m: usize,
) -> Result<bool> {
    if m > a.size() {
        return Err(Error::InvalidArgument(format!("bound {m} exceeds the size {}", a.size())));
    }
    let base = a.without_linear_order();
    let target = base.clone().with_linear_order(reference.0.clone())?;
    let ordered = base.clone().with_linear_order(candidate.0.clone())?;
    for subset in subsets_by_size(a.size()).filter(|s| !s.is_empty() && s.len() <= m) {
        if !embeds(&ordered.induced(&subset)?, &target) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Age criterion against orbit membership over all pairs of points.
#[derive(Clone, Debug, Serialize)]
pub struct TorderReport {
    pub size: usize,
    pub bound: usize,
    pub pairs: usize,
    pub agreements: usize,
    /// Pairs in one orbit that fail the age criterion.
    pub forward_violations: Vec<(OrderPoint, OrderPoint)>,
    /// Pairs meeting the age criterion without sharing an orbit.
    pub converse_gaps: Vec<(OrderPoint, OrderPoint)>,
}

impl TorderReport {
    pub fn full_agreement(&self) -> bool {
        self.agreements == self.pairs
    }

    pub fn forward_sound(&self) -> bool {
        self.forward_violations.is_empty()
    }
}

/// Compares the age criterion at bound `m` (default `|A|`) with literal
/// orbit membership for every pair of admissible orders.
pub fn check_torder_equivalence(a: &FinStructure, class: &ClassSpec, m: Option<usize>) -> Result<TorderReport> {
    let flow = FiniteFlow::new(a, class)?;
    let bound = m.unwrap_or(a.size());
    let pts = flow.points();
    let orbit_sets: Vec<Vec<OrderPoint>> = pts.iter().map(|p| orbit_closure(&flow, p)).collect::<Result<_>>()?;
    let rows: Vec<(bool, bool, usize, usize)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| (0..pts.len()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let in_orbit = orbit_sets[i].binary_search(&pts[j]).is_ok();
            let crit = in_orbit_closure_age_criterion(a, &pts[i], &pts[j], bound)?;
            Ok((in_orbit, crit, i, j))
        })
        .collect::<Result<_>>()?;
    let mut report = TorderReport {
        size: a.size(),
        bound,
        pairs: rows.len(),
        agreements: 0,
        forward_violations: Vec::new(),
        converse_gaps: Vec::new(),
    };
    for (in_orbit, crit, i, j) in rows {
        match (in_orbit, crit) {
            (true, false) => report.forward_violations.push((pts[i].clone(), pts[j].clone())),
            (false, true) => report.converse_gaps.push((pts[i].clone(), pts[j].clone())),
            _ => report.agreements += 1,
        }
    }
    Ok(report)
}

//! Finite stages of the homogenizing limit construction.
//!
//! Each step takes the next scheduled triple `(F, G, φ)` of some earlier
//! stage. A triple seen for the first time is glued along `φ`; a triple
//! seen before is glued along the map accumulated for it so far. The new
//! stage is the glued window, which contains the current stage as copy 0,
//! and the shift of the window becomes the triple's new map.

mod ep;
mod map;
mod schedule;
mod window;

use std::path::Path;

use serde::Serialize;

use crate::classes::{require_member, ClassSpec, StructureClass};
use crate::doc::StructureDoc;
use crate::error::{Error, Result};
use crate::order::{is_strict_total_order, order_matrix};
use crate::structure::FinStructure;

pub use ep::{check_extension_property, EpFailure, EpReport, EP_FAILURE_CAP};
pub use map::PartialMap;
pub use schedule::{BookKeeper, Triple, TripleStream};
pub use window::{count_classes, explicit_order, glue, window_order, OrderMethod, Window};

/// Default half-width of the window.
pub const DEFAULT_WINDOW: usize = 1;
/// Default cap on the size of a stage.
pub const DEFAULT_STAGE_CAP: usize = 1024;

/// Glues copies of `a_mu` along the triple's `φ`.
pub fn glue_case1(a_mu: &FinStructure, t: &Triple, n: usize) -> Result<Window> {
    if let Some(why) = t.phi.automorphism_defect(a_mu, false) {
        return Err(Error::InconsistentMap(why));
    }
    glue(a_mu, &t.phi, n)
}

/// Glues copies of `a_mu` along the accumulated map `psi_b` of a triple
/// processed before; `b` is the part of the universe it was built on.
pub fn glue_case2(a_mu: &FinStructure, t: &Triple, b: &[usize], psi_b: &PartialMap, n: usize) -> Result<Window> {
    if b.is_empty() {
        return Err(Error::Precondition("empty B: the triple is new and is glued along φ".into()));
    }
    if psi_b.support().iter().any(|x| b.binary_search(x).is_err()) {
        return Err(Error::InconsistentMap("accumulated map leaves B".into()));
    }
    if !psi_b.extends(&t.phi) {
        return Err(Error::InconsistentMap("accumulated map does not extend φ".into()));
    }
    glue(a_mu, psi_b, n)
}

/// The order of a window glued along an order preserving permutation of
/// `b`, in increasing sequence.
pub fn extend_order_case2(window: &Window, a_mu: &FinStructure, psi: &PartialMap, b: &[usize]) -> Result<Vec<usize>> {
    if psi.domain() != b {
        return Err(Error::Precondition("map must be defined on all of B".into()));
    }
    let lt = explicit_order(window, a_mu, psi)?;
    if !is_strict_total_order(&lt) {
        return Err(Error::Precondition("order is not total".into()));
    }
    let mut seq: Vec<usize> = (0..lt.len()).collect();
    seq.sort_by_key(|&x| std::cmp::Reverse(lt.row(x).count()));
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlueCase {
    /// First visit: glued along `φ`.
    Fresh,
    /// Later visit: glued along the accumulated map.
    Revisit,
}

/// Accumulated map of one triple.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub triple: Triple,
    pub psi: PartialMap,
    /// Maps recorded at earlier visits, oldest first.
    pub history: Vec<PartialMap>,
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub stage: usize,
    pub index: usize,
    pub phi: PartialMap,
    pub case: GlueCase,
    pub order: OrderMethod,
    pub size_before: usize,
    pub size_after: usize,
    /// Copy coordinates `(a, z)` naming each element of the new stage.
    pub origin: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct ConstructionState {
    class: ClassSpec,
    window: usize,
    stage_cap: usize,
    stages: Vec<FinStructure>,
    streams: Vec<TripleStream>,
    ledger: Vec<LedgerEntry>,
    steps: Vec<StepRecord>,
    bookkeeper: BookKeeper,
    last_window: Option<(Window, PartialMap)>,
}

impl ConstructionState {
    /// Starts from `seed`; an unordered seed receives its first admissible
    /// order.
    pub fn new(seed: &FinStructure, class: &ClassSpec, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        let seed = if seed.has_linear_order() {
            seed.clone()
        } else {
            let order = class
                .admissible_orders(seed)
                .into_iter()
                .next()
                .ok_or_else(|| Error::InadmissibleOrder("seed has no admissible order".into()))?;
            seed.clone().with_linear_order(order)?
        };
        require_member(class, &seed)?;
        if class.uses_partial_order() {
            let po = seed.partial_order().expect("members carry a partial order");
            let lt = order_matrix(seed.linear_order().unwrap());
            if po.pairs().any(|(a, b)| !lt.get(a, b)) {
                return Err(Error::InadmissibleOrder("seed order does not extend its partial order".into()));
            }
        }
        Ok(ConstructionState {
            class: class.clone(),
            window,
            stage_cap: DEFAULT_STAGE_CAP,
            streams: vec![TripleStream::new(&seed, 0)],
            stages: vec![seed],
            ledger: Vec::new(),
            steps: Vec::new(),
            bookkeeper: BookKeeper,
            last_window: None,
        })
    }

    pub fn with_stage_cap(mut self, cap: usize) -> Self {
        self.stage_cap = cap;
        self
    }

    pub fn class(&self) -> &ClassSpec {
        &self.class
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn stages(&self) -> &[FinStructure] {
        &self.stages
    }

    pub fn current(&self) -> &FinStructure {
        self.stages.last().unwrap()
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// The window of the last step and the map it was glued along.
    pub fn last_window(&self) -> Option<&(Window, PartialMap)> {
        self.last_window.as_ref()
    }

    pub fn entry_for(&self, phi: &PartialMap) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| &e.triple.phi == phi)
    }

    /// The triple the next step will process, with its schedule position.
    pub fn next_triple(&mut self) -> (usize, usize, Triple) {
        let (mu, xi) = self.bookkeeper.item(self.steps.len());
        let t = self.streams[mu].get(&self.stages[mu], xi);
        (mu, xi, t)
    }

    /// Performs one scheduled step.
    pub fn step(&mut self) -> Result<&StepRecord> {
        let lambda = self.steps.len();
        let (mu, xi, triple) = self.next_triple();
        let current = self.current().clone();
        let position = self.ledger.iter().position(|e| e.triple.same_as(&triple));
        let (case, pi) = match position {
            Some(p) => (GlueCase::Revisit, self.ledger[p].psi.clone()),
            None => (GlueCase::Fresh, triple.phi.clone()),
        };
        let m = current.size();
        let predicted = (2 * self.window + 1) * m - 2 * self.window * pi.len();
        if predicted > self.stage_cap {
            return Err(Error::BoundTooLarge {
                what: "stage size",
                requested: predicted,
                cap: self.stage_cap,
            });
        }
        let window = glue(&current, &pi, self.window)?;
        let next = window.structure.clone();
        match position {
            Some(p) => {
                let e = &mut self.ledger[p];
                let old = std::mem::replace(&mut e.psi, window.psi.clone());
                e.history.push(old);
                e.steps.push(lambda);
            }
            None => self.ledger.push(LedgerEntry {
                triple: triple.clone(),
                psi: window.psi.clone(),
                history: Vec::new(),
                steps: vec![lambda],
            }),
        }
        self.steps.push(StepRecord {
            step: lambda,
            stage: mu,
            index: xi,
            phi: triple.phi.clone(),
            case,
            order: window.order_method,
            size_before: m,
            size_after: next.size(),
            origin: window.origin.clone(),
        });
        self.streams.push(TripleStream::new(&next, lambda + 1));
        self.stages.push(next);
        self.last_window = Some((window, pi));
        Ok(self.steps.last().unwrap())
    }

    /// Checks every invariant of the latest stage, returning the
    /// violations found.
    pub fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        let cur = self.current();
        let k = self.stages.len() - 1;
        if k > 0 {
            let prev = &self.stages[k - 1];
            let prefix: Vec<usize> = (0..prev.size()).collect();
            match cur.induced(&prefix) {
                Ok(s) if &s == prev => {}
                _ => out.push(format!("stage {} is not an induced prefix of stage {k}", k - 1)),
            }
        }
        let Some(seq) = cur.linear_order() else {
            out.push(format!("stage {k} carries no linear order"));
            return out;
        };
        let lt = order_matrix(seq);
        if !is_strict_total_order(&lt) {
            out.push(format!("stage {k}: order is not a strict total order"));
        }
        if let Some(po) = cur.partial_order() {
            if let Some((a, b)) = po.pairs().find(|&(a, b)| !lt.get(a, b)) {
                out.push(format!("stage {k}: order misses {a} ≺ {b}"));
            }
        }
        match self.class.violation(cur) {
            Ok(None) => {}
            Ok(Some(why)) => out.push(format!("stage {k} leaves the class: {why}")),
            Err(e) => out.push(format!("stage {k}: {e}")),
        }
        if let Some((w, pi)) = &self.last_window {
            if w.order_method == OrderMethod::Explicit {
                match explicit_order(w, &self.stages[k - 1], pi) {
                    Ok(m) if is_strict_total_order(&m) && m == lt => {}
                    Ok(_) => out.push(format!("stage {k}: closed-form order is not the stage order")),
                    Err(e) => out.push(format!("stage {k}: {e}")),
                }
            }
        }
        for e in &self.ledger {
            let t = &e.triple;
            if let Some(why) = e.psi.automorphism_defect(cur, false) {
                out.push(format!("map of {:?} is not a partial automorphism: {why}", t.phi));
            }
            if !e.psi.extends(&t.phi) {
                out.push(format!("map of {:?} does not extend φ", t.phi));
            }
            if t.order_preserving && !e.psi.preserves_order(cur) {
                out.push(format!("map of {:?} does not preserve the order", t.phi));
            }
            let mut chain = e.history.iter().chain(std::iter::once(&e.psi));
            let mut prev = chain.next().unwrap();
            for next in chain {
                if !next.extends(prev) {
                    out.push(format!("map of {:?} lost pairs on a revisit", t.phi));
                }
                prev = next;
            }
        }
        out
    }

    /// Writes one structure document per stage and the map ledger.
    pub fn write_trace(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Document(e.to_string()))?;
        let write = |name: String, text: String| {
            std::fs::write(dir.join(name), text).map_err(|e| Error::Document(e.to_string()))
        };
        for (k, s) in self.stages.iter().enumerate() {
            write(format!("stage_{k:03}.json"), s.to_json_pretty())?;
        }
        write("psi_ledger.json".into(), serde_json::to_string_pretty(&self.ledger_doc())?)?;
        Ok(())
    }

    pub fn ledger_doc(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .ledger
            .iter()
            .map(|e| {
                serde_json::json!({
                    "triple": e.triple,
                    "psi": e.psi,
                    "order_preserving": e.triple.order_preserving,
                    "steps": e.steps,
                })
            })
            .collect();
        serde_json::Value::Array(entries)
    }

    /// Summary document of the run.
    pub fn report(&self) -> serde_json::Value {
        serde_json::json!({
            "class": self.class.to_string(),
            "window": self.window,
            "stage_sizes": self.stages.iter().map(|s| s.size()).collect::<Vec<_>>(),
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "step": s.step,
                "stage": s.stage,
                "index": s.index,
                "phi": s.phi,
                "case": s.case,
                "order": s.order,
                "size_before": s.size_before,
                "size_after": s.size_after,
            })).collect::<Vec<_>>(),
            "final_stage": StructureDoc::from_structure(self.current()),
        })
    }
}

/// Runs `budget` scheduled steps from `seed`.
pub fn run(seed: &FinStructure, class: &ClassSpec, budget: usize, window: usize) -> Result<ConstructionState> {
    let mut state = ConstructionState::new(seed, class, window)?;
    for _ in 0..budget {
        state.step()?;
    }
    Ok(state)
}

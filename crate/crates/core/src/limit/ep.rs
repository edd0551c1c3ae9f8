use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::StructureClass;
use crate::doc::StructureDoc;
use crate::embedding::{age_up_to, enumerate_embeddings, for_each_embedding, Embedding, IsoClasses};
use crate::error::Result;
use crate::order::subsets_by_size;
use crate::structure::FinStructure;

/// Failing instances kept in a report.
pub const EP_FAILURE_CAP: usize = 16;

/// An instance `i : B → A`, `j : B → C` with no `k : C → A`, `k ∘ j = i`.
#[derive(Clone, Debug, Serialize)]
pub struct EpFailure {
    pub b: StructureDoc,
    pub c: StructureDoc,
    pub i: Embedding,
    pub j: Embedding,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpReport {
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<EpFailure>,
}

impl EpReport {
    pub fn holds(&self) -> bool {
        self.failed == 0
    }
}

/// Checks the extension property of `a` against its own age up to
/// `sub_bound`. The linear order is used when the class is ordered and `a`
/// carries one.
pub fn check_extension_property(
    a: &FinStructure,
    class: &dyn StructureClass,
    sub_bound: usize,
) -> Result<EpReport> {
    let a = if class.is_ordered() { a.clone() } else { a.without_linear_order() };
    let age = age_up_to(&a, sub_bound.max(1))?;
    let rows: Vec<EpReport> = age
        .members
        .par_iter()
        .map(|c| check_one(&a, c))
        .collect::<Result<_>>()?;
    let mut report = EpReport {
        passed: 0,
        failed: 0,
        failures: Vec::new(),
    };
    for r in rows {
        report.passed += r.passed;
        report.failed += r.failed;
        let room = EP_FAILURE_CAP - report.failures.len();
        report.failures.extend(r.failures.into_iter().take(room));
    }
    Ok(report)
}

fn check_one(a: &FinStructure, c: &FinStructure) -> Result<EpReport> {
    let mut report = EpReport {
        passed: 0,
        failed: 0,
        failures: Vec::new(),
    };
    let mut seen = IsoClasses::default();
    for subset in subsets_by_size(c.size()) {
        let b = c.induced(&subset)?;
        if !seen.insert(&b) {
            continue;
        }
        let into_a = enumerate_embeddings(&b, a);
        let into_c = enumerate_embeddings(&b, c);
        for j in &into_c {
            for i in &into_a {
                let mut fixed = vec![None; c.size()];
                for x in 0..b.size() {
                    fixed[j.apply(x)] = Some(i.apply(x));
                }
                let mut found = false;
                for_each_embedding(c, a, Some(&fixed), |_| {
                    found = true;
                    ControlFlow::Break(())
                });
                if found {
                    report.passed += 1;
                } else {
                    report.failed += 1;
                    if report.failures.len() < EP_FAILURE_CAP {
                        report.failures.push(EpFailure {
                            b: StructureDoc::from_structure(&b),
                            c: StructureDoc::from_structure(c),
                            i: i.clone(),
                            j: j.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

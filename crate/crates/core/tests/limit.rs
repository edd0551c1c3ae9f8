mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use ramflow::classes::ClassSpec;
use ramflow::families::{antichain, chain, complete_graph, empty_graph, path};
use ramflow::limit::{
    check_extension_property, count_classes, glue_case1, glue_case2, run, ConstructionState, GlueCase, PartialMap, Triple,
};
use ramflow::Error;

fn random_map(m: usize, f: usize, rng: &mut rand::rngs::StdRng) -> PartialMap {
    let mut dom: Vec<usize> = (0..m).collect();
    let mut ran = dom.clone();
    dom.shuffle(rng);
    ran.shuffle(rng);
    PartialMap::new((0..f).map(|i| (dom[i], ran[i]))).unwrap()
}

proptest! {
    #[test]
    fn window_size_formula(seed in any::<u64>(), m in 1usize..=5, n in 1usize..=3, f_raw in 0usize..=5) {
        let mut rng = common::rng(seed);
        let f = f_raw.min(m);
        let stage = empty_graph(m).with_natural_order().unwrap();
        let phi = random_map(m, f, &mut rng);
        let t = Triple::new(&stage, phi.clone(), 0).unwrap();
        let w = glue_case1(&stage, &t, n).unwrap();
        let expected = (2 * n + 1) * m - 2 * n * f;
        prop_assert_eq!(w.structure.size(), expected);
        prop_assert_eq!(count_classes(m, &phi, n), expected);
        // the middle copy is the old stage
        let prefix: Vec<usize> = (0..m).collect();
        prop_assert_eq!(w.structure.induced(&prefix).unwrap(), stage);
    }

    #[test]
    fn psi_is_a_partial_automorphism_extending_phi(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=2) {
        let mut rng = common::rng(seed);
        let class = ClassSpec::graphs(true);
        let stage = common::random_member(&class, m, &mut rng);
        let mut stream = ramflow::limit::TripleStream::new(&stage, 0);
        let total = stream.total(&stage);
        let t = stream.get(&stage, seed as usize % total);
        let w = glue_case1(&stage, &t, n).unwrap();
        prop_assert!(w.psi.extends(&t.phi));
        prop_assert!(w.psi.automorphism_defect(&w.structure, false).is_none());
        if t.order_preserving {
            prop_assert!(w.psi.preserves_order(&w.structure));
        }
    }
}

#[test]
fn edge_glued_along_a_point_is_a_path() {
    let e = complete_graph(2).with_natural_order().unwrap();
    let t = Triple::new(&e, PartialMap::new([(1, 0)]).unwrap(), 0).unwrap();
    let w = glue_case1(&e, &t, 1).unwrap();
    assert_eq!(w.structure.size(), 4);
    assert!(ramflow::embedding::isomorphic(&w.structure.without_linear_order(), &path(4)));
}

#[test]
fn revisits_glue_along_the_accumulated_map() {
    let e = complete_graph(2).with_natural_order().unwrap();
    let t = Triple::new(&e, PartialMap::new([(1, 0)]).unwrap(), 0).unwrap();
    let w = glue_case1(&e, &t, 1).unwrap();
    let a = &w.structure;
    let b: Vec<usize> = w.psi.support();
    let w2 = glue_case2(a, &t, &b, &w.psi, 1).unwrap();
    assert_eq!(w2.structure.size(), 3 * a.size() - 2 * w.psi.len());
    assert!(w2.psi.extends(&w.psi));
    assert!(matches!(glue_case2(a, &t, &[], &w.psi, 1), Err(Error::Precondition(_))));
    let other = PartialMap::new([(0, 1)]).unwrap();
    assert!(matches!(glue_case2(a, &t, &b, &other, 1), Err(Error::InconsistentMap(_))));
}

#[test]
fn point_with_zero_budget() {
    let st = run(&empty_graph(1), &ClassSpec::graphs(true), 0, 1).unwrap();
    assert_eq!(st.stages().len(), 1);
    assert!(st.ledger().is_empty());
}

#[test]
fn edge_runs_audit_clean() {
    for window in 1..=2 {
        let mut st = ConstructionState::new(&complete_graph(2), &ClassSpec::graphs(true), window)
            .unwrap()
            .with_stage_cap(600);
        for _ in 0..10 {
            if st.step().is_err() {
                break;
            }
            assert_eq!(st.audit(), Vec::<String>::new());
        }
        assert!(st.steps().iter().any(|s| s.case == GlueCase::Revisit));
    }
}

#[test]
fn chain_poset_runs_extend_the_partial_order() {
    let mut st = ConstructionState::new(&chain(2), &ClassSpec::posets(true), 1).unwrap().with_stage_cap(600);
    for _ in 0..10 {
        if st.step().is_err() {
            break;
        }
        assert_eq!(st.audit(), Vec::<String>::new());
    }
    assert!(st.steps().len() >= 5);
}

#[test]
fn replay_accumulates() {
    let class = ClassSpec::graphs(true);
    let seed = path(3);
    let full = {
        let mut st = ConstructionState::new(&seed, &class, 1).unwrap().with_stage_cap(500);
        while st.steps().len() < 12 && st.step().is_ok() {}
        st
    };
    let done = full.steps().len();
    for prefix in 0..done {
        let mut st = ConstructionState::new(&seed, &class, 1).unwrap();
        for _ in 0..prefix {
            st.step().unwrap();
        }
        assert_eq!(st.stages(), &full.stages()[..=prefix]);
        for e in st.ledger() {
            assert!(full.entry_for(&e.triple.phi).unwrap().psi.extends(&e.psi));
        }
    }
}

#[test]
fn scheduled_stages_never_exceed_the_step() {
    let mut st = ConstructionState::new(&complete_graph(2), &ClassSpec::graphs(true), 1).unwrap().with_stage_cap(500);
    while st.step().is_ok() {}
    for s in st.steps() {
        assert!(s.stage <= s.step);
    }
}

#[test]
fn extension_property_examples() {
    let graphs = ClassSpec::graphs(false);
    assert!(check_extension_property(&complete_graph(3), &graphs, 3).unwrap().holds());
    assert!(check_extension_property(&empty_graph(3), &graphs, 3).unwrap().holds());
    assert!(!check_extension_property(&path(3), &graphs, 2).unwrap().holds());
    let posets = ClassSpec::posets(false);
    assert!(check_extension_property(&antichain(2), &posets, 2).unwrap().holds());
    assert!(!check_extension_property(&chain(3), &posets, 2).unwrap().holds());
}

#[test]
fn stage_cap_stops_growth() {
    let mut st = ConstructionState::new(&complete_graph(2), &ClassSpec::graphs(true), 2).unwrap().with_stage_cap(50);
    let err = loop {
        if let Err(e) = st.step() {
            break e;
        }
    };
    assert!(matches!(err, Error::BoundTooLarge { .. }));
    assert!(st.current().size() <= 50);
}

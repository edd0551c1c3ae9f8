use ramflow::classes::{
    check_amalgamation, check_hereditary, check_jep, check_reasonable, enumerate_members, ClassSpec, StructureClass,
};
use ramflow::families::{complete_graph, cycle, hypergraph_signature, path};
use ramflow::FinStructure;

fn all_kinds() -> Vec<ClassSpec> {
    let sig3 = hypergraph_signature(3).unwrap();
    let mut k4_3 = FinStructure::new(sig3.clone(), 4);
    for t in ramflow::order::combinations(4, 3) {
        k4_3.add_tuple(0, &t).unwrap();
    }
    let mut out = Vec::new();
    for ordered in [false, true] {
        out.push(ClassSpec::graphs(ordered));
        out.push(ClassSpec::kn_free(3, ordered).unwrap());
        out.push(ClassSpec::hypergraphs(sig3.clone(), ordered).unwrap());
        out.push(ClassSpec::a_free(vec![k4_3.clone()], ordered).unwrap());
        out.push(ClassSpec::posets(ordered));
    }
    out
}

#[test]
fn every_kind_is_an_amalgamation_class_up_to_four() {
    for class in all_kinds() {
        let bound = if class.ordered() { 3 } else { 4 };
        assert!(check_hereditary(&class, bound).unwrap().holds(), "{class}");
        assert!(check_jep(&class, bound).unwrap().holds(), "{class}");
        assert!(check_amalgamation(&class, bound).unwrap().holds(), "{class}");
    }
}

#[test]
fn member_counts_match_known_sequences() {
    // graphs on n vertices up to isomorphism: 1, 1, 2, 4, 11
    let graphs = ClassSpec::graphs(false);
    let counts: Vec<usize> = (0..=4).map(|n| enumerate_members(&graphs, n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 4, 11]);
    // posets: 1, 1, 2, 5, 16
    let posets = ClassSpec::posets(false);
    let counts: Vec<usize> = (0..=4).map(|n| enumerate_members(&posets, n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 5, 16]);
    // triangle-free graphs: 1, 1, 2, 3, 7
    let tf = ClassSpec::kn_free(3, false).unwrap();
    let counts: Vec<usize> = (0..=4).map(|n| enumerate_members(&tf, n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 7]);
}

#[test]
fn membership() {
    let tf = ClassSpec::kn_free(3, false).unwrap();
    assert!(tf.contains(&cycle(4)).unwrap());
    assert!(!tf.contains(&complete_graph(3)).unwrap());
    assert!(ClassSpec::graphs(false).contains(&path(3)).unwrap());
    assert!(!ClassSpec::graphs(true).contains(&path(3)).unwrap());
    assert!(!ClassSpec::posets(false).contains(&path(3)).unwrap_or(false));
}

#[test]
fn ordered_classes_are_reasonable() {
    for class in [ClassSpec::graphs(true), ClassSpec::posets(true), ClassSpec::kn_free(3, true).unwrap()] {
        assert!(check_reasonable(&class, 3).unwrap().holds(), "{class}");
    }
}

#[test]
fn class_names_parse() {
    for text in ["graph", "kn-free:4", "poset"] {
        let c = ClassSpec::parse(text, true).unwrap();
        assert!(c.ordered());
    }
    assert!(ClassSpec::parse("tournament", false).is_err());
    assert!(ClassSpec::kn_free(1, false).is_err());
}

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use ramflow::amalgamation::amalgamate;
use ramflow::classes::{ClassSpec, StructureClass};
use ramflow::embedding::{automorphisms, enumerate_embeddings};
use ramflow::flows::{act, orbits, FiniteFlow, OrderPoint};
use ramflow::order::{order_matrix, permutations};
use ramflow::ramsey::{arrows, arrows_exhaustive};
use ramflow::{are_isomorphic, is_embedding, Embedding, FinStructure};

fn kind(i: usize) -> ClassSpec {
    let ks = common::kinds();
    ks[i % ks.len()].clone()
}

/// Injective maps checked one by one.
fn brute_embeddings(b: &FinStructure, a: &FinStructure) -> usize {
    fn go(b: &FinStructure, a: &FinStructure, m: &mut Vec<usize>, n: &mut usize) {
        if m.len() == b.size() {
            if is_embedding(b, a, &Embedding::new(m.clone())).unwrap() {
                *n += 1;
            }
            return;
        }
        for y in 0..a.size() {
            if !m.contains(&y) {
                m.push(y);
                go(b, a, m, n);
                m.pop();
            }
        }
    }
    let mut n = 0;
    go(b, a, &mut Vec::new(), &mut n);
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embeddings_agree_with_brute_force(seed in any::<u64>(), k in 0usize..8, nb in 0usize..4, na in 0usize..6) {
        let mut rng = common::rng(seed);
        let class = kind(k);
        let a = common::random_member(&class, na, &mut rng);
        let b = common::random_member(&class, nb, &mut rng);
        let found = enumerate_embeddings(&b, &a);
        for e in &found {
            prop_assert!(is_embedding(&b, &a, e).unwrap());
        }
        prop_assert_eq!(found.len(), brute_embeddings(&b, &a));
    }

    #[test]
    fn relabelling_is_an_isomorphism(seed in any::<u64>(), k in 0usize..8, n in 0usize..6) {
        let mut rng = common::rng(seed);
        let a = common::random_member(&kind(k), n, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let b = a.relabel(&perm).unwrap();
        let f = are_isomorphic(&a, &b).unwrap().expect("relabelling is isomorphic");
        prop_assert!(is_embedding(&a, &b, &f).unwrap());
        let g = are_isomorphic(&b, &a).unwrap().expect("isomorphism is symmetric");
        prop_assert!(is_embedding(&b, &a, &g).unwrap());
        prop_assert_eq!(automorphisms(&a).len(), automorphisms(&b).len());
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), k in 0usize..8, n in 0usize..6) {
        let mut rng = common::rng(seed);
        let a = common::random_member(&kind(k), n, &mut rng);
        let text = a.to_json();
        let back = FinStructure::from_json(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn symmetric_relations_are_closed(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = common::rng(seed);
        let g = common::random_member(&ClassSpec::graphs(false), n, &mut rng);
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(g.holds(0, &[x, y]), g.holds(0, &[y, x]));
            }
        }
    }

    #[test]
    fn amalgams_satisfy_every_invariant(seed in any::<u64>(), k in 0usize..8) {
        let mut rng = common::rng(seed);
        let class = kind(k);
        let inst = common::random_instance(&class, 5, &mut rng);
        let defect = common::amalgam_defect(&class, &inst);
        prop_assert!(defect.is_none(), "{}: {:?}", class, defect);
    }

    #[test]
    fn amalgamation_is_deterministic(seed in any::<u64>(), k in 0usize..8) {
        let mut rng = common::rng(seed);
        let class = kind(k);
        let common::Instance { a, b, c, i, j } = common::random_instance(&class, 4, &mut rng);
        let r1 = amalgamate(&a, &b, &c, &i, &j, &class).unwrap();
        let r2 = amalgamate(&a, &b, &c, &i, &j, &class).unwrap();
        prop_assert_eq!(r1.d, r2.d);
    }

    #[test]
    fn members_are_closed_under_substructures(seed in any::<u64>(), k in 0usize..8, n in 0usize..6) {
        let mut rng = common::rng(seed);
        let class = kind(k);
        let a = common::random_member(&class, n, &mut rng);
        let sub: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        prop_assert!(class.contains(&a.induced(&sub).unwrap()).unwrap());
    }

    #[test]
    fn ordered_members_extend_their_partial_order(seed in any::<u64>(), n in 0usize..6) {
        let mut rng = common::rng(seed);
        let p = common::random_member(&ClassSpec::posets(true), n, &mut rng);
        let lt = order_matrix(p.linear_order().unwrap());
        prop_assert!(p.partial_order().unwrap().pairs().all(|(x, y)| lt.get(x, y)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pruned_search_matches_exhaustive(seed in any::<u64>(), ordered in any::<bool>(), nc in 3usize..6, k in 2usize..4) {
        let mut rng = common::rng(seed);
        let class = ClassSpec::graphs(ordered);
        let c = common::random_member(&class, nc, &mut rng);
        let nb = rng.gen_range(2..=3);
        let b = c.induced(&(0..nb).collect::<Vec<_>>()).unwrap();
        let a = b.induced(&[0, 1][..rng.gen_range(1..=2)]).unwrap();
        let fast = arrows(&c, &b, &a, k).unwrap();
        let slow = arrows_exhaustive(&c, &b, &a, k).unwrap();
        prop_assert_eq!(fast.arrows, slow.arrows);
        if let Some(bad) = &fast.bad_coloring {
            prop_assert!(ramflow::ramsey::verify_bad_coloring(&c, &b, &a, k, bad));
        }
    }

    #[test]
    fn one_colour_arrows_iff_b_embeds(seed in any::<u64>(), nc in 1usize..6, nb in 1usize..4) {
        let mut rng = common::rng(seed);
        let class = ClassSpec::graphs(true);
        let c = common::random_member(&class, nc, &mut rng);
        let b = common::random_member(&class, nb, &mut rng);
        let a = b.induced(&[0]).unwrap();
        let r = arrows(&c, &b, &a, 1).unwrap();
        prop_assert_eq!(r.arrows, ramflow::embedding::embeds(&b, &c));
    }

    #[test]
    fn arrowing_is_monotone(seed in any::<u64>(), extra in 0usize..2) {
        let mut rng = common::rng(seed);
        let k6 = ramflow::families::complete_graph(6).with_natural_order().unwrap();
        let pad = common::random_member(&ClassSpec::graphs(true), extra, &mut rng);
        let bigger = k6.disjoint_union(&pad).unwrap();
        let k3 = ramflow::families::complete_graph(3).with_natural_order().unwrap();
        let k2 = ramflow::families::complete_graph(2).with_natural_order().unwrap();
        prop_assert!(arrows(&bigger, &k3, &k2, 2).unwrap().arrows);
    }

    #[test]
    fn action_laws(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = common::rng(seed);
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        let p = OrderPoint::new(p).unwrap();
        prop_assert_eq!(act(&Embedding::identity(n), &p), p.clone());
        let perms = permutations(n);
        let g = Embedding::new(perms[rng.gen_range(0..perms.len())].clone());
        let h = Embedding::new(perms[rng.gen_range(0..perms.len())].clone());
        // (g ∘ h)·p = g·(h·p)
        prop_assert_eq!(act(&h.then(&g), &p), act(&g, &act(&h, &p)));
        // x precedes y in p iff g(x) precedes g(y) in g·p
        let gp = act(&g, &p);
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(p.before(x, y), gp.before(g.apply(x), g.apply(y)));
            }
        }
    }

    #[test]
    fn orbits_partition_the_flow(seed in any::<u64>(), poset in any::<bool>(), n in 1usize..5) {
        let mut rng = common::rng(seed);
        let class = if poset { ClassSpec::posets(true) } else { ClassSpec::graphs(true) };
        let a = common::random_member(&class.with_ordered(false), n, &mut rng);
        let flow = FiniteFlow::new(&a, &class).unwrap();
        let os = orbits(&flow);
        let total: usize = os.iter().map(Vec::len).sum();
        prop_assert_eq!(total, flow.points().len());
        for (i, o) in os.iter().enumerate() {
            for p in o {
                prop_assert!(flow.contains(p));
                prop_assert!(os.iter().enumerate().all(|(j, q)| j == i || !q.contains(p)));
                for g in flow.group() {
                    prop_assert!(o.contains(&act(g, p)));
                }
            }
        }
        if let Some(po) = a.partial_order() {
            for p in flow.points() {
                let lt = order_matrix(p.sequence());
                prop_assert!(po.pairs().all(|(x, y)| lt.get(x, y)));
            }
        }
    }
}

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use ramflow::classes::{ClassKind, ClassSpec, StructureClass};
use ramflow::families::{complete_graph, hypergraph_signature};
use ramflow::order::stable_topological_sort;
use ramflow::{Embedding, FinStructure};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// The class kinds exercised by randomized suites.
pub fn kinds() -> Vec<ClassSpec> {
    let sig3 = hypergraph_signature(3).unwrap();
    let mut k4_3 = FinStructure::new(sig3.clone(), 4);
    for t in ramflow::order::combinations(4, 3) {
        k4_3.add_tuple(0, &t).unwrap();
    }
    vec![
        ClassSpec::graphs(false),
        ClassSpec::kn_free(4, false).unwrap(),
        ClassSpec::hypergraphs(sig3, false).unwrap(),
        ClassSpec::a_free(vec![k4_3], false).unwrap(),
        ClassSpec::posets(false),
        ClassSpec::graphs(true),
        ClassSpec::kn_free(3, true).unwrap(),
        ClassSpec::posets(true),
    ]
}

/// Random structure in the signature of `class`, ignoring its axioms.
fn raw(class: &ClassSpec, n: usize, rng: &mut StdRng) -> FinStructure {
    let sig = (**class.signature()).clone();
    let mut s = FinStructure::new(sig.clone(), n);
    let density: f64 = rng.gen_range(0.2..0.7);
    for (idx, sym) in sig.symbols().iter().enumerate() {
        if sym.arity > n {
            continue;
        }
        for t in ramflow::order::combinations(n, sym.arity) {
            if rng.gen_bool(density) {
                let mut t = t.clone();
                if !sym.symmetric {
                    t.shuffle(rng);
                }
                s.add_tuple(idx, &t).unwrap();
            }
        }
    }
    if *class.kind() == ClassKind::Poset {
        let mut labels: Vec<usize> = (0..n).collect();
        labels.shuffle(rng);
        let mut pairs = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if rng.gen_bool(density * 0.6) {
                    pairs.push((labels[x], labels[y]));
                }
            }
        }
        s.set_partial_order_pairs(&pairs).unwrap();
    }
    s
}

/// Random admissible order of `s` (a linear extension for posets).
pub fn random_order(s: &FinStructure, rng: &mut StdRng) -> Vec<usize> {
    let keys: Vec<u64> = (0..s.size()).map(|_| rng.gen()).collect();
    let lt = s
        .partial_order()
        .cloned()
        .unwrap_or_else(|| ramflow::bits::BitMatrix::new(s.size()));
    stable_topological_sort(&lt, |x| keys[x]).unwrap()
}

/// Random member of `class` with `n` elements, by rejection.
pub fn random_member(class: &ClassSpec, n: usize, rng: &mut StdRng) -> FinStructure {
    loop {
        let mut s = raw(class, n, rng);
        if class.ordered() {
            let order = random_order(&s, rng);
            s = s.with_linear_order(order).unwrap();
        }
        if class.contains(&s).unwrap() {
            return s;
        }
    }
}

/// An amalgamation instance `i: A → B`, `j: A → C` of members of `class`
/// with `|B|, |C| ≤ max`.
pub struct Instance {
    pub a: FinStructure,
    pub b: FinStructure,
    pub c: FinStructure,
    pub i: Embedding,
    pub j: Embedding,
}

pub fn random_instance(class: &ClassSpec, max: usize, rng: &mut StdRng) -> Instance {
    let cn = rng.gen_range(1..=max);
    let c = random_member(class, cn, rng);
    let t: Vec<usize> = (0..cn).filter(|_| rng.gen_bool(0.5)).collect();
    let a = c.induced(&t).unwrap();
    let j = Embedding::new(t.clone());
    loop {
        let bn = rng.gen_range(a.size().max(1)..=max);
        let base = random_member(class, bn, rng);
        let mut slots: Vec<usize> = (0..bn).collect();
        slots.shuffle(rng);
        slots.truncate(a.size());
        let mut imap = vec![0; a.size()];
        if class.ordered() {
            slots.sort_by_key(|&x| base.rank(x).unwrap());
            for (r, &x) in a.linear_order().unwrap().iter().enumerate() {
                imap[x] = slots[r];
            }
        } else {
            for (x, &y) in slots.iter().enumerate() {
                imap[x] = y;
            }
        }
        let Some(b) = overwrite(&base, &a, &imap) else { continue };
        let i = Embedding::new(imap);
        if class.contains(&b).unwrap() && ramflow::is_embedding(&a, &b, &i).unwrap() {
            return Instance { a, b, c: c.clone(), i, j };
        }
    }
}

/// `base` with the relations on `image` replaced by those of `a`.
fn overwrite(base: &FinStructure, a: &FinStructure, image: &[usize]) -> Option<FinStructure> {
    let inside = |t: &[usize]| t.iter().all(|x| image.contains(x));
    let mut out = FinStructure::new(base.signature().clone(), base.size());
    for s in 0..base.signature().len() {
        for t in base.tuples(s) {
            if !inside(t) {
                out.add_tuple(s, t).unwrap();
            }
        }
        for t in a.tuples(s) {
            let mapped: Vec<usize> = t.iter().map(|&x| image[x]).collect();
            out.add_tuple(s, &mapped).unwrap();
        }
    }
    if let Some(po) = base.partial_order() {
        let mut pairs: Vec<(usize, usize)> = po.pairs().filter(|&(x, y)| !(image.contains(&x) && image.contains(&y))).collect();
        pairs.extend(a.partial_order().unwrap().pairs().map(|(x, y)| (image[x], image[y])));
        out.set_partial_order_pairs(&pairs).ok()?;
    }
    if let Some(seq) = base.linear_order() {
        out.set_linear_order(seq.to_vec()).ok()?;
    }
    Some(out)
}

pub fn k(n: usize) -> FinStructure {
    complete_graph(n)
}

/// First violated amalgamation invariant of `inst` in `class`, if any.
pub fn amalgam_defect(class: &ClassSpec, inst: &Instance) -> Option<String> {
    let Instance { a, b, c, i, j } = inst;
    let r = match ramflow::amalgamation::amalgamate(a, b, c, i, j, class) {
        Ok(r) => r,
        Err(e) => return Some(format!("amalgamation failed: {e}")),
    };
    let strip = |s: &FinStructure| if class.ordered() { s.clone() } else { s.without_linear_order() };
    let (d, bb, cc) = (&r.d, strip(b), strip(c));
    for x in 0..a.size() {
        if r.k.apply(i.apply(x)) != r.l.apply(j.apply(x)) {
            return Some(format!("square does not commute at {x}"));
        }
    }
    // preserve and reflect: relations, partial order, linear order
    for (src, e, name) in [(&bb, &r.k, "k"), (&cc, &r.l, "l")] {
        match ramflow::is_embedding(src, d, e) {
            Ok(true) => {}
            _ => return Some(format!("{name} is not an embedding")),
        }
    }
    if !class.contains(d).unwrap_or(false) {
        return Some(format!("amalgam leaves the class: {:?}", class.violation(d)));
    }
    if let Some(po) = d.partial_order() {
        if !po.is_irreflexive() || !po.is_transitive() {
            return Some("partial order has a cycle".into());
        }
    }
    if class.ordered() {
        let Some(seq) = d.linear_order() else { return Some("no order on D".into()) };
        let lt = ramflow::order::order_matrix(seq);
        if !ramflow::order::is_strict_total_order(&lt) {
            return Some("order on D is not total".into());
        }
        if let Some(po) = d.partial_order() {
            if po.pairs().any(|(x, y)| !lt.get(x, y)) {
                return Some("order on D misses the partial order".into());
            }
        }
        let ib = i.image();
        let jc = j.image();
        let down_b = |y: usize| -> Vec<usize> { (0..a.size()).filter(|&x| b.less(i.apply(x), y).unwrap()).collect() };
        let down_c = |z: usize| -> Vec<usize> { (0..a.size()).filter(|&x| c.less(j.apply(x), z).unwrap()).collect() };
        for y in (0..b.size()).filter(|y| !ib.contains(y)) {
            for z in (0..c.size()).filter(|z| !jc.contains(z)) {
                let (db, dc) = (down_b(y), down_c(z));
                let subset = db.iter().all(|x| dc.contains(x));
                let before = lt.get(r.k.apply(y), r.l.apply(z));
                if before != subset {
                    return Some(format!("cross rule fails for b={y}, c={z}"));
                }
            }
        }
    }
    None
}

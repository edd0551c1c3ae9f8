//! Permutations, combinations, linear extensions and topological sorting.

use crate::bits::BitMatrix;

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_permutation(n, |p| out.push(p.to_vec()));
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        current: (k <= n).then(|| (0..k).collect()),
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        if let Some(i) = (0..k).rev().find(|&i| next[i] < self.n - k + i) {
            next[i] += 1;
            for j in i + 1..k {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(cur)
    }
}

/// All subsets of `0..n`, ordered by size then lexicographically.
pub fn subsets_by_size(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=n).flat_map(move |k| combinations(n, k))
}

/// Linear extensions of the strict order `lt` on `0..n`, each listed in
/// increasing order, in lexicographic order of the listings.
pub fn linear_extensions(lt: &BitMatrix) -> Vec<Vec<usize>> {
    let n = lt.len();
    let mut out = Vec::new();
    let mut indeg: Vec<usize> = (0..n).map(|b| (0..n).filter(|&a| lt.get(a, b)).count()).collect();
    let mut used = vec![false; n];
    let mut seq = Vec::with_capacity(n);
    fn rec(
        lt: &BitMatrix,
        indeg: &mut [usize],
        used: &mut [bool],
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = used.len();
        if seq.len() == n {
            out.push(seq.clone());
            return;
        }
        for x in 0..n {
            if used[x] || indeg[x] != 0 {
                continue;
            }
            used[x] = true;
            seq.push(x);
            for y in lt.row(x) {
                indeg[y] -= 1;
            }
            rec(lt, indeg, used, seq, out);
            for y in lt.row(x) {
                indeg[y] += 1;
            }
            seq.pop();
            used[x] = false;
        }
    }
    rec(lt, &mut indeg, &mut used, &mut seq, &mut out);
    out
}

/// Topological sort of `lt` that always emits the available element with
/// the smallest key. Returns `None` when `lt` has a cycle.
pub fn stable_topological_sort<K: Ord>(lt: &BitMatrix, key: impl Fn(usize) -> K) -> Option<Vec<usize>> {
    let n = lt.len();
    let mut indeg: Vec<usize> = vec![0; n];
    for (_, b) in lt.pairs() {
        indeg[b] += 1;
    }
    let mut heap = std::collections::BinaryHeap::new();
    for x in 0..n {
        if indeg[x] == 0 {
            heap.push(std::cmp::Reverse((key(x), x)));
        }
    }
    let mut out = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse((_, x))) = heap.pop() {
        out.push(x);
        for y in lt.row(x) {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(std::cmp::Reverse((key(y), y)));
            }
        }
    }
    (out.len() == n).then_some(out)
}

/// Checks that `lt` is a strict total order by inspecting every pair and
/// every triple.
pub fn is_strict_total_order(lt: &BitMatrix) -> bool {
    let n = lt.len();
    for a in 0..n {
        if lt.get(a, a) {
            return false;
        }
        for b in 0..n {
            if a != b && lt.get(a, b) == lt.get(b, a) {
                return false;
            }
        }
    }
    for a in 0..n {
        for b in lt.row(a) {
            for c in lt.row(b) {
                if !lt.get(a, c) {
                    return false;
                }
            }
        }
    }
    true
}

/// The strict order `lt` induced by a listing in increasing order.
pub fn order_matrix(sequence: &[usize]) -> BitMatrix {
    let mut m = BitMatrix::new(sequence.len());
    for (i, &a) in sequence.iter().enumerate() {
        for &b in &sequence[i + 1..] {
            m.set(a, b, true);
        }
    }
    m
}

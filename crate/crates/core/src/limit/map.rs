use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// A finite partial injection on a universe, kept sorted by domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct PartialMap {
    forward: BTreeMap<usize, usize>,
}

impl PartialMap {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (x, y) in pairs {
            if let Some(&old) = forward.get(&x) {
                if old != y {
                    return Err(Error::InconsistentMap(format!("{x} is sent to both {old} and {y}")));
                }
                continue;
            }
            if !seen.insert(y) {
                return Err(Error::InconsistentMap(format!("{y} has two preimages")));
            }
            forward.insert(x, y);
        }
        Ok(PartialMap { forward })
    }

    pub fn identity(domain: impl IntoIterator<Item = usize>) -> Self {
        PartialMap {
            forward: domain.into_iter().map(|x| (x, x)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, x: usize) -> Option<usize> {
        self.forward.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().map(|(&x, &y)| (x, y))
    }

    /// Sorted domain.
    pub fn domain(&self) -> Vec<usize> {
        self.forward.keys().copied().collect()
    }

    /// Sorted range.
    pub fn range(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.forward.values().copied().collect();
        r.sort_unstable();
        r
    }

    /// Sorted union of domain and range.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.domain();
        s.extend(self.forward.values());
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn inverse(&self) -> PartialMap {
        PartialMap {
            forward: self.forward.iter().map(|(&x, &y)| (y, x)).collect(),
        }
    }

    /// Every pair of `other` is a pair of `self`.
    pub fn extends(&self, other: &PartialMap) -> bool {
        other.pairs().all(|(x, y)| self.get(x) == Some(y))
    }

    pub fn max_element(&self) -> Option<usize> {
        self.support().last().copied()
    }

    /// True when the map is order preserving for the linear order of `s`.
    pub fn preserves_order(&self, s: &FinStructure) -> bool {
        let Some(ranks) = s.ranks() else { return true };
        let pairs: Vec<(usize, usize)> = self.pairs().collect();
        pairs
            .iter()
            .all(|&(x1, y1)| pairs.iter().all(|&(x2, y2)| (ranks[x1] < ranks[x2]) == (ranks[y1] < ranks[y2])))
    }

    /// Why the map is not an isomorphism between the induced substructures
    /// of `s` on its domain and range (relations and partial order; the
    /// linear order too when `ordered`), or `None`.
    pub fn automorphism_defect(&self, s: &FinStructure, ordered: bool) -> Option<String> {
        if let Some(x) = self.max_element().filter(|&x| x >= s.size()) {
            return Some(format!("element {x} outside universe of size {}", s.size()));
        }
        let dom = self.domain();
        let sub_dom = s.induced(&dom).ok()?;
        let rng: Vec<usize> = dom.iter().map(|&x| self.forward[&x]).collect();
        let mut index = vec![usize::MAX; s.size()];
        let mut sorted_rng = rng.clone();
        sorted_rng.sort_unstable();
        for (i, &y) in sorted_rng.iter().enumerate() {
            index[y] = i;
        }
        let sub_rng = s.induced(&sorted_rng).ok()?;
        let map: Vec<usize> = rng.iter().map(|&y| index[y]).collect();
        let (a, b) = if ordered {
            (sub_dom, sub_rng)
        } else {
            (sub_dom.without_linear_order(), sub_rng.without_linear_order())
        };
        match crate::embedding::is_embedding(&a, &b, &crate::embedding::Embedding::new(map)) {
            Ok(true) => None,
            Ok(false) => Some("not an isomorphism of induced substructures".into()),
            Err(e) => Some(e.to_string()),
        }
    }
}

impl TryFrom<Vec<(usize, usize)>> for PartialMap {
    type Error = Error;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self> {
        PartialMap::new(pairs)
    }
}

impl From<PartialMap> for Vec<(usize, usize)> {
    fn from(m: PartialMap) -> Self {
        m.pairs().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    #[test]
    fn rejects_non_injective() {
        assert!(PartialMap::new([(0, 1), (1, 1)]).is_err());
        assert!(PartialMap::new([(0, 1), (0, 2)]).is_err());
        assert!(PartialMap::new([(0, 1), (0, 1)]).is_ok());
    }

    #[test]
    fn automorphism_defects() {
        let p = path(3);
        assert!(PartialMap::new([(0, 2), (1, 1)]).unwrap().automorphism_defect(&p, false).is_none());
        assert!(PartialMap::new([(0, 1), (1, 2)]).unwrap().automorphism_defect(&p, false).is_none());
        assert!(PartialMap::new([(0, 0), (2, 1)]).unwrap().automorphism_defect(&p, false).is_some());
        let o = p.with_natural_order().unwrap();
        assert!(PartialMap::new([(0, 2), (2, 0)]).unwrap().automorphism_defect(&o, true).is_some());
        assert!(PartialMap::new([(0, 2), (2, 0)]).unwrap().automorphism_defect(&o, false).is_none());
    }

    #[test]
    fn extension_and_serde() {
        let a = PartialMap::new([(0, 1)]).unwrap();
        let b = PartialMap::new([(0, 1), (1, 2)]).unwrap();
        assert!(b.extends(&a));
        assert!(!a.extends(&b));
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(text, "[[0,1],[1,2]]");
        assert_eq!(serde_json::from_str::<PartialMap>(&text).unwrap(), b);
        assert!(serde_json::from_str::<PartialMap>("[[0,1],[1,1]]").is_err());
    }
}

//! JSON interchange document for structures.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{FinStructure, Signature, Symbol};

/// Serialized form of a [`FinStructure`]. Symmetric relations list one
/// sorted representative per orbit; the partial order lists every pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub signature: Vec<Symbol>,
    pub size: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_order: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_order: Option<Vec<usize>>,
}

impl StructureDoc {
    pub fn from_structure(s: &FinStructure) -> Self {
        let sig = s.signature();
        let relations = sig
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, sym)| (sym.name.clone(), s.tuples(i).map(<[usize]>::to_vec).collect()))
            .collect();
        StructureDoc {
            signature: sig.symbols().to_vec(),
            size: s.size(),
            relations,
            partial_order: s.partial_order().map(|m| m.pairs().map(|(a, b)| [a, b]).collect()),
            linear_order: s.linear_order().map(<[usize]>::to_vec),
        }
    }

    pub fn to_structure(&self) -> Result<FinStructure> {
        let sig = Signature::new(self.signature.clone())?;
        for name in self.relations.keys() {
            if sig.index_of(name).is_none() {
                return Err(Error::InvalidStructure(format!(
                    "relation `{name}` is not in the signature"
                )));
            }
        }
        let mut s = FinStructure::new(sig, self.size);
        for (name, tuples) in &self.relations {
            for t in tuples {
                s.add_tuple_by_name(name, t)?;
            }
        }
        if let Some(pairs) = &self.partial_order {
            let pairs: Vec<(usize, usize)> = pairs.iter().map(|p| (p[0], p[1])).collect();
            s.set_partial_order_pairs(&pairs)?;
        }
        if let Some(seq) = &self.linear_order {
            s.set_linear_order(seq.clone())?;
        }
        Ok(s)
    }
}

impl FinStructure {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StructureDoc::from_structure(self)).expect("structure documents serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&StructureDoc::from_structure(self))
            .expect("structure documents serialize")
    }

    pub fn from_json(text: &str) -> Result<FinStructure> {
        let doc: StructureDoc = serde_json::from_str(text)?;
        doc.to_structure()
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(StructureDoc::from_structure(self)).expect("structure documents serialize")
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(StructureDoc),
    Many(Vec<StructureDoc>),
}

/// Parses either a single structure document or a list of them.
pub fn parse_structures(text: &str) -> Result<Vec<FinStructure>> {
    let docs = match serde_json::from_str::<OneOrMany>(text) {
        Ok(OneOrMany::One(d)) => vec![d],
        Ok(OneOrMany::Many(ds)) => ds,
        Err(_) => {
            // re-parse as a single document for a precise message
            let d: StructureDoc = serde_json::from_str(text)?;
            vec![d]
        }
    };
    docs.iter().map(StructureDoc::to_structure).collect()
}

pub fn read_structure(path: &Path) -> Result<FinStructure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    FinStructure::from_json(&text)
}

pub fn read_structures(path: &Path) -> Result<Vec<FinStructure>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    parse_structures(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    #[test]
    fn round_trips() {
        for s in [
            complete_graph(3).with_natural_order().unwrap(),
            n_poset().with_linear_order(vec![1, 3, 0, 2]).unwrap(),
            hypergraph(4, 3, &[vec![2, 0, 1]]).unwrap(),
            FinStructure::empty(crate::structure::Signature::graph()),
        ] {
            let text = s.to_json();
            let back = FinStructure::from_json(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let sig = r#"[{"name":"E","arity":2,"symmetric":true}]"#;
        let bad_rel = format!(r#"{{"signature":{sig},"size":2,"relations":{{"F":[[0,1]]}}}}"#);
        assert!(FinStructure::from_json(&bad_rel).is_err());
        let out_of_range = format!(r#"{{"signature":{sig},"size":2,"relations":{{"E":[[0,2]]}}}}"#);
        assert!(FinStructure::from_json(&out_of_range).is_err());
        let bad_order = format!(r#"{{"signature":{sig},"size":2,"linear_order":[0,0]}}"#);
        assert!(FinStructure::from_json(&bad_order).is_err());
        assert!(FinStructure::from_json("{").is_err());
    }

    #[test]
    fn parses_lists() {
        let k3 = complete_graph(3);
        let text = format!("[{},{}]", k3.to_json(), path(3).to_json());
        assert_eq!(parse_structures(&text).unwrap().len(), 2);
        assert_eq!(parse_structures(&k3.to_json()).unwrap(), vec![k3]);
    }
}

//! Finite-scale tools for amalgamation classes, structural Ramsey checks,
//! homogenizing limit constructions and linear-order flows.

pub mod amalgamation;
pub mod bits;
pub mod classes;
pub mod cli;
pub mod doc;
pub mod embedding;
pub mod error;
pub mod families;
pub mod flows;
pub mod limit;
pub mod order;
pub mod ramsey;
pub mod structure;

pub use embedding::{are_isomorphic, enumerate_copies, enumerate_embeddings, is_embedding, Embedding};
pub use error::{Error, Result};
pub use structure::{FinStructure, Signature, Symbol};

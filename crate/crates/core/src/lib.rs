//! Spectral and combinatorial mixing for simplicial complexes and uniform
//! hypergraphs.

pub mod complexes;
pub mod error;
pub mod hypergraph_mixing;
pub mod io;
pub mod lemma_lab;
pub mod report;
pub mod run;
pub mod rng;
pub mod simplicial_mixing;
pub mod simplicial_ops;
pub mod sweep;
pub mod tensor_forms;

pub use error::{Error, Result};

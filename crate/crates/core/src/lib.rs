//! Feature-rich association networks: build pairwise graphs and hypergraphs
//! from free-association responses, detect communities, and aggregate word
//! norms over each word's structural contexts.

pub mod aggregate;
pub mod community;
pub mod compartments;
pub mod error;
pub mod feature;
pub mod lexicon;
pub mod network;
pub mod stats;

pub use error::{Error, Result};
pub use feature::{FeatureName, N_FEATURES};
pub use lexicon::{FilteredDataset, Lexicon, LexiconEntry, ResponseRow, ResponseTable};
pub use network::{Construction, Hypergraph, PairwiseGraph};

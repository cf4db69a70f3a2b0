//! Conceptual knowledge systems over networked-resource metadata.
//!
//! Formal contexts are built from metadata records through conceptual
//! scales, turned into concept lattices, and measured with extensional and
//! intensional linkage. The same lattices drive ranked conceptual browsing
//! and the generation of crisp hyperlink structure.

pub mod browsing;
pub mod context;
pub mod error;
pub mod hyperize;
pub mod interchange;
pub mod interface;
pub mod lattice;
pub mod linkage;
pub mod scaling;

pub use browsing::{BrowseSession, Display, DisplayLabel, KnowledgeSystem, QueryResult, RankGroup, RankedOrder, Scope};
pub use context::{
    apposition, apposition_namespaced, enumerate_concepts_oracle, purify, reduce, AttributeSet, AttributeToken,
    ConceptualView, FormalContext, MergeMap, ObjectSet, Relator, ViewDefinition,
};
pub use error::{ElementKind, Error, Result};
pub use interchange::{ClifDocument, FcifDocument};
pub use lattice::{build_lattice, Concept, ConceptLattice, NeighborhoodKind, NeighborhoodLattice};
pub use linkage::{crispify, linkage_matrix, CrispLink, LinkageMatrix, Mode};
pub use scaling::{apply_scale, interpret, ConceptualScale, MetadataRecord};

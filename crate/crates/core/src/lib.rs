//! Intersection matrices of arrangements of closed curves that pairwise
//! cross in exactly two points.
//!
//! A matrix lists, for every curve, the cyclic sequence of its crossings
//! with the other curves as signed labels. This crate validates and
//! normalizes such matrices, decides consistency (strict embeddability into
//! some orientable surface), builds the induced embedded graph and its genus,
//! tests sphere embeddability directly or through 4-submatrices, computes
//! canonical forms, enumerates small censuses and extracts matrices from
//! concrete circle arrangements.
//!
//! ```
//! use pscirc::{parse_matrix, check_consistency, genus};
//!
//! let m = parse_matrix("n 3\n1: +2 +3 -2 -3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2").unwrap();
//! assert!(check_consistency(&m).is_consistent());
//! assert_eq!(genus(&m), 0);
//! ```

pub mod analysis;
pub mod canonical;
pub mod consistency;
pub mod embedding;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod geom;
pub mod matrix;

pub use analysis::{
    classify_triple, first_non_antipodal_row, is_sphere_embeddable_via_quads,
    is_uniform_oriented_matroid, iso_via_quads, quad_profile, triple_reference, QuadIsomorphism,
    QuadProfile, SphereByQuads, TripleType,
};
pub use canonical::{are_isomorphic, canonical_form, canonical_labelling, CanonicalForm};
pub use consistency::{
    check_consistency, inconsistent_triple, is_between, strictly_embeddable, Consistency,
    ConsistencyWitness,
};
pub use embedding::{
    build_embedded_graph, euler_data, genus, is_sphere_embeddable_direct, trace_faces, Dart,
    Direction, EmbeddedGraph, EulerData, FaceWalk, GraphExport,
};
pub use enumerate::{
    census_to_psm, count_reorientation_orbits, enumerate_census, enumerate_census_with,
    equivalence_counts, summarize, visit_census, CensusEntry, CensusFilter, CensusOptions,
    CensusSummary,
};
pub use error::{Error, Result};
pub use format::{parse_many, parse_matrix, to_psm};
pub use geom::{matrix_from_circles, parse_circles, random_arrangement, Circle, CircleArrangement};
pub use matrix::{
    validate, IntersectionMatrix, Label, LabelPermutation, Sign, SignedEntry, Violation,
    ViolationKind,
};

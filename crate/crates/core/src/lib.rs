//! Specification-based regression test selection for web services.
//!
//! The pipeline parses the `types` section of a baseline and a delta WSDL
//! into numbered trees ([`parser`]), detects datatype changes between them
//! ([`compare`]), generates boundary value suites ([`bva`]) and partitions a
//! baseline suite into reusable and obsolete cases ([`select`]).

pub mod bva;
pub mod cli;
pub mod compare;
pub mod error;
pub mod model;
pub mod par;
pub mod parser;
pub mod select;

pub use bva::{boundary_values, generate_suite, BvaConfig, NominalStrategy};
pub use compare::{compare_attributes, compare_trees, match_sub_elements};
pub use error::{Error, Result};
pub use model::{
    path_of, ChangeKind, ChangeRecord, ClassificationResult, NodeAttribute, NodeKind, Scalar, SchemaTree,
    TestCase, TestSuite, TreeNode, ValueConstraint,
};
pub use parser::{build_tree, extract_constraints, load_wsdl, WsdlDocument};
pub use select::{
    classify_change_impact, is_valid, select, type_compatible, ChangeImpact, CompatibilityVerdict,
};

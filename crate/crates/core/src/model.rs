//! Tree, constraint and test-suite types shared by the whole pipeline.
//!
//! A [`SchemaTree`] numbers its nodes 1-based in document order (root
//! element, then the complex type, then each sub-element) and numbers the
//! attributes of every node 1-based in declaration order. A location is
//! addressed by a dotted path such as `4.5` (node 4, attribute 5).

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::bva::BvaConfig;
use crate::error::{Error, Result};

/// Renders the dotted address of a node (`"n"`) or of one of its attributes
/// (`"n.m"`).
pub fn path_of(node_ordinal: u32, attr_ordinal: Option<u32>) -> String {
    match attr_ordinal {
        Some(attr) => format!("{node_ordinal}.{attr}"),
        None => node_ordinal.to_string(),
    }
}

/// Inverse of [`path_of`]. Returns `None` for anything that is not one or two
/// positive ordinals joined by a dot.
pub fn parse_path(path: &str) -> Option<(u32, Option<u32>)> {
    fn ordinal(s: &str) -> Option<u32> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok().filter(|&n| n > 0)
    }
    match path.split_once('.') {
        Some((node, attr)) => Some((ordinal(node)?, Some(ordinal(attr)?))),
        None => Some((ordinal(path)?, None)),
    }
}

/// Strips a namespace prefix: `s:int` becomes `int`.
pub fn local_part(qualified: &str) -> &str {
    qualified.rsplit(':').next().unwrap_or(qualified)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    RootElement,
    ComplexType,
    SubElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAttribute {
    pub ordinal: u32,
    pub name: String,
    /// `None` when the schema gives no value (distinct from an empty string).
    pub value: Option<String>,
}

impl NodeAttribute {
    pub fn new(ordinal: u32, name: impl Into<String>, value: Option<String>) -> Self {
        Self {
            ordinal,
            name: name.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub ordinal: u32,
    pub kind: NodeKind,
    pub attributes: Vec<NodeAttribute>,
}

impl TreeNode {
    /// Builds a node from `(name, value)` pairs, numbering them in order.
    pub fn with_attributes<I, N>(ordinal: u32, kind: NodeKind, attrs: I) -> Self
    where
        I: IntoIterator<Item = (N, Option<String>)>,
        N: Into<String>,
    {
        let attributes = attrs
            .into_iter()
            .zip(1u32..)
            .map(|((name, value), ord)| NodeAttribute::new(ord, name, value))
            .collect();
        Self {
            ordinal,
            kind,
            attributes,
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&NodeAttribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_at(&self, ordinal: u32) -> Option<&NodeAttribute> {
        self.attributes.iter().find(|a| a.ordinal == ordinal)
    }

    /// Value of the `name` attribute, if set.
    pub fn name_value(&self) -> Option<&str> {
        self.attribute("name").and_then(|a| a.value.as_deref())
    }

    pub fn path(&self) -> String {
        path_of(self.ordinal, None)
    }
}

/// Numbered tree of one top-level schema element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct SchemaTree {
    #[serde(rename = "element")]
    element_name: String,
    nodes: Vec<TreeNode>,
}

#[derive(Deserialize)]
struct RawTree {
    element: String,
    nodes: Vec<TreeNode>,
}

impl TryFrom<RawTree> for SchemaTree {
    type Error = Error;

    fn try_from(raw: RawTree) -> Result<Self> {
        SchemaTree::new(raw.element, raw.nodes)
    }
}

impl SchemaTree {
    /// Validates the structural invariants and builds the tree.
    pub fn new(element_name: impl Into<String>, nodes: Vec<TreeNode>) -> Result<Self> {
        let tree = Self {
            element_name: element_name.into(),
            nodes,
        };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTree(msg));
        if self.nodes.is_empty() {
            return bad("tree has no nodes".into());
        }
        for (idx, node) in self.nodes.iter().enumerate() {
            let expected = idx as u32 + 1;
            if node.ordinal != expected {
                return bad(format!(
                    "node ordinal {} found where {expected} expected",
                    node.ordinal
                ));
            }
            let expected_kind = match idx {
                0 => NodeKind::RootElement,
                1 => NodeKind::ComplexType,
                _ => NodeKind::SubElement,
            };
            if node.kind != expected_kind {
                return bad(format!(
                    "node {expected} is {:?}, expected {expected_kind:?}",
                    node.kind
                ));
            }
            let mut seen = BTreeSet::new();
            for (a_idx, attr) in node.attributes.iter().enumerate() {
                if attr.ordinal != a_idx as u32 + 1 {
                    return bad(format!(
                        "attribute ordinal {} of node {expected} out of sequence",
                        attr.ordinal
                    ));
                }
                if !seen.insert(attr.name.as_str()) {
                    return bad(format!("node {expected} repeats attribute `{}`", attr.name));
                }
            }
            if node.attribute("name").is_none() {
                return bad(format!("node {expected} has no `name` attribute"));
            }
        }
        if self.nodes[0].name_value() != Some(self.element_name.as_str()) {
            return bad(format!(
                "root name does not match element name `{}`",
                self.element_name
            ));
        }
        let mut fields = BTreeSet::new();
        for sub in self.sub_elements() {
            match sub.name_value() {
                None => return bad(format!("sub-element {} has no name value", sub.ordinal)),
                Some(name) if !fields.insert(name) => {
                    return Err(Error::DuplicateField {
                        element: self.element_name.clone(),
                        field: name.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn element_name(&self) -> &str {
        &self.element_name
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn complex_type(&self) -> Option<&TreeNode> {
        self.nodes.get(1)
    }

    pub fn sub_elements(&self) -> &[TreeNode] {
        self.nodes.get(2..).unwrap_or(&[])
    }

    pub fn node(&self, ordinal: u32) -> Option<&TreeNode> {
        let idx = ordinal.checked_sub(1)? as usize;
        self.nodes.get(idx)
    }

    /// Looks up the node and, for `n.m` paths, the attribute a path refers to.
    pub fn resolve(&self, path: &str) -> Option<(&TreeNode, Option<&NodeAttribute>)> {
        let (node_ord, attr_ord) = parse_path(path)?;
        let node = self.node(node_ord)?;
        match attr_ord {
            Some(a) => Some((node, Some(node.attribute_at(a)?))),
            None => Some((node, None)),
        }
    }

    /// Sub-element names in node order.
    pub fn field_names(&self) -> Vec<&str> {
        self.sub_elements()
            .iter()
            .filter_map(TreeNode::name_value)
            .collect()
    }
}

/// Coarse classification of an XML Schema built-in type name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeClass {
    Integer,
    Float,
    Text,
    Other,
}

impl TypeClass {
    pub fn of(base_type: &str) -> Self {
        match base_type {
            "int" | "integer" | "long" | "short" | "byte" | "nonNegativeInteger" | "positiveInteger"
            | "nonPositiveInteger" | "negativeInteger" | "unsignedInt" | "unsignedLong" | "unsignedShort"
            | "unsignedByte" => TypeClass::Integer,
            "float" | "double" | "decimal" => TypeClass::Float,
            "string" | "normalizedString" | "token" | "Name" | "NCName" | "language" | "anyURI" | "ID" => {
                TypeClass::Text
            }
            _ => TypeClass::Other,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, TypeClass::Integer | TypeClass::Float)
    }
}

/// Datatype and inclusive range of one sub-element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueConstraint {
    pub field_name: String,
    pub base_type: String,
    pub min_inclusive: Option<Decimal>,
    pub max_inclusive: Option<Decimal>,
}

impl ValueConstraint {
    pub fn new(
        field_name: impl Into<String>,
        base_type: impl Into<String>,
        min_inclusive: Option<Decimal>,
        max_inclusive: Option<Decimal>,
    ) -> Result<Self> {
        let c = Self {
            field_name: field_name.into(),
            base_type: base_type.into(),
            min_inclusive,
            max_inclusive,
        };
        c.validate()?;
        Ok(c)
    }

    /// Integer-typed constraint with both bounds; handy in tests and fixtures.
    pub fn int_range(field_name: impl Into<String>, min: i64, max: i64) -> Result<Self> {
        Self::new(field_name, "int", Some(min.into()), Some(max.into()))
    }

    pub fn unbounded(field_name: impl Into<String>, base_type: impl Into<String>) -> Self {
        Self {
            field_name: field_name.into(),
            base_type: base_type.into(),
            min_inclusive: None,
            max_inclusive: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let class = self.type_class();
        if !class.is_numeric() {
            for (facet, bound) in [
                ("minInclusive", &self.min_inclusive),
                ("maxInclusive", &self.max_inclusive),
            ] {
                if bound.is_some() {
                    return Err(Error::FacetTypeMismatch {
                        field: self.field_name.clone(),
                        base_type: self.base_type.clone(),
                        facet: facet.into(),
                        message: "numeric bound on a non-numeric type".into(),
                    });
                }
            }
        }
        if class == TypeClass::Integer {
            for (facet, bound) in [
                ("minInclusive", &self.min_inclusive),
                ("maxInclusive", &self.max_inclusive),
            ] {
                if let Some(b) = bound {
                    if !b.fract().is_zero() {
                        return Err(Error::FacetTypeMismatch {
                            field: self.field_name.clone(),
                            base_type: self.base_type.clone(),
                            facet: facet.into(),
                            message: format!("fractional bound {b} on an integer type"),
                        });
                    }
                }
            }
        }
        if let (Some(min), Some(max)) = (self.min_inclusive, self.max_inclusive) {
            if min > max {
                return Err(Error::InvertedBounds {
                    field: self.field_name.clone(),
                    min: min.to_string(),
                    max: max.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn type_class(&self) -> TypeClass {
        TypeClass::of(&self.base_type)
    }

    pub fn bounds(&self) -> Option<(Decimal, Decimal)> {
        Some((self.min_inclusive?, self.max_inclusive?))
    }

    pub fn is_bounded_numeric(&self) -> bool {
        self.type_class().is_numeric() && self.bounds().is_some()
    }
}

/// A concrete test input value.
///
/// Integers serialize as JSON numbers; decimals serialize as strings so that
/// values such as `1990.01` never pass through binary floating point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Int(i64),
    Decimal(Decimal),
    Text(String),
}

impl Scalar {
    pub fn as_text(&self) -> Cow<'_, str> {
        match self {
            Scalar::Int(v) => Cow::Owned(v.to_string()),
            Scalar::Decimal(v) => Cow::Owned(v.normalize().to_string()),
            Scalar::Text(s) => Cow::Borrowed(s),
        }
    }

    /// Reads the value as an instance of `class`, returning the canonical
    /// representation or `None` when it does not parse as that type.
    pub fn coerce(&self, class: TypeClass) -> Option<Scalar> {
        match class {
            TypeClass::Integer => match self {
                Scalar::Int(v) => Some(Scalar::Int(*v)),
                _ => self.as_text().trim().parse::<i64>().ok().map(Scalar::Int),
            },
            TypeClass::Float => match self {
                Scalar::Int(v) => Some(Scalar::Decimal(Decimal::from(*v))),
                Scalar::Decimal(v) => Some(Scalar::Decimal(v.normalize())),
                Scalar::Text(s) => Decimal::from_str(s.trim())
                    .ok()
                    .map(|d| Scalar::Decimal(d.normalize())),
            },
            TypeClass::Text | TypeClass::Other => Some(Scalar::Text(self.as_text().into_owned())),
        }
    }

    /// Numeric value, if the scalar is a number.
    pub fn as_decimal(&self) -> Option<Decimal> {
        match self {
            Scalar::Int(v) => Some(Decimal::from(*v)),
            Scalar::Decimal(v) => Some(*v),
            Scalar::Text(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_text())
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Text(v.to_string())
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Int(v) => serializer.serialize_i64(*v),
            other => serializer.serialize_str(&other.as_text()),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Ok(Scalar::Int(v)),
            Raw::Float(v) => Decimal::from_str(&v.to_string())
                .map(Scalar::Decimal)
                .map_err(serde::de::Error::custom),
            Raw::Text(s) => Ok(Scalar::Text(s)),
        }
    }
}

/// Field name to value assignment; also used for unidentified test frames.
pub type Frame = BTreeMap<String, Scalar>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub values: Frame,
}

impl TestCase {
    pub fn new(id: impl Into<String>, values: Frame) -> Self {
        Self {
            id: id.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSuite")]
pub struct TestSuite {
    #[serde(rename = "element")]
    element_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<BvaConfig>,
    cases: Vec<TestCase>,
}

#[derive(Deserialize)]
struct RawSuite {
    element: String,
    #[serde(default)]
    strategy: Option<BvaConfig>,
    cases: Vec<TestCase>,
}

impl TryFrom<RawSuite> for TestSuite {
    type Error = Error;

    fn try_from(raw: RawSuite) -> Result<Self> {
        TestSuite::new(raw.element, raw.strategy, raw.cases)
    }
}

impl TestSuite {
    pub fn new(
        element_name: impl Into<String>,
        strategy: Option<BvaConfig>,
        cases: Vec<TestCase>,
    ) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for case in &cases {
            if !ids.insert(case.id.as_str()) {
                return Err(Error::InvalidSuite(format!("duplicate case id `{}`", case.id)));
            }
        }
        Ok(Self {
            element_name: element_name.into(),
            strategy,
            cases,
        })
    }

    pub fn element_name(&self) -> &str {
        &self.element_name
    }

    pub fn strategy(&self) -> Option<&BvaConfig> {
        self.strategy.as_ref()
    }

    pub fn cases(&self) -> &[TestCase] {
        &self.cases
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.cases.iter().map(|c| c.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChangeKind {
    AttributeValueChanged,
    AttributeNameChanged,
    AttributeAdded,
    AttributeDeleted,
    NodeDeleted,
    NodeAdded,
}

impl ChangeKind {
    /// Added records are addressed in the delta tree, all others in the baseline.
    pub fn addressed_in_delta(self) -> bool {
        matches!(self, ChangeKind::AttributeAdded | ChangeKind::NodeAdded)
    }

    pub fn is_node_change(self) -> bool {
        matches!(self, ChangeKind::NodeAdded | ChangeKind::NodeDeleted)
    }
}

/// One difference between a baseline and a delta tree.
///
/// For attribute value changes `old`/`new` hold the values; for attribute
/// renames they hold the attribute names; for node changes they hold the
/// node's `name` value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub path: String,
    pub kind: ChangeKind,
    #[serde(rename = "old")]
    pub old_value: Option<String>,
    #[serde(rename = "new")]
    pub new_value: Option<String>,
}

impl ChangeRecord {
    pub fn new(
        path: impl Into<String>,
        kind: ChangeKind,
        old_value: Option<String>,
        new_value: Option<String>,
    ) -> Self {
        Self {
            path: path.into(),
            kind,
            old_value,
            new_value,
        }
    }
}

/// Reusable/obsolete partition of a baseline suite plus new boundary frames.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    reusable: Vec<String>,
    obsolete: Vec<String>,
    recommended_new: Vec<Frame>,
}

impl ClassificationResult {
    /// Checks that `reusable` and `obsolete` partition `baseline_ids`.
    pub fn new<'a>(
        baseline_ids: impl IntoIterator<Item = &'a str>,
        reusable: Vec<String>,
        obsolete: Vec<String>,
        recommended_new: Vec<Frame>,
    ) -> Result<Self> {
        let all: BTreeSet<&str> = baseline_ids.into_iter().collect();
        let mut seen = BTreeSet::new();
        for id in reusable.iter().chain(&obsolete) {
            if !all.contains(id.as_str()) {
                return Err(Error::InvalidClassification(format!(
                    "`{id}` is not a baseline case"
                )));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidClassification(format!(
                    "`{id}` classified more than once"
                )));
            }
        }
        if seen.len() != all.len() {
            let missing: Vec<_> = all.difference(&seen).collect();
            return Err(Error::InvalidClassification(format!(
                "unclassified cases {missing:?}"
            )));
        }
        Ok(Self {
            reusable,
            obsolete,
            recommended_new,
        })
    }

    pub fn reusable(&self) -> &[String] {
        &self.reusable
    }

    pub fn obsolete(&self) -> &[String] {
        &self.obsolete
    }

    pub fn recommended_new(&self) -> &[Frame] {
        &self.recommended_new
    }
}

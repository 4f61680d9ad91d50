//! WSDL `types` ingestion and tree construction.
//!
//! Schema constructs are matched by local name, so `s:element`,
//! `xsd:element` and `xs:element` are all accepted. Only top-level element
//! declarations with at most one level of complex type are modeled; a
//! sub-element that declares its own complex type is rejected.

use std::str::FromStr;

use rust_decimal::Decimal;

use crate::error::{Error, Result};
use crate::model::{local_part, NodeKind, SchemaTree, TreeNode, TypeClass, ValueConstraint};

/// Owned copy of an XML element: local name, attributes in document order
/// and element children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlElement {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<XmlElement>,
}

impl XmlElement {
    fn from_node(node: roxmltree::Node<'_, '_>) -> Self {
        Self {
            name: node.tag_name().name().to_string(),
            attributes: node
                .attributes()
                .map(|a| (a.name().to_string(), a.value().to_string()))
                .collect(),
            children: node
                .children()
                .filter(|c| c.is_element())
                .map(XmlElement::from_node)
                .collect(),
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn child(&self, name: &str) -> Option<&XmlElement> {
        self.children.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct WsdlDocument {
    pub source_uri: String,
    pub raw: String,
    /// Top-level `element` declarations of every schema under `types`.
    pub schemas: Vec<XmlElement>,
}

impl WsdlDocument {
    pub fn element_names(&self) -> Vec<&str> {
        self.schemas.iter().filter_map(|e| e.attribute("name")).collect()
    }

    pub fn find(&self, element_name: &str) -> Option<&XmlElement> {
        self.schemas
            .iter()
            .find(|e| e.attribute("name") == Some(element_name))
    }
}

/// Parses a WSDL document (or a bare XML Schema) and extracts its top-level
/// element declarations in document order.
pub fn load_wsdl(document: &str, source_uri: &str) -> Result<WsdlDocument> {
    let doc = roxmltree::Document::parse(document).map_err(|e| Error::MalformedXml {
        source_uri: source_uri.to_string(),
        message: e.to_string(),
    })?;

    let root = doc.root_element();
    let schemas: Vec<_> = if root.tag_name().name() == "schema" {
        vec![root]
    } else {
        root.descendants()
            .filter(|n| n.is_element() && n.tag_name().name() == "schema")
            .filter(|n| n.parent_element().is_some_and(|p| p.tag_name().name() == "types"))
            .collect()
    };

    let elements: Vec<XmlElement> = schemas
        .into_iter()
        .flat_map(|schema| schema.children())
        .filter(|n| n.is_element() && n.tag_name().name() == "element")
        .map(XmlElement::from_node)
        .collect();

    if elements.is_empty() {
        return Err(Error::NoTypesSection {
            source_uri: source_uri.to_string(),
        });
    }

    Ok(WsdlDocument {
        source_uri: source_uri.to_string(),
        raw: document.to_string(),
        schemas: elements,
    })
}

const COMPOSITORS: [&str; 3] = ["sequence", "all", "choice"];

/// Builds the numbered tree for one top-level element declaration.
pub fn build_tree(decl: &XmlElement) -> Result<SchemaTree> {
    let element_name = decl
        .attribute("name")
        .ok_or(Error::MissingName { context: None })?
        .to_string();

    let mut nodes = vec![TreeNode::with_attributes(
        1,
        NodeKind::RootElement,
        decl.attributes.iter().map(|(n, v)| (n.clone(), Some(v.clone()))),
    )];

    if let Some(complex) = decl.child("complexType") {
        let mut attrs: Vec<(String, Option<String>)> = complex
            .attributes
            .iter()
            .map(|(n, v)| (n.clone(), Some(v.clone())))
            .collect();
        if complex.attribute("name").is_none() {
            attrs.insert(0, ("name".into(), None));
        }
        let compositor = complex
            .children
            .iter()
            .find(|c| COMPOSITORS.contains(&c.name.as_str()));
        if let Some(comp) = compositor {
            attrs.push(("compositor".into(), Some(comp.name.clone())));
        }
        nodes.push(TreeNode::with_attributes(2, NodeKind::ComplexType, attrs));

        let mut subs = Vec::new();
        if let Some(comp) = compositor {
            collect_sub_elements(comp, &mut subs);
        }
        for (sub, ordinal) in subs.into_iter().zip(3u32..) {
            nodes.push(sub_element_node(&element_name, sub, ordinal)?);
        }
    }

    SchemaTree::new(element_name, nodes)
}

fn collect_sub_elements<'a>(compositor: &'a XmlElement, out: &mut Vec<&'a XmlElement>) {
    for child in &compositor.children {
        if child.name == "element" {
            out.push(child);
        } else if COMPOSITORS.contains(&child.name.as_str()) {
            collect_sub_elements(child, out);
        }
    }
}

fn sub_element_node(element_name: &str, sub: &XmlElement, ordinal: u32) -> Result<TreeNode> {
    let Some(name) = sub.attribute("name") else {
        return Err(Error::MissingName {
            context: Some(element_name.to_string()),
        });
    };
    if sub.child("complexType").is_some() {
        return Err(Error::NestedComplexType {
            element: element_name.to_string(),
            sub_element: name.to_string(),
        });
    }

    let mut attrs: Vec<(String, Option<String>)> = sub
        .attributes
        .iter()
        .map(|(n, v)| (n.clone(), Some(v.clone())))
        .collect();

    // Inline simpleType restrictions contribute the base type and facets.
    if let Some(restriction) = sub.child("simpleType").and_then(|s| s.child("restriction")) {
        let push = |attrs: &mut Vec<(String, Option<String>)>, key: &str, value: &str| {
            if let Some(existing) = attrs.iter_mut().find(|(n, _)| n == key) {
                if matches!(key, "enumeration" | "pattern") {
                    if let Some(v) = existing.1.as_mut() {
                        v.push('|');
                        v.push_str(value);
                    }
                }
            } else {
                attrs.push((key.to_string(), Some(value.to_string())));
            }
        };
        if let Some(base) = restriction.attribute("base") {
            push(&mut attrs, "type", base);
        }
        for facet in &restriction.children {
            if let Some(value) = facet.attribute("value") {
                push(&mut attrs, &facet.name, value);
            }
        }
    }

    Ok(TreeNode::with_attributes(ordinal, NodeKind::SubElement, attrs))
}

/// One constraint per sub-element, in node order.
pub fn extract_constraints(tree: &SchemaTree) -> Result<Vec<ValueConstraint>> {
    tree.sub_elements()
        .iter()
        .map(|node| {
            let field = node.name_value().unwrap_or_default().to_string();
            let base_type = node
                .attribute("type")
                .and_then(|a| a.value.as_deref())
                .map(|t| local_part(t).to_string())
                .unwrap_or_else(|| "anyType".to_string());
            let class = TypeClass::of(&base_type);
            let bound = |facet: &str| -> Result<Option<Decimal>> {
                let Some(attr) = node.attribute(facet) else {
                    return Ok(None);
                };
                parse_bound(&field, &base_type, class, facet, attr.value.as_deref()).map(Some)
            };
            let min = bound("minInclusive")?;
            let max = bound("maxInclusive")?;
            ValueConstraint::new(field.clone(), base_type.clone(), min, max)
        })
        .collect()
}

fn parse_bound(
    field: &str,
    base_type: &str,
    class: TypeClass,
    facet: &str,
    value: Option<&str>,
) -> Result<Decimal> {
    let mismatch = |message: String| Error::FacetTypeMismatch {
        field: field.to_string(),
        base_type: base_type.to_string(),
        facet: facet.to_string(),
        message,
    };
    let text = value.ok_or_else(|| mismatch("facet has no value".into()))?.trim();
    match class {
        TypeClass::Integer => text
            .parse::<i64>()
            .map(Decimal::from)
            .map_err(|_| mismatch(format!("`{text}` is not an integer"))),
        TypeClass::Float => Decimal::from_str(text)
            .or_else(|_| Decimal::from_scientific(text))
            .map_err(|_| mismatch(format!("`{text}` is not a number"))),
        TypeClass::Text | TypeClass::Other => {
            Err(mismatch(format!("range facet on non-numeric type `{base_type}`")))
        }
    }
}

/// Builds every tree in the document, keeping per-element failures.
pub fn build_all(doc: &WsdlDocument) -> Vec<(String, Result<SchemaTree>)> {
    use crate::par::*;
    doc.schemas
        .par_iter()
        .map(|decl| {
            let name = decl.attribute("name").unwrap_or("").to_string();
            (name, build_tree(decl))
        })
        .collect()
}

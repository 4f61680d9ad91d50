#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::Rng;
use wsreg_core::{ChangeKind, ChangeRecord, NodeKind, SchemaTree, TreeNode};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn wsreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsreg"))
        .args(args)
        .output()
        .expect("wsreg runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Editable form of a tree: attribute lists per node, renumbered on build.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSpec {
    pub root: Vec<(String, Option<String>)>,
    pub complex: Option<Vec<(String, Option<String>)>>,
    pub subs: Vec<Vec<(String, Option<String>)>>,
}

impl TreeSpec {
    pub fn build(&self) -> SchemaTree {
        let element = self
            .root
            .iter()
            .find(|(n, _)| n == "name")
            .and_then(|(_, v)| v.clone())
            .unwrap();
        let mut nodes = vec![TreeNode::with_attributes(
            1,
            NodeKind::RootElement,
            self.root.clone(),
        )];
        if let Some(ct) = &self.complex {
            nodes.push(TreeNode::with_attributes(2, NodeKind::ComplexType, ct.clone()));
            for (i, sub) in self.subs.iter().enumerate() {
                nodes.push(TreeNode::with_attributes(
                    i as u32 + 3,
                    NodeKind::SubElement,
                    sub.clone(),
                ));
            }
        }
        SchemaTree::new(element, nodes).unwrap()
    }

    pub fn field_names(&self) -> Vec<String> {
        self.subs.iter().map(|s| value_of(s, "name").unwrap()).collect()
    }

    /// Schema text for the tree, attributes in spec order.
    pub fn to_xsd(&self) -> String {
        let attrs = |list: &[(String, Option<String>)], skip_null_name: bool| -> String {
            list.iter()
                .filter(|(n, v)| !(skip_null_name && n == "name" && v.is_none()) && n != "compositor")
                .map(|(n, v)| format!(" {n}=\"{}\"", v.clone().unwrap_or_default()))
                .collect()
        };
        let mut out = String::from("<xs:schema xmlns:xs=\"http://www.w3.org/2001/XMLSchema\">\n");
        out.push_str(&format!("<xs:element{}>", attrs(&self.root, false)));
        if let Some(ct) = &self.complex {
            let comp = value_of(ct, "compositor").unwrap_or_else(|| "sequence".into());
            out.push_str(&format!("<xs:complexType{}><xs:{comp}>", attrs(ct, true)));
            for sub in &self.subs {
                out.push_str(&format!("<xs:element{}/>", attrs(sub, false)));
            }
            out.push_str(&format!("</xs:{comp}></xs:complexType>"));
        }
        out.push_str("</xs:element>\n</xs:schema>\n");
        out
    }
}

pub fn value_of(list: &[(String, Option<String>)], name: &str) -> Option<String> {
    list.iter().find(|(n, _)| n == name).and_then(|(_, v)| v.clone())
}

fn pair(n: &str, v: impl ToString) -> (String, Option<String>) {
    (n.to_string(), Some(v.to_string()))
}

/// Random int-bounded tree with `fields` sub-elements. Attribute order is
/// shuffled per sub-element.
pub fn random_int_tree<R: Rng>(rng: &mut R, fields: usize) -> TreeSpec {
    let subs = (0..fields)
        .map(|i| {
            let min: i64 = rng.gen_range(-50..50);
            let max = min + rng.gen_range(0..40);
            let mut attrs = vec![
                pair("maxOccurs", 1),
                pair("minOccurs", rng.gen_range(0..2)),
                pair("name", format!("F{i}")),
                pair("type", "s:int"),
                pair("maxInclusive", max),
                pair("minInclusive", min),
            ];
            attrs.shuffle(rng);
            attrs
        })
        .collect();
    TreeSpec {
        root: vec![pair("name", "Op")],
        complex: Some(vec![("name".into(), None), pair("compositor", "sequence")]),
        subs,
    }
}

/// One primitive edit of a tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Mutation {
    /// (node ordinal, attribute ordinal, new value)
    ChangeValue(u32, u32, String),
    DeleteSub(usize),
    AddSub(usize, String),
    /// (node ordinal, attribute ordinal, new attribute name)
    RenameAttribute(u32, u32, String),
    AddAttribute(u32, String, String),
    DeleteAttribute(u32, u32),
}

fn node_attrs_mut(spec: &mut TreeSpec, node: u32) -> &mut Vec<(String, Option<String>)> {
    match node {
        1 => &mut spec.root,
        2 => spec.complex.as_mut().unwrap(),
        n => &mut spec.subs[n as usize - 3],
    }
}

fn node_attrs(spec: &TreeSpec, node: u32) -> &Vec<(String, Option<String>)> {
    match node {
        1 => &spec.root,
        2 => spec.complex.as_ref().unwrap(),
        n => &spec.subs[n as usize - 3],
    }
}

pub fn random_mutation<R: Rng>(rng: &mut R, spec: &TreeSpec) -> Mutation {
    let sub_count = spec.subs.len();
    let pick_sub = |rng: &mut R| rng.gen_range(0..sub_count) as u32 + 3;
    match rng.gen_range(0..6) {
        0 => {
            let n = pick_sub(rng);
            let len = node_attrs(spec, n).len() as u32;
            let a = rng.gen_range(1..=len);
            let (name, old) = &node_attrs(spec, n)[a as usize - 1];
            let new = if name == "name" {
                format!("Renamed{}", rng.gen_range(0..1000))
            } else {
                let mut v;
                loop {
                    v = rng.gen_range(-100..100).to_string();
                    if Some(&v) != old.as_ref() {
                        break;
                    }
                }
                v
            };
            Mutation::ChangeValue(n, a, new)
        }
        1 if sub_count > 0 => Mutation::DeleteSub(rng.gen_range(0..sub_count)),
        2 => Mutation::AddSub(
            rng.gen_range(0..=sub_count),
            format!("New{}", rng.gen_range(0..1000)),
        ),
        3..=5 => {
            let n = pick_sub(rng);
            let attrs = node_attrs(spec, n);
            let candidates: Vec<u32> = attrs
                .iter()
                .enumerate()
                .filter(|(_, (name, _))| name != "name")
                .map(|(i, _)| i as u32 + 1)
                .collect();
            match rng.gen_range(0..3) {
                0 if !candidates.is_empty() => {
                    let a = *candidates.choose(rng).unwrap();
                    Mutation::RenameAttribute(n, a, format!("x{}", rng.gen_range(0..1000)))
                }
                1 if !candidates.is_empty() => Mutation::DeleteAttribute(n, *candidates.choose(rng).unwrap()),
                _ => Mutation::AddAttribute(
                    n,
                    format!("y{}", rng.gen_range(0..1000)),
                    rng.gen_range(0..9).to_string(),
                ),
            }
        }
        _ => Mutation::AddSub(sub_count, format!("New{}", rng.gen_range(0..1000))),
    }
}

/// Applies `m` and returns the mutated spec plus the records that describe
/// exactly that edit.
pub fn apply_mutation(spec: &TreeSpec, m: &Mutation) -> (TreeSpec, Vec<ChangeRecord>) {
    let mut out = spec.clone();
    let expected = match m {
        Mutation::ChangeValue(n, a, new) => {
            let attrs = node_attrs_mut(&mut out, *n);
            let old = attrs[*a as usize - 1].1.replace(new.clone());
            vec![ChangeRecord::new(
                format!("{n}.{a}"),
                ChangeKind::AttributeValueChanged,
                old,
                Some(new.clone()),
            )]
        }
        Mutation::DeleteSub(i) => {
            let removed = out.subs.remove(*i);
            vec![ChangeRecord::new(
                (i + 3).to_string(),
                ChangeKind::NodeDeleted,
                value_of(&removed, "name"),
                None,
            )]
        }
        Mutation::AddSub(i, name) => {
            out.subs.insert(
                *i,
                vec![
                    pair("name", name),
                    pair("type", "s:int"),
                    pair("minInclusive", 0),
                    pair("maxInclusive", 9),
                ],
            );
            vec![ChangeRecord::new(
                (i + 3).to_string(),
                ChangeKind::NodeAdded,
                None,
                Some(name.clone()),
            )]
        }
        Mutation::RenameAttribute(n, a, new_name) => {
            let attrs = node_attrs_mut(&mut out, *n);
            let old = std::mem::replace(&mut attrs[*a as usize - 1].0, new_name.clone());
            vec![ChangeRecord::new(
                format!("{n}.{a}"),
                ChangeKind::AttributeNameChanged,
                Some(old),
                Some(new_name.clone()),
            )]
        }
        Mutation::AddAttribute(n, name, value) => {
            let attrs = node_attrs_mut(&mut out, *n);
            attrs.push(pair(name, value));
            vec![ChangeRecord::new(
                format!("{n}.{}", attrs.len()),
                ChangeKind::AttributeAdded,
                None,
                Some(value.clone()),
            )]
        }
        Mutation::DeleteAttribute(n, a) => {
            let attrs = node_attrs_mut(&mut out, *n);
            let (_, old) = attrs.remove(*a as usize - 1);
            vec![ChangeRecord::new(
                format!("{n}.{a}"),
                ChangeKind::AttributeDeleted,
                old,
                None,
            )]
        }
    };
    (out, expected)
}

/// Changes the inclusive bounds of random fields. Occasionally drops a bound
/// entirely. Returns the delta spec.
pub fn random_facet_mutation<R: Rng>(rng: &mut R, spec: &TreeSpec) -> TreeSpec {
    let mut out = spec.clone();
    for sub in &mut out.subs {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let min: i64 = value_of(sub, "minInclusive").unwrap().parse().unwrap();
        let max: i64 = value_of(sub, "maxInclusive").unwrap().parse().unwrap();
        let new_min = min + rng.gen_range(-10..=10);
        let new_max = (max + rng.gen_range(-10..=10)).max(new_min);
        for (name, value) in sub.iter_mut() {
            match name.as_str() {
                "minInclusive" => *value = Some(new_min.to_string()),
                "maxInclusive" => *value = Some(new_max.to_string()),
                _ => {}
            }
        }
        if rng.gen_bool(0.05) {
            let drop = if rng.gen_bool(0.5) {
                "minInclusive"
            } else {
                "maxInclusive"
            };
            sub.retain(|(n, _)| n != drop);
        }
    }
    out
}

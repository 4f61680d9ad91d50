//! Change detection between a baseline tree and a delta tree.
//!
//! The walk goes root element, then complex type, then each baseline
//! sub-element against its delta counterpart, and finally collects delta
//! sub-elements that have no baseline counterpart. Attributes are aligned by
//! name; ordinals are only used to address the emitted records.

use crate::model::{path_of, ChangeKind, ChangeRecord, SchemaTree, TreeNode};

/// A baseline sub-element and its delta counterpart, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchedPair<'a> {
    pub baseline: &'a TreeNode,
    pub delta: Option<&'a TreeNode>,
    /// Paired by position because no delta child carries the same name.
    pub renamed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubElementMatch<'a> {
    pub pairs: Vec<MatchedPair<'a>>,
    pub unmatched_delta: Vec<&'a TreeNode>,
}

/// Pairs sub-elements by `name` value, falling back to the delta child at the
/// same position when that child is itself unmatched.
pub fn match_sub_elements<'a>(baseline: &'a [TreeNode], delta: &'a [TreeNode]) -> SubElementMatch<'a> {
    let mut delta_used = vec![false; delta.len()];
    let mut by_name: Vec<Option<usize>> = Vec::with_capacity(baseline.len());
    for b in baseline {
        let hit = b.name_value().and_then(|name| {
            delta
                .iter()
                .enumerate()
                .position(|(j, d)| !delta_used[j] && d.name_value() == Some(name))
        });
        if let Some(j) = hit {
            delta_used[j] = true;
        }
        by_name.push(hit);
    }

    let mut pairs = Vec::with_capacity(baseline.len());
    for (i, b) in baseline.iter().enumerate() {
        let pair = match by_name[i] {
            Some(j) => MatchedPair {
                baseline: b,
                delta: Some(&delta[j]),
                renamed: false,
            },
            None if i < delta.len() && !delta_used[i] => {
                delta_used[i] = true;
                MatchedPair {
                    baseline: b,
                    delta: Some(&delta[i]),
                    renamed: true,
                }
            }
            None => MatchedPair {
                baseline: b,
                delta: None,
                renamed: false,
            },
        };
        pairs.push(pair);
    }

    let unmatched_delta = delta
        .iter()
        .zip(&delta_used)
        .filter(|(_, used)| !**used)
        .map(|(d, _)| d)
        .collect();

    SubElementMatch {
        pairs,
        unmatched_delta,
    }
}

/// Attribute-level differences between two matched nodes.
///
/// A baseline-only attribute and a delta-only attribute carrying the same
/// value are reported as a rename rather than a delete/add pair.
pub fn compare_attributes(b: &TreeNode, d: &TreeNode) -> Vec<ChangeRecord> {
    let mut baseline_records: Vec<(u32, ChangeRecord)> = Vec::new();
    let mut baseline_only = Vec::new();

    for attr in &b.attributes {
        match d.attribute(&attr.name) {
            Some(other) if other.value != attr.value => baseline_records.push((
                attr.ordinal,
                ChangeRecord::new(
                    path_of(b.ordinal, Some(attr.ordinal)),
                    ChangeKind::AttributeValueChanged,
                    attr.value.clone(),
                    other.value.clone(),
                ),
            )),
            Some(_) => {}
            None => baseline_only.push(attr),
        }
    }

    let mut delta_only: Vec<_> = d
        .attributes
        .iter()
        .filter(|a| b.attribute(&a.name).is_none())
        .map(|a| (a, false))
        .collect();

    for attr in baseline_only {
        let renamed_to = delta_only
            .iter_mut()
            .find(|(cand, taken)| !*taken && cand.value == attr.value);
        let record = match renamed_to {
            Some((cand, taken)) => {
                *taken = true;
                ChangeRecord::new(
                    path_of(b.ordinal, Some(attr.ordinal)),
                    ChangeKind::AttributeNameChanged,
                    Some(attr.name.clone()),
                    Some(cand.name.clone()),
                )
            }
            None => ChangeRecord::new(
                path_of(b.ordinal, Some(attr.ordinal)),
                ChangeKind::AttributeDeleted,
                attr.value.clone(),
                None,
            ),
        };
        baseline_records.push((attr.ordinal, record));
    }

    baseline_records.sort_by_key(|(ord, _)| *ord);
    let mut records: Vec<ChangeRecord> = baseline_records.into_iter().map(|(_, r)| r).collect();
    records.extend(delta_only.into_iter().filter(|(_, taken)| !taken).map(|(a, _)| {
        ChangeRecord::new(
            path_of(d.ordinal, Some(a.ordinal)),
            ChangeKind::AttributeAdded,
            None,
            a.value.clone(),
        )
    }));
    records
}

fn node_deleted(node: &TreeNode) -> ChangeRecord {
    ChangeRecord::new(
        node.path(),
        ChangeKind::NodeDeleted,
        node.name_value().map(str::to_string),
        None,
    )
}

fn node_added(node: &TreeNode) -> ChangeRecord {
    ChangeRecord::new(
        node.path(),
        ChangeKind::NodeAdded,
        None,
        node.name_value().map(str::to_string),
    )
}

/// Detects every datatype-level change between `baseline` and `delta`.
pub fn compare_trees(baseline: &SchemaTree, delta: &SchemaTree) -> Vec<ChangeRecord> {
    let mut out = Vec::new();

    let (root_b, root_d) = (baseline.root(), delta.root());
    if root_b.name_value() != root_d.name_value() {
        out.push(node_deleted(root_b));
        out.push(node_added(root_d));
        return out;
    }
    out.extend(compare_attributes(root_b, root_d));

    let (ct_b, ct_d) = match (baseline.complex_type(), delta.complex_type()) {
        (None, None) => return out,
        (Some(b), None) => {
            out.push(node_deleted(b));
            return out;
        }
        (None, Some(d)) => {
            out.push(node_added(d));
            return out;
        }
        (Some(b), Some(d)) => (b, d),
    };
    if ct_b.name_value() != ct_d.name_value() {
        out.push(node_deleted(ct_b));
        out.push(node_added(ct_d));
        return out;
    }
    out.extend(compare_attributes(ct_b, ct_d));

    let matched = match_sub_elements(baseline.sub_elements(), delta.sub_elements());
    for pair in &matched.pairs {
        match pair.delta {
            Some(d) => out.extend(compare_attributes(pair.baseline, d)),
            None => out.push(node_deleted(pair.baseline)),
        }
    }
    out.extend(matched.unmatched_delta.into_iter().map(node_added));
    out
}

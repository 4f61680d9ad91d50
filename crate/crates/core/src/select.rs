//! Reusable/obsolete classification of a baseline suite against a delta tree.
//!
//! A baseline case is reusable when every value still lies in the delta
//! region of its field. Structural changes (root or complex type removed,
//! fields added, removed or renamed) and incompatible type changes obsolete
//! the whole suite. New boundary frames over the delta constraints are
//! recommended in every non-trivial case.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bva::{cross_product_frames, BvaConfig};
use crate::error::{Error, Result};
use crate::model::{
    ChangeKind, ChangeRecord, ClassificationResult, Frame, SchemaTree, TestCase, TestSuite, TypeClass,
    ValueConstraint,
};
use crate::par::*;
use crate::parser::extract_constraints;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatibilityVerdict {
    pub compatible: bool,
    pub reason: String,
}

impl CompatibilityVerdict {
    fn yes(reason: impl Into<String>) -> Self {
        Self {
            compatible: true,
            reason: reason.into(),
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        Self {
            compatible: false,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChangeImpact {
    NoImpact,
    FacetOnly,
    TypeChange,
    StructureChange,
}

fn check_fields(tc: &TestCase, constraints: &[ValueConstraint]) -> Result<()> {
    let expected: BTreeSet<&str> = constraints.iter().map(|c| c.field_name.as_str()).collect();
    let found: BTreeSet<&str> = tc.values.keys().map(String::as_str).collect();
    if constraints.is_empty() || expected != found {
        return Err(Error::FieldMismatch {
            case: tc.id.clone(),
            expected: expected.into_iter().map(str::to_string).collect(),
            found: found.into_iter().map(str::to_string).collect(),
        });
    }
    Ok(())
}

/// Whether every value of `tc` parses as its field's type and lies within
/// the field's inclusive bounds.
pub fn is_valid(tc: &TestCase, constraints: &[ValueConstraint]) -> Result<bool> {
    check_fields(tc, constraints)?;
    Ok(constraints
        .iter()
        .all(|c| value_in_region(&tc.values[&c.field_name], c)))
}

fn value_in_region(value: &crate::model::Scalar, c: &ValueConstraint) -> bool {
    let class = c.type_class();
    let Some(v) = value.coerce(class) else {
        return false;
    };
    if !class.is_numeric() {
        return true;
    }
    let Some(n) = v.as_decimal() else {
        return false;
    };
    c.min_inclusive.is_none_or(|min| min <= n) && c.max_inclusive.is_none_or(|max| n <= max)
}

/// Whether baseline values of a field can still be exercised after its type
/// changed from `old` to `new`.
pub fn type_compatible(old: &ValueConstraint, new: &ValueConstraint) -> CompatibilityVerdict {
    if old.base_type == new.base_type {
        return CompatibilityVerdict::yes("same type");
    }
    let (from, to) = (old.type_class(), new.type_class());
    if from.is_numeric() && to.is_numeric() {
        return if new.bounds().is_some() {
            CompatibilityVerdict::yes(format!(
                "{} -> {} with inclusive bounds",
                old.base_type, new.base_type
            ))
        } else {
            CompatibilityVerdict::no(format!(
                "{} -> {} without both inclusive bounds",
                old.base_type, new.base_type
            ))
        };
    }
    if from.is_numeric() || to.is_numeric() {
        return CompatibilityVerdict::no(format!(
            "{} -> {}: numeric and non-numeric types are incompatible",
            old.base_type, new.base_type
        ));
    }
    CompatibilityVerdict::no(format!(
        "{} -> {}: no compatibility rule for this type pair",
        old.base_type, new.base_type
    ))
}

fn attribute_name_for(
    change: &ChangeRecord,
    baseline: &SchemaTree,
    delta: &SchemaTree,
) -> Option<Vec<String>> {
    let tree = if change.kind.addressed_in_delta() {
        delta
    } else {
        baseline
    };
    let (_, attr) = tree.resolve(&change.path)?;
    let attr = attr?;
    let mut names = vec![attr.name.clone()];
    if change.kind == ChangeKind::AttributeNameChanged {
        names.extend(change.new_value.clone());
    }
    Some(names)
}

/// Coarse impact of a change list. Structure dominates type, type dominates
/// facet-only.
pub fn classify_change_impact(
    changes: &[ChangeRecord],
    baseline: &SchemaTree,
    delta: &SchemaTree,
) -> ChangeImpact {
    if changes.is_empty() {
        return ChangeImpact::NoImpact;
    }
    let mut impact = ChangeImpact::FacetOnly;
    for change in changes {
        if change.kind.is_node_change() {
            return ChangeImpact::StructureChange;
        }
        let Some(names) = attribute_name_for(change, baseline, delta) else {
            return ChangeImpact::StructureChange;
        };
        if names.iter().any(|n| n == "name") {
            return ChangeImpact::StructureChange;
        }
        if names.iter().any(|n| n == "type") {
            impact = ChangeImpact::TypeChange;
        }
    }
    impact
}

/// Splits `cases` into (reusable ids, obsolete ids) by validity against
/// `constraints`, preserving order. Runs on the rayon pool when the
/// `parallel` feature is enabled.
pub fn partition_suite(
    cases: &[TestCase],
    constraints: &[ValueConstraint],
) -> Result<(Vec<String>, Vec<String>)> {
    let verdicts: Vec<bool> = cases
        .par_iter()
        .map(|tc| is_valid(tc, constraints))
        .collect::<Result<_>>()?;
    Ok(split(cases, &verdicts))
}

/// Single-threaded [`partition_suite`], always available.
pub fn partition_suite_sequential(
    cases: &[TestCase],
    constraints: &[ValueConstraint],
) -> Result<(Vec<String>, Vec<String>)> {
    let verdicts: Vec<bool> = cases
        .iter()
        .map(|tc| is_valid(tc, constraints))
        .collect::<Result<_>>()?;
    Ok(split(cases, &verdicts))
}

fn split(cases: &[TestCase], verdicts: &[bool]) -> (Vec<String>, Vec<String>) {
    let mut reusable = Vec::new();
    let mut obsolete = Vec::new();
    for (tc, ok) in cases.iter().zip(verdicts) {
        if *ok {
            reusable.push(tc.id.clone());
        } else {
            obsolete.push(tc.id.clone());
        }
    }
    (reusable, obsolete)
}

fn frames_over(
    constraints: impl IntoIterator<Item = ValueConstraint>,
    config: &BvaConfig,
) -> Result<Vec<Frame>> {
    let bounded: Vec<ValueConstraint> = constraints
        .into_iter()
        .filter(ValueConstraint::is_bounded_numeric)
        .collect();
    cross_product_frames(&bounded, config)
}

/// Classifies `baseline_suite` against the delta version.
pub fn select(
    baseline_suite: &TestSuite,
    baseline_tree: &SchemaTree,
    delta_tree: &SchemaTree,
    changes: &[ChangeRecord],
    config: &BvaConfig,
) -> Result<ClassificationResult> {
    let ids: Vec<&str> = baseline_suite.ids().collect();
    let all_ids = || ids.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let baseline_c = extract_constraints(baseline_tree)?;
    for tc in baseline_suite.cases() {
        check_fields(tc, &baseline_c)?;
    }

    if changes.is_empty() {
        return ClassificationResult::new(ids.iter().copied(), all_ids(), Vec::new(), Vec::new());
    }

    let delta_c = extract_constraints(delta_tree)?;
    let all_obsolete = |frames| ClassificationResult::new(ids.iter().copied(), Vec::new(), all_ids(), frames);

    let root_or_type_deleted = changes
        .iter()
        .any(|c| c.kind == ChangeKind::NodeDeleted && (c.path == "1" || c.path == "2"));
    if root_or_type_deleted {
        return all_obsolete(frames_over(delta_c, config)?);
    }

    let incompatible: BTreeSet<&str> = delta_c
        .iter()
        .filter(|new| {
            baseline_c
                .iter()
                .find(|old| old.field_name == new.field_name)
                .is_some_and(|old| !type_compatible(old, new).compatible)
        })
        .map(|c| c.field_name.as_str())
        .collect();
    if !incompatible.is_empty() {
        let usable = delta_c
            .iter()
            .filter(|c| !incompatible.contains(c.field_name.as_str()))
            .cloned();
        return all_obsolete(frames_over(usable, config)?);
    }

    let field_set =
        |cs: &[ValueConstraint]| -> BTreeSet<String> { cs.iter().map(|c| c.field_name.clone()).collect() };
    if field_set(&baseline_c) != field_set(&delta_c) {
        return all_obsolete(frames_over(delta_c, config)?);
    }

    let (reusable, obsolete) = partition_suite(baseline_suite.cases(), &delta_c)?;

    let frames = frames_over(delta_c.iter().cloned(), config)?;
    let reusable_ids: BTreeSet<&str> = reusable.iter().map(String::as_str).collect();
    let covered: BTreeSet<Frame> = baseline_suite
        .cases()
        .iter()
        .filter(|tc| reusable_ids.contains(tc.id.as_str()))
        .filter_map(|tc| canonical_frame(tc, &delta_c))
        .collect();
    let recommended = frames.into_iter().filter(|f| !covered.contains(f)).collect();

    ClassificationResult::new(ids.iter().copied(), reusable, obsolete, recommended)
}

fn canonical_frame(tc: &TestCase, constraints: &[ValueConstraint]) -> Option<Frame> {
    constraints
        .iter()
        .filter(|c| c.is_bounded_numeric())
        .map(|c| {
            let class: TypeClass = c.type_class();
            let v = tc.values.get(&c.field_name)?.coerce(class)?;
            Some((c.field_name.clone(), v))
        })
        .collect()
}

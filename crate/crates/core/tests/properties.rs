mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rust_decimal::Decimal;

use common::*;
use wsreg_core::model::Scalar;
use wsreg_core::{
    boundary_values, build_tree, classify_change_impact, compare_trees, extract_constraints, generate_suite,
    is_valid, load_wsdl, path_of, select, BvaConfig, ChangeImpact, ChangeKind, NominalStrategy, SchemaTree,
    TestSuite, ValueConstraint,
};

fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn suite_for(tree: &SchemaTree) -> TestSuite {
    let c = extract_constraints(tree).unwrap();
    generate_suite(&c, &BvaConfig::default(), tree.element_name()).unwrap()
}

/// Independent validity check straight from the delta tree's attribute text.
fn oracle_valid(delta: &SchemaTree, values: &wsreg_core::model::Frame) -> bool {
    delta.sub_elements().iter().all(|node| {
        let name = node.name_value().unwrap();
        let v = match &values[name] {
            Scalar::Int(v) => *v,
            _ => return false,
        };
        let bound = |facet: &str| {
            node.attribute(facet)
                .and_then(|a| a.value.as_deref())
                .map(|s| s.parse::<i64>().unwrap())
        };
        bound("minInclusive").is_none_or(|m| m <= v) && bound("maxInclusive").is_none_or(|m| v <= m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compare_identity(seed in any::<u64>(), fields in 0usize..6) {
        let tree = random_int_tree(&mut seeded(seed), fields).build();
        prop_assert!(compare_trees(&tree, &tree).is_empty());
    }

    #[test]
    fn single_mutation_is_detected_exactly(seed in any::<u64>(), fields in 1usize..5) {
        let mut rng = seeded(seed);
        let spec = random_int_tree(&mut rng, fields);
        let m = random_mutation(&mut rng, &spec);
        let (mutated, expected) = apply_mutation(&spec, &m);
        let got = compare_trees(&spec.build(), &mutated.build());
        prop_assert_eq!(got, expected, "mutation {:?}", m);
    }

    #[test]
    fn emitted_paths_resolve(seed in any::<u64>(), fields in 1usize..5, steps in 1usize..4) {
        let mut rng = seeded(seed);
        let spec = random_int_tree(&mut rng, fields);
        let mut delta = spec.clone();
        for _ in 0..steps {
            if delta.subs.is_empty() { break; }
            let m = random_mutation(&mut rng, &delta);
            delta = apply_mutation(&delta, &m).0;
        }
        let (b, d) = (spec.build(), delta.build());
        for record in compare_trees(&b, &d) {
            let tree = if record.kind.addressed_in_delta() { &d } else { &b };
            let resolved = tree.resolve(&record.path);
            prop_assert!(resolved.is_some(), "unresolvable {:?}", record);
            let (_, attr) = resolved.unwrap();
            prop_assert_eq!(attr.is_none(), record.kind.is_node_change());
        }
    }

    #[test]
    fn add_delete_symmetry(seed in any::<u64>(), fields in 1usize..5) {
        let mut rng = seeded(seed);
        let a = random_int_tree(&mut rng, fields);
        let pos = rng.gen_range(0..=fields);
        let (b, _) = apply_mutation(&a, &Mutation::AddSub(pos, "Extra".into()));
        let (ta, tb) = (a.build(), b.build());
        let added: Vec<_> = compare_trees(&ta, &tb).into_iter()
            .filter(|r| r.kind == ChangeKind::NodeAdded).map(|r| r.new_value).collect();
        let deleted: Vec<_> = compare_trees(&tb, &ta).into_iter()
            .filter(|r| r.kind == ChangeKind::NodeDeleted).map(|r| r.old_value).collect();
        prop_assert_eq!(added, deleted);
    }

    #[test]
    fn reusable_set_matches_validity_oracle(seed in any::<u64>(), fields in 1usize..5) {
        let mut rng = seeded(seed);
        let spec = random_int_tree(&mut rng, fields);
        let delta_spec = random_facet_mutation(&mut rng, &spec);
        let (b, d) = (spec.build(), delta_spec.build());
        let changes = compare_trees(&b, &d);
        let impact = classify_change_impact(&changes, &b, &d);
        prop_assert!(matches!(impact, ChangeImpact::FacetOnly | ChangeImpact::NoImpact));
        let suite = suite_for(&b);
        let result = select(&suite, &b, &d, &changes, &BvaConfig::default()).unwrap();
        let oracle: Vec<&str> = suite.cases().iter()
            .filter(|tc| oracle_valid(&d, &tc.values)).map(|tc| tc.id.as_str()).collect();
        prop_assert_eq!(result.reusable().iter().map(String::as_str).collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn widening_never_shrinks_reusable(seed in any::<u64>(), fields in 1usize..4, widen in 0i64..20) {
        let mut rng = seeded(seed);
        let spec = random_int_tree(&mut rng, fields);
        let narrow = random_facet_mutation(&mut rng, &spec);
        let mut wide = narrow.clone();
        for sub in &mut wide.subs {
            for (name, value) in sub.iter_mut() {
                let v: i64 = value.as_ref().and_then(|v| v.parse().ok()).unwrap_or(0);
                match name.as_str() {
                    "minInclusive" => *value = Some((v - widen).to_string()),
                    "maxInclusive" => *value = Some((v + widen).to_string()),
                    _ => {}
                }
            }
        }
        let b = spec.build();
        let suite = suite_for(&b);
        let reusable = |delta: &TreeSpec| -> BTreeSet<String> {
            let d = delta.build();
            let changes = compare_trees(&b, &d);
            select(&suite, &b, &d, &changes, &BvaConfig::default()).unwrap().reusable().iter().cloned().collect()
        };
        prop_assert!(reusable(&narrow).is_subset(&reusable(&wide)));
    }

    #[test]
    fn empty_change_list_keeps_everything(seed in any::<u64>(), fields in 1usize..4, nominal in any::<bool>()) {
        let mut rng = seeded(seed);
        let spec = random_int_tree(&mut rng, fields);
        let b = spec.build();
        let suite = suite_for(&b);
        let cfg = if nominal {
            BvaConfig { float_epsilon: Decimal::new(5, 1), ..BvaConfig::default() }
        } else {
            BvaConfig::default()
        };
        let result = select(&suite, &b, &b, &[], &cfg).unwrap();
        prop_assert_eq!(result.reusable().len(), suite.len());
        prop_assert!(result.obsolete().is_empty());
        prop_assert!(result.recommended_new().is_empty());
    }

    #[test]
    fn recommended_frames_satisfy_delta(seed in any::<u64>(), fields in 1usize..4) {
        let mut rng = seeded(seed);
        let spec = random_int_tree(&mut rng, fields);
        let delta_spec = random_facet_mutation(&mut rng, &spec);
        let (b, d) = (spec.build(), delta_spec.build());
        let changes = compare_trees(&b, &d);
        let result = select(&suite_for(&b), &b, &d, &changes, &BvaConfig::default()).unwrap();
        let dc: Vec<ValueConstraint> = extract_constraints(&d).unwrap()
            .into_iter().filter(ValueConstraint::is_bounded_numeric).collect();
        for frame in result.recommended_new() {
            let tc = wsreg_core::TestCase::new("new", frame.clone());
            prop_assert!(is_valid(&tc, &dc).unwrap());
        }
    }

    #[test]
    fn boundary_lists_are_distinct_and_in_range(min in -1000i64..1000, width in 0i64..50, explicit in any::<bool>()) {
        let c = ValueConstraint::int_range("X", min, min + width).unwrap();
        let cfg = if explicit && width >= 2 {
            BvaConfig::new(NominalStrategy::explicit([("X", min + 1 + width / 3)]))
        } else {
            BvaConfig::default()
        };
        let values = boundary_values(&c, &cfg).unwrap();
        let distinct: BTreeSet<_> = values.iter().collect();
        prop_assert_eq!(distinct.len(), values.len());
        for v in &values {
            let Scalar::Int(v) = v else { panic!("int field gave {v:?}") };
            prop_assert!(min <= *v && *v <= min + width);
        }
        if width >= 4 && cfg.strategy == NominalStrategy::FloorMidpoint {
            prop_assert_eq!(values.len(), 5);
        }
    }

    #[test]
    fn suite_size_is_product_and_cases_are_valid(seed in any::<u64>(), fields in 1usize..4) {
        let b = random_int_tree(&mut seeded(seed), fields).build();
        let c = extract_constraints(&b).unwrap();
        let cfg = BvaConfig::default();
        let expected: usize = c.iter().map(|c| boundary_values(c, &cfg).unwrap().len()).product();
        let suite = generate_suite(&c, &cfg, "Op").unwrap();
        prop_assert_eq!(suite.len(), expected);
        for tc in suite.cases() {
            prop_assert!(is_valid(tc, &c).unwrap());
        }
        let again = generate_suite(&c, &cfg, "Op").unwrap();
        prop_assert_eq!(serde_json::to_string(&suite).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn tree_and_suite_json_round_trip(seed in any::<u64>(), fields in 0usize..5) {
        let b = random_int_tree(&mut seeded(seed), fields).build();
        let back: SchemaTree = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        prop_assert_eq!(&back, &b);
        if fields > 0 {
            let suite = suite_for(&b);
            let back: TestSuite = serde_json::from_str(&serde_json::to_string(&suite).unwrap()).unwrap();
            prop_assert_eq!(back, suite);
        }
    }

    #[test]
    fn parsed_tree_mirrors_source_text(seed in any::<u64>(), fields in 0usize..5) {
        let spec = random_int_tree(&mut seeded(seed), fields);
        let doc = load_wsdl(&spec.to_xsd(), "gen.xsd").unwrap();
        let tree = build_tree(&doc.schemas[0]).unwrap();
        prop_assert_eq!(tree.nodes().len(), 2 + fields);
        prop_assert_eq!(&tree, &spec.build());
        let constraints = extract_constraints(&tree).unwrap();
        for (c, node) in constraints.iter().zip(tree.sub_elements()) {
            prop_assert_eq!(c.min_inclusive.is_some(), node.attribute("minInclusive").is_some());
            prop_assert_eq!(c.max_inclusive.is_some(), node.attribute("maxInclusive").is_some());
        }
    }

    #[test]
    fn facet_free_fields_get_no_bounds(seed in any::<u64>(), fields in 1usize..5) {
        let mut spec = random_int_tree(&mut seeded(seed), fields);
        for sub in &mut spec.subs {
            sub.retain(|(n, _)| n != "minInclusive");
        }
        let doc = load_wsdl(&spec.to_xsd(), "gen.xsd").unwrap();
        let tree = build_tree(&doc.schemas[0]).unwrap();
        prop_assert!(extract_constraints(&tree).unwrap().iter().all(|c| c.min_inclusive.is_none() && c.max_inclusive.is_some()));
    }

    #[test]
    fn distinct_addresses_render_distinct_paths(a in 1u32..500, b in proptest::option::of(1u32..500), c in 1u32..500, d in proptest::option::of(1u32..500)) {
        prop_assume!((a, b) != (c, d));
        prop_assert_ne!(path_of(a, b), path_of(c, d));
    }
}

//! Generative round-trip and skip-safety checks for the wire codec.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use schemafirst::codec::{decode, decode_with_schema, encode, RecordValue, Value};
use schemafirst::model::{
    fingerprint, BaseKind, CompositeDef, EnumDef, EnumEntry, FieldDef, ResolvedSchema, RichType,
    TypeDef, TypeRef,
};

const ROOT: &str = "gen.Root";

fn aux_types() -> BTreeMap<String, TypeDef> {
    let mut types = BTreeMap::new();
    types.insert(
        "gen.Color".to_string(),
        TypeDef::Enum(EnumDef {
            fqn: "gen.Color".into(),
            entries: vec![
                EnumEntry { name: "RED".into(), value: 1 },
                EnumEntry { name: "GREEN".into(), value: 2 },
                EnumEntry { name: "BLUE".into(), value: 5 },
            ],
            display_name: None,
            description: None,
            extras: vec![],
        }),
    );
    types.insert(
        "gen.Tag".to_string(),
        TypeDef::Rich(RichType {
            fqn: "gen.Tag".into(),
            base: TypeRef::Text,
            display_name: None,
            description: None,
            semantic_type: None,
            unit: None,
            validate_regex: None,
            conversions: vec![],
            allowed_ops: vec![],
            extras: vec![],
        }),
    );
    types.insert(
        "gen.Inner".to_string(),
        TypeDef::Composite(CompositeDef {
            fqn: "gen.Inner".into(),
            fields: vec![
                field(1, "name", TypeRef::Text, false),
                field(2, "n", TypeRef::I64, true),
            ],
            display_name: None,
            description: None,
            semantic_qualifier: false,
            extras: vec![],
        }),
    );
    types
}

fn field(id: i32, name: &str, ty: TypeRef, optional: bool) -> FieldDef {
    FieldDef {
        id,
        name: name.to_string(),
        ty,
        optional,
        display_name: None,
        description: None,
        semantic_type: None,
        qualifiers: vec![],
        privacy: None,
        measurement: false,
        origin: "gen.Inner".into(),
    extras: vec![],
    }
}

fn make_schema(fields: &BTreeMap<i32, (TypeRef, bool)>) -> Arc<ResolvedSchema> {
    let mut types = aux_types();
    let root_fields: Vec<FieldDef> = fields
        .iter()
        .map(|(id, (ty, optional))| {
            let mut f = field(*id, &format!("f{id}"), ty.clone(), *optional);
            f.origin = ROOT.to_string();
            f
        })
        .collect();
    types.insert(
        ROOT.to_string(),
        TypeDef::Composite(CompositeDef {
            fqn: ROOT.into(),
            fields: root_fields,
            display_name: None,
            description: None,
            semantic_qualifier: false,
            extras: vec![],
        }),
    );
    let (fs, fsem) = fingerprint(ROOT, &types);
    Arc::new(ResolvedSchema {
        root: ROOT.into(),
        types,
        fingerprint_structural: fs,
        fingerprint_semantic: fsem,
        lints: vec![],
    })
}

fn type_strategy() -> impl Strategy<Value = TypeRef> {
    let leaf = prop_oneof![
        Just(TypeRef::Bool),
        Just(TypeRef::I32),
        Just(TypeRef::I64),
        Just(TypeRef::Double),
        Just(TypeRef::Text),
        Just(TypeRef::Binary),
        Just(TypeRef::Named("gen.Color".into())),
        Just(TypeRef::Named("gen.Inner".into())),
        Just(TypeRef::Named("gen.Tag".into())),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| TypeRef::List(Box::new(t))),
            (inner.clone(), inner).prop_map(|(k, v)| TypeRef::Map(Box::new(k), Box::new(v))),
        ]
    })
}

fn value_strategy(schema: Arc<ResolvedSchema>, kind: BaseKind) -> BoxedStrategy<Value> {
    match kind {
        BaseKind::Bool => any::<bool>().prop_map(Value::Bool).boxed(),
        BaseKind::I32 => any::<i32>().prop_map(Value::I32).boxed(),
        BaseKind::I64 => any::<i64>().prop_map(Value::I64).boxed(),
        BaseKind::Double => any::<f64>().prop_map(Value::Double).boxed(),
        BaseKind::Text => ".{0,8}".prop_map(Value::Text).boxed(),
        BaseKind::Binary => proptest::collection::vec(any::<u8>(), 0..12)
            .prop_map(Value::Bytes)
            .boxed(),
        BaseKind::Enum(fqn) => {
            let entries: Vec<i32> = schema
                .enum_def(&fqn)
                .expect("generator only emits declared enums")
                .entries
                .iter()
                .map(|e| e.value)
                .collect();
            proptest::sample::select(entries)
                .prop_map(move |value| Value::Enum { fqn: fqn.clone(), value })
                .boxed()
        }
        BaseKind::Record(fqn) => record_strategy(schema, fqn).prop_map(Value::Record).boxed(),
        BaseKind::List(elem) => {
            proptest::collection::vec(value_strategy(schema, *elem), 0..4)
                .prop_map(Value::List)
                .boxed()
        }
        BaseKind::Map(k, v) => proptest::collection::vec(
            (value_strategy(schema.clone(), *k), value_strategy(schema, *v)),
            0..4,
        )
        .prop_map(Value::Map)
        .boxed(),
    }
}

fn record_strategy(schema: Arc<ResolvedSchema>, fqn: String) -> BoxedStrategy<RecordValue> {
    let composite = schema.composite(&fqn).expect("generator only emits declared structs");
    let mut acc: BoxedStrategy<Vec<(i32, Value)>> = Just(Vec::new()).boxed();
    for f in composite.fields.clone() {
        let vs = value_strategy(schema.clone(), schema.base_kind(&f.ty));
        let staged: BoxedStrategy<Option<(i32, Value)>> = if f.optional {
            proptest::option::of(vs.prop_map(move |v| (f.id, v))).boxed()
        } else {
            vs.prop_map(move |v| Some((f.id, v))).boxed()
        };
        acc = (acc, staged)
            .prop_map(|(mut fields, staged)| {
                fields.extend(staged);
                fields
            })
            .boxed();
    }
    acc.prop_map(move |fields| RecordValue { type_fqn: fqn.clone(), fields }).boxed()
}

fn schema_and_record() -> impl Strategy<Value = (Arc<ResolvedSchema>, RecordValue)> {
    proptest::collection::btree_map(1i32..50, (type_strategy(), any::<bool>()), 1..6)
        .prop_map(|fields| make_schema(&fields))
        .prop_flat_map(|schema| {
            let records = record_strategy(schema.clone(), ROOT.to_string());
            (Just(schema), records)
        })
}

proptest! {
    // 1024 generated (schema, record) pairs per property run.
    #![proptest_config(ProptestConfig::with_cases(1024))]

    #[test]
    fn round_trip((schema, record) in schema_and_record()) {
        let payload = encode(&record, &schema, 7).unwrap();
        let decoded = decode(&payload, schema.as_ref()).unwrap();
        // Encoding is canonical (sorted by id), so compare as sorted sets.
        let mut want = record.clone();
        want.fields.sort_by_key(|(id, _)| *id);
        prop_assert_eq!(decoded.record, want);
        prop_assert_eq!(decoded.version, 7);
        prop_assert!(decoded.skipped_ids.is_empty());
    }

    #[test]
    fn encoding_is_deterministic_under_field_permutation((schema, record) in schema_and_record()) {
        let mut reversed = record.clone();
        reversed.fields.reverse();
        prop_assert_eq!(
            encode(&record, &schema, 1).unwrap(),
            encode(&reversed, &schema, 1).unwrap()
        );
    }

    #[test]
    fn skip_safety((schema, record, keep_mask) in schema_and_record()
        .prop_flat_map(|(schema, record)| {
            let n = schema.root_composite().fields.len();
            (Just(schema), Just(record), proptest::collection::vec(any::<bool>(), n))
        }))
    {
        // S1 drops a subset of the root's fields; decoding an S2 payload
        // with S1 must lose exactly the dropped ids and nothing else.
        let full = schema.root_composite().fields.clone();
        let kept: Vec<FieldDef> =
            full.iter().zip(&keep_mask).filter(|(_, k)| **k).map(|(f, _)| f.clone()).collect();
        let mut sub_types = schema.types.clone();
        sub_types.insert(
            ROOT.to_string(),
            TypeDef::Composite(CompositeDef {
                fqn: ROOT.into(),
                fields: kept.clone(),
                display_name: None,
                description: None,
                semantic_qualifier: false,
                extras: vec![],
            }),
        );
        let (fs, fsem) = fingerprint(ROOT, &sub_types);
        let narrow = ResolvedSchema {
            root: ROOT.into(),
            types: sub_types,
            fingerprint_structural: fs,
            fingerprint_semantic: fsem,
            lints: vec![],
        };

        let payload = encode(&record, &schema, 2).unwrap();
        let decoded = decode_with_schema(&payload, &narrow).unwrap();

        let kept_ids: Vec<i32> = kept.iter().map(|f| f.id).collect();
        let mut expected_skips: Vec<i32> = record
            .fields
            .iter()
            .map(|(id, _)| *id)
            .filter(|id| !kept_ids.contains(id))
            .collect();
        expected_skips.sort_unstable();
        // Canonical payload order is ascending by id, so skips arrive sorted.
        prop_assert_eq!(decoded.skipped_ids, expected_skips);

        let mut expected_fields: Vec<(i32, Value)> = record
            .fields
            .iter()
            .filter(|(id, _)| kept_ids.contains(id))
            .cloned()
            .collect();
        expected_fields.sort_by_key(|(id, _)| *id);
        prop_assert_eq!(decoded.record.fields, expected_fields);
    }

    #[test]
    fn zigzag_self_test(n32 in any::<i32>(), n64 in any::<i64>()) {
        use schemafirst::codec::{unzigzag32, unzigzag64, zigzag32, zigzag64};
        prop_assert_eq!(unzigzag32(zigzag32(n32)), n32);
        prop_assert_eq!(unzigzag64(zigzag64(n64)), n64);
    }
}

use serde_json::json;

use super::*;
use crate::idl::parse;
use crate::model::{resolve, ResolvedSchema};

fn schema(src: &str, root: &str) -> ResolvedSchema {
    resolve(&[parse(src, "test.tsch").unwrap()], root).unwrap()
}

fn request_counter() -> ResolvedSchema {
    let path = format!("{}/testdata/listing2.tsch", env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(path).unwrap();
    resolve(&[parse(&src, "listing2.tsch").unwrap()], "observability.RequestCounter").unwrap()
}

/// The counter record the emitting code builds, one value per dimension.
fn counter_record() -> RecordValue {
    RecordValue::new("observability.RequestCounter")
        .with(1, "foo")
        .with(2, "bar")
        .with(3, 200i32)
        .with(4, "baz")
}

#[test]
fn golden_payload_matches_hand_derived_bytes() {
    let schema = request_counter();
    let payload = encode(&counter_record(), &schema, 2).unwrap();
    let golden_path = format!("{}/testdata/listing3_payload.hex", env!("CARGO_MANIFEST_DIR"));
    let golden = std::fs::read_to_string(golden_path).unwrap();
    assert_eq!(hex::encode(&payload), golden.trim());
}

#[test]
fn golden_payload_decodes_back() {
    let schema = request_counter();
    let golden_path = format!("{}/testdata/listing3_payload.hex", env!("CARGO_MANIFEST_DIR"));
    let bytes = hex::decode(std::fs::read_to_string(golden_path).unwrap().trim()).unwrap();
    let decoded = decode(&bytes, &schema).unwrap();
    assert_eq!(decoded.record, counter_record());
    assert_eq!(decoded.asset, "observability.RequestCounter");
    assert_eq!(decoded.version, 2);
    assert!(decoded.skipped_ids.is_empty());
}

#[test]
fn field_order_does_not_change_bytes() {
    let schema = request_counter();
    let shuffled = RecordValue::new("observability.RequestCounter")
        .with(3, 200i32)
        .with(1, "foo")
        .with(4, "baz")
        .with(2, "bar");
    assert_eq!(
        encode(&counter_record(), &schema, 2).unwrap(),
        encode(&shuffled, &schema, 2).unwrap()
    );
}

#[test]
fn all_optional_empty_record_is_header_only() {
    let s = schema("namespace x\nstruct S { 1: optional string a 2: optional i32 b }", "x.S");
    let payload = encode(&RecordValue::new("x.S"), &s, 1).unwrap();
    // magic + format + name length + name + version, zero body bytes.
    assert_eq!(payload.len(), 3 + 1 + "x.S".len() + 1);
    let decoded = decode(&payload, &s).unwrap();
    assert!(decoded.record.fields.is_empty());
}

#[test]
fn wrong_value_type_rejected() {
    let schema = request_counter();
    let record = RecordValue::new("observability.RequestCounter")
        .with(1, "foo")
        .with(2, "bar")
        .with(3, "200") // status_code is i32
        .with(4, "baz");
    assert!(matches!(
        encode(&record, &schema, 2).unwrap_err(),
        EncodeError::TypeMismatch { .. }
    ));
}

#[test]
fn missing_required_field_rejected() {
    let schema = request_counter();
    let record = RecordValue::new("observability.RequestCounter").with(1, "foo");
    assert!(matches!(
        encode(&record, &schema, 2).unwrap_err(),
        EncodeError::MissingRequiredField { field, .. } if field == "endpoint"
    ));
}

#[test]
fn undeclared_field_id_rejected() {
    let schema = request_counter();
    let record = counter_record().with(9, "extra");
    assert!(encode(&record, &schema, 2).is_err());
}

#[test]
fn bad_magic() {
    let schema = request_counter();
    assert!(matches!(decode(&[0x00, 0x00, 0x01], &schema), Err(DecodeError::BadMagic)));
}

#[test]
fn truncated_payloads_never_misdecode() {
    let schema = request_counter();
    let payload = encode(&counter_record(), &schema, 2).unwrap();
    let full = decode(&payload, &schema).unwrap();
    // The body runs to the end of the payload, so a cut landing exactly on
    // a field boundary looks like a shorter record; any other cut must fail
    // cleanly. Either way no value may be misread.
    for cut in 0..payload.len() {
        match decode(&payload[..cut], &schema) {
            Err(_) => {}
            Ok(partial) => {
                assert!(partial.record.fields.len() < full.record.fields.len());
                for (id, value) in &partial.record.fields {
                    assert_eq!(full.record.get(*id), Some(value), "misread field {id}");
                }
            }
        }
    }
}

#[test]
fn truncated_mid_value_is_an_error() {
    let schema = request_counter();
    let payload = encode(&counter_record(), &schema, 2).unwrap();
    // One byte short of a full field always fails.
    assert!(decode(&payload[..payload.len() - 1], &schema).is_err());
}

#[test]
fn newer_payload_decodes_under_older_schema_with_skips() {
    let v2 = request_counter();
    let v1_path = format!("{}/testdata/listing2_v1.tsch", env!("CARGO_MANIFEST_DIR"));
    let v1_src = std::fs::read_to_string(v1_path).unwrap();
    let v1 = resolve(
        &[parse(&v1_src, "listing2_v1.tsch").unwrap()],
        "observability.RequestCounter",
    )
    .unwrap();

    let payload = encode(&counter_record(), &v2, 2).unwrap();
    let decoded = decode_with_schema(&payload, &v1).unwrap();
    assert_eq!(decoded.skipped_ids, vec![4]);
    assert_eq!(decoded.version, 2, "header version is reported as written");
    assert_eq!(decoded.record.get(3), Some(&Value::I32(200)));
    assert_eq!(decoded.record.get(4), None);
}

#[test]
fn containers_round_trip() {
    let s = schema(
        "namespace x\nstruct Inner { 1: string name }\nstruct S { 1: list<i64> xs 2: map<string, double> m 3: Inner inner 4: list<Inner> more 5: binary blob 6: bool flag }",
        "x.S",
    );
    let record = RecordValue::new("x.S")
        .with(1, Value::List(vec![Value::I64(-5), Value::I64(0), Value::I64(i64::MAX)]))
        .with(
            2,
            Value::Map(vec![
                (Value::Text("pi".into()), Value::Double(3.25)),
                (Value::Text("e".into()), Value::Double(-2.5)),
            ]),
        )
        .with(3, RecordValue::new("x.Inner").with(1, "nested"))
        .with(
            4,
            Value::List(vec![
                Value::Record(RecordValue::new("x.Inner").with(1, "a")),
                Value::Record(RecordValue::new("x.Inner").with(1, "b")),
            ]),
        )
        .with(5, vec![0u8, 255, 7])
        .with(6, true);
    let payload = encode(&record, &s, 1).unwrap();
    let decoded = decode(&payload, &s).unwrap();
    assert_eq!(decoded.record, record);
}

#[test]
fn enum_round_trip_and_range() {
    let s = schema(
        "namespace m\nenum Actor { SOURCE = 1, TARGET = 2 }\nstruct S { 1: Actor who }",
        "m.S",
    );
    let ok = RecordValue::new("m.S").with(1, Value::Enum { fqn: "m.Actor".into(), value: 2 });
    let decoded = decode(&encode(&ok, &s, 1).unwrap(), &s).unwrap();
    assert_eq!(decoded.record, ok);

    let out_of_range =
        RecordValue::new("m.S").with(1, Value::Enum { fqn: "m.Actor".into(), value: 3 });
    assert!(matches!(
        encode(&out_of_range, &s, 1).unwrap_err(),
        EncodeError::ValidationFailure { .. }
    ));
}

#[test]
fn validate_regex_at_encode() {
    let s = schema(
        "namespace x\n@Validate{regex=\"^[a-z]+$\"}\ntypedef string Tag\nstruct S { 1: Tag t }",
        "x.S",
    );
    assert!(encode(&RecordValue::new("x.S").with(1, "abc"), &s, 1).is_ok());
    assert!(matches!(
        encode(&RecordValue::new("x.S").with(1, "ABC"), &s, 1).unwrap_err(),
        EncodeError::ValidationFailure { .. }
    ));
}

#[test]
fn validate_value_reports_violations_without_failing() {
    let s = schema(
        "namespace x\n@Validate{regex=\"^[a-z]+$\"}\ntypedef string Tag\nenum E { A = 1, B = 2 }\n@Unit{\"ms\"}\ntypedef double Millis\nstruct S { 1: optional Tag t 2: optional E e 3: optional Millis d }",
        "x.S",
    );
    let clean = RecordValue::new("x.S")
        .with(1, "abc")
        .with(2, Value::Enum { fqn: "x.E".into(), value: 1 })
        .with(3, 1.5f64);
    assert!(validate_value(&clean, &s).is_empty());

    let dirty = RecordValue::new("x.S")
        .with(1, "ABC")
        .with(2, Value::Enum { fqn: "x.E".into(), value: 3 })
        .with(3, f64::INFINITY);
    let violations = validate_value(&dirty, &s);
    assert_eq!(violations.len(), 3, "{violations:?}");
    assert!(violations.iter().any(|v| v.path == "x.S.t" && v.rule.starts_with("regex")));
    assert!(violations.iter().any(|v| v.path == "x.S.e" && v.rule.starts_with("enum")));
    assert!(violations.iter().any(|v| v.rule == "finite-measurement"));
}

#[test]
fn invalid_utf8_in_text_rejected() {
    let s = schema("namespace x\nstruct S { 1: string t }", "x.S");
    let mut payload = encode(&RecordValue::new("x.S").with(1, "ok"), &s, 1).unwrap();
    // Corrupt the text bytes ("ok" sits at the end).
    let n = payload.len();
    payload[n - 2] = 0xff;
    payload[n - 1] = 0xfe;
    assert!(matches!(decode(&payload, &s), Err(DecodeError::WireTypeMismatch { .. })));
}

#[test]
fn wire_type_clash_detected() {
    let text = schema("namespace x\nstruct S { 1: string f }", "x.S");
    let number = schema("namespace x\nstruct S { 1: i32 f }", "x.S");
    let payload = encode(&RecordValue::new("x.S").with(1, "abc"), &text, 1).unwrap();
    assert!(matches!(
        decode_with_schema(&payload, &number),
        Err(DecodeError::WireTypeMismatch { .. })
    ));
}

#[test]
fn unknown_asset_vs_explicit_schema() {
    let s = schema("namespace x\nstruct S { 1: string f }", "x.S");
    let other = schema("namespace y\nstruct T { 1: string f }", "y.T");
    let payload = encode(&RecordValue::new("x.S").with(1, "v"), &s, 1).unwrap();
    assert!(matches!(
        decode_with_schema(&payload, &other),
        Err(DecodeError::UnknownAsset(a)) if a == "x.S"
    ));
}

#[test]
fn json_round_trip_with_symbolic_enums() {
    let s = schema(
        "namespace m\nenum Actor { SOURCE = 1, TARGET = 2 }\nstruct S { 1: Actor who 2: binary blob 3: list<string> tags }",
        "m.S",
    );
    let record = RecordValue::new("m.S")
        .with(1, Value::Enum { fqn: "m.Actor".into(), value: 1 })
        .with(2, vec![0xabu8, 0xcd])
        .with(3, Value::List(vec![Value::Text("x".into())]));
    let rendered = record_to_json(&record, &s);
    assert_eq!(rendered, json!({"who": "SOURCE", "blob": "abcd", "tags": ["x"]}));
    let back = record_from_json(rendered.as_object().unwrap(), &s, "m.S").unwrap();
    assert_eq!(back, record);
}

#[test]
fn json_unknown_field_rejected() {
    let s = schema("namespace x\nstruct S { 1: string f }", "x.S");
    let obj = json!({"nope": 1});
    assert!(matches!(
        record_from_json(obj.as_object().unwrap(), &s, "x.S").unwrap_err(),
        EncodeError::UnknownField { field, .. } if field == "nope"
    ));
}

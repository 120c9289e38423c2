//! JSON reports: builders for each subcommand's machine-readable output and
//! a structural validator for the shipped schema.
//!
//! Every report carries `schema_version`; the schema document itself ships
//! with the binary (see [`REPORT_SCHEMA`]) so downstream consumers can pin
//! the shape they parse, and the test suite validates every emitted report
//! against it.

use coursealloc::{
    matching_size, ConditionReport, EnumerationReport, Instance, Matching, StabilityNotion,
};
use serde_json::{json, Map, Value};

/// Version stamped into every report and asserted by the schema.
pub const SCHEMA_VERSION: u64 = 1;

/// The schema document describing every report shape, as shipped.
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

fn matching_value(inst: &Instance, m: &Matching) -> Value {
    Value::Array(
        m.pairs()
            .iter()
            .map(|&(s, c)| json!([inst.students[s.0].label, inst.courses[c.0].label]))
            .collect(),
    )
}

pub fn verify_report(
    inst: &Instance,
    notion: StabilityNotion,
    mode: &str,
    witness: Option<(&coursealloc::BlockingWitness, &[ConditionReport])>,
) -> Value {
    let (witness_value, conditions_value) = match witness {
        None => (Value::Null, Value::Null),
        Some((w, conds)) => (
            json!({
                "student": inst.students[w.student.0].label,
                "coalition": w.coalition.iter().map(|&c| &inst.courses[c.0].label).collect::<Vec<_>>(),
                "drop": w.drop_set.iter().map(|&c| &inst.courses[c.0].label).collect::<Vec<_>>(),
                "notion": w.notion.to_string(),
            }),
            Value::Array(
                conds
                    .iter()
                    .map(|c| json!({"index": c.index, "description": c.description, "holds": c.holds}))
                    .collect(),
            ),
        ),
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "verify",
        "notion": notion.to_string(),
        "mode": mode,
        "verdict": if witness_value.is_null() { "stable" } else { "unstable" },
        "witness": witness_value,
        "conditions": conditions_value,
    })
}

pub fn solve_report(inst: &Instance, alg: &str, m: &Matching) -> Value {
    let size = matching_size(inst, m);
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "solve",
        "alg": alg,
        "matching": matching_value(inst, m),
        "credits": size.credits,
        "course_complete": size.course_complete,
        "student_complete": size.student_complete,
    })
}

pub fn max_report(
    inst: &Instance,
    notion: StabilityNotion,
    lq: &str,
    result: Option<(&Matching, u64, Option<Vec<String>>)>,
) -> Value {
    let (found, matching, credits, open) = match result {
        None => (false, Value::Null, Value::Null, Value::Null),
        Some((m, size, open)) => (
            true,
            matching_value(inst, m),
            json!(size),
            open.map_or(Value::Null, |labels| json!(labels)),
        ),
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "max",
        "notion": notion.to_string(),
        "lq": lq,
        "found": found,
        "matching": matching,
        "credits": credits,
        "open": open,
    })
}

pub fn oracle_report(report: &EnumerationReport) -> Value {
    let counts: Map<String, Value> = report
        .stable_counts
        .iter()
        .map(|(n, &count)| (n.to_string(), json!(count)))
        .collect();
    let sizes: Map<String, Value> = report
        .max_stable_size
        .iter()
        .map(|(n, size)| (n.to_string(), size.map_or(Value::Null, |s| json!(s))))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "oracle",
        "total_matchings": report.total_matchings,
        "stable_counts": counts,
        "max_stable_size": sizes,
    })
}

pub fn gen_report(seed: u64, instance_file: &str) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "gen",
        "seed": seed,
        "instance_file": instance_file,
    })
}

pub fn reduce_report(from: &str, instance_file: &str) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": "reduce",
        "from": from,
        "instance_file": instance_file,
    })
}

/// Checks a report against the shipped schema document. Returns every
/// violation found (empty means the report conforms).
pub fn validate_report(report: &Value) -> Result<(), Vec<String>> {
    let schema: Value =
        serde_json::from_str(REPORT_SCHEMA).expect("shipped schema document parses");
    let mut errors = Vec::new();
    let Some(kind) = report.get("report").and_then(Value::as_str) else {
        return Err(vec!["report has no string `report` field".into()]);
    };
    match schema["reports"].get(kind) {
        Some(shape) => check(report, shape, kind, &mut errors),
        None => errors.push(format!("unknown report kind {kind:?}")),
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check(value: &Value, schema: &Value, path: &str, errors: &mut Vec<String>) {
    if schema
        .get("nullable")
        .and_then(Value::as_bool)
        .unwrap_or(false)
        && value.is_null()
    {
        return;
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            errors.push(format!("{path}: {value} is not one of {allowed:?}"));
        }
        return;
    }
    match schema.get("type").and_then(Value::as_str) {
        Some("object") => {
            let Some(obj) = value.as_object() else {
                errors.push(format!("{path}: expected an object"));
                return;
            };
            let props = schema.get("properties").and_then(Value::as_object);
            if let Some(required) = schema.get("required").and_then(Value::as_array) {
                for key in required.iter().filter_map(Value::as_str) {
                    if !obj.contains_key(key) {
                        errors.push(format!("{path}: missing required key {key:?}"));
                    }
                }
            }
            for (key, field) in obj {
                match props.and_then(|p| p.get(key)) {
                    Some(sub) => check(field, sub, &format!("{path}.{key}"), errors),
                    None => errors.push(format!("{path}: unexpected key {key:?}")),
                }
            }
        }
        Some("array") => {
            let Some(items) = value.as_array() else {
                errors.push(format!("{path}: expected an array"));
                return;
            };
            if let Some(item_schema) = schema.get("items") {
                for (i, item) in items.iter().enumerate() {
                    check(item, item_schema, &format!("{path}[{i}]"), errors);
                }
            }
        }
        Some("string") => {
            if !value.is_string() {
                errors.push(format!("{path}: expected a string"));
            }
        }
        Some("integer") => {
            if !value.is_u64() && !value.is_i64() {
                errors.push(format!("{path}: expected an integer"));
            }
        }
        Some("boolean") => {
            if !value.is_boolean() {
                errors.push(format!("{path}: expected a boolean"));
            }
        }
        other => errors.push(format!("{path}: schema has unsupported type {other:?}")),
    }
}

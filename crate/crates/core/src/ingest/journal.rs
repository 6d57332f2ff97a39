//! Portable commit journal: one JSON object per line.

use std::collections::HashSet;

use serde_json::{Map, Value};

use super::{CommitRecord, FileChange, IngestError};

fn schema(line: usize, field: &str, message: impl Into<String>) -> IngestError {
    IngestError::Schema {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn get_str(obj: &Map<String, Value>, line: usize, field: &str) -> Result<String, IngestError> {
    match obj.get(field) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(schema(line, field, "expected a string")),
        None => Err(schema(line, field, "missing required field")),
    }
}

fn get_count(obj: &Map<String, Value>, line: usize, field: &str) -> Result<u64, IngestError> {
    match obj.get(field) {
        Some(Value::Number(n)) => {
            if let Some(v) = n.as_u64() {
                Ok(v)
            } else if n.as_i64().is_some_and(|v| v < 0) {
                Err(schema(line, field, "count must be nonnegative"))
            } else {
                Err(schema(line, field, "expected an integer"))
            }
        }
        Some(_) => Err(schema(line, field, "expected an integer")),
        None => Err(schema(line, field, "missing required field")),
    }
}

fn parse_change(value: &Value, line: usize, idx: usize) -> Result<FileChange, IngestError> {
    let field = |name: &str| format!("changes[{idx}].{name}");
    let obj = value
        .as_object()
        .ok_or_else(|| schema(line, &format!("changes[{idx}]"), "expected an object"))?;
    let path = match obj.get("path") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema(line, &field("path"), "expected a string")),
        None => return Err(schema(line, &field("path"), "missing required field")),
    };
    if path.is_empty() || path.starts_with('/') || path.contains('\\') {
        return Err(schema(
            line,
            &field("path"),
            "path must be repository-relative with `/` separators",
        ));
    }
    let count = |name: &str| -> Result<u64, IngestError> {
        get_count(obj, line, name).map_err(|e| match e {
            IngestError::Schema { message, .. } => schema(line, &field(name), message),
            other => other,
        })
    };
    let added = count("added")?;
    let deleted = count("deleted")?;
    let binary = match obj.get("binary") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(schema(line, &field("binary"), "expected a boolean")),
    };
    if binary && (added != 0 || deleted != 0) {
        return Err(schema(
            line,
            &field("binary"),
            "binary changes must have zero line counts",
        ));
    }
    Ok(FileChange {
        path,
        added,
        deleted,
        binary,
    })
}

fn parse_line(text: &str, line: usize) -> Result<CommitRecord, IngestError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IngestError::Parse {
        line,
        message: format!("invalid JSON: {e}"),
    })?;
    let obj = value.as_object().ok_or_else(|| IngestError::Parse {
        line,
        message: "expected a JSON object".into(),
    })?;
    let hash = get_str(obj, line, "hash")?;
    if hash.is_empty() {
        return Err(schema(line, "hash", "must be non-empty"));
    }
    let author = get_str(obj, line, "author")?;
    let timestamp = match obj.get("timestamp") {
        Some(Value::Number(n)) => n
            .as_i64()
            .ok_or_else(|| schema(line, "timestamp", "expected an integer"))?,
        Some(_) => return Err(schema(line, "timestamp", "expected an integer")),
        None => return Err(schema(line, "timestamp", "missing required field")),
    };
    let message = get_str(obj, line, "message")?;
    let changes = match obj.get("changes") {
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| parse_change(v, line, i))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(schema(line, "changes", "expected an array")),
        None => return Err(schema(line, "changes", "missing required field")),
    };
    Ok(CommitRecord {
        hash,
        author,
        timestamp,
        message,
        changes,
    })
}

/// Loads a JSON-lines commit journal. Blank lines are skipped.
pub fn load_commit_journal(text: &str) -> Result<Vec<CommitRecord>, IngestError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let record = parse_line(raw, idx + 1)?;
        if !seen.insert(record.hash.clone()) {
            return Err(schema(idx + 1, "hash", format!("duplicate hash `{}`", record.hash)));
        }
        out.push(record);
    }
    Ok(out)
}

/// Serializes records as a JSON-lines journal (LF-terminated).
pub fn emit_commit_journal(records: &[CommitRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("commit records always serialize"));
        out.push('\n');
    }
    out
}

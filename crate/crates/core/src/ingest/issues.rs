//! Issue-tracker exports (JSON array or `key,kind` CSV).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueKind {
    Bug,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueRecord {
    pub key: String,
    pub kind: IssueKind,
}

/// Issue type names that count as bugs. Matching is case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BugAliases(Vec<String>);

impl BugAliases {
    pub fn new<I, S>(aliases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(aliases.into_iter().map(|s| s.into().to_lowercase()).collect())
    }

    pub fn classify(&self, type_name: &str) -> IssueKind {
        let lower = type_name.trim().to_lowercase();
        if self.0.iter().any(|a| *a == lower) {
            IssueKind::Bug
        } else {
            IssueKind::Other
        }
    }
}

impl Default for BugAliases {
    fn default() -> Self {
        Self::new(["bug", "defect"])
    }
}

#[derive(Deserialize)]
struct JsonIssue {
    key: String,
    #[serde(rename = "type")]
    kind: String,
}

/// Loads an issue export.
///
/// A document whose first non-blank character is `[` is read as a JSON
/// array of `{"key", "type"}` objects; anything else as CSV with a
/// `key,kind` header. Repeated keys with the same kind collapse to one
/// record.
pub fn load_issue_export(doc: &str, aliases: &BugAliases) -> Result<Vec<IssueRecord>, IngestError> {
    let raw: Vec<(String, String)> = if doc.trim_start().starts_with('[') {
        let items: Vec<JsonIssue> =
            serde_json::from_str(doc).map_err(|e| IngestError::Format(e.to_string()))?;
        items.into_iter().map(|i| (i.key, i.kind)).collect()
    } else if doc.trim().is_empty() {
        Vec::new()
    } else {
        read_csv(doc)?
    };

    let mut seen: BTreeMap<String, IssueKind> = BTreeMap::new();
    let mut out = Vec::new();
    for (key, type_name) in raw {
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(IngestError::Format("empty issue key".into()));
        }
        let kind = aliases.classify(&type_name);
        match seen.get(&key) {
            Some(prev) if *prev != kind => return Err(IngestError::ConflictingIssue { key }),
            Some(_) => continue,
            None => {
                seen.insert(key.clone(), kind);
                out.push(IssueRecord { key, kind });
            }
        }
    }
    Ok(out)
}

fn read_csv(doc: &str) -> Result<Vec<(String, String)>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(doc.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Format(e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(k), Some(t)) = (col("key"), col("kind")) else {
        return Err(IngestError::Format("CSV header must contain `key,kind`".into()));
    };
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| IngestError::Format(e.to_string()))?;
        let get = |i: usize| rec.get(i).unwrap_or("").to_string();
        out.push((get(k), get(t)));
    }
    Ok(out)
}

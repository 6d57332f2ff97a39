//! Parser for `git log --no-merges --numstat --pretty=format:%H%x09%ae%x09%at%x09%s`.

use std::fmt::Write as _;

use super::{CommitRecord, FileChange, IngestError};

enum Line<'a> {
    Blank,
    Numstat(FileChange),
    Other(&'a str),
}

fn classify(line: &str) -> Line<'_> {
    if line.trim().is_empty() {
        return Line::Blank;
    }
    let mut parts = line.splitn(3, '\t');
    let (Some(a), Some(d), Some(path)) = (parts.next(), parts.next(), parts.next()) else {
        return Line::Other(line);
    };
    if path.is_empty() {
        return Line::Other(line);
    }
    let path = normalize_path(&rename_target(path));
    match (a, d) {
        ("-", "-") => Line::Numstat(FileChange::binary(path)),
        _ => match (a.parse::<u64>(), d.parse::<u64>()) {
            (Ok(added), Ok(deleted)) if is_digits(a) && is_digits(d) => {
                Line::Numstat(FileChange::text(path, added, deleted))
            }
            _ => Line::Other(line),
        },
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Resolves git's rename notation to the post-rename path.
///
/// `src/{old => new}/a.rs` becomes `src/new/a.rs`; `old.rs => new.rs`
/// becomes `new.rs`.
fn rename_target(path: &str) -> String {
    if let (Some(open), Some(close)) = (path.find('{'), path.rfind('}')) {
        if open < close {
            let inner = &path[open + 1..close];
            if let Some((_, new)) = inner.split_once(" => ") {
                return format!("{}{}{}", &path[..open], new, &path[close + 1..]);
            }
        }
    }
    match path.split_once(" => ") {
        Some((_, new)) => new.to_string(),
        None => path.to_string(),
    }
}

fn normalize_path(path: &str) -> String {
    let replaced = path.replace('\\', "/");
    replaced
        .split('/')
        .filter(|seg| !seg.is_empty())
        .collect::<Vec<_>>()
        .join("/")
}

fn parse_header(line: &str, lineno: usize) -> Result<CommitRecord, IngestError> {
    let err = |message: &str| IngestError::Parse {
        line: lineno,
        message: message.to_string(),
    };
    let mut parts = line.splitn(4, '\t');
    let hash = parts.next().unwrap_or_default();
    let (Some(email), Some(ts), Some(subject)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(err("expected header `hash<TAB>email<TAB>unixsec<TAB>subject`"));
    };
    if hash.is_empty() || hash.chars().any(char::is_whitespace) {
        return Err(err("malformed commit hash"));
    }
    let timestamp: i64 = ts
        .trim()
        .parse()
        .map_err(|_| err("timestamp is not an integer"))?;
    Ok(CommitRecord {
        hash: hash.to_string(),
        author: email.to_string(),
        timestamp,
        message: subject.to_string(),
        changes: Vec::new(),
    })
}

/// Parses numstat log text into commit records, one per header line.
pub fn parse_numstat_log(text: &str) -> Result<Vec<CommitRecord>, IngestError> {
    let mut commits: Vec<CommitRecord> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        match classify(line) {
            Line::Blank => {}
            Line::Numstat(change) => match commits.last_mut() {
                Some(c) => c.changes.push(change),
                None => {
                    return Err(IngestError::Parse {
                        line: lineno,
                        message: "numstat line before any commit header".into(),
                    })
                }
            },
            Line::Other(header) => commits.push(parse_header(header, lineno)?),
        }
    }
    Ok(commits)
}

/// Renders records in the numstat log format accepted by [`parse_numstat_log`].
///
/// Only the first line of each message survives, as with `%s`.
pub fn emit_numstat_log(commits: &[CommitRecord]) -> String {
    let mut out = String::new();
    for (i, c) in commits.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let subject = c.message.lines().next().unwrap_or("");
        let _ = writeln!(out, "{}\t{}\t{}\t{}", c.hash, c.author, c.timestamp, subject);
        if !c.changes.is_empty() {
            out.push('\n');
        }
        for ch in &c.changes {
            if ch.binary {
                let _ = writeln!(out, "-\t-\t{}", ch.path);
            } else {
                let _ = writeln!(out, "{}\t{}\t{}", ch.added, ch.deleted, ch.path);
            }
        }
    }
    out
}

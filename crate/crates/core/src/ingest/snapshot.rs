//! Per-file histories built from commit records.

use std::collections::{BTreeMap, BTreeSet};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use super::{CommitRecord, IngestError};

/// Include/exclude path globs. An empty include list admits every path.
#[derive(Debug, Clone)]
pub struct PathFilter {
    include: Option<GlobSet>,
    exclude: Option<GlobSet>,
}

fn glob_set(patterns: &[String]) -> Result<Option<GlobSet>, IngestError> {
    if patterns.is_empty() {
        return Ok(None);
    }
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        let g = Glob::new(p).map_err(|e| IngestError::Pattern {
            pattern: p.clone(),
            message: e.to_string(),
        })?;
        b.add(g);
    }
    b.build().map(Some).map_err(|e| IngestError::Pattern {
        pattern: patterns.join(","),
        message: e.to_string(),
    })
}

impl PathFilter {
    pub fn new(include: &[String], exclude: &[String]) -> Result<Self, IngestError> {
        Ok(Self {
            include: glob_set(include)?,
            exclude: glob_set(exclude)?,
        })
    }

    pub fn allow_all() -> Self {
        Self {
            include: None,
            exclude: None,
        }
    }

    pub fn admits(&self, path: &str) -> bool {
        self.include.as_ref().is_none_or(|g| g.is_match(path))
            && !self.exclude.as_ref().is_some_and(|g| g.is_match(path))
    }
}

impl Default for PathFilter {
    fn default() -> Self {
        Self::allow_all()
    }
}

/// Author identity normalization: emails are lowercased, then mapped
/// through an optional alias → canonical table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityMap {
    aliases: BTreeMap<String, String>,
}

impl IdentityMap {
    pub fn new<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        Self {
            aliases: pairs
                .into_iter()
                .map(|(k, v)| (k.as_ref().to_lowercase(), v.as_ref().to_lowercase()))
                .collect(),
        }
    }

    pub fn canonical(&self, author: &str) -> String {
        let lower = author.trim().to_lowercase();
        self.aliases.get(&lower).cloned().unwrap_or(lower)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileTouch {
    pub hash: String,
    pub author: String,
    pub timestamp: i64,
    pub added: u64,
    pub deleted: u64,
    pub binary: bool,
}

pub type FileHistory = Vec<FileTouch>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoSnapshot {
    pub project_name: String,
    pub files: BTreeMap<String, FileHistory>,
    pub developers: BTreeSet<String>,
}

impl RepoSnapshot {
    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

/// Groups surviving changes by path, ordered by timestamp (stable for ties).
///
/// A commit that lists the same path twice yields two touches.
pub fn build_snapshot(
    project_name: &str,
    commits: &[CommitRecord],
    filter: &PathFilter,
    identities: &IdentityMap,
) -> RepoSnapshot {
    let mut snap = RepoSnapshot {
        project_name: project_name.to_string(),
        ..RepoSnapshot::default()
    };
    for commit in commits {
        let author = identities.canonical(&commit.author);
        for change in commit.changes.iter().filter(|c| filter.admits(&c.path)) {
            snap.developers.insert(author.clone());
            snap.files.entry(change.path.clone()).or_default().push(FileTouch {
                hash: commit.hash.clone(),
                author: author.clone(),
                timestamp: commit.timestamp,
                added: change.added,
                deleted: change.deleted,
                binary: change.binary,
            });
        }
    }
    for history in snap.files.values_mut() {
        history.sort_by_key(|t| t.timestamp);
    }
    snap
}

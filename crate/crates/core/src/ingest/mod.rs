//! History and issue-tracker ingestion.

mod issues;
mod journal;
mod links;
mod numstat;
mod snapshot;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use issues::{load_issue_export, BugAliases, IssueKind, IssueRecord};
pub use journal::{emit_commit_journal, load_commit_journal};
pub use links::{HASH_PATTERN, JIRA_PATTERN, build_bug_links, extract_issue_refs, BugLinkTable, IssuePatterns};
pub use numstat::{emit_numstat_log, parse_numstat_log};
pub use snapshot::{build_snapshot, FileHistory, FileTouch, IdentityMap, PathFilter, RepoSnapshot};

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("issue export: {0}")]
    Format(String),
    #[error("issue `{key}` listed with conflicting kinds")]
    ConflictingIssue { key: String },
    #[error("invalid pattern `{pattern}`: {message}")]
    Pattern { pattern: String, message: String },
}

/// One line-count change to one file within a commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    pub path: String,
    pub added: u64,
    pub deleted: u64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub binary: bool,
}

impl FileChange {
    pub fn text(path: impl Into<String>, added: u64, deleted: u64) -> Self {
        Self {
            path: path.into(),
            added,
            deleted,
            binary: false,
        }
    }

    pub fn binary(path: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            added: 0,
            deleted: 0,
            binary: true,
        }
    }

    pub fn churn(&self) -> u64 {
        self.added + self.deleted
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub hash: String,
    pub author: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub message: String,
    pub changes: Vec<FileChange>,
}

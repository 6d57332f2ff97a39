//! Issue references in commit messages and the bug → file join.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{CommitRecord, IngestError, IssueKind, IssueRecord};

/// Jira-style keys such as `PROJ-123`.
pub const JIRA_PATTERN: &str = "[A-Z][A-Z0-9]+-[0-9]+";
/// GitHub-style references such as `#45`.
pub const HASH_PATTERN: &str = "#[0-9]+";

#[derive(Debug, Clone)]
pub struct IssuePatterns {
    patterns: Vec<Regex>,
}

impl IssuePatterns {
    pub fn new<S: AsRef<str>>(patterns: &[S]) -> Result<Self, IngestError> {
        if patterns.is_empty() {
            return Err(IngestError::Pattern {
                pattern: String::new(),
                message: "at least one reference pattern is required".into(),
            });
        }
        let patterns = patterns
            .iter()
            .map(|p| {
                Regex::new(p.as_ref()).map_err(|e| IngestError::Pattern {
                    pattern: p.as_ref().to_string(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { patterns })
    }

    pub fn as_strs(&self) -> Vec<&str> {
        self.patterns.iter().map(Regex::as_str).collect()
    }

    /// True if `key` is, in full, a match of some pattern.
    pub fn matches_key(&self, key: &str) -> bool {
        self.patterns
            .iter()
            .any(|re| re.find(key).is_some_and(|m| m.start() == 0 && m.end() == key.len()))
    }
}

impl Default for IssuePatterns {
    fn default() -> Self {
        Self::new(&[JIRA_PATTERN, HASH_PATTERN]).expect("default patterns compile")
    }
}

/// Distinct issue keys referenced in `message`, in order of first appearance.
pub fn extract_issue_refs(message: &str, patterns: &IssuePatterns) -> Vec<String> {
    let mut hits: Vec<(usize, usize, &str)> = Vec::new();
    for (pi, re) in patterns.patterns.iter().enumerate() {
        for m in re.find_iter(message) {
            hits.push((m.start(), pi, m.as_str()));
        }
    }
    hits.sort_by_key(|&(start, pi, _)| (start, pi));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (_, _, key) in hits {
        if seen.insert(key) {
            out.push(key.to_string());
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugLinkTable {
    /// path → distinct bug keys fixed by commits touching the path.
    pub file_bugs: BTreeMap<String, BTreeSet<String>>,
    /// commit hash → bug keys it references. Commits with none are absent.
    pub commit_bugs: BTreeMap<String, BTreeSet<String>>,
    /// Referenced keys absent from the issue export.
    pub unknown_refs: BTreeSet<String>,
}

impl BugLinkTable {
    pub fn bug_count(&self, path: &str) -> usize {
        self.file_bugs.get(path).map_or(0, BTreeSet::len)
    }

    pub fn bugs_of(&self, path: &str) -> Option<&BTreeSet<String>> {
        self.file_bugs.get(path)
    }

    /// Distinct bug keys linked to any commit.
    pub fn distinct_bugs(&self) -> BTreeSet<&str> {
        self.commit_bugs
            .values()
            .flatten()
            .map(String::as_str)
            .collect()
    }
}

/// Joins commits to bug issues and propagates the keys to touched files.
pub fn build_bug_links(
    commits: &[CommitRecord],
    issues: &[IssueRecord],
    patterns: &IssuePatterns,
) -> BugLinkTable {
    let kinds: HashMap<&str, IssueKind> = issues.iter().map(|i| (i.key.as_str(), i.kind)).collect();
    let mut table = BugLinkTable::default();
    for commit in commits {
        let mut bugs = BTreeSet::new();
        for key in extract_issue_refs(&commit.message, patterns) {
            match kinds.get(key.as_str()) {
                Some(IssueKind::Bug) => {
                    bugs.insert(key);
                }
                Some(IssueKind::Other) => {}
                None => {
                    table.unknown_refs.insert(key);
                }
            }
        }
        if bugs.is_empty() {
            continue;
        }
        for change in &commit.changes {
            table
                .file_bugs
                .entry(change.path.clone())
                .or_default()
                .extend(bugs.iter().cloned());
        }
        table
            .commit_bugs
            .entry(commit.hash.clone())
            .or_default()
            .extend(bugs);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::FileChange;

    fn brute_force_refs(message: &str, patterns: &[&str]) -> Vec<String> {
        // Try every substring start, earliest match wins, dedupe.
        let res: Vec<Regex> = patterns.iter().map(|p| Regex::new(&format!("^(?:{p})")).unwrap()).collect();
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < message.len() {
            if !message.is_char_boundary(i) {
                i += 1;
                continue;
            }
            let mut matched = None;
            for re in &res {
                if let Some(m) = re.find(&message[i..]) {
                    matched = Some(m.as_str().to_string());
                    break;
                }
            }
            match matched {
                Some(k) => {
                    i += k.len();
                    if !out.contains(&k) {
                        out.push(k);
                    }
                }
                None => i += 1,
            }
        }
        out
    }

    fn commit(hash: &str, msg: &str, paths: &[&str]) -> CommitRecord {
        CommitRecord {
            hash: hash.into(),
            author: "a@x".into(),
            timestamp: 0,
            message: msg.into(),
            changes: paths.iter().map(|p| FileChange::text(*p, 1, 0)).collect(),
        }
    }

    fn bug(key: &str) -> IssueRecord {
        IssueRecord { key: key.into(), kind: IssueKind::Bug }
    }

    #[test]
    fn duplicate_refs_collapse() {
        let p = IssuePatterns::default();
        let msg = "fix PROJ-12 and PROJ-12 again";
        assert_eq!(extract_issue_refs(msg, &p), vec!["PROJ-12"]);
        assert_eq!(brute_force_refs(msg, &[JIRA_PATTERN, HASH_PATTERN]), vec!["PROJ-12"]);
    }

    #[test]
    fn no_refs() {
        assert!(extract_issue_refs("refactor only", &IssuePatterns::default()).is_empty());
    }

    #[test]
    fn both_default_patterns_in_message_order() {
        let msg = "closes #45, see PROJ-7";
        let expected = brute_force_refs(msg, &[JIRA_PATTERN, HASH_PATTERN]);
        assert_eq!(expected, vec!["#45", "PROJ-7"]);
        assert_eq!(extract_issue_refs(msg, &IssuePatterns::default()), expected);
    }

    #[test]
    fn matching_is_case_sensitive() {
        assert!(extract_issue_refs("fix proj-12", &IssuePatterns::default()).is_empty());
    }

    #[test]
    fn matches_key_requires_full_match() {
        let p = IssuePatterns::default();
        assert!(p.matches_key("PROJ-1"));
        assert!(p.matches_key("#3"));
        assert!(!p.matches_key("xPROJ-1"));
        assert!(!p.matches_key("P-1"));
    }

    #[test]
    fn empty_pattern_list_rejected() {
        assert!(IssuePatterns::new::<&str>(&[]).is_err());
        assert!(IssuePatterns::new(&["("]).is_err());
    }

    #[test]
    fn commit_without_refs_contributes_nothing() {
        let t = build_bug_links(&[commit("c1", "tidy", &["a.java"])], &[bug("PA-1")], &IssuePatterns::default());
        assert!(t.file_bugs.is_empty());
        assert!(t.commit_bugs.is_empty());
        assert_eq!(t.bug_count("a.java"), 0);
    }

    #[test]
    fn fix_propagates_to_all_touched_files() {
        let p = IssuePatterns::new(&["[A-Z]+-[0-9]+"]).unwrap();
        let t = build_bug_links(&[commit("c1", "fix P-1", &["a.java", "b.java"])], &[bug("P-1")], &p);
        let expected: BTreeSet<String> = ["P-1".to_string()].into();
        assert_eq!(t.file_bugs["a.java"], expected);
        assert_eq!(t.file_bugs["b.java"], expected);
        assert_eq!(t.commit_bugs["c1"], expected);
    }

    #[test]
    fn distinct_bugs_not_fix_events() {
        let p = IssuePatterns::new(&["[A-Z]+-[0-9]+"]).unwrap();
        let commits = [commit("c1", "fix P-1", &["a.java"]), commit("c2", "really fix P-1", &["a.java"])];
        let t = build_bug_links(&commits, &[bug("P-1")], &p);
        assert_eq!(t.bug_count("a.java"), 1);
    }

    #[test]
    fn non_bug_and_unknown_refs() {
        let issues = [
            bug("PA-1"),
            IssueRecord { key: "PA-2".into(), kind: IssueKind::Other },
        ];
        let t = build_bug_links(
            &[commit("c1", "PA-2 PA-3 PA-1", &["a"])],
            &issues,
            &IssuePatterns::default(),
        );
        assert_eq!(t.file_bugs["a"].iter().collect::<Vec<_>>(), ["PA-1"]);
        assert_eq!(t.unknown_refs.iter().collect::<Vec<_>>(), ["PA-3"]);
    }
}

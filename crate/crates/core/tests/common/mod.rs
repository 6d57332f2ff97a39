#![allow(dead_code)]

use ownlab::ingest::{
    build_bug_links, build_snapshot, load_commit_journal, load_issue_export, BugAliases, BugLinkTable, IdentityMap,
    IssuePatterns, PathFilter, RepoSnapshot,
};
use ownlab::rng::{mix_seed, SeededRng};
use ownlab::synth::{generate_history, DefectRule, GroundTruth, Span, SynthSpec};

/// Small random spec: at most 9 files, 6 developers and 45 file changes.
pub fn fuzz_spec(i: u64) -> SynthSpec {
    let mut g = SeededRng::new(mix_seed(0xF022, i));
    let dirs = g.range_inclusive(1, 3);
    let fpd = g.range_inclusive(1, 3);
    SynthSpec {
        n_dirs: Span(1, dirs),
        files_per_dir: Span(1, fpd),
        n_devs: g.range_inclusive(1, 6) as usize,
        commits_per_file: Span(1, g.range_inclusive(1, 5)),
        concentration: 0.1 + 8.0 * g.unit(),
        churn_per_commit: Span(0, g.range_inclusive(1, 50)),
        max_files_per_commit: g.range_inclusive(1, 3) as usize,
        task_ref_rate: 0.2,
        defect_rule: Some(DefectRule { metric: "total".into(), threshold: 1.0, flip_noise: 0.2 }),
    }
}

pub struct Sample {
    pub journal: String,
    pub truth: GroundTruth,
    pub snapshot: RepoSnapshot,
    pub links: BugLinkTable,
}

/// Generates history `i` and re-ingests it through the public parsers.
pub fn fuzz_sample(i: u64) -> Sample {
    let (journal, truth) = generate_history(&fuzz_spec(i), i).unwrap();
    let commits = load_commit_journal(&journal).unwrap();
    let issues = load_issue_export(&truth.issue_export(), &BugAliases::default()).unwrap();
    let snapshot = build_snapshot("fuzz", &commits, &PathFilter::allow_all(), &IdentityMap::default());
    let links = build_bug_links(&commits, &issues, &IssuePatterns::default());
    Sample { journal, truth, snapshot, links }
}

pub const FUZZ_CORPUS: u64 = 200;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::OwnershipError;
use crate::ingest::RepoSnapshot;

/// What counts as one unit of contribution to an artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContributionUnit {
    /// Commits by the developer that touch the artifact.
    #[default]
    Commits,
    /// Added plus deleted lines by the developer on the artifact.
    Churn,
}

impl std::str::FromStr for ContributionUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commits" => Ok(Self::Commits),
            "churn" => Ok(Self::Churn),
            other => Err(format!("unknown contribution unit `{other}` (expected commits|churn)")),
        }
    }
}

/// Contribution(d, a) for every artifact and developer. Pairs with zero
/// contribution are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributionLedger {
    pub unit: ContributionUnit,
    pub entries: BTreeMap<String, BTreeMap<String, u64>>,
}

impl ContributionLedger {
    pub fn contribution(&self, artifact: &str, developer: &str) -> u64 {
        self.entries
            .get(artifact)
            .and_then(|m| m.get(developer))
            .copied()
            .unwrap_or(0)
    }

    pub fn artifact(&self, artifact: &str) -> Option<&BTreeMap<String, u64>> {
        self.entries.get(artifact)
    }

    pub fn total(&self, artifact: &str) -> u64 {
        self.entries.get(artifact).map_or(0, |m| m.values().sum())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn contribution_ledger(snapshot: &RepoSnapshot, unit: ContributionUnit) -> ContributionLedger {
    let mut entries: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for (path, history) in &snapshot.files {
        let mut per_dev: BTreeMap<String, u64> = BTreeMap::new();
        match unit {
            ContributionUnit::Commits => {
                let mut seen: BTreeSet<(&str, &str)> = BTreeSet::new();
                for t in history {
                    if seen.insert((t.hash.as_str(), t.author.as_str())) {
                        *per_dev.entry(t.author.clone()).or_default() += 1;
                    }
                }
            }
            ContributionUnit::Churn => {
                for t in history {
                    let churn = t.added + t.deleted;
                    if churn > 0 {
                        *per_dev.entry(t.author.clone()).or_default() += churn;
                    }
                }
            }
        }
        if !per_dev.is_empty() {
            entries.insert(path.clone(), per_dev);
        }
    }
    ContributionLedger { unit, entries }
}

/// Normalized contribution weights of one artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnershipVector {
    pub artifact: String,
    pub weights: BTreeMap<String, f64>,
}

impl OwnershipVector {
    /// Weight of the highest contributor.
    pub fn max_weight(&self) -> f64 {
        self.weights.values().copied().fold(0.0, f64::max)
    }

    pub fn contributors(&self) -> usize {
        self.weights.len()
    }

    /// Number of developers with weight ≥ `threshold`.
    pub fn at_or_above(&self, threshold: f64) -> usize {
        self.weights.values().filter(|w| **w >= threshold).count()
    }

    /// Number of developers with weight < `threshold`.
    pub fn below(&self, threshold: f64) -> usize {
        self.weights.values().filter(|w| **w < threshold).count()
    }
}

/// Weight(d, a) = Contribution(d, a) / Σᵢ Contribution(i, a).
pub fn ownership_vector(
    ledger: &ContributionLedger,
    artifact: &str,
) -> Result<OwnershipVector, OwnershipError> {
    let contributions = ledger
        .artifact(artifact)
        .ok_or_else(|| OwnershipError::UndefinedOwnership(artifact.to_string()))?;
    let total: u64 = contributions.values().sum();
    if total == 0 {
        return Err(OwnershipError::UndefinedOwnership(artifact.to_string()));
    }
    let total = total as f64;
    let weights = contributions
        .iter()
        .filter(|(_, c)| **c > 0)
        .map(|(d, c)| (d.clone(), *c as f64 / total))
        .collect();
    Ok(OwnershipVector {
        artifact: artifact.to_string(),
        weights,
    })
}

/// The sole owner, if one developer holds the full weight.
pub fn dedicated_owner(vector: &OwnershipVector) -> Option<&str> {
    match vector.weights.iter().next() {
        Some((dev, w)) if vector.weights.len() == 1 && *w == 1.0 => Some(dev.as_str()),
        _ => None,
    }
}

/// True iff every team member holds a nonzero weight. An empty team is
/// never collective.
pub fn is_collective(vector: &OwnershipVector, team: &BTreeSet<String>) -> bool {
    !team.is_empty()
        && team
            .iter()
            .all(|d| vector.weights.get(d).is_some_and(|w| *w != 0.0))
}

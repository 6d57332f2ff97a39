//! End-to-end orchestration: configuration, per-project analysis and
//! report emission.

mod config;
mod report;
mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{load_config, AnalysisConfig, ClassifierConfig, Flags, Format, ProjectConfig, CONFIG_VERSION};
pub use report::{correlation_md, emit_reports, render_reports, rho_cell, BOLD_ABOVE, UNDERLINE_ABOVE};
pub use run::{
    dir_observations, file_observations, load_project_commits, project_metrics, run_analysis, ClassificationRow,
    DiagLevel, Diagnostic, ImportanceTable, LmgRow, ProjectDirs, ProjectFiles, ProjectMetrics, ReportBundle,
    SummaryRow, FILE_FEATURES, LMG_PREDICTORS, TARGET,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{}: {source}", path.display())]
    Ingest {
        path: PathBuf,
        #[source]
        source: crate::ingest::IngestError,
    },
    #[error("no project could be analyzed: {}", .0.join("; "))]
    NoProjects(Vec<String>),
}

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ConfigErrors;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigErrors),

    #[error(transparent)]
    Core(#[from] qsub::Error),

    #[error("no output directory: pass --out or set QSUB_OUT_DIR")]
    NoOutDir,

    #[error("output directory {} does not exist", .0.display())]
    MissingOutDir(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("sweep: {0}")]
    Sweep(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

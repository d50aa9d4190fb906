//! Pipeline orchestration for the gridcast forecaster: dataset files, model
//! containers, JSON artifacts, report CSVs and the CLI commands.
//!
//! The numeric work lives in `gridcast-core`; this crate owns everything
//! that touches the filesystem. Commands are plain functions over parsed
//! argument structs so integration tests can drive them directly.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod dataio;
pub mod model_io;
pub mod pipeline;

pub use commands::{Cli, Command};

/// Workdir layout helpers.
pub mod layout {
    use std::path::{Path, PathBuf};

    pub fn data_csv(workdir: &Path) -> PathBuf {
        workdir.join("data").join("synthetic.csv")
    }

    pub fn data_manifest(workdir: &Path) -> PathBuf {
        workdir.join("data").join("synthetic.manifest.json")
    }

    pub fn pipeline_config(workdir: &Path) -> PathBuf {
        workdir.join("pipeline.json")
    }

    pub fn models_dir(workdir: &Path) -> PathBuf {
        workdir.join("models")
    }

    pub fn global_model(workdir: &Path) -> PathBuf {
        models_dir(workdir).join("global.gcm")
    }

    pub fn localized_model(workdir: &Path, level: usize, cluster: usize) -> PathBuf {
        models_dir(workdir).join(format!("model_l{level}_c{cluster}.gcm"))
    }

    pub fn hierarchy(workdir: &Path) -> PathBuf {
        workdir.join("hierarchy.json")
    }

    pub fn localize_manifest(workdir: &Path) -> PathBuf {
        workdir.join("localize.json")
    }

    pub fn selections(workdir: &Path) -> PathBuf {
        workdir.join("selections.json")
    }

    pub fn reports_dir(workdir: &Path) -> PathBuf {
        workdir.join("reports")
    }
}

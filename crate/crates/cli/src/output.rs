use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use hammock_core::Error;
use serde::Serialize;
use tempfile::NamedTempFile;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    MissingInput(PathBuf),
    BadInput(String),
    InvalidConfig(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) => 3,
            CliError::BadInput(_) => 4,
            CliError::InvalidConfig(_) => 5,
            CliError::Output(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::MissingInput(p) => write!(f, "input not found: {}", p.display()),
            CliError::BadInput(m) => write!(f, "bad input: {m}"),
            CliError::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            CliError::Output(m) => write!(f, "cannot write outputs: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io {
                ref path,
                ref source,
            } if source.kind() == std::io::ErrorKind::NotFound => {
                CliError::MissingInput(path.clone())
            }
            Error::Io { .. }
            | Error::AtLine { .. }
            | Error::Malformed(_)
            | Error::RatingOutOfScale { .. }
            | Error::DuplicateRating { .. } => CliError::BadInput(e.to_string()),
            other => CliError::InvalidConfig(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Output files of one run, held in memory until the run has succeeded.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    results: Vec<(String, serde_json::Value)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn csv<R: AsRef<[u8]>>(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<R>>,
    ) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let out = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(header).map_err(out)?;
        for row in rows {
            w.write_record(&row).map_err(out)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Output(e.to_string()))?;
        self.add(name, bytes);
        Ok(())
    }

    /// A headline number recorded in the manifest.
    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.push((
            key.to_string(),
            serde_json::to_value(value).unwrap_or_default(),
        ));
    }

    /// Writes every file to a temporary name first and renames them into place
    /// only once all were written; run.json goes last.
    pub fn commit(
        mut self,
        dir: &Path,
        command: &str,
        config: serde_json::Value,
        seed: u64,
    ) -> CliResult<()> {
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            outputs: self
                .files
                .iter()
                .map(|(name, bytes)| OutputEntry {
                    file: name.clone(),
                    bytes: bytes.len(),
                })
                .collect(),
            results: self.results.iter().cloned().collect(),
        };
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Output(e.to_string()))?;
        text.push('\n');
        self.files.push(("run.json".into(), text.into_bytes()));

        let fail = |e: std::io::Error| CliError::Output(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(fail)?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
            tmp.write_all(bytes).map_err(fail)?;
            tmp.as_file().sync_all().map_err(fail)?;
            staged.push((tmp, dir.join(name)));
        }
        for (tmp, path) in staged {
            tmp.persist(&path)
                .map_err(|e| CliError::Output(format!("{}: {}", path.display(), e.error)))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: serde_json::Value,
    outputs: Vec<OutputEntry>,
    results: serde_json::Map<String, serde_json::Value>,
}

#[derive(Serialize)]
struct OutputEntry {
    file: String,
    bytes: usize,
}

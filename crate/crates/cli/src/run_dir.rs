//! The output directory of one invocation, guarded by a lock file.

use std::fs::{self, File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, RuntimeContext};

pub const LOCK_NAME: &str = ".ap-lab.lock";

pub struct RunDir {
    root: PathBuf,
    lock: PathBuf,
    formats: Vec<Format>,
    written: Vec<PathBuf>,
}

impl RunDir {
    /// Creates the directory and takes its lock. A second invocation on
    /// the same directory fails until the first one exits.
    pub fn open(cfg: &RunConfig) -> Result<RunDir, CliError> {
        let root = cfg.out_dir.clone();
        fs::create_dir_all(&root).map_err(|e| CliError::Runtime(format!("{}: {e}", root.display())))?;
        let lock = root.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id()).at_runtime()?;
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                return Err(CliError::Runtime(format!(
                    "{} is in use by another run (remove {} if that run is gone)",
                    root.display(),
                    lock.display()
                )))
            }
            Err(e) => return Err(CliError::Runtime(format!("{}: {e}", lock.display()))),
        }
        Ok(RunDir { root, lock, formats: cfg.formats.clone(), written: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        let mut f = File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        f.write_all(bytes).at_runtime()?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value).at_runtime()?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    /// Writes a CSV table; `rows` are already formatted cells.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).at_runtime()?;
        for r in rows {
            w.write_record(r).at_runtime()?;
        }
        let bytes = w.into_inner().at_runtime()?;
        self.put(name, &bytes)
    }

    /// A CSV document produced elsewhere.
    pub fn csv_text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        self.put(name, text.as_bytes())
    }

    pub fn svg(&mut self, name: &str, doc: &str) -> Result<(), CliError> {
        if !self.wants(Format::Svg) {
            return Ok(());
        }
        self.put(name, doc.as_bytes())
    }

    /// Markdown is always written.
    pub fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.put(name, text.as_bytes())
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

/// Shortest round-trip formatting, as in the JSON outputs.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

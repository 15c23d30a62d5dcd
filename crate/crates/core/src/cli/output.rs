//! Writing CSV, SVG and JSON metadata files into the output directory.

use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::config::{Formats, RunConfig};
use super::svg::Plot;
use super::CliError;

/// A named column of numbers.
pub type Column<'a> = (&'a str, &'a [f64]);

/// Formats a number with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV text: a `# config_hash=` line, further comment lines, a header row
/// and one row per index of the (equal-length) columns.
pub fn csv_text(hash: &str, comments: &[String], columns: &[Column]) -> String {
    let rows = columns.first().map_or(0, |c| c.1.len());
    assert!(
        columns.iter().all(|c| c.1.len() == rows),
        "ragged CSV columns"
    );
    let mut s = format!("# config_hash={hash}\n");
    for c in comments {
        s.push_str("# ");
        s.push_str(c);
        s.push('\n');
    }
    let header: Vec<&str> = columns.iter().map(|c| c.0).collect();
    s.push_str(&header.join(","));
    s.push('\n');
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| fmt_num(c.1[i])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Output directory plus the bookkeeping needed for the metadata file.
pub struct Artifacts {
    dir: PathBuf,
    hash: String,
    formats: Formats,
    timestamp: Option<u64>,
    files: Vec<String>,
}

impl Artifacts {
    pub fn create(cfg: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
        let timestamp = cfg.timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Ok(Artifacts {
            dir: cfg.out.clone(),
            hash: cfg.hash(),
            formats: cfg.formats,
            timestamp,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn csv(
        &mut self,
        name: &str,
        comments: &[String],
        columns: &[Column],
    ) -> Result<(), CliError> {
        if !self.formats.csv {
            return Ok(());
        }
        let text = csv_text(&self.hash, comments, columns);
        self.write(name, &text)
    }

    pub fn svg(&mut self, name: &str, plot: &Plot) -> Result<(), CliError> {
        if !self.formats.svg {
            return Ok(());
        }
        let body = plot.render(self.timestamp);
        // the hash goes right after the opening tag
        let (head, rest) = body.split_once('\n').expect("svg has a header line");
        let text = format!("{head}\n<!-- config_hash={} -->\n{rest}", self.hash);
        self.write(name, &text)
    }

    /// Writes `<command>.meta.json` and returns the list of files written.
    pub fn finish(mut self, cfg: &RunConfig, results: Value) -> Result<Vec<String>, CliError> {
        if self.formats.json_meta {
            let name = format!("{}.meta.json", cfg.command);
            let mut files = self.files.clone();
            files.push(name.clone());
            let meta = json!({
                "program": env!("CARGO_PKG_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
                "config_hash": self.hash,
                "config": cfg,
                "files": files,
                "results": results,
            });
            let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
            self.write(&name, &text)?;
        }
        Ok(self.files)
    }
}

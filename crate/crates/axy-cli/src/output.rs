//! Deterministic result writers: CSV with fixed 12-significant-digit
//! numbers, pretty JSON, and a manifest recording the config hash.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Num(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.11e}"),
        }
    }
}

pub struct OutputWriter {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut out = String::new();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in rows {
            let rendered: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&rendered.join(","));
            out.push('\n');
        }
        std::fs::write(&path, out).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut file = std::fs::File::create(&path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        let text = serde_json::to_string_pretty(value)?;
        file.write_all(text.as_bytes())?;
        file.write_all(b"\n")?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// Writes the manifest last: tool version, command, config hash, seed,
    /// and the list of produced files.
    pub fn finish(self, command: &str, config_path: &Path, seed: u64) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            config: String,
            config_sha256: String,
            seed: u64,
            files: &'a [String],
        }
        let config_text = std::fs::read(config_path)
            .with_context(|| format!("cannot re-read config {}", config_path.display()))?;
        let digest = Sha256::digest(&config_text);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let manifest = Manifest {
            tool: "axy",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: config_path.display().to_string(),
            config_sha256: hex,
            seed,
            files: &self.files,
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, format!("{text}\n"))
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

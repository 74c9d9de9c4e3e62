//! Output files. Every file starts with a header naming the tool version and
//! the manifest hash: a `#` line in CSV and text files, an XML comment in
//! SVG, and a `generator` object in JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{AppError, Result};
use crate::manifest::{RunManifest, TOOL, VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct Generator {
    pub tool: &'static str,
    pub version: &'static str,
    pub manifest_hash: String,
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    generator: &'a Generator,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    generator: Generator,
    written: Vec<PathBuf>,
}

impl OutputDir {
    /// Creates the directory and writes `manifest.txt` into it.
    pub fn create(manifest: &RunManifest) -> Result<Self> {
        let dir = manifest.out.clone();
        fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
        let mut out = OutputDir {
            dir,
            generator: Generator { tool: TOOL, version: VERSION, manifest_hash: manifest.hash.clone() },
            written: Vec::new(),
        };
        out.text("manifest.txt", &manifest.canonical())?;
        Ok(out)
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn header_line(&self) -> String {
        format!("# {} {} manifest={}", self.generator.tool, self.generator.version, self.generator.manifest_hash)
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| AppError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// Plain text with the header as its first line.
    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let contents = format!("{}\n{body}", self.header_line());
        self.write(name, &contents)
    }

    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(columns)?;
        for r in rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| AppError::Usage(e.to_string()))?)
            .expect("csv output is utf-8");
        self.text(name, &body)
    }

    /// JSON object with the `generator` header merged into `body`'s fields.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(&Wrapped { generator: &self.generator, body })?;
        s.push('\n');
        self.write(name, &s)
    }

    pub fn svg(&mut self, name: &str, svg: &str) -> Result<()> {
        let comment = format!(
            "<!-- {} {} manifest={} -->\n",
            self.generator.tool, self.generator.version, self.generator.manifest_hash
        );
        self.write(name, &format!("{comment}{svg}"))
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    v.to_string()
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

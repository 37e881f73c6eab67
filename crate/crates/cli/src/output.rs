use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct ManifestEntry {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    command: &'a str,
    seed: u64,
    exit_code: i32,
    files: &'a [ManifestEntry],
}

/// Where artifacts go: stdout (primary) and stderr (sidecars), or files
/// under an output directory listed in `manifest.json`.
pub struct Sink {
    dir: Option<PathBuf>,
    entries: Vec<ManifestEntry>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink { dir, entries: Vec::new() })
    }

    pub fn to_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes one artifact. Without an output directory the primary artifact
    /// goes to stdout and everything else to stderr.
    pub fn emit(&mut self, name: &str, contents: &str, primary: bool) -> io::Result<()> {
        let Some(dir) = &self.dir else {
            let text = if contents.ends_with('\n') { contents.to_string() } else { format!("{contents}\n") };
            return if primary {
                io::stdout().write_all(text.as_bytes())
            } else {
                io::stderr().write_all(text.as_bytes())
            };
        };
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        self.entries.push(ManifestEntry {
            file: name.to_string(),
            bytes: contents.len(),
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
        });
        Ok(())
    }

    pub fn finish(self, command: &str, seed: u64, exit_code: i32) -> io::Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let manifest = Manifest {
            tool: qmatroid::repr::TOOL_VERSION,
            command,
            seed,
            exit_code,
            files: &self.entries,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(dir.join("manifest.json"), text + "\n")
    }
}

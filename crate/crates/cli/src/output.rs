//! CSV and JSON emission.
//!
//! Every CSV starts with a `#` preamble of `key = value` lines holding the
//! code version, the command, the config hash, every consumed config key, the
//! seed and the panel the file belongs to. Floats are written with 17
//! significant digits, which round-trips every `f64` exactly.

use crate::config::RunConfig;
use crate::error::CliError;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const INDEX_FILE: &str = "index.json";

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Record of one emitted file for the index.
#[derive(Debug, Clone)]
pub struct FileEntry {
    pub file: String,
    pub panel: Vec<(String, String)>,
    pub rows: usize,
    pub status: String,
}

/// Writes the files of one run into `cfg.output`.
pub struct Emitter<'a> {
    cfg: &'a RunConfig,
    hash: String,
}

impl<'a> Emitter<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(&cfg.output).map_err(|e| CliError::io(&cfg.output, e))?;
        Ok(Emitter {
            cfg,
            hash: cfg.hash(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.cfg.output
    }

    /// `<command>[-<tag>]-<hash>.<ext>`
    pub fn file_name(&self, tag: &str, ext: &str) -> String {
        let command = self.cfg.command.name();
        if tag.is_empty() {
            format!("{command}-{}.{ext}", self.hash)
        } else {
            format!("{command}-{tag}-{}.{ext}", self.hash)
        }
    }

    fn preamble(&self, panel: &[(String, String)]) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: &str| {
            out.push_str(&format!("# {k} = {v}\n"));
        };
        line("version", VERSION);
        line("command", self.cfg.command.name());
        line("hash", &self.hash);
        for (k, v) in &self.cfg.echo {
            line(k, v);
        }
        if !self.cfg.echo.iter().any(|(k, _)| *k == "seed") {
            line("seed", "none");
        }
        for (k, v) in panel {
            line(&format!("panel.{k}"), v);
        }
        out
    }

    pub fn write_csv(
        &self,
        tag: &str,
        panel: Vec<(String, String)>,
        header: &[&str],
        rows: &[Vec<String>],
        status: &str,
    ) -> Result<FileEntry, CliError> {
        let file = self.file_name(tag, "csv");
        let path = self.cfg.output.join(&file);
        let io = |e: std::io::Error| CliError::io(&path, e);
        let mut buf = self.preamble(&panel).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let csv_err = |e: csv::Error| CliError::io(&path, std::io::Error::other(e));
            w.write_record(header).map_err(csv_err)?;
            for row in rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        fs::write(&path, buf).map_err(io)?;
        Ok(FileEntry {
            file,
            panel,
            rows: rows.len(),
            status: status.to_string(),
        })
    }

    pub fn write_json(&self, tag: &str, value: &Value) -> Result<FileEntry, CliError> {
        let file = self.file_name(tag, "json");
        let path = self.cfg.output.join(&file);
        write_json_file(&path, value)?;
        Ok(FileEntry {
            file,
            panel: Vec::new(),
            rows: 0,
            status: "completed".into(),
        })
    }

    /// Written last, by the coordinating thread only.
    pub fn write_index(
        &self,
        files: &[FileEntry],
        summary: &Value,
        failure: Option<&str>,
    ) -> Result<PathBuf, CliError> {
        let config: serde_json::Map<String, Value> = self
            .cfg
            .echo
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        let files: Vec<Value> = files
            .iter()
            .map(|f| {
                let panel: serde_json::Map<String, Value> = f
                    .panel
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect();
                json!({ "file": f.file, "panel": panel, "rows": f.rows, "status": f.status })
            })
            .collect();
        let index = json!({
            "version": VERSION,
            "command": self.cfg.command.name(),
            "hash": self.hash,
            "config": config,
            "execution": {
                "output": self.cfg.output.display().to_string(),
                "workers": self.cfg.workers,
            },
            "files": files,
            "summary": summary,
            "failure": failure,
        });
        let path = self.cfg.output.join(INDEX_FILE);
        write_json_file(&path, &index)?;
        Ok(path)
    }
}

fn write_json_file(path: &Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// A CSV file as emitted: preamble pairs, header and string records.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvFile {
    pub preamble: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvFile {
    pub fn preamble_value(&self, key: &str) -> Option<&str> {
        self.preamble
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

pub fn read_csv(path: &Path) -> Result<CsvFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let preamble = text
        .lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::io(path, std::io::Error::other(e));
    let header = reader
        .headers()
        .map_err(bad)?
        .iter()
        .map(String::from)
        .collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()
        .map_err(bad)?;
    Ok(CsvFile {
        preamble,
        header,
        rows,
    })
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Parsed CSV: header, data rows, footer lines (without `# `).
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footers: Vec<String>,
}

impl Csv {
    pub fn parse(text: &str) -> Csv {
        let mut lines = text.lines();
        let header = lines.next().expect("header").split(',').map(String::from).collect();
        let mut rows = Vec::new();
        let mut footers = Vec::new();
        for line in lines {
            if let Some(f) = line.strip_prefix("# ") {
                footers.push(f.to_string());
            } else if !line.is_empty() {
                rows.push(line.split(',').map(String::from).collect());
            }
        }
        Csv { header, rows, footers }
    }

    pub fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    pub fn value(&self, row: usize, name: &str) -> f64 {
        let cell = &self.rows[row][self.col(name)];
        cell.parse().unwrap_or_else(|_| panic!("column {name} row {row}: {cell}"))
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.value(r, name)).collect()
    }
}

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_thermal-qfi")
}

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("spawn binary")
}

pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Writes `json` into a fresh temp file and returns its handle.
pub fn config_file(json: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    std::io::Write::write_all(&mut f, json.as_bytes()).expect("write config");
    f
}

pub fn le_slack(lhs: f64, rhs: f64, slack: f64) -> bool {
    lhs <= rhs + slack * lhs.abs().max(rhs.abs())
}

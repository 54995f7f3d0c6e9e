#![allow(dead_code)]

use std::path::{Path, PathBuf};

use driftless_cli::{parse_config, ExperimentConfig};

pub fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn bundled(name: &str) -> ExperimentConfig {
    parse_config(&config_path(name)).unwrap()
}

pub fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

/// Parses a CSV body (header skipped); blank cells become `None`.
pub fn csv_rows(text: &str) -> Vec<Vec<Option<f64>>> {
    text.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) })
                .collect()
        })
        .collect()
}

/// `key = value` lines of a text report.
pub fn report_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once(" = ")?;
        (k == key).then_some(v)
    })
}

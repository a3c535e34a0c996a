//! Text formats, dataset ingestion and report output.
//!
//! Every loader rejects malformed input with the offending file position
//! instead of repairing it.

mod bipartite;
mod coefficients;
mod model_file;
mod observations;
mod report;

use std::path::Path;

use crate::error::{Error, Result};

pub use bipartite::{load_bipartite, parse_bipartite, BipartiteDataset, ItemIndicator, LoadSummary, MAX_LISTENS};
pub use coefficients::{load_coefficients, parse_coefficients, DENSE_ALL_PAIRS_LIMIT};
pub use model_file::{format_model, load_model, parse_model, save_model};
pub use observations::{format_observations, load_observations, parse_observations, save_observations};
pub use report::{
    couple_rows, key_value_text, read_records, write_csv, write_csv_to, write_records, write_records_to, CoupleCsvRow,
};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with `#` comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) fn parse_field<T: std::str::FromStr>(path: &str, line: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(path, line, format!("expected {what}, found '{token}'")))
}

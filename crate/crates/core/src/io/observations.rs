use std::path::Path;

use super::{content_lines, read_text};
use crate::error::{Error, Result};
use crate::model::SpinConfig;

pub fn load_observations(path: impl AsRef<Path>, expected_len: Option<usize>) -> Result<Vec<SpinConfig>> {
    let path = path.as_ref();
    parse_observations(&read_text(path)?, &path.display().to_string(), expected_len)
}

/// One configuration per line, either as a `+`/`-` string (`+-+-`) or as
/// whitespace-separated `+1`/`1`/`-1` tokens.
pub fn parse_observations(text: &str, path: &str, expected_len: Option<usize>) -> Result<Vec<SpinConfig>> {
    let mut out = Vec::new();
    for (line, content) in content_lines(text) {
        let spins: Vec<i8> = if content.chars().all(|c| c == '+' || c == '-') {
            content.chars().map(|c| if c == '+' { 1 } else { -1 }).collect()
        } else {
            content
                .split_whitespace()
                .map(|t| match t {
                    "+1" | "1" => Ok(1),
                    "-1" => Ok(-1),
                    _ => Err(Error::parse(path, line, format!("expected a spin (+1 or -1), found '{t}'"))),
                })
                .collect::<Result<_>>()?
        };
        if let Some(n) = expected_len {
            if spins.len() != n {
                return Err(Error::parse(
                    path,
                    line,
                    format!("configuration has {} spins, expected {n}", spins.len()),
                ));
            }
        }
        out.push(SpinConfig::new(spins).map_err(|e| Error::parse(path, line, e.to_string()))?);
    }
    if out.is_empty() {
        return Err(Error::parse(path, 1, "no configurations found"));
    }
    Ok(out)
}

pub fn format_observations(configs: &[SpinConfig]) -> String {
    configs.iter().map(|x| format!("{x}\n")).collect()
}

pub fn save_observations(configs: &[SpinConfig], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_observations(configs)).map_err(|e| Error::io(path, e))
}

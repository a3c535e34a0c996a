use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{content_lines, parse_field, read_text};
use crate::error::{Error, Result};
use crate::model::{grid_edges, IsingModel};

pub fn load_model(path: impl AsRef<Path>) -> Result<IsingModel> {
    let path = path.as_ref();
    parse_model(&read_text(path)?, &path.display().to_string())
}

/// Parses the edge-list format (`n N`, then `u v theta` and `field v h`
/// lines) or the grid shorthand `grid W H theta [h]`, which may be followed
/// by `field` lines overriding individual nodes.
pub fn parse_model(text: &str, path: &str) -> Result<IsingModel> {
    let mut lines = content_lines(text);
    let (first_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n, mut edges, mut fields, is_grid) = match tokens.as_slice() {
        ["n", count] => {
            let n: usize = parse_field(path, first_line, count, "node count")?;
            if n == 0 {
                return Err(Error::parse(path, first_line, "node count must be positive"));
            }
            (n, Vec::new(), vec![0.0; n], false)
        }
        ["grid", w, h, theta, rest @ ..] if rest.len() <= 1 => {
            let w: usize = parse_field(path, first_line, w, "grid width")?;
            let h: usize = parse_field(path, first_line, h, "grid height")?;
            let theta: f64 = parse_field(path, first_line, theta, "coupling")?;
            let field: f64 = match rest {
                [f] => parse_field(path, first_line, f, "field")?,
                _ => 0.0,
            };
            if w == 0 || h == 0 {
                return Err(Error::parse(path, first_line, "grid dimensions must be positive"));
            }
            let edges = grid_edges(w, h).into_iter().map(|(u, v)| (u, v, theta)).collect();
            (w * h, edges, vec![field; w * h], true)
        }
        _ => {
            return Err(Error::parse(
                path,
                first_line,
                "expected header 'n <count>' or 'grid <width> <height> <theta> [h]'",
            ))
        }
    };

    let mut seen_edges: HashMap<(usize, usize), (usize, f64)> = HashMap::new();
    let mut seen_fields: HashMap<usize, usize> = HashMap::new();
    let node = |line: usize, token: &str| -> Result<usize> {
        let v: usize = parse_field(path, line, token, "node index")?;
        if v >= n {
            return Err(Error::parse(path, line, format!("node {v} out of range for {n} nodes")));
        }
        Ok(v)
    };
    for (line, content) in lines {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            ["field", v, h] => {
                let v = node(line, v)?;
                let h: f64 = parse_field(path, line, h, "field")?;
                if !h.is_finite() {
                    return Err(Error::parse(path, line, "non-finite field"));
                }
                if let Some(prev) = seen_fields.insert(v, line) {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("duplicate field for node {v} (lines {prev} and {line})"),
                    ));
                }
                fields[v] = h;
            }
            [u, v, theta] if !is_grid => {
                let (u, v) = (node(line, u)?, node(line, v)?);
                let theta: f64 = parse_field(path, line, theta, "coupling")?;
                if u == v {
                    return Err(Error::parse(path, line, format!("self-loop at node {u}")));
                }
                if !theta.is_finite() {
                    return Err(Error::parse(path, line, "non-finite coupling"));
                }
                let key = (u.min(v), u.max(v));
                if let Some(&(prev, prev_theta)) = seen_edges.get(&key) {
                    let msg = if prev_theta.to_bits() == theta.to_bits() {
                        format!("duplicate edge ({}, {}) on lines {prev} and {line}", key.0, key.1)
                    } else {
                        format!(
                            "asymmetric coupling for edge ({}, {}): {prev_theta} on line {prev}, {theta} on line {line}",
                            key.0, key.1
                        )
                    };
                    return Err(Error::parse(path, line, msg));
                }
                seen_edges.insert(key, (line, theta));
                edges.push((u, v, theta));
            }
            _ if is_grid => {
                return Err(Error::parse(path, line, "only 'field v h' lines may follow a grid header"))
            }
            _ => return Err(Error::parse(path, line, "expected 'u v theta' or 'field v h'")),
        }
    }
    IsingModel::new(n, &edges, fields).map_err(|e| Error::parse(path, first_line, e.to_string()))
}

/// Edge-list text for `model`; values use the shortest representation that
/// parses back to the same `f64`.
pub fn format_model(model: &IsingModel) -> String {
    let mut out = format!("n {}\n", model.node_count());
    for (u, v, theta) in model.edges() {
        let _ = writeln!(out, "{u} {v} {theta:?}");
    }
    for (v, &h) in model.fields().iter().enumerate() {
        if h != 0.0 || h.is_sign_negative() {
            let _ = writeln!(out, "field {v} {h:?}");
        }
    }
    out
}

pub fn save_model(model: &IsingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_model(model)).map_err(|e| Error::io(path, e))
}

//! HetRec-style user/item data (Last.fm layout).
//!
//! * `user_friends.dat`: `userID friendID`, one directed row per line; each
//!   friendship usually appears in both directions.
//! * `user_artists.dat`: `userID artistID weight`.
//! * `artists.dat` (optional): `id name ...`; gives items their names.
//!
//! Columns are tab-separated (comma accepted when a line has no tab). A first
//! line whose leading field is not an integer is treated as a header.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse_field;
use crate::error::{Error, Result};
use crate::model::{Graph, SpinConfig};

/// Per-user cap on retained items.
pub const MAX_LISTENS: usize = 50;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadSummary {
    pub users: usize,
    pub edges: usize,
    pub items: usize,
    pub friend_rows: usize,
    pub listen_rows: usize,
    pub duplicate_listens: usize,
    pub truncated_users: usize,
    pub dropped_listens: usize,
    pub ambiguous_names: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDataset {
    pub user_count: usize,
    /// Undirected friendships `(u, v)` with `u < v`, sorted.
    pub user_edges: Vec<(usize, usize)>,
    /// Item ids per user, sorted.
    pub listens: Vec<Vec<usize>>,
    /// Name to item id, for names that identify a single item.
    pub item_index: BTreeMap<String, usize>,
    pub item_names: Vec<String>,
    /// Original ids; user `i` is `user_ids[i]`.
    pub user_ids: Vec<u64>,
    pub item_ids: Vec<u64>,
    pub summary: LoadSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemIndicator {
    pub item: usize,
    /// Entry `u` is `+1` iff user `u` has the item.
    pub vector: SpinConfig,
}

impl BipartiteDataset {
    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.user_count, &self.user_edges).expect("edges validated at load")
    }

    pub fn item_count(&self) -> usize {
        self.item_ids.len()
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.user_edges.len() as f64 / self.user_count as f64
    }

    pub fn item_id(&self, name: &str) -> Result<usize> {
        if let Some(&id) = self.item_index.get(name) {
            return Ok(id);
        }
        let matches: Vec<u64> = self
            .item_names
            .iter()
            .zip(&self.item_ids)
            .filter(|(n, _)| n.as_str() == name)
            .map(|(_, &id)| id)
            .collect();
        match matches.len() {
            0 => Err(Error::InvalidArgument(format!("unknown item '{name}'"))),
            _ => Err(Error::InvalidArgument(format!(
                "item name '{name}' is shared by original ids {matches:?}"
            ))),
        }
    }

    /// Number of users holding item `item`.
    pub fn favorite_count(&self, item: usize) -> usize {
        self.listens.iter().filter(|l| l.binary_search(&item).is_ok()).count()
    }

    pub fn item_vector(&self, name: &str) -> Result<ItemIndicator> {
        self.item_vector_by_id(self.item_id(name)?)
    }

    pub fn item_vector_by_id(&self, item: usize) -> Result<ItemIndicator> {
        if item >= self.item_count() {
            return Err(Error::Index {
                index: item,
                n: self.item_count(),
            });
        }
        let spins = self
            .listens
            .iter()
            .map(|l| if l.binary_search(&item).is_ok() { 1 } else { -1 })
            .collect();
        Ok(ItemIndicator {
            item,
            vector: SpinConfig::new(spins)?,
        })
    }
}

fn read_lossy(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub fn load_bipartite(
    friends: impl AsRef<Path>,
    listens: impl AsRef<Path>,
    artists: Option<&Path>,
) -> Result<BipartiteDataset> {
    let (friends, listens) = (friends.as_ref(), listens.as_ref());
    let artists_text = artists.map(read_lossy).transpose()?;
    let artists_label = artists.map(|p| p.display().to_string());
    parse_bipartite(
        (&read_lossy(friends)?, &friends.display().to_string()),
        (&read_lossy(listens)?, &listens.display().to_string()),
        artists_text.as_deref().zip(artists_label.as_deref()),
    )
}

/// Data rows as `(line number, fields)`, skipping blanks and a leading header.
fn rows(text: &str) -> Vec<(usize, Vec<&str>)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').map(str::trim).collect()
        } else {
            line.split(',').map(str::trim).collect()
        };
        if out.is_empty() && i == 0 && fields[0].parse::<u64>().is_err() {
            continue;
        }
        out.push((i + 1, fields));
    }
    out
}

fn need(path: &str, line: usize, fields: &[&str], count: usize) -> Result<()> {
    if fields.len() < count {
        return Err(Error::parse(
            path,
            line,
            format!("expected at least {count} columns, found {}", fields.len()),
        ));
    }
    Ok(())
}

/// Each argument is `(contents, path label)`.
pub fn parse_bipartite(
    friends: (&str, &str),
    listens: (&str, &str),
    artists: Option<(&str, &str)>,
) -> Result<BipartiteDataset> {
    let mut summary = LoadSummary::default();

    let (text, path) = listens;
    let mut weights: BTreeMap<u64, BTreeMap<u64, f64>> = BTreeMap::new();
    for (line, fields) in rows(text) {
        need(path, line, &fields, 3)?;
        let user: u64 = parse_field(path, line, fields[0], "user id")?;
        let item: u64 = parse_field(path, line, fields[1], "item id")?;
        let weight: f64 = parse_field(path, line, fields[2], "weight")?;
        if !weight.is_finite() {
            return Err(Error::parse(path, line, "non-finite weight"));
        }
        summary.listen_rows += 1;
        let slot = weights.entry(user).or_default().entry(item).or_insert(f64::NEG_INFINITY);
        if *slot != f64::NEG_INFINITY {
            summary.duplicate_listens += 1;
        }
        *slot = slot.max(weight);
    }
    if weights.is_empty() {
        return Err(Error::parse(path, 1, "no listen rows"));
    }
    let user_ids: Vec<u64> = weights.keys().copied().collect();
    let user_pos: HashMap<u64, usize> = user_ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();

    let mut names: BTreeMap<u64, String> = BTreeMap::new();
    if let Some((text, path)) = artists {
        for (line, fields) in rows(text) {
            need(path, line, &fields, 2)?;
            let id: u64 = parse_field(path, line, fields[0], "item id")?;
            if names.insert(id, fields[1].to_string()).is_some() {
                return Err(Error::parse(path, line, format!("duplicate item id {id}")));
            }
        }
    }
    let mut item_set: BTreeSet<u64> = names.keys().copied().collect();
    for per_user in weights.values() {
        for &item in per_user.keys() {
            if artists.is_some() && !names.contains_key(&item) {
                let (_, path) = listens;
                return Err(Error::InvalidArgument(format!(
                    "{path}: item id {item} does not appear in the item file"
                )));
            }
            item_set.insert(item);
        }
    }
    let item_ids: Vec<u64> = item_set.into_iter().collect();
    let item_pos: HashMap<u64, usize> = item_ids.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let item_names: Vec<String> = item_ids
        .iter()
        .map(|id| names.get(id).cloned().unwrap_or_else(|| id.to_string()))
        .collect();
    let mut name_counts: HashMap<&str, usize> = HashMap::new();
    for name in &item_names {
        *name_counts.entry(name).or_default() += 1;
    }
    let item_index: BTreeMap<String, usize> = item_names
        .iter()
        .enumerate()
        .filter(|(_, n)| name_counts[n.as_str()] == 1)
        .map(|(i, n)| (n.clone(), i))
        .collect();
    summary.ambiguous_names = name_counts.values().filter(|&&c| c > 1).count();

    let mut user_listens = Vec::with_capacity(user_ids.len());
    for per_user in weights.values() {
        let mut ranked: Vec<(u64, f64)> = per_user.iter().map(|(&a, &w)| (a, w)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        if ranked.len() > MAX_LISTENS {
            summary.truncated_users += 1;
            summary.dropped_listens += ranked.len() - MAX_LISTENS;
            ranked.truncate(MAX_LISTENS);
        }
        let mut items: Vec<usize> = ranked.iter().map(|(a, _)| item_pos[a]).collect();
        items.sort_unstable();
        user_listens.push(items);
    }

    let (text, path) = friends;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (line, fields) in rows(text) {
        need(path, line, &fields, 2)?;
        let mut ends = [0usize; 2];
        for (slot, token) in ends.iter_mut().zip(&fields[..2]) {
            let id: u64 = parse_field(path, line, token, "user id")?;
            *slot = *user_pos
                .get(&id)
                .ok_or_else(|| Error::parse(path, line, format!("user {id} has no listen rows")))?;
        }
        if ends[0] == ends[1] {
            return Err(Error::parse(path, line, "user listed as their own friend"));
        }
        summary.friend_rows += 1;
        edges.insert((ends[0].min(ends[1]), ends[0].max(ends[1])));
    }

    summary.users = user_ids.len();
    summary.edges = edges.len();
    summary.items = item_ids.len();
    if summary.truncated_users > 0 {
        log::warn!(
            "truncated {} users to {MAX_LISTENS} items ({} listens dropped)",
            summary.truncated_users,
            summary.dropped_listens
        );
    }
    Ok(BipartiteDataset {
        user_count: user_ids.len(),
        user_edges: edges.into_iter().collect(),
        listens: user_listens,
        item_index,
        item_names,
        user_ids,
        item_ids,
        summary,
    })
}

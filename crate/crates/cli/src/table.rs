//! Column lookup over CSV files with a header row.

use std::path::Path;

use anyhow::{anyhow, bail, Context};

/// A CSV file read fully into memory, addressed by column name.
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("opening {}", path.display()))?;
        let headers = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("reading {}", path.display()))?;
        Ok(Self { headers, rows })
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> anyhow::Result<usize> {
        self.find(name)
            .ok_or_else(|| anyhow!("missing column {name:?}"))
    }

    /// First of `names` present in the header.
    pub fn column_any(&self, names: &[&str]) -> anyhow::Result<usize> {
        names
            .iter()
            .find_map(|n| self.find(n))
            .ok_or_else(|| anyhow!("missing column {:?}", names.join(" or ")))
    }

    pub fn float(&self, row: usize, col: usize) -> anyhow::Result<f64> {
        let raw = self.rows[row].get(col).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => bail!(
                "row {}: column {:?} holds {raw:?}, expected a finite number",
                row + 2,
                self.headers[col]
            ),
        }
    }

    pub fn text(&self, row: usize, col: usize) -> &str {
        self.rows[row].get(col).unwrap_or("")
    }
}

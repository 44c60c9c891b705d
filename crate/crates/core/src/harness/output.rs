//! Result records and their CSV form.
//!
//! Layout: `#`-prefixed `key=value` metadata lines, one header row, then
//! data rows. Fields never contain commas; floats use the shortest
//! representation that parses back to the same value.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: String,
    pub config_hash: String,
    /// Git-style object id of the data section (header plus rows).
    pub content_id: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, String>,
    pub wall_time_s: f64,
}

/// `sha256("blob <len>\0" ++ data)`, as git computes object ids.
pub fn content_id(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", data.len()).as_bytes());
    h.update(data);
    hex::encode(h.finalize())
}

impl ResultRecord {
    pub fn new(kind: &str, config_hash: String, header: &[&str], rows: Vec<Vec<String>>, summary: BTreeMap<String, String>) -> Self {
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        let mut r = Self { kind: kind.into(), config_hash, content_id: String::new(), header, rows, summary, wall_time_s: 0.0 };
        r.content_id = content_id(r.data_section().as_bytes());
        r
    }

    /// Header and rows, LF-terminated.
    pub fn data_section(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# kind={}\n", self.kind));
        s.push_str(&format!("# config_hash={}\n", self.config_hash));
        s.push_str(&format!("# content_id={}\n", self.content_id));
        for (k, v) in &self.summary {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s.push_str(&format!("# wall_time_s={}\n", self.wall_time_s));
        s.push_str(&self.data_section());
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = BTreeMap::new();
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.next_if(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some((k, v)) = body.split_once('=') {
                meta.insert(k.to_string(), v.to_string());
            }
        }
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Config("result file has no header row".into()))?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows: Vec<Vec<String>> = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(str::to_string).collect()).collect();
        if rows.iter().any(|r| r.len() != header.len()) {
            return Err(Error::Config("row width differs from header".into()));
        }
        let take = |m: &mut BTreeMap<String, String>, k: &str| m.remove(k).ok_or_else(|| Error::Config(format!("missing metadata `{k}`")));
        let kind = take(&mut meta, "kind")?;
        let config_hash = take(&mut meta, "config_hash")?;
        let content = take(&mut meta, "content_id")?;
        let wall_time_s = meta.remove("wall_time_s").and_then(|v| v.parse().ok()).unwrap_or(0.0);
        let r = Self { kind, config_hash, content_id: content, header, rows, summary: meta, wall_time_s };
        if content_id(r.data_section().as_bytes()) != r.content_id {
            return Err(Error::Config("content id does not match the data rows".into()));
        }
        Ok(r)
    }

    /// Writes next to the target and renames into place.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        std::fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_csv().as_bytes())?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    /// Column `name` parsed as floats.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name).ok_or_else(|| Error::Config(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| r[i].parse::<f64>().map_err(|e| Error::Config(format!("column `{name}`: {e}"))))
            .collect()
    }

    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(|v| v.parse().ok())
    }
}

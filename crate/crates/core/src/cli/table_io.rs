//! CSV documents with `# key: value` metadata lines ahead of a column row,
//! and atomic file writes.

use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("malformed CSV: {0}")]
    Malformed(String),
    #[error("CSV has no column '{0}'")]
    MissingColumn(String),
    #[error("CSV has no data rows")]
    Empty,
}

/// Fixed 17-significant-digit rendering so that outputs are byte-stable.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvDoc {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, CsvError> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CsvError::MissingColumn(name.to_string()))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[idx].trim().parse::<f64>().map_err(|_| {
                    CsvError::Malformed(format!("row {}: '{}' is not a number", i + 1, row[idx]))
                })
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&bytes).expect("UTF-8 cells"));
        out
    }

    pub fn parse(text: &str) -> Result<Self, CsvError> {
        let mut meta = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some((k, v)) = body.split_once(':') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| CsvError::Malformed(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.iter().all(|c| c.trim().is_empty()) {
            return Err(CsvError::Empty);
        }
        let rows = reader
            .records()
            .map(|r| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| CsvError::Malformed(e.to_string()))
            })
            .collect::<Result<Vec<Vec<String>>, _>>()?;
        if rows.is_empty() {
            return Err(CsvError::Empty);
        }
        Ok(Self {
            meta,
            columns,
            rows,
        })
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

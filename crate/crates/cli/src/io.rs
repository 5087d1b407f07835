//! Series input and atomic output.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use gpe_core::TimeSeries;

use crate::Invalid;

/// Reads a numeric CSV: one value per line, or `t,value` pairs. A non-numeric
/// first row is treated as a header. `-` reads standard input.
pub fn read_series(path: &Path) -> Result<TimeSeries> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)
    } else {
        File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    };
    res.map_err(|e| Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_series(&text).map_err(|m| Invalid(format!("{}: {m}", path.display())).into())
}

pub fn parse_series(text: &str) -> std::result::Result<TimeSeries, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let field = match rec.len() {
            0 => continue,
            1 => &rec[0],
            2 => &rec[1],
            n => return Err(format!("line {line}: expected 1 or 2 columns, got {n}")),
        };
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => {}
            Err(_) => return Err(format!("line {line}: not a number: {field:?}")),
        }
    }
    TimeSeries::new(values).map_err(|e| e.to_string())
}

/// Writes `contents` to `path` through a temporary file in the same directory, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes to `path` (printing the path) if given, else to stdout.
pub fn emit(path: Option<&Path>, contents: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            write_atomic(p, contents)?;
            println!("{}", p.display());
        }
        None => io::stdout().write_all(contents)?,
    }
    Ok(())
}

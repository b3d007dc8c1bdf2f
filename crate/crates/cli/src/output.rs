//! CSV and JSON emission to a file or stdout.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Header line followed by one record per row.
pub fn write_csv<R: Serialize>(path: Option<&Path>, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Where a companion JSON document goes: next to `out` as
/// `<stem>.<suffix>.json`, or `None` when writing to stdout.
pub fn sidecar(out: Option<&Path>, suffix: &str) -> Option<PathBuf> {
    let out = out?;
    let stem = out.file_stem()?.to_string_lossy().into_owned();
    Some(out.with_file_name(format!("{stem}.{suffix}.json")))
}

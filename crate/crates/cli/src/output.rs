//! Output sinks: files or stdout, versioned JSON envelopes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use pwcis::Result;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// `None` and `-` both mean stdout.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn is_stdout(path: Option<&Path>) -> bool {
    path.is_some_and(|p| p == Path::new("-"))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a Value,
    report: &'a T,
}

pub fn write_json<T: Serialize>(
    path: &Path,
    command: &str,
    config: &Value,
    report: &T,
) -> Result<()> {
    let mut out = sink(Some(path))?;
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        report,
    };
    serde_json::to_writer_pretty(&mut out, &env).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

//! JSONL readers for ellipse groups and point clouds.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use elliptic_links::records::{parse_line, ParsedLine, PointCloudRecord, SCHEMA_VERSION};
use elliptic_links::EllipseSpec;

use crate::CliError;

/// Ellipses classified together, tagged with the line they started on.
#[derive(Debug, Clone)]
pub struct Group {
    pub line: usize,
    pub specs: Vec<EllipseSpec>,
}

pub fn open(path: &Path) -> Result<Box<dyn BufRead>, CliError> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).map_err(|e| CliError::new(format!("cannot open {}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(file)))
}

fn lines(reader: impl Read) -> impl Iterator<Item = (usize, io::Result<String>)> {
    BufReader::new(reader)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('#')))
}

/// Reads groups of exactly `size` ellipses. A line may hold a whole group
/// (array or `{"v":1,"ellipses":[...]}`) or a single record; single records
/// on consecutive lines are collected until the group is full.
pub fn read_groups(reader: impl Read, size: usize) -> Result<Vec<Group>, CliError> {
    let mut groups = Vec::new();
    let mut pending: Option<Group> = None;
    for (n, line) in lines(reader) {
        let line = line.map_err(|e| CliError::new(format!("line {n}: {e}")))?;
        let parsed = parse_line(&line).map_err(|e| CliError::new(format!("line {n}: malformed record: {e}")))?;
        match parsed {
            ParsedLine::Group(specs) => {
                if let Some(p) = &pending {
                    return Err(CliError::new(format!("line {}: incomplete group before line {n}", p.line)));
                }
                if specs.len() != size {
                    return Err(CliError::new(format!("line {n}: expected {size} ellipses, found {}", specs.len())));
                }
                groups.push(Group { line: n, specs });
            }
            ParsedLine::Single(spec) => {
                let group = pending.get_or_insert_with(|| Group { line: n, specs: Vec::with_capacity(size) });
                group.specs.push(spec);
                if group.specs.len() == size {
                    groups.extend(pending.take());
                }
            }
        }
    }
    if let Some(p) = pending {
        return Err(CliError::new(format!(
            "line {}: incomplete group of {} ellipses at end of input",
            p.line,
            p.specs.len()
        )));
    }
    Ok(groups)
}

pub fn read_point_clouds(reader: impl Read) -> Result<Vec<(usize, PointCloudRecord)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in lines(reader) {
        let line = line.map_err(|e| CliError::new(format!("line {n}: {e}")))?;
        let record: PointCloudRecord =
            serde_json::from_str(&line).map_err(|e| CliError::new(format!("line {n}: malformed record: {e}")))?;
        if record.v != SCHEMA_VERSION {
            return Err(CliError::new(format!("line {n}: unsupported schema version {}", record.v)));
        }
        out.push((n, record));
    }
    Ok(out)
}

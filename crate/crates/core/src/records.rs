//! JSONL record schemas.
//!
//! An ellipse record is `{"rho", "alpha", "phi", "normal": [x,y,z], "center": [x,y,z]}`
//! with an optional schema version `"v"`. A point-cloud record is
//! `{"points": [[x,y,z], ...]}`. A group line holds several ellipses, either
//! as a JSON array of ellipse records or as `{"v": 1, "ellipses": [...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{EllipseSpec, Polyline3, Vec3};

pub const SCHEMA_VERSION: u32 = 1;

fn current_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseRecord {
    #[serde(default = "current_version")]
    pub v: u32,
    #[serde(flatten)]
    pub spec: EllipseSpec,
}

impl From<EllipseSpec> for EllipseRecord {
    fn from(spec: EllipseSpec) -> Self {
        EllipseRecord {
            v: SCHEMA_VERSION,
            spec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloudRecord {
    #[serde(default = "current_version")]
    pub v: u32,
    pub points: Vec<[f64; 3]>,
}

impl PointCloudRecord {
    pub fn to_polyline(&self) -> Result<Polyline3> {
        check_version(self.v)?;
        Polyline3::closed(self.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    #[serde(default = "current_version")]
    pub v: u32,
    pub ellipses: Vec<EllipseRecord>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Line {
    Array(Vec<EllipseRecord>),
    Group(GroupRecord),
    Single(EllipseRecord),
}

/// One parsed JSONL line.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedLine {
    /// Several ellipses on one line.
    Group(Vec<EllipseSpec>),
    /// A lone ellipse record, to be grouped with its neighbours.
    Single(EllipseSpec),
}

fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("unsupported schema version {v}")))
    }
}

pub fn parse_line(line: &str) -> std::result::Result<ParsedLine, String> {
    let parsed: Line = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let specs = |records: Vec<EllipseRecord>| -> std::result::Result<Vec<EllipseSpec>, String> {
        records
            .into_iter()
            .map(|r| check_version(r.v).map(|_| r.spec).map_err(|e| e.to_string()))
            .collect()
    };
    match parsed {
        Line::Array(records) => specs(records).map(ParsedLine::Group),
        Line::Group(group) => {
            check_version(group.v).map_err(|e| e.to_string())?;
            specs(group.ellipses).map(ParsedLine::Group)
        }
        Line::Single(record) => {
            check_version(record.v).map_err(|e| e.to_string())?;
            Ok(ParsedLine::Single(record.spec))
        }
    }
}

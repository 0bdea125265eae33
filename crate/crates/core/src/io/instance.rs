//! Versioned JSON instance files.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::{Disk, Point};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskRecord {
    pub x: f64,
    pub y: f64,
    pub r: f64,
    pub w: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub disks: Vec<DiskRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// Where and why an instance file was rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaError {
    pub message: String,
    /// 1-based position for syntax and type errors.
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// Offending field, e.g. `disks[2].r`.
    pub path: Option<String>,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, "line {l}, column {c}: ")?;
        }
        if let Some(p) = &self.path {
            write!(f, "{p}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for SchemaError {}

impl InstanceFile {
    pub fn from_disks(disks: &[Disk], metadata: Option<Metadata>) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            disks: disks
                .iter()
                .map(|d| DiskRecord {
                    x: d.center.x,
                    y: d.center.y,
                    r: d.radius,
                    w: d.weight,
                })
                .collect(),
            metadata,
        }
    }

    /// Disks with ids in file order.
    pub fn to_disks(&self) -> Vec<Disk> {
        self.disks
            .iter()
            .enumerate()
            .map(|(i, r)| Disk {
                id: i,
                center: Point::new(r.x, r.y),
                radius: r.r,
                weight: r.w,
                is_auxiliary: false,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// Strict parse: unknown fields, a wrong version, non-finite coordinates, a
/// negative radius or a non-positive weight are all rejected.
pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile, SchemaError> {
    let file: InstanceFile = serde_json::from_slice(bytes).map_err(|e| SchemaError {
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
        path: None,
    })?;
    let fail = |path: String, message: &str| SchemaError {
        message: message.to_string(),
        line: None,
        column: None,
        path: Some(path),
    };
    if file.version != FORMAT_VERSION {
        return Err(fail("version".into(), &format!("unsupported version, expected {FORMAT_VERSION}")));
    }
    for (i, d) in file.disks.iter().enumerate() {
        if !d.x.is_finite() {
            return Err(fail(format!("disks[{i}].x"), "must be finite"));
        }
        if !d.y.is_finite() {
            return Err(fail(format!("disks[{i}].y"), "must be finite"));
        }
        if !(d.r.is_finite() && d.r >= 0.0) {
            return Err(fail(format!("disks[{i}].r"), "must be finite and non-negative"));
        }
        if !(d.w.is_finite() && d.w > 0.0) {
            return Err(fail(format!("disks[{i}].w"), "must be finite and positive"));
        }
    }
    Ok(file)
}

//! File formats: polygon input, plan and trace files, canonical JSON and
//! the FNV-1a digest.

use std::fmt::Write as _;
use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::deploy::{deploy_polygon, DeploymentPlan};
use crate::error::{Error, Result};
use crate::geometry::{Point, SimplePolygon};
use crate::orthogonal::deploy_orthogonal;

pub const SCHEMA_VERSION: u32 = 1;

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let f = n.as_f64().unwrap_or(0.0);
                let _ = write!(out, "{f:.16e}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&m[k], out);
            }
            out.push('}');
        }
    }
}

/// Compact JSON with sorted keys and every float in 17 significant digits.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_canonical(&v, &mut out);
    Ok(out)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// Hex FNV-1a digest of the canonical serialization.
pub fn digest<T: Serialize>(value: &T) -> Result<String> {
    Ok(format!("{:016x}", fnv1a64(to_canonical_json(value)?.as_bytes())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonFile {
    pub schema_version: u32,
    pub vertices: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orthogonal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quads: Option<Vec<[usize; 4]>>,
    pub name: String,
}

/// A validated input: counter-clockwise polygon, quads re-indexed to match.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonInput {
    pub name: String,
    pub polygon: SimplePolygon,
    pub orthogonal: bool,
    pub quads: Option<Vec<[usize; 4]>>,
}

impl PolygonFile {
    pub fn new(name: &str, vertices: &[Point]) -> PolygonFile {
        PolygonFile {
            schema_version: SCHEMA_VERSION,
            vertices: vertices.iter().map(|p| [p.x, p.y]).collect(),
            orthogonal: None,
            quads: None,
            name: name.to_string(),
        }
    }

    pub fn validate(&self) -> Result<PolygonInput> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "schema_version {} is not supported",
                self.schema_version
            )));
        }
        let orthogonal = self.orthogonal.unwrap_or(false);
        if self.quads.is_some() && !orthogonal {
            return Err(Error::Format("quads are only allowed for orthogonal polygons".into()));
        }
        let pts: Vec<Point> = self.vertices.iter().map(|&v| v.into()).collect();
        let n = pts.len();
        let clockwise = n >= 3 && {
            let s: f64 = (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum();
            s < 0.0
        };
        let polygon = SimplePolygon::new(pts)?;
        if orthogonal {
            crate::orthogonal::check_orthogonal(&polygon)?;
        }
        // indices follow the file's ring; each quad is turned counter-clockwise
        let quads = self.quads.as_ref().map(|qs| {
            qs.iter()
                .map(|q| {
                    let f = |i: usize| if clockwise { n.wrapping_sub(1).wrapping_sub(i) } else { i };
                    let mut m = q.map(f);
                    let ccw = m.iter().all(|&i| i < n) && {
                        let pts = m.map(|i| polygon.vertex(i));
                        (0..4).map(|k| pts[k].cross(pts[(k + 1) % 4])).sum::<f64>() > 0.0
                    };
                    if !ccw {
                        m.reverse();
                    }
                    m
                })
                .collect()
        });
        Ok(PolygonInput {
            name: self.name.clone(),
            polygon,
            orthogonal,
            quads,
        })
    }
}

impl PolygonInput {
    /// Orthogonal inputs go through quad grouping, the rest through the
    /// minimal partition.
    pub fn deploy(&self, v_e: f64) -> Result<DeploymentPlan> {
        if self.orthogonal {
            deploy_orthogonal(&self.name, &self.polygon, self.quads.as_deref(), v_e)
        } else {
            deploy_polygon(&self.name, &self.polygon, v_e)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub schema_version: u32,
    pub digest: String,
    pub plan: DeploymentPlan,
}

impl PlanFile {
    pub fn new(plan: DeploymentPlan) -> Result<PlanFile> {
        Ok(PlanFile {
            schema_version: SCHEMA_VERSION,
            digest: digest(&plan)?,
            plan,
        })
    }

    /// Digest recomputed from the plan matches the stored one.
    pub fn verify(&self) -> Result<()> {
        let d = digest(&self.plan)?;
        if d == self.digest {
            Ok(())
        } else {
            Err(Error::Format(format!("plan digest {} does not match {d}", self.digest)))
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_canonical_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = to_canonical_json(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_polygon(path: &Path) -> Result<PolygonInput> {
    read_json::<PolygonFile>(path)?.validate()
}

//! JSON schemas for flow fields and decompositions.
//!
//! A field document lists every edge of the closure exactly once, keyed by
//! a site (t, x) and a tilted-lattice direction: NE and SE edges are keyed
//! by their source site; the entering SW/NW edges by the bottom-row /
//! left-column site they feed. Zero-weight edges are kept.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

use super::decompose::Decomposition;
use super::domain::{RectDomain, Site};
use super::flow::FlowField;
use super::trace::BrokenTrace;
use super::weight::Weight;

pub const FIELD_SCHEMA: &str = "lattice-lines/field-v1";
pub const DECOMPOSITION_SCHEMA: &str = "lattice-lines/decomposition-v1";

/// Weight <-> JSON scalar conversion respecting the mode.
pub trait JsonWeight: Weight {
    const MODE: &'static str;
    fn encode(self) -> Value;
    fn decode(v: &Value) -> Result<Self>;
}

impl JsonWeight for u64 {
    const MODE: &'static str = "int";

    fn encode(self) -> Value {
        Value::from(self)
    }

    fn decode(v: &Value) -> Result<Self> {
        v.as_u64()
            .ok_or_else(|| Error::schema(format!("expected a nonnegative integer, got {v}")))
    }
}

impl JsonWeight for f64 {
    const MODE: &'static str = "real";

    fn encode(self) -> Value {
        Value::from(self)
    }

    fn decode(v: &Value) -> Result<Self> {
        let x = v
            .as_f64()
            .ok_or_else(|| Error::schema(format!("expected a number, got {v}")))?;
        if !x.is_finite() || x < 0.0 {
            return Err(Error::schema(format!("weight must be finite nonnegative, got {x}")));
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainJson {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub t: i64,
    pub x: i64,
    pub dir: String,
    pub w: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldJson {
    pub schema: String,
    pub domain: DomainJson,
    pub mode: String,
    pub edges: Vec<EdgeJson>,
}

pub fn field_to_json<W: JsonWeight>(field: &FlowField<W>) -> FieldJson {
    let domain = field.domain();
    let (n, m) = (domain.n() as i32, domain.m() as i32);
    let mut edges = Vec::new();
    let mut push = |s: Site, dir: &str, w: W| {
        edges.push(EdgeJson {
            t: s.t(),
            x: s.x(),
            dir: dir.to_string(),
            w: w.encode(),
        });
    };
    for i in 1..=n {
        push(Site::new(i, 1), "SW", field.up(i, 0));
    }
    for j in 1..=m {
        push(Site::new(1, j), "NW", field.right(0, j));
    }
    for i in 1..=n {
        for j in 1..=m {
            let s = Site::new(i, j);
            push(s, "NE", field.up(i, j));
            push(s, "SE", field.right(i, j));
        }
    }
    FieldJson {
        schema: FIELD_SCHEMA.to_string(),
        domain: DomainJson {
            n: domain.n(),
            m: domain.m(),
        },
        mode: W::MODE.to_string(),
        edges,
    }
}

pub fn field_from_json<W: JsonWeight>(doc: &FieldJson) -> Result<FlowField<W>> {
    if doc.schema != FIELD_SCHEMA {
        return Err(Error::schema(format!("unknown schema {}", doc.schema)));
    }
    if doc.mode != W::MODE {
        return Err(Error::schema(format!(
            "mode mismatch: document is {}, requested {}",
            doc.mode,
            W::MODE
        )));
    }
    let domain = RectDomain::new(doc.domain.n, doc.domain.m)?;
    let (n, m) = (domain.n() as i32, domain.m() as i32);
    let mut field = FlowField::zero(domain);
    let mut seen_up = vec![false; (n as usize) * (m as usize + 1)];
    let mut seen_right = vec![false; (n as usize + 1) * (m as usize)];
    for e in &doc.edges {
        let s = Site::from_tx(e.t, e.x)
            .ok_or_else(|| Error::schema(format!("({}, {}) is not a lattice site", e.t, e.x)))?;
        let w = W::decode(&e.w)?;
        // Resolve (site, dir) to a flow slot.
        let (is_up, i, j) = match e.dir.as_str() {
            "NE" => (true, s.i, s.j),
            "SW" => (true, s.i, s.j - 1),
            "SE" => (false, s.i, s.j),
            "NW" => (false, s.i - 1, s.j),
            other => return Err(Error::schema(format!("unknown direction {other}"))),
        };
        let slot_ok = if is_up {
            i >= 1 && i <= n && j >= 0 && j <= m
        } else {
            i >= 0 && i <= n && j >= 1 && j <= m
        };
        if !slot_ok {
            return Err(Error::schema(format!(
                "edge {} at ({}, {}) lies outside the closure",
                e.dir, e.t, e.x
            )));
        }
        if is_up {
            let idx = (i as usize - 1) * (m as usize + 1) + j as usize;
            if seen_up[idx] {
                return Err(Error::schema(format!(
                    "duplicate edge {} at ({}, {})",
                    e.dir, e.t, e.x
                )));
            }
            seen_up[idx] = true;
            field.set_up(i, j, w);
        } else {
            let idx = i as usize * m as usize + (j as usize - 1);
            if seen_right[idx] {
                return Err(Error::schema(format!(
                    "duplicate edge {} at ({}, {})",
                    e.dir, e.t, e.x
                )));
            }
            seen_right[idx] = true;
            field.set_right(i, j, w);
        }
    }
    if !seen_up.iter().all(|&b| b) || !seen_right.iter().all(|&b| b) {
        return Err(Error::schema(
            "field document does not cover every edge of the closure".to_string(),
        ));
    }
    Ok(field)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineJson {
    pub weight: Value,
    /// Vertex list as (t, x) pairs, x increasing.
    pub vertices: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub schema: String,
    pub domain: DomainJson,
    pub mode: String,
    pub lines: Vec<LineJson>,
}

pub fn decomposition_to_json<W: JsonWeight>(d: &Decomposition<W>) -> DecompositionJson {
    DecompositionJson {
        schema: DECOMPOSITION_SCHEMA.to_string(),
        domain: DomainJson {
            n: d.domain().n(),
            m: d.domain().m(),
        },
        mode: W::MODE.to_string(),
        lines: d
            .traces()
            .iter()
            .zip(d.weights())
            .map(|(t, &w)| LineJson {
                weight: w.encode(),
                vertices: t.vertices().iter().map(|v| (v.t(), v.x())).collect(),
            })
            .collect(),
    }
}

pub fn decomposition_from_json<W: JsonWeight>(doc: &DecompositionJson) -> Result<Decomposition<W>> {
    if doc.schema != DECOMPOSITION_SCHEMA {
        return Err(Error::schema(format!("unknown schema {}", doc.schema)));
    }
    if doc.mode != W::MODE {
        return Err(Error::schema(format!(
            "mode mismatch: document is {}, requested {}",
            doc.mode,
            W::MODE
        )));
    }
    let domain = RectDomain::new(doc.domain.n, doc.domain.m)?;
    let mut traces = Vec::with_capacity(doc.lines.len());
    let mut weights = Vec::with_capacity(doc.lines.len());
    for line in &doc.lines {
        let vertices: Option<Vec<Site>> = line
            .vertices
            .iter()
            .map(|&(t, x)| Site::from_tx(t, x))
            .collect();
        let vertices =
            vertices.ok_or_else(|| Error::schema("line vertex off the lattice".to_string()))?;
        traces.push(BrokenTrace::new(vertices)?);
        weights.push(W::decode(&line.weight)?);
    }
    Decomposition::from_parts(domain, traces, weights)
}

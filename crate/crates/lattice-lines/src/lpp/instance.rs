//! Instances and solutions.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bl::{BirthField, BoundaryFlows, JsonWeight, RectDomain, Site, Weight};
use crate::error::{Error, Result};
use crate::rng::{ExponentialLaw, GeometricLaw, SeededStream};

/// A nonnegative birth field on an N×M grid, with optional boundary
/// inflows for the enlarged-domain comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LppInstance<W> {
    pub births: BirthField<W>,
    pub boundary: Option<BoundaryFlows<W>>,
}

impl<W: Weight> LppInstance<W> {
    pub fn new(births: BirthField<W>) -> Self {
        LppInstance {
            births,
            boundary: None,
        }
    }

    pub fn with_boundary(births: BirthField<W>, boundary: BoundaryFlows<W>) -> Result<Self> {
        boundary.validate(births.domain())?;
        Ok(LppInstance {
            births,
            boundary: Some(boundary),
        })
    }

    pub fn domain(&self) -> RectDomain {
        self.births.domain()
    }
}

impl LppInstance<f64> {
    /// i.i.d. Exp(α) births.
    pub fn sample_exponential(
        domain: RectDomain,
        alpha: f64,
        stream: &mut SeededStream,
    ) -> Result<Self> {
        let law = ExponentialLaw::new(alpha)?;
        let mut births = BirthField::zero(domain);
        for s in domain.sites() {
            births.set(s.i, s.j, law.sample(stream));
        }
        Ok(LppInstance::new(births))
    }
}

impl LppInstance<u64> {
    /// i.i.d. Geom(λ) births.
    pub fn sample_geometric(
        domain: RectDomain,
        lambda: f64,
        stream: &mut SeededStream,
    ) -> Result<Self> {
        let law = GeometricLaw::new(lambda)?;
        let mut births = BirthField::zero(domain);
        for s in domain.sites() {
            births.set(s.i, s.j, law.sample(stream));
        }
        Ok(LppInstance::new(births))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Dp,
    BrokenLine,
}

/// An optimal path with its value. The path runs from (1,1) to (N,M) in
/// unit grid steps and its birth sum equals `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LppSolution<W> {
    pub value: W,
    pub path: Vec<Site>,
    pub method: Method,
}

impl<W: Weight> LppSolution<W> {
    pub fn path_sum(&self, births: &BirthField<W>) -> W {
        self.path
            .iter()
            .fold(W::ZERO, |acc, s| acc.add(births.get(s.i, s.j)))
    }

    /// Oriented, correct length, endpoints at the corners.
    pub fn check_path_shape(&self, domain: RectDomain) -> Result<()> {
        let (n, m) = (domain.n() as i32, domain.m() as i32);
        if self.path.len() != (n + m - 1) as usize {
            return Err(Error::integrity(format!(
                "path has {} vertices, expected {}",
                self.path.len(),
                n + m - 1
            )));
        }
        if self.path[0] != Site::new(1, 1) || *self.path.last().unwrap() != Site::new(n, m) {
            return Err(Error::integrity("path endpoints are not the corners".to_string()));
        }
        for w in self.path.windows(2) {
            let (a, b) = (w[0], w[1]);
            let right = b.i == a.i + 1 && b.j == a.j;
            let up = b.i == a.i && b.j == a.j + 1;
            if !right && !up {
                return Err(Error::integrity(format!(
                    "path step ({},{}) -> ({},{}) is not oriented",
                    a.i, a.j, b.i, b.j
                )));
            }
        }
        Ok(())
    }
}

pub const INSTANCE_SCHEMA: &str = "lattice-lines/lpp-instance-v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LppInstanceJson {
    pub schema: String,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub mode: String,
    /// Births row-major in i then j: index (i-1)*M + (j-1).
    pub xi: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_plus: Option<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_minus: Option<Vec<Value>>,
}

pub fn instance_to_json<W: JsonWeight>(instance: &LppInstance<W>) -> LppInstanceJson {
    let domain = instance.domain();
    LppInstanceJson {
        schema: INSTANCE_SCHEMA.to_string(),
        n: domain.n(),
        m: domain.m(),
        mode: W::MODE.to_string(),
        xi: instance.births.values().iter().map(|w| w.encode()).collect(),
        zeta_plus: instance
            .boundary
            .as_ref()
            .map(|b| b.zeta_plus.iter().map(|w| w.encode()).collect()),
        zeta_minus: instance
            .boundary
            .as_ref()
            .map(|b| b.zeta_minus.iter().map(|w| w.encode()).collect()),
    }
}

pub fn instance_from_json<W: JsonWeight>(doc: &LppInstanceJson) -> Result<LppInstance<W>> {
    if doc.schema != INSTANCE_SCHEMA {
        return Err(Error::schema(format!("unknown schema {}", doc.schema)));
    }
    if doc.mode != W::MODE {
        return Err(Error::schema(format!(
            "mode mismatch: document is {}, requested {}",
            doc.mode,
            W::MODE
        )));
    }
    let domain = RectDomain::new(doc.n, doc.m)?;
    let values: Result<Vec<W>> = doc.xi.iter().map(W::decode).collect();
    let births = BirthField::from_values(domain, values?)?;
    let boundary = match (&doc.zeta_plus, &doc.zeta_minus) {
        (None, None) => None,
        (Some(zp), Some(zm)) => {
            let zp: Result<Vec<W>> = zp.iter().map(W::decode).collect();
            let zm: Result<Vec<W>> = zm.iter().map(W::decode).collect();
            let b = BoundaryFlows {
                zeta_plus: zp?,
                zeta_minus: zm?,
            };
            b.validate(domain)?;
            Some(b)
        }
        _ => {
            return Err(Error::schema(
                "zeta_plus and zeta_minus must be given together".to_string(),
            ))
        }
    };
    Ok(match boundary {
        Some(b) => LppInstance::with_boundary(births, b)?,
        None => LppInstance::new(births),
    })
}

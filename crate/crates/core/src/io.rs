//! JSON input formats with field-path diagnostics.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cconvex::ConvexBody;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::numerics::{HoloFunction, C64};
use crate::polytope::HalfSpace;
use crate::reinhardt::{LogPolyhedron, ReinhardtDomain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

/// Real half-space `<x, nu> <= c` on `R^{2n}` with `x = (Re z, Im z)` interleaved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub nu: Vec<f64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimSpec {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReinhardtSpec {
    pub pieces: Vec<PieceSpec>,
    pub meets_axes: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexSpec {
    pub rows: Vec<RowSpec>,
    pub complex_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<C64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    SymmetrizedPolydisc(DimSpec),
    Polydisc(DimSpec),
    Reinhardt(ReinhardtSpec),
    Convex(ConvexSpec),
    Ball(BallSpec),
    HalfDisc,
    SlitDisc,
}

const DOMAIN_TYPES: &str = "symmetrized_polydisc, polydisc, reinhardt, convex, ball, half_disc, slit_disc";

impl DomainSpec {
    /// Parse with field-path diagnostics. The tag is read first so that errors
    /// inside a variant keep their full path.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = parse_json(text, "domain")?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::InvalidInput("domain: expected a JSON object".into()))?;
        let tag = match obj.remove("type") {
            Some(serde_json::Value::String(t)) => t,
            Some(_) => return Err(Error::InvalidInput("domain: field `type` must be a string".into())),
            None => return Err(Error::InvalidInput("domain: missing field `type`".into())),
        };
        Ok(match tag.as_str() {
            "symmetrized_polydisc" => DomainSpec::SymmetrizedPolydisc(from_value(value, "domain")?),
            "polydisc" => DomainSpec::Polydisc(from_value(value, "domain")?),
            "reinhardt" => DomainSpec::Reinhardt(from_value(value, "domain")?),
            "convex" => DomainSpec::Convex(from_value(value, "domain")?),
            "ball" => DomainSpec::Ball(from_value(value, "domain")?),
            "half_disc" => DomainSpec::HalfDisc,
            "slit_disc" => DomainSpec::SlitDisc,
            other => {
                return Err(Error::InvalidInput(format!(
                    "domain: field `type`: unknown domain type `{other}` (expected one of {DOMAIN_TYPES})"
                )))
            }
        })
    }

    pub fn build(&self) -> Result<Domain> {
        Ok(match self {
            DomainSpec::SymmetrizedPolydisc(d) | DomainSpec::Polydisc(d) if d.n == 0 => {
                return Err(Error::InvalidInput("domain: field `n`: dimension must be positive".into()))
            }
            DomainSpec::SymmetrizedPolydisc(d) => Domain::SymmetrizedPolydisc { n: d.n },
            DomainSpec::Polydisc(d) => Domain::Polydisc { n: d.n },
            DomainSpec::Reinhardt(r) => {
                let mut built = Vec::with_capacity(r.pieces.len());
                for (i, p) in r.pieces.iter().enumerate() {
                    let piece = LogPolyhedron::from_ab(&p.a, &p.b)
                        .map_err(|e| Error::InvalidInput(format!("domain: field `pieces[{i}]`: {e}")))?;
                    built.push(piece);
                }
                Domain::Reinhardt(ReinhardtDomain::new(built, r.meets_axes.clone())?)
            }
            DomainSpec::Convex(c) => {
                let mut hs = Vec::with_capacity(c.rows.len());
                for (i, r) in c.rows.iter().enumerate() {
                    if r.nu.len() != 2 * c.complex_dim {
                        return Err(Error::InvalidInput(format!(
                            "domain: field `rows[{i}].nu`: expected {} real entries, found {}",
                            2 * c.complex_dim,
                            r.nu.len()
                        )));
                    }
                    hs.push(HalfSpace::new(r.nu.clone(), r.c));
                }
                Domain::Convex(ConvexBody::polyhedral(hs, c.complex_dim)?)
            }
            DomainSpec::Ball(b) => Domain::Convex(ConvexBody::ball(b.center.clone(), b.radius)?),
            DomainSpec::HalfDisc => Domain::HalfDisc,
            DomainSpec::SlitDisc => Domain::SlitDisc,
        })
    }
}

/// A function together with the point where it is claimed to peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakSpec {
    pub function: HoloFunction,
    pub point: Vec<C64>,
}

/// Parse JSON into `T`, naming the offending field path and position on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = format!("line {}, column {}", inner.line(), inner.column());
        if path == "." {
            Error::InvalidInput(format!("{what}: {inner} ({at})"))
        } else {
            Error::InvalidInput(format!("{what}: field `{path}`: {inner} ({at})"))
        }
    })
}

/// Deserialize an already parsed value, naming the offending field path.
pub fn from_value<T: DeserializeOwned>(value: serde_json::Value, what: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::InvalidInput(format!("{what}: field `{path}`: {}", e.into_inner()))
    })
}

/// Comma-separated complex coordinates, each like `2`, `-0.5i` or `1.5-0.3i`.
pub fn parse_point(text: &str) -> Result<Vec<C64>> {
    let text = text.trim();
    if text.starts_with('[') {
        return parse_json(text, "point");
    }
    text.split(',')
        .enumerate()
        .map(|(i, s)| {
            let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            s.parse::<C64>()
                .map_err(|_| Error::InvalidInput(format!("point coordinate {i}: cannot parse `{s}` as a complex number")))
        })
        .collect()
}

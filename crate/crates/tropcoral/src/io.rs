//! JSON file formats. Rationals are "p/q" strings, lattice vectors `[a, b]`,
//! points `["x", "h"]`.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constraints::{Constraint, StableRangeCertificate, Verdict};
use crate::coral::{Degree, TropicalCoral};
use crate::coralgraph::{CoralGraph, CoralType, EdgeId, VertexClass, VertexId};
use crate::counting::{CountResult, CurveEnd, EndKind, TropicalCurve};
use crate::lattice::{fmt_q, parse_q, LatticeVector, RationalPoint, Q};
use crate::moduli::TypeCatalog;
use crate::morse::MorseTree;
use crate::quotient::AreaSeries;
use crate::Error;

pub fn parse<T: DeserializeOwned>(s: &str) -> Result<T, Error> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRec {
    pub id: VertexId,
    pub class: VertexClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedRec {
    pub id: EdgeId,
    pub ends: [VertexId; 2],
    pub weight: u64,
    /// Flag direction at `ends[0]`.
    pub direction: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveRec {
    pub id: EdgeId,
    pub vertex: VertexId,
    pub weight: u64,
    pub direction: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeRec {
    pub vertex: VertexId,
    pub direction: LatticeVector,
    pub weight: u64,
}

/// A coral type; with `positions` it is a coral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoralFile {
    pub vertices: Vec<VertexRec>,
    pub bounded_edges: Vec<BoundedRec>,
    pub positive_edges: Vec<PositiveRec>,
    pub labels: Vec<EdgeId>,
    pub negative: Vec<NegativeRec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<BTreeMap<VertexId, RationalPoint>>,
}

impl CoralFile {
    pub fn from_type(t: &CoralType) -> Self {
        let g = &t.graph;
        CoralFile {
            vertices: g.vertices.iter().map(|&(id, class)| VertexRec { id, class }).collect(),
            bounded_edges: g
                .bounded_edges
                .iter()
                .map(|&(id, (a, b))| BoundedRec { id, ends: [a, b], weight: g.weight(id), direction: t.flag(a, id) })
                .collect(),
            positive_edges: g
                .positive_edges
                .iter()
                .map(|&(id, v)| PositiveRec { id, vertex: v, weight: g.weight(id), direction: t.flag(v, id) })
                .collect(),
            labels: g.labels.clone(),
            negative: t
                .negvert_dirs
                .iter()
                .map(|(v, u)| NegativeRec { vertex: *v, direction: *u, weight: t.negvert_weights[v] })
                .collect(),
            positions: None,
        }
    }

    pub fn from_coral(c: &TropicalCoral) -> Self {
        CoralFile { positions: Some(c.positions.clone()), ..Self::from_type(&c.ctype) }
    }

    pub fn to_type(&self) -> CoralType {
        let mut g = CoralGraph {
            vertices: self.vertices.iter().map(|v| (v.id, v.class)).collect(),
            labels: self.labels.clone(),
            ..CoralGraph::default()
        };
        let mut t = CoralType::default();
        for e in &self.bounded_edges {
            g.bounded_edges.push((e.id, (e.ends[0], e.ends[1])));
            g.weights.insert(e.id, e.weight);
            t.flag_dirs.insert((e.ends[0], e.id), e.direction);
            t.flag_dirs.insert((e.ends[1], e.id), e.direction.neg());
        }
        for e in &self.positive_edges {
            g.positive_edges.push((e.id, e.vertex));
            g.weights.insert(e.id, e.weight);
            t.flag_dirs.insert((e.vertex, e.id), e.direction);
        }
        for n in &self.negative {
            t.negvert_dirs.insert(n.vertex, n.direction);
            t.negvert_weights.insert(n.vertex, n.weight);
        }
        t.graph = g;
        t
    }

    pub fn to_coral(&self) -> Result<TropicalCoral, Error> {
        let positions = self.positions.clone().ok_or_else(|| Error::Parse("coral file lacks positions".into()))?;
        Ok(TropicalCoral { ctype: self.to_type(), positions })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub degree: Degree,
    pub constraint: Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseFile {
    pub decoration: Vec<i64>,
    pub root: VertexId,
    /// Neighbours of each vertex in anticlockwise order.
    pub edges: BTreeMap<VertexId, Vec<VertexId>>,
    pub phi: BTreeMap<VertexId, String>,
}

impl MorseFile {
    pub fn from_tree(m: &MorseTree) -> Self {
        MorseFile {
            decoration: m.decoration.clone(),
            root: m.root,
            edges: m.vertices.clone(),
            phi: m.phi.iter().map(|(v, x)| (*v, fmt_q(x))).collect(),
        }
    }

    pub fn to_tree(&self) -> Result<MorseTree, Error> {
        let phi = self.phi.iter().map(|(v, s)| Ok((*v, parse_q(s)?))).collect::<Result<_, Error>>()?;
        Ok(MorseTree { vertices: self.edges.clone(), root: self.root, decoration: self.decoration.clone(), phi })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveEdgeRec {
    pub id: EdgeId,
    pub ends: [VertexId; 2],
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndKindRec {
    Positive,
    Origin,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveEndRec {
    pub id: EdgeId,
    pub vertex: VertexId,
    pub direction: LatticeVector,
    pub weight: u64,
    pub kind: EndKindRec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFile {
    pub vertices: BTreeMap<VertexId, RationalPoint>,
    pub edges: Vec<CurveEdgeRec>,
    pub ends: Vec<CurveEndRec>,
}

impl CurveFile {
    pub fn from_curve(c: &TropicalCurve) -> Self {
        CurveFile {
            vertices: c.vertices.clone(),
            edges: c.edges.iter().map(|&(id, (a, b), weight)| CurveEdgeRec { id, ends: [a, b], weight }).collect(),
            ends: c
                .ends
                .iter()
                .map(|e| {
                    let (kind, label) = match e.kind {
                        EndKind::Positive(i) => (EndKindRec::Positive, Some(i)),
                        EndKind::Origin => (EndKindRec::Origin, None),
                    };
                    CurveEndRec { id: e.id, vertex: e.vertex, direction: e.dir, weight: e.weight, kind, label }
                })
                .collect(),
        }
    }

    pub fn to_curve(&self) -> Result<TropicalCurve, Error> {
        let ends = self
            .ends
            .iter()
            .map(|e| {
                let kind = match (&e.kind, e.label) {
                    (EndKindRec::Positive, Some(i)) => EndKind::Positive(i),
                    (EndKindRec::Origin, None) => EndKind::Origin,
                    _ => return Err(Error::Parse(format!("end {}: label must be given exactly for positive ends", e.id))),
                };
                Ok(CurveEnd { id: e.id, vertex: e.vertex, dir: e.direction, weight: e.weight, kind })
            })
            .collect::<Result<_, Error>>()?;
        Ok(TropicalCurve {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| (e.id, (e.ends[0], e.ends[1]), e.weight)).collect(),
            ends,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogFile {
    pub degree: Degree,
    pub types: Vec<CoralFile>,
}

impl CatalogFile {
    pub fn from_catalog(c: &TypeCatalog) -> Self {
        CatalogFile { degree: c.degree.clone(), types: c.types.iter().map(CoralFile::from_type).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesFile {
    pub coefficients: BTreeMap<u64, String>,
    pub truncation: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<Degree>,
}

impl SeriesFile {
    pub fn from_series(s: &AreaSeries) -> Self {
        SeriesFile {
            coefficients: s.coefficients.iter().map(|(a, x)| (*a, fmt_q(x))).collect(),
            truncation: s.truncation,
            skipped: s.skipped.clone(),
        }
    }

    pub fn to_series(&self) -> Result<AreaSeries, Error> {
        let coefficients = self.coefficients.iter().map(|(a, s)| Ok((*a, parse_q(s)?))).collect::<Result<_, Error>>()?;
        Ok(AreaSeries { coefficients, truncation: self.truncation, skipped: self.skipped.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributionRec {
    #[serde(rename = "type")]
    pub ctype: CoralFile,
    pub contribution: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coral: Option<CoralFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountFile {
    pub total: String,
    pub types: Vec<ContributionRec>,
}

impl CountFile {
    pub fn from_result(r: &CountResult) -> Self {
        CountFile {
            total: fmt_q(&r.total),
            types: r
                .per_type
                .iter()
                .map(|t| ContributionRec {
                    ctype: CoralFile::from_type(&t.ctype),
                    contribution: fmt_q(&t.contribution),
                    coral: t.realized.as_ref().map(CoralFile::from_coral),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRec {
    #[serde(rename = "type")]
    pub ctype: CoralFile,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub stable: bool,
    pub verdicts: Vec<VerdictRec>,
}

impl CertificateFile {
    pub fn from_certificate(c: &StableRangeCertificate) -> Self {
        CertificateFile {
            stable: c.is_stable(),
            verdicts: c
                .verdicts
                .iter()
                .map(|(t, v)| VerdictRec { ctype: CoralFile::from_type(t), verdict: v.clone() })
                .collect(),
        }
    }
}

/// Parses a comma-separated list of rationals.
pub fn parse_q_list(s: &str) -> Result<Vec<Q>, Error> {
    s.split(',').map(|x| parse_q(x.trim())).collect()
}

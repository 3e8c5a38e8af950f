//! JSON input documents.
//!
//! ```json
//! {
//!   "space": {"type": "euclidean", "dim": 1},
//!   "fuzzy_sets": [
//!     {"name": "uA", "levels": [{"alpha": 1.0, "points": [[0]]},
//!                               {"alpha": 0.5, "points": [[0], [1]]}]}
//!   ],
//!   "families": [
//!     {"name": "F", "members": ["uA"]},
//!     {"name": "C", "generator": {"kind": "collapse", "params": [], "count": 50, "seed": 0}}
//!   ],
//!   "sequences": [{"name": "S", "members": ["uA", "uA"]}, {"name": "T", "family": "C"}]
//! }
//! ```
//!
//! A point is a coordinate list, or a bare number for 1-D points and for
//! indices into a finite space. Generated family members are named
//! `family[i]` (1-based) and can be referenced like declared sets.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use fuzzy_hausdorff::{FiniteSet, FuzzyFamily, GeneratorKind, GeneratorTag, MetricSpace, Point, StepFuzzySet, Verdict};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{what} {name:?}: {source}")]
    Invalid {
        what: &'static str,
        name: String,
        source: fuzzy_hausdorff::Error,
    },
    #[error("{what} {name:?}: {message}")]
    Bad {
        what: &'static str,
        name: String,
        message: String,
    },
    #[error("unknown {what} {name:?}")]
    Unknown { what: &'static str, name: String },
    #[error("duplicate {what} {name:?}")]
    Duplicate { what: &'static str, name: String },
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub space: RawSpace,
    #[serde(default)]
    pub fuzzy_sets: Vec<RawFuzzySet>,
    #[serde(default)]
    pub families: Vec<RawFamily>,
    #[serde(default)]
    pub sequences: Vec<RawSequence>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawSpace {
    Euclidean { dim: usize },
    Finite { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFuzzySet {
    pub name: String,
    pub levels: Vec<RawLevel>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLevel {
    pub alpha: f64,
    pub points: Vec<RawPoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawPoint {
    Scalar(f64),
    Coords(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFamily {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<RawGenerator>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGenerator {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSequence {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

/// A validated document: one space, named fuzzy sets, families and
/// sequences, all resolved.
#[derive(Debug, Clone)]
pub struct Document {
    pub space: MetricSpace,
    /// Sets declared under `fuzzy_sets`, in document order.
    pub fuzzy_sets: Vec<(String, StepFuzzySet)>,
    pub families: Vec<(String, FuzzyFamily)>,
    pub sequences: Vec<(String, Vec<String>)>,
    /// Every resolvable set, declared or generated.
    lookup: HashMap<String, StepFuzzySet>,
}

impl Document {
    pub fn fuzzy_set(&self, name: &str) -> Result<&StepFuzzySet, DocError> {
        self.lookup.get(name).ok_or_else(|| DocError::Unknown {
            what: "fuzzy set",
            name: name.to_string(),
        })
    }

    pub fn family(&self, name: &str) -> Result<&FuzzyFamily, DocError> {
        self.families
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| DocError::Unknown {
                what: "family",
                name: name.to_string(),
            })
    }

    pub fn sequence(&self, name: &str) -> Result<Vec<StepFuzzySet>, DocError> {
        let (_, members) = self
            .sequences
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| DocError::Unknown {
                what: "sequence",
                name: name.to_string(),
            })?;
        members.iter().map(|m| self.fuzzy_set(m).cloned()).collect()
    }

    /// The document with generators expanded into explicit sets.
    pub fn expanded(&self) -> RawDocument {
        let space = match &self.space {
            MetricSpace::Euclidean { dim } => RawSpace::Euclidean { dim: *dim },
            MetricSpace::Finite { matrix } => RawSpace::Finite { matrix: matrix.clone() },
        };
        let mut fuzzy_sets: Vec<RawFuzzySet> = self.fuzzy_sets.iter().map(|(n, u)| raw_fuzzy(n, u)).collect();
        let mut families = Vec::new();
        for (name, fam) in &self.families {
            let members: Vec<String> = fam.members().iter().map(|(n, _)| n.clone()).collect();
            if fam.generator().is_some() {
                fuzzy_sets.extend(fam.members().iter().map(|(n, u)| raw_fuzzy(n, u)));
            }
            families.push(RawFamily {
                name: name.clone(),
                members: Some(members),
                generator: None,
            });
        }
        let sequences = self
            .sequences
            .iter()
            .map(|(n, m)| RawSequence {
                name: n.clone(),
                members: Some(m.clone()),
                family: None,
            })
            .collect();
        RawDocument {
            space,
            fuzzy_sets,
            families,
            sequences,
        }
    }
}

fn raw_fuzzy(name: &str, u: &StepFuzzySet) -> RawFuzzySet {
    RawFuzzySet {
        name: name.to_string(),
        levels: u
            .levels()
            .iter()
            .map(|l| RawLevel {
                alpha: l.alpha,
                points: l
                    .cut
                    .iter()
                    .map(|p| match p {
                        Point::Coords(c) => RawPoint::Coords(c.clone()),
                        Point::Index(i) => RawPoint::Scalar(*i as f64),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn convert_point(space: &MetricSpace, raw: &RawPoint) -> Result<Point, String> {
    let as_index = |x: f64| {
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(Point::Index(x as usize))
        } else {
            Err(format!("{x} is not a valid point index"))
        }
    };
    match (space, raw) {
        (MetricSpace::Euclidean { .. }, RawPoint::Scalar(x)) => Ok(Point::real(*x)),
        (MetricSpace::Euclidean { .. }, RawPoint::Coords(c)) => Ok(Point::Coords(c.clone())),
        (MetricSpace::Finite { .. }, RawPoint::Scalar(x)) => as_index(*x),
        (MetricSpace::Finite { .. }, RawPoint::Coords(c)) if c.len() == 1 => as_index(c[0]),
        (MetricSpace::Finite { .. }, RawPoint::Coords(c)) => {
            Err(format!("finite-space point must be a single index, got {} coordinates", c.len()))
        }
    }
}

fn build_fuzzy(space: &MetricSpace, raw: &RawFuzzySet) -> Result<StepFuzzySet, DocError> {
    let invalid = |source| DocError::Invalid {
        what: "fuzzy set",
        name: raw.name.clone(),
        source,
    };
    let mut levels = Vec::with_capacity(raw.levels.len());
    for (k, level) in raw.levels.iter().enumerate() {
        let points = level
            .points
            .iter()
            .map(|p| convert_point(space, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|message| DocError::Bad {
                what: "fuzzy set",
                name: raw.name.clone(),
                message: format!("level {k} (alpha {}): {message}", level.alpha),
            })?;
        let cut = FiniteSet::new(points).map_err(invalid)?;
        levels.push((level.alpha, cut));
    }
    let u = StepFuzzySet::new(levels).map_err(invalid)?;
    u.check_in(space).map_err(invalid)?;
    Ok(u)
}

pub fn parse_document(text: &str, default_seed: u64) -> Result<Document, DocError> {
    let raw: RawDocument = serde_json::from_str(text)?;
    build_document(&raw, default_seed)
}

pub fn load_document(path: &Path, default_seed: u64) -> Result<Document, DocError> {
    let text = fs::read_to_string(path).map_err(|source| DocError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_document(&text, default_seed)
}

pub fn build_document(raw: &RawDocument, default_seed: u64) -> Result<Document, DocError> {
    let space = match &raw.space {
        RawSpace::Euclidean { dim } => MetricSpace::euclidean(*dim),
        RawSpace::Finite { matrix } => MetricSpace::finite(matrix.clone()),
    }
    .map_err(|source| DocError::Invalid {
        what: "space",
        name: "space".into(),
        source,
    })?;
    if let MetricSpace::Finite { .. } = space {
        let cert = fuzzy_hausdorff::validate_metric(&space).expect("finite space");
        if cert.verdict != Verdict::Pass {
            return Err(DocError::Bad {
                what: "space",
                name: "space".into(),
                message: format!("distance matrix is not a metric: {:?}", cert.witness),
            });
        }
    }

    let mut lookup: HashMap<String, StepFuzzySet> = HashMap::new();
    let mut fuzzy_sets = Vec::new();
    for rf in &raw.fuzzy_sets {
        let u = build_fuzzy(&space, rf)?;
        if lookup.insert(rf.name.clone(), u.clone()).is_some() {
            return Err(DocError::Duplicate {
                what: "fuzzy set",
                name: rf.name.clone(),
            });
        }
        fuzzy_sets.push((rf.name.clone(), u));
    }

    let mut families: Vec<(String, FuzzyFamily)> = Vec::new();
    for rfam in &raw.families {
        if families.iter().any(|(n, _)| n == &rfam.name) {
            return Err(DocError::Duplicate {
                what: "family",
                name: rfam.name.clone(),
            });
        }
        let bad = |message: String| DocError::Bad {
            what: "family",
            name: rfam.name.clone(),
            message,
        };
        let invalid = |source| DocError::Invalid {
            what: "family",
            name: rfam.name.clone(),
            source,
        };
        let fam = match (&rfam.members, &rfam.generator) {
            (Some(members), None) => {
                let sets = members
                    .iter()
                    .map(|m| {
                        lookup.get(m).cloned().map(|u| (m.clone(), u)).ok_or_else(|| DocError::Unknown {
                            what: "fuzzy set",
                            name: m.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                FuzzyFamily::new(sets).map_err(invalid)?
            }
            (None, Some(g)) => {
                let kind: GeneratorKind = g.kind.parse().map_err(bad)?;
                let tag = GeneratorTag::new(kind, g.params.clone(), g.count, g.seed.unwrap_or(default_seed));
                let fam = FuzzyFamily::generated(&rfam.name, &space, tag).map_err(invalid)?;
                for (n, u) in fam.members() {
                    if lookup.insert(n.clone(), u.clone()).is_some() {
                        return Err(DocError::Duplicate {
                            what: "fuzzy set",
                            name: n.clone(),
                        });
                    }
                }
                fam
            }
            _ => return Err(bad("exactly one of \"members\" and \"generator\" is required".into())),
        };
        families.push((rfam.name.clone(), fam));
    }

    let mut sequences: Vec<(String, Vec<String>)> = Vec::new();
    for rs in &raw.sequences {
        if sequences.iter().any(|(n, _)| n == &rs.name) {
            return Err(DocError::Duplicate {
                what: "sequence",
                name: rs.name.clone(),
            });
        }
        let members = match (&rs.members, &rs.family) {
            (Some(m), None) => m.clone(),
            (None, Some(f)) => families
                .iter()
                .find(|(n, _)| n == f)
                .ok_or_else(|| DocError::Unknown {
                    what: "family",
                    name: f.clone(),
                })?
                .1
                .members()
                .iter()
                .map(|(n, _)| n.clone())
                .collect(),
            _ => {
                return Err(DocError::Bad {
                    what: "sequence",
                    name: rs.name.clone(),
                    message: "exactly one of \"members\" and \"family\" is required".into(),
                })
            }
        };
        if members.is_empty() {
            return Err(DocError::Bad {
                what: "sequence",
                name: rs.name.clone(),
                message: "empty sequence".into(),
            });
        }
        for m in &members {
            if !lookup.contains_key(m) {
                return Err(DocError::Unknown {
                    what: "fuzzy set",
                    name: m.clone(),
                });
            }
        }
        sequences.push((rs.name.clone(), members));
    }

    Ok(Document {
        space,
        fuzzy_sets,
        families,
        sequences,
        lookup,
    })
}

//! Ambient metric spaces and the lifted metric on `X × [0, 1]`.

use serde::Serialize;
use std::fmt;

use crate::certificate::{Certificate, CertificateKind, Verdict, Witness, TOL};
use crate::error::{Error, Result};

/// An element of the ambient space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Point {
    Coords(Vec<f64>),
    Index(usize),
}

impl Point {
    pub fn coords(c: impl Into<Vec<f64>>) -> Self {
        Point::Coords(c.into())
    }

    /// One-dimensional Euclidean point.
    pub fn real(x: f64) -> Self {
        Point::Coords(vec![x])
    }

    pub fn index(i: usize) -> Self {
        Point::Index(i)
    }

    /// Coordinate-wise equality within [`TOL`].
    pub fn approx_eq(&self, other: &Point) -> bool {
        match (self, other) {
            (Point::Coords(a), Point::Coords(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOL)
            }
            (Point::Index(a), Point::Index(b)) => a == b,
            _ => false,
        }
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self {
            Point::Coords(c) if c.iter().any(|x| !x.is_finite()) => Err(Error::NonFinite),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "#{i}"),
            Point::Coords(c) => {
                f.write_str("(")?;
                for (k, x) in c.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// The two desk-scale models of a metric space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricSpace {
    Euclidean { dim: usize },
    Finite { matrix: Vec<Vec<f64>> },
}

impl MetricSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", 0.0, "must be at least 1"));
        }
        Ok(MetricSpace::Euclidean { dim })
    }

    /// The real line.
    pub fn line() -> Self {
        MetricSpace::Euclidean { dim: 1 }
    }

    /// A finite space given by its distance matrix. Only the shape and the
    /// entries' finiteness are checked here; use [`validate_metric`] for the
    /// metric axioms.
    pub fn finite(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Empty("distance matrix"));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedMatrix(format!("row {i} has a non-finite entry")));
            }
        }
        Ok(MetricSpace::Finite { matrix })
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (MetricSpace::Euclidean { dim }, Point::Coords(c)) => {
                if c.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        found: c.len(),
                    });
                }
                p.check_finite()
            }
            (MetricSpace::Finite { matrix }, Point::Index(i)) => {
                if *i >= matrix.len() {
                    return Err(Error::IndexOutOfRange {
                        index: *i,
                        size: matrix.len(),
                    });
                }
                Ok(())
            }
            (MetricSpace::Euclidean { .. }, Point::Index(_)) => {
                Err(Error::PointKind("index point in a Euclidean space"))
            }
            (MetricSpace::Finite { .. }, Point::Coords(_)) => {
                Err(Error::PointKind("coordinate point in a finite space"))
            }
        }
    }

    /// `d(p, q)` after validating both points.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.dist(p, q))
    }

    /// `d(p, q)` for points already known to belong to this space.
    pub(crate) fn dist(&self, p: &Point, q: &Point) -> f64 {
        match (self, p, q) {
            (MetricSpace::Euclidean { .. }, Point::Coords(a), Point::Coords(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            (MetricSpace::Finite { matrix }, Point::Index(i), Point::Index(j)) => matrix[*i][*j],
            _ => unreachable!("points are validated against the space before use"),
        }
    }

    pub fn lifted_distance(&self, a: &LiftedPoint, b: &LiftedPoint) -> Result<f64> {
        Ok(self.distance(&a.point, &b.point)? + (a.level - b.level).abs())
    }
}

/// A point of `X × [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedPoint {
    pub point: Point,
    pub level: f64,
}

impl LiftedPoint {
    pub fn new(point: Point, level: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::param("level", level, "must lie in [0, 1]"));
        }
        Ok(LiftedPoint { point, level })
    }
}

/// Exhaustive check of the metric axioms on a finite distance matrix.
///
/// Scans nonnegativity, zero diagonal, symmetry and then every triple
/// `(i, j, via)` in lexicographic order; the first violation becomes the
/// witness.
pub fn validate_metric(space: &MetricSpace) -> Result<Certificate> {
    let matrix = match space {
        MetricSpace::Finite { matrix } => matrix,
        MetricSpace::Euclidean { .. } => {
            return Err(Error::Unsupported(
                "metric validation of a Euclidean space (valid by construction)",
            ))
        }
    };
    let n = matrix.len();
    let fail = |w| Ok(Certificate::new(CertificateKind::MetricValid, Verdict::Fail).with_witness(w));

    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] < 0.0 {
                return fail(Witness::Negative { i, j });
            }
        }
    }
    for i in 0..n {
        if matrix[i][i].abs() > TOL {
            return fail(Witness::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[i][j] - matrix[j][i]).abs() > TOL {
                return fail(Witness::Asymmetry { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for via in 0..n {
                if matrix[i][j] > matrix[i][via] + matrix[via][j] + TOL {
                    return fail(Witness::Triangle { i, j, via });
                }
            }
        }
    }
    Ok(Certificate::new(CertificateKind::MetricValid, Verdict::Pass))
}

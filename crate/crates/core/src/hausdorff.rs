//! Finite point sets as stand-ins for nonempty compact sets, and the
//! Hausdorff machinery on them: directed and symmetric Hausdorff distance,
//! greedy ε-nets, Kuratowski tail diagnostics and Cauchy limit construction.

use serde::Serialize;

use crate::certificate::{TailRule, Verdict, TOL};
use crate::error::{Error, Result};
use crate::space::{MetricSpace, Point};

/// Nonempty finite set of points, deduplicated within [`TOL`], in first-seen
/// order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FiniteSet {
    points: Vec<Point>,
}

impl FiniteSet {
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut out: Vec<Point> = Vec::new();
        for p in points {
            p.check_finite()?;
            if let Some(first) = out.first() {
                let same_kind = match (first, &p) {
                    (Point::Coords(a), Point::Coords(b)) => a.len() == b.len(),
                    (Point::Index(_), Point::Index(_)) => true,
                    _ => false,
                };
                if !same_kind {
                    return Err(Error::PointKind("mixed point kinds in one set"));
                }
            }
            if !out.iter().any(|q| q.approx_eq(&p)) {
                out.push(p);
            }
        }
        if out.is_empty() {
            return Err(Error::Empty("point set"));
        }
        Ok(FiniteSet { points: out })
    }

    /// Set of one-dimensional points.
    pub fn reals(xs: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(xs.into_iter().map(Point::real))
    }

    pub fn singleton(p: Point) -> Self {
        FiniteSet { points: vec![p] }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.iter().any(|q| q.approx_eq(p))
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    /// Equality as sets, ignoring order.
    pub fn same_set(&self, other: &FiniteSet) -> bool {
        self.len() == other.len() && self.is_subset_of(other)
    }

    pub fn check_in(&self, space: &MetricSpace) -> Result<()> {
        self.points.iter().try_for_each(|p| space.check_point(p))
    }

    /// `min_{q ∈ self} d(p, q)`.
    pub(crate) fn dist_to(&self, space: &MetricSpace, p: &Point) -> f64 {
        self.points
            .iter()
            .map(|q| space.dist(p, q))
            .fold(f64::INFINITY, f64::min)
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

pub(crate) fn directed_unchecked(space: &MetricSpace, a: &FiniteSet, b: &FiniteSet) -> f64 {
    a.points
        .iter()
        .map(|p| b.dist_to(space, p))
        .fold(0.0, f64::max)
}

pub(crate) fn hausdorff_unchecked(space: &MetricSpace, a: &FiniteSet, b: &FiniteSet) -> f64 {
    directed_unchecked(space, a, b).max(directed_unchecked(space, b, a))
}

/// `H*(A, B) = max_{a ∈ A} min_{b ∈ B} d(a, b)`. Not symmetric.
pub fn directed_hausdorff(space: &MetricSpace, a: &FiniteSet, b: &FiniteSet) -> Result<f64> {
    a.check_in(space)?;
    b.check_in(space)?;
    Ok(directed_unchecked(space, a, b))
}

/// `H(A, B) = max{H*(A, B), H*(B, A)}`.
pub fn hausdorff(space: &MetricSpace, a: &FiniteSet, b: &FiniteSet) -> Result<f64> {
    a.check_in(space)?;
    b.check_in(space)?;
    Ok(hausdorff_unchecked(space, a, b))
}

/// Greedy net over arbitrary items: walk the items in order and open a new
/// center whenever the current item is farther than `eps` from every center
/// opened so far. Returns the indices of the centers.
///
/// The order is fixed by the input, so the result is deterministic.
pub fn greedy_net<T>(items: &[T], eps: f64, mut dist: impl FnMut(&T, &T) -> f64) -> Result<Vec<usize>> {
    check_eps(eps)?;
    let mut centers: Vec<usize> = Vec::new();
    for (i, item) in items.iter().enumerate() {
        if !centers.iter().any(|&c| dist(&items[c], item) <= eps + TOL) {
            centers.push(i);
        }
    }
    Ok(centers)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::param("eps", eps, "must be positive"));
    }
    Ok(())
}

/// Greedy ε-net of `a`, a subset of `a` in input order.
pub fn eps_net(space: &MetricSpace, a: &FiniteSet, eps: f64) -> Result<FiniteSet> {
    a.check_in(space)?;
    let centers = greedy_net(a.points(), eps, |p, q| space.dist(p, q))?;
    Ok(FiniteSet {
        points: centers.into_iter().map(|i| a.points[i].clone()).collect(),
    })
}

pub fn covering_number(space: &MetricSpace, a: &FiniteSet, eps: f64) -> Result<usize> {
    Ok(eps_net(space, a, eps)?.len())
}

/// Greedy ε-net of a family of sets in `(K(X), H)`; indices into `family`.
pub fn family_eps_net(space: &MetricSpace, family: &[FiniteSet], eps: f64) -> Result<Vec<usize>> {
    for s in family {
        s.check_in(space)?;
    }
    greedy_net(family, eps, |a, b| hausdorff_unchecked(space, a, b))
}

/// Deduplicated union of a nonempty family.
pub fn union_family<'a>(family: impl IntoIterator<Item = &'a FiniteSet>) -> Result<FiniteSet> {
    FiniteSet::new(family.into_iter().flat_map(|s| s.points.iter().cloned()))
        .map_err(|e| match e {
            Error::Empty(_) => Error::Empty("family"),
            other => other,
        })
}

/// Tail diagnostic for Kuratowski convergence of a finite prefix `C_n` to
/// `C`.
///
/// `liminf_deficit[n] = H*(C, C_n)` measures how far `C` is from being
/// reached by the `C_n`; `limsup_excess[n] = H*(C_n, C)` measures how far the
/// `C_n` stray from `C`. Both tending to zero is exactly Hausdorff
/// convergence, which implies Kuratowski convergence. When every `C_n` lies
/// in a common compact set the converse holds too, so on such sequences the
/// diagnostic is exact up to the finite-prefix decision rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KuratowskiDiagnostic {
    pub liminf_deficit: Vec<f64>,
    pub limsup_excess: Vec<f64>,
    pub window: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
}

pub fn kuratowski_tail_diagnostic(
    space: &MetricSpace,
    prefix: &[FiniteSet],
    limit: &FiniteSet,
    rule: TailRule,
) -> Result<KuratowskiDiagnostic> {
    if prefix.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    rule.check_len(prefix.len())?;
    limit.check_in(space)?;
    for c in prefix {
        c.check_in(space)?;
    }
    let liminf_deficit: Vec<f64> = prefix
        .iter()
        .map(|c| directed_unchecked(space, limit, c))
        .collect();
    let limsup_excess: Vec<f64> = prefix
        .iter()
        .map(|c| directed_unchecked(space, c, limit))
        .collect();
    let max = rule
        .tail_max(&liminf_deficit)
        .max(rule.tail_max(&limsup_excess));
    Ok(KuratowskiDiagnostic {
        verdict: rule.verdict_of_max(max),
        liminf_deficit,
        limsup_excess,
        window: rule.window,
        tolerance: rule.tol,
    })
}

/// Partial unions `D_n = C_1 ∪ … ∪ C_n`, their limit `D` and the residuals
/// `H(D_n, D)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyConstruction {
    pub partial_unions: Vec<FiniteSet>,
    pub limit: FiniteSet,
    pub residuals: Vec<f64>,
}

pub fn cauchy_limit_construct(space: &MetricSpace, prefix: &[FiniteSet]) -> Result<CauchyConstruction> {
    if prefix.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    for c in prefix {
        c.check_in(space)?;
    }
    let mut partial_unions = Vec::with_capacity(prefix.len());
    let mut acc: Vec<Point> = Vec::new();
    for c in prefix {
        for p in c {
            if !acc.iter().any(|q| q.approx_eq(p)) {
                acc.push(p.clone());
            }
        }
        partial_unions.push(FiniteSet { points: acc.clone() });
    }
    let limit = FiniteSet { points: acc };
    let residuals = partial_unions
        .iter()
        .map(|d| hausdorff_unchecked(space, d, &limit))
        .collect();
    Ok(CauchyConstruction {
        partial_unions,
        limit,
        residuals,
    })
}

//! Normal upper semi-continuous fuzzy sets in finite level-step form.
//!
//! A [`StepFuzzySet`] is a strictly decreasing list of levels
//! `1 = α_1 > α_2 > … > α_k > 0`, each carrying a finite cut, with the cuts
//! nested (`cut(α_i) ⊆ cut(α_{i+1})`). The membership function is
//! `u(x) = max{α_i : x ∈ cut(α_i)}` and zero off the lowest cut. Every
//! α-cut is then one of the stored cuts, so all metrics on these sets are
//! exactly computable.

use serde::Serialize;

use crate::certificate::TOL;
use crate::error::{Error, Result};
use crate::hausdorff::{hausdorff_unchecked, FiniteSet};
use crate::space::{MetricSpace, Point};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub alpha: f64,
    pub cut: FiniteSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFuzzySet {
    levels: Vec<Level>,
    #[serde(skip)]
    grades: Vec<f64>,
}

impl StepFuzzySet {
    /// Validates and builds a fuzzy set from `(alpha, cut)` pairs, highest
    /// level first.
    pub fn new(levels: impl IntoIterator<Item = (f64, FiniteSet)>) -> Result<Self> {
        let levels: Vec<Level> = levels
            .into_iter()
            .map(|(alpha, cut)| Level { alpha, cut })
            .collect();
        let first = levels.first().ok_or(Error::Empty("level list"))?;
        if (first.alpha - 1.0).abs() > TOL {
            return Err(Error::MissingTopLevel(first.alpha));
        }
        for l in &levels {
            if !(l.alpha > 0.0 && l.alpha <= 1.0) {
                return Err(Error::LevelOutOfRange(l.alpha));
            }
        }
        for w in levels.windows(2) {
            let (upper, lower) = (&w[0], &w[1]);
            if lower.alpha >= upper.alpha - TOL {
                return Err(Error::LevelOrder {
                    upper: upper.alpha,
                    lower: lower.alpha,
                });
            }
            if !upper.cut.is_subset_of(&lower.cut) {
                return Err(Error::NotNested {
                    upper: upper.alpha,
                    lower: lower.alpha,
                });
            }
        }
        let support = &levels.last().expect("nonempty").cut;
        let grades = support
            .iter()
            .map(|p| {
                levels
                    .iter()
                    .find(|l| l.cut.contains(p))
                    .map(|l| l.alpha)
                    .expect("support point lies in the lowest cut")
            })
            .collect();
        Ok(StepFuzzySet { levels, grades })
    }

    /// The indicator of `set` seen as a fuzzy set.
    pub fn crisp(set: FiniteSet) -> Self {
        StepFuzzySet {
            grades: vec![1.0; set.len()],
            levels: vec![Level { alpha: 1.0, cut: set }],
        }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// The `(alpha, cut)` pairs this set was built from.
    pub fn to_levels(&self) -> Vec<(f64, FiniteSet)> {
        self.levels
            .iter()
            .map(|l| (l.alpha, l.cut.clone()))
            .collect()
    }

    pub fn check_in(&self, space: &MetricSpace) -> Result<()> {
        self.support().check_in(space)
    }

    /// Support points paired with their membership grades.
    pub fn graded(&self) -> impl Iterator<Item = (&Point, f64)> + '_ {
        self.support().iter().zip(self.grades.iter().copied())
    }

    pub(crate) fn grade_of(&self, x: &Point) -> f64 {
        self.graded()
            .find(|(p, _)| p.approx_eq(x))
            .map_or(0.0, |(_, g)| g)
    }

    pub fn membership(&self, space: &MetricSpace, x: &Point) -> Result<f64> {
        space.check_point(x)?;
        Ok(self.grade_of(x))
    }

    /// `[u]_α` for `α ∈ (0, 1]`: the cut of the smallest stored level `≥ α`.
    pub fn alpha_cut(&self, alpha: f64) -> Result<&FiniteSet> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
        }
        Ok(self.cut_at(alpha))
    }

    pub(crate) fn cut_at(&self, alpha: f64) -> &FiniteSet {
        &self
            .levels
            .iter()
            .take_while(|l| l.alpha >= alpha - TOL)
            .last()
            .unwrap_or(&self.levels[0])
            .cut
    }

    /// `supp u`, the lowest stored cut (closures are trivial on finite sets).
    pub fn support(&self) -> &FiniteSet {
        &self.levels.last().expect("nonempty").cut
    }

    /// `{u > α}` for `α ∈ (0, 1)`. Finite, hence already closed.
    pub fn strict_cut_closure(&self, alpha: f64) -> Result<&FiniteSet> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
        }
        Ok(self.strict_cut_at(alpha))
    }

    pub(crate) fn strict_cut_at(&self, alpha: f64) -> &FiniteSet {
        &self
            .levels
            .iter()
            .take_while(|l| l.alpha > alpha + TOL)
            .last()
            .unwrap_or(&self.levels[0])
            .cut
    }

    /// Stored levels below 1 whose cut gains points over the level above.
    pub fn platform_points(&self) -> PlatformSet {
        PlatformSet::from_iter(
            self.levels
                .windows(2)
                .filter(|w| w[1].cut.len() > w[0].cut.len())
                .map(|w| w[1].alpha),
        )
    }

    /// Levels in `(0, 1)` where `β ↦ [u]_β` is discontinuous in `H`.
    ///
    /// The cut map of a step set is constant between consecutive stored
    /// levels, so only stored levels can be discontinuities. At each one the
    /// two one-sided limits are probed by evaluating the cut half a gap
    /// below and half a gap above. The limit from below always equals
    /// `[u]_α`; the jump, when there is one, comes from above.
    pub fn p0_points(&self, space: &MetricSpace) -> Result<PlatformSet> {
        self.check_in(space)?;
        let mut out = Vec::new();
        for (i, level) in self.levels.iter().enumerate().skip(1) {
            let above = self.levels[i - 1].alpha;
            let below = self.levels.get(i + 1).map_or(0.0, |l| l.alpha);
            let alpha = level.alpha;
            let delta = 0.5 * (above - alpha).min(alpha - below);
            let at = self.cut_at(alpha);
            let left = hausdorff_unchecked(space, self.cut_at(alpha - delta), at);
            let right = hausdorff_unchecked(space, self.cut_at(alpha + delta), at);
            if left.max(right) > TOL {
                out.push(alpha);
            }
        }
        Ok(PlatformSet::from_iter(out))
    }

    /// Set equality of the represented membership functions.
    pub fn same_fuzzy_set(&self, other: &StepFuzzySet) -> bool {
        self.support().same_set(other.support())
            && self
                .graded()
                .all(|(p, g)| (other.grade_of(p) - g).abs() <= TOL)
    }
}

/// Finite set of levels in `(0, 1)`, kept in ascending order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct PlatformSet(Vec<f64>);

impl PlatformSet {
    pub fn contains(&self, alpha: f64) -> bool {
        self.0.iter().any(|a| (a - alpha).abs() <= TOL)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<f64> for PlatformSet {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut v: Vec<f64> = iter.into_iter().collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        PlatformSet(v)
    }
}

//! Seeded generators for families and sequences of step fuzzy sets.
//!
//! All randomness goes through `ChaCha8Rng::seed_from_u64`, so a seed pins
//! the output across platforms and releases.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fuzzy::StepFuzzySet;
use crate::hausdorff::FiniteSet;
use crate::space::{MetricSpace, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `û_{n·step}` along the first axis, `n = 1..=count`. Params: `[step = 1]`.
    Translates,
    /// `u_n = 1 at 0, 1/n at e_1`. Params: `[distance = 1]`.
    Collapse,
    /// Crisp `[0, x]` discretized at `step`, `x` sweeping from `hi` down
    /// toward (but excluding) `lo`. Params: `[lo = 0.3, hi = 1, step = 0.01]`.
    /// `count = 0` means the whole sweep.
    CrispIntervals,
    /// Random step sets in `[lo, hi]^dim`.
    /// Params: `[lo = 0, hi = 1, max_levels = 4, max_points = 6]`.
    Random,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Translates => "translates",
            GeneratorKind::Collapse => "collapse",
            GeneratorKind::CrispIntervals => "crisp_intervals",
            GeneratorKind::Random => "random",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "translates" => Ok(GeneratorKind::Translates),
            "collapse" => Ok(GeneratorKind::Collapse),
            "crisp_intervals" => Ok(GeneratorKind::CrispIntervals),
            "random" => Ok(GeneratorKind::Random),
            other => Err(format!("unknown generator kind {other:?}")),
        }
    }
}

/// Parameter sweep that produced a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorTag {
    pub kind: GeneratorKind,
    pub params: Vec<f64>,
    pub count: usize,
    pub seed: u64,
}

impl GeneratorTag {
    pub fn new(kind: GeneratorKind, params: Vec<f64>, count: usize, seed: u64) -> Self {
        GeneratorTag {
            kind,
            params,
            count,
            seed,
        }
    }

    fn param(&self, i: usize, default: f64) -> f64 {
        self.params.get(i).copied().unwrap_or(default)
    }

    pub fn expand(&self, space: &MetricSpace) -> Result<Vec<StepFuzzySet>> {
        match self.kind {
            GeneratorKind::Translates => translates(space, self.count, self.param(0, 1.0)),
            GeneratorKind::Collapse => collapse(space, self.count, self.param(0, 1.0)),
            GeneratorKind::CrispIntervals => {
                let mut all = crisp_intervals(space, self.param(0, 0.3), self.param(1, 1.0), self.param(2, 0.01))?;
                if self.count > 0 {
                    all.truncate(self.count);
                }
                Ok(all)
            }
            GeneratorKind::Random => {
                let spec = RandomSpec {
                    lo: self.param(0, 0.0),
                    hi: self.param(1, 1.0),
                    max_levels: self.param(2, 4.0).max(1.0) as usize,
                    max_points: self.param(3, 6.0).max(1.0) as usize,
                    level_step: 0.01,
                };
                random_family(space, &spec, self.count, self.seed)
            }
        }
    }

    /// Largest Hausdorff error introduced by discretizing continuous
    /// members, when the generator does that.
    pub fn discretization_bound(&self) -> Option<f64> {
        match self.kind {
            GeneratorKind::CrispIntervals => Some(0.5 * self.param(2, 0.01)),
            _ => None,
        }
    }
}

fn euclidean_dim(space: &MetricSpace, what: &'static str) -> Result<usize> {
    match space {
        MetricSpace::Euclidean { dim } => Ok(*dim),
        MetricSpace::Finite { .. } => Err(Error::Unsupported(what)),
    }
}

fn on_axis(dim: usize, x: f64) -> Point {
    let mut c = vec![0.0; dim];
    c[0] = x;
    Point::Coords(c)
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::param("count", 0.0, "must be at least 1"));
    }
    Ok(())
}

pub fn translates(space: &MetricSpace, count: usize, step: f64) -> Result<Vec<StepFuzzySet>> {
    let dim = euclidean_dim(space, "translates generator in a finite space")?;
    check_count(count)?;
    Ok((1..=count)
        .map(|n| StepFuzzySet::crisp(FiniteSet::singleton(on_axis(dim, n as f64 * step))))
        .collect())
}

/// `u_n` with `u_n(0) = 1` and `u_n(distance·e_1) = 1/n`; `u_1` is crisp.
pub fn collapse_member(dim: usize, n: usize, distance: f64) -> Result<StepFuzzySet> {
    let both = FiniteSet::new([on_axis(dim, 0.0), on_axis(dim, distance)])?;
    if n <= 1 {
        return Ok(StepFuzzySet::crisp(both));
    }
    StepFuzzySet::new([(1.0, FiniteSet::singleton(on_axis(dim, 0.0))), (1.0 / n as f64, both)])
}

pub fn collapse(space: &MetricSpace, count: usize, distance: f64) -> Result<Vec<StepFuzzySet>> {
    let dim = euclidean_dim(space, "collapse generator in a finite space")?;
    check_count(count)?;
    (1..=count).map(|n| collapse_member(dim, n, distance)).collect()
}

/// Crisp `{0, step, 2·step, …, x}` on the first axis.
pub fn discretized_interval(dim: usize, steps: usize, step: f64) -> StepFuzzySet {
    let pts: Vec<Point> = (0..=steps).map(|i| on_axis(dim, i as f64 * step)).collect();
    StepFuzzySet::crisp(FiniteSet::new(pts).expect("nonempty"))
}

pub fn crisp_intervals(space: &MetricSpace, lo: f64, hi: f64, step: f64) -> Result<Vec<StepFuzzySet>> {
    let dim = euclidean_dim(space, "crisp_intervals generator in a finite space")?;
    if !(step > 0.0) {
        return Err(Error::param("step", step, "must be positive"));
    }
    if !(hi > lo) {
        return Err(Error::param("hi", hi, "must exceed lo"));
    }
    let top = (hi / step).round() as usize;
    let bottom = (lo / step).round() as usize;
    Ok((bottom + 1..=top)
        .rev()
        .map(|k| discretized_interval(dim, k, step))
        .collect())
}

/// Shape of randomly generated step sets.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub lo: f64,
    pub hi: f64,
    pub max_levels: usize,
    pub max_points: usize,
    /// Levels below 1 are drawn from the multiples of this step in (0, 1).
    pub level_step: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            lo: 0.0,
            hi: 1.0,
            max_levels: 4,
            max_points: 6,
            level_step: 0.01,
        }
    }
}

fn random_point(space: &MetricSpace, spec: &RandomSpec, rng: &mut impl Rng) -> Point {
    match space {
        MetricSpace::Euclidean { dim } => Point::Coords((0..*dim).map(|_| rng.gen_range(spec.lo..=spec.hi)).collect()),
        MetricSpace::Finite { matrix } => Point::Index(rng.gen_range(0..matrix.len())),
    }
}

pub fn random_set(space: &MetricSpace, spec: &RandomSpec, rng: &mut impl Rng) -> FiniteSet {
    let n = rng.gen_range(1..=spec.max_points.max(1));
    FiniteSet::new((0..n).map(|_| random_point(space, spec, rng))).expect("nonempty")
}

pub fn random_fuzzy(space: &MetricSpace, spec: &RandomSpec, rng: &mut impl Rng) -> StepFuzzySet {
    let slots = ((1.0 / spec.level_step).round() as usize).saturating_sub(1).max(1);
    let mut pool: Vec<usize> = (1..=slots).collect();
    pool.shuffle(rng);
    let extra = rng.gen_range(0..spec.max_levels.max(1)).min(slots);
    let mut alphas: Vec<f64> = pool[..extra].iter().map(|&k| k as f64 * spec.level_step).collect();
    alphas.sort_by(|a, b| b.total_cmp(a));
    alphas.insert(0, 1.0);

    let support = random_set(space, spec, rng);
    // Point 0 sits at level 1 for normality; the rest get a random level index.
    let rank: Vec<usize> = (0..support.len())
        .map(|i| if i == 0 { 0 } else { rng.gen_range(0..alphas.len()) })
        .collect();
    let levels = alphas.iter().enumerate().map(|(i, &a)| {
        let cut = support
            .iter()
            .zip(&rank)
            .filter(|(_, &r)| r <= i)
            .map(|(p, _)| p.clone());
        (a, FiniteSet::new(cut).expect("contains point 0"))
    });
    StepFuzzySet::new(levels.collect::<Vec<_>>()).expect("nested by construction")
}

pub fn random_family(space: &MetricSpace, spec: &RandomSpec, count: usize, seed: u64) -> Result<Vec<StepFuzzySet>> {
    check_count(count)?;
    let mut rng = rng(seed);
    Ok((0..count).map(|_| random_fuzzy(space, spec, &mut rng)).collect())
}

/// A sequence `u_n → base`: every support point moves by `δ_x / n` with
/// `|δ_x|_∞ ≤ shift`, and every level below 1 moves by `s_i / n²` with
/// `|s_i| ≤ level_jitter`.
///
/// Level jitter must stay below half the smallest gap between the base's
/// levels so that the perturbed levels keep their order.
pub fn converging_sequence(
    space: &MetricSpace,
    base: &StepFuzzySet,
    count: usize,
    shift: f64,
    level_jitter: f64,
    seed: u64,
) -> Result<Vec<StepFuzzySet>> {
    let dim = euclidean_dim(space, "converging sequence in a finite space")?;
    check_count(count)?;
    let mut rng = rng(seed);
    let support: Vec<(Point, f64)> = base.graded().map(|(p, g)| (p.clone(), g)).collect();
    let deltas: Vec<Vec<f64>> = support
        .iter()
        .map(|_| (0..dim).map(|_| rng.gen_range(-shift..=shift)).collect())
        .collect();
    let jitter: Vec<f64> = base
        .levels()
        .iter()
        .map(|_| rng.gen_range(-level_jitter..=level_jitter))
        .collect();

    (1..=count)
        .map(|n| {
            let nf = n as f64;
            let moved: Vec<Point> = support
                .iter()
                .zip(&deltas)
                .map(|((p, _), d)| match p {
                    Point::Coords(c) => Point::Coords(c.iter().zip(d).map(|(x, dx)| x + dx / nf).collect()),
                    Point::Index(_) => unreachable!("euclidean space"),
                })
                .collect();
            let levels: Vec<(f64, FiniteSet)> = base
                .levels()
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let alpha = if i == 0 { 1.0 } else { l.alpha + jitter[i] / (nf * nf) };
                    let cut = support
                        .iter()
                        .zip(&moved)
                        .filter(|((_, g), _)| *g >= l.alpha - crate::certificate::TOL)
                        .map(|(_, q)| q.clone());
                    Ok((alpha, FiniteSet::new(cut)?))
                })
                .collect::<Result<_>>()?;
            StepFuzzySet::new(levels)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_output_is_reproducible() {
        let s = MetricSpace::euclidean(2).unwrap();
        let a = random_family(&s, &RandomSpec::default(), 10, 7).unwrap();
        let b = random_family(&s, &RandomSpec::default(), 10, 7).unwrap();
        let c = random_family(&s, &RandomSpec::default(), 10, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn interval_sweep() {
        let s = MetricSpace::line();
        let fam = crisp_intervals(&s, 0.3, 1.0, 0.01).unwrap();
        assert_eq!(fam.len(), 70);
        assert_eq!(fam[0].support().len(), 101);
        assert_eq!(fam[69].support().len(), 32);
    }

    #[test]
    fn collapse_levels() {
        let s = MetricSpace::line();
        let fam = collapse(&s, 5, 1.0).unwrap();
        assert_eq!(fam[0].levels().len(), 1);
        assert_eq!(fam[3].levels()[1].alpha, 0.25);
        assert!(collapse(&MetricSpace::finite(vec![vec![0.0]]).unwrap(), 3, 1.0).is_err());
    }

    #[test]
    fn random_in_finite_space() {
        let s = MetricSpace::finite(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]).unwrap();
        let fam = random_family(&s, &RandomSpec::default(), 20, 0).unwrap();
        assert!(fam.iter().all(|u| u.check_in(&s).is_ok()));
    }

    #[test]
    fn converging_sequence_shape() {
        let s = MetricSpace::euclidean(2).unwrap();
        let spec = RandomSpec {
            lo: 0.1,
            hi: 0.9,
            level_step: 0.05,
            ..RandomSpec::default()
        };
        let base = random_fuzzy(&s, &spec, &mut rng(3));
        let seq = converging_sequence(&s, &base, 50, 0.05, 0.004, 3).unwrap();
        assert_eq!(seq.len(), 50);
        assert_eq!(seq[49].levels().len(), base.levels().len());
    }
}

//! Endograph and sendograph metrics, their grid oracles, levelwise profiles
//! and Γ-convergence diagnostics.
//!
//! ## Closed forms
//!
//! For step sets both metrics reduce to a finite max-min. A point `(x, t)`
//! of `end u` with `t ≤ u(x)` reaches `end v` either by dropping to the
//! sheet `(x, 0)` at cost `t`, or by moving to a column `y ∈ supp v` at cost
//! `d(x, y) + max(0, t − v(y))`. Both costs grow with `t`, so the worst point
//! of each column is its top `t = u(x)`:
//!
//! ```text
//! end:  max_{x ∈ supp u} min( u(x), min_{y ∈ supp v} d(x,y) + (u(x) − v(y))⁺ )
//! send: max_{x ∈ supp u}            min_{y ∈ supp v} d(x,y) + (u(x) − v(y))⁺
//! ```
//!
//! The sendograph has no sheet outside the support, hence no truncation.
//! The oracles below sample the graphs on a vertical grid and take the plain
//! Hausdorff distance of the samples; the closed forms are only trusted as
//! far as they agree with them.

use serde::Serialize;

use crate::certificate::{Certificate, CertificateKind, TailRule, Verdict, Witness, TOL};
use crate::error::{Error, Result};
use crate::fuzzy::{PlatformSet, StepFuzzySet};
use crate::hausdorff::{directed_unchecked, hausdorff_unchecked, FiniteSet};
use crate::space::{MetricSpace, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    End,
    Send,
}

impl Metric {
    pub fn distance(self, space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet) -> Result<f64> {
        match self {
            Metric::End => endograph_metric(space, u, v),
            Metric::Send => sendograph_metric(space, u, v),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::End => "end",
            Metric::Send => "send",
        }
    }
}

fn check_pair(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet) -> Result<()> {
    u.check_in(space)?;
    v.check_in(space)
}

fn directed_graph(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet, truncate: bool) -> f64 {
    u.graded()
        .map(|(x, ux)| {
            let reach = v
                .graded()
                .map(|(y, vy)| space.dist(x, y) + (ux - vy).max(0.0))
                .fold(f64::INFINITY, f64::min);
            if truncate {
                reach.min(ux)
            } else {
                reach
            }
        })
        .fold(0.0, f64::max)
}

/// `H_end(u, v)`, the Hausdorff distance of the endographs under the lifted
/// metric.
pub fn endograph_metric(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet) -> Result<f64> {
    check_pair(space, u, v)?;
    Ok(directed_graph(space, u, v, true).max(directed_graph(space, v, u, true)))
}

/// `H_send(u, v)`, the Hausdorff distance of the sendographs.
pub fn sendograph_metric(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet) -> Result<f64> {
    check_pair(space, u, v)?;
    Ok(directed_graph(space, u, v, false).max(directed_graph(space, v, u, false)))
}

/// A sampled graph stored column by column: the base point and the number
/// of grid steps the column reaches, i.e. lifted points `(x, k·h)` for
/// `k = 0..=top`.
struct Column<'a> {
    base: &'a Point,
    top: usize,
}

fn grid_top(grade: f64, h: f64) -> usize {
    (grade / h + TOL).floor() as usize
}

fn columns<'a>(u: &StepFuzzySet, bases: &[&'a Point], h: f64) -> Vec<Column<'a>> {
    bases
        .iter()
        .map(|&x| Column {
            base: x,
            top: grid_top(u.grade_of(x), h),
        })
        .collect()
}

/// Exact directed Hausdorff distance between two column-sampled graphs. Within
/// a column the grid level nearest to `k·h` is found by clamping `k`.
fn directed_sampled(space: &MetricSpace, a: &[Column<'_>], b: &[Column<'_>], h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for ca in a {
        let offsets: Vec<f64> = b.iter().map(|cb| space.dist(ca.base, cb.base)).collect();
        for k in 0..=ca.top {
            let best = b
                .iter()
                .zip(&offsets)
                .map(|(cb, d)| d + k.saturating_sub(cb.top) as f64 * h)
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    worst
}

fn check_resolution(h: f64) -> Result<()> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::param("resolution", h, "must lie in (0, 0.1]"));
    }
    Ok(())
}

fn merged_bases<'a>(u: &'a StepFuzzySet, v: &'a StepFuzzySet) -> Vec<&'a Point> {
    let mut out: Vec<&Point> = u.support().iter().collect();
    for p in v.support() {
        if !u.support().contains(p) {
            out.push(p);
        }
    }
    out
}

/// Grid oracle for `H_end`: both endographs sampled at heights `k·h ≤ u(x)`
/// over the union of the two supports, each column including its foot
/// `(x, 0)`. Within `2h` of the true value.
pub fn endograph_oracle(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet, resolution: f64) -> Result<f64> {
    check_resolution(resolution)?;
    check_pair(space, u, v)?;
    let bases = merged_bases(u, v);
    let a = columns(u, &bases, resolution);
    let b = columns(v, &bases, resolution);
    Ok(directed_sampled(space, &a, &b, resolution).max(directed_sampled(space, &b, &a, resolution)))
}

/// Grid oracle for `H_send`: each sendograph sampled over its own support.
pub fn sendograph_oracle(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet, resolution: f64) -> Result<f64> {
    check_resolution(resolution)?;
    check_pair(space, u, v)?;
    let ub: Vec<&Point> = u.support().iter().collect();
    let vb: Vec<&Point> = v.support().iter().collect();
    let a = columns(u, &ub, resolution);
    let b = columns(v, &vb, resolution);
    Ok(directed_sampled(space, &a, &b, resolution).max(directed_sampled(space, &b, &a, resolution)))
}

/// `H([u]_α, [v]_α)`.
pub fn levelwise_distance(space: &MetricSpace, u: &StepFuzzySet, v: &StepFuzzySet, alpha: f64) -> Result<f64> {
    check_pair(space, u, v)?;
    Ok(hausdorff_unchecked(space, u.alpha_cut(alpha)?, v.alpha_cut(alpha)?))
}

/// Distances `metric(u_n, u)` along a sequence.
pub fn metric_series(space: &MetricSpace, seq: &[StepFuzzySet], u: &StepFuzzySet, metric: Metric) -> Result<Vec<f64>> {
    seq.iter().map(|un| metric.distance(space, un, u)).collect()
}

/// `H([u_n]_0, [u]_0)` along a sequence.
pub fn support_series(space: &MetricSpace, seq: &[StepFuzzySet], u: &StepFuzzySet) -> Result<Vec<f64>> {
    u.check_in(space)?;
    seq.iter()
        .map(|un| {
            un.check_in(space)?;
            Ok(hausdorff_unchecked(space, un.support(), u.support()))
        })
        .collect()
}

/// `n` evenly spaced levels `k/(n+1)` in `(0, 1)`, with any level that hits
/// `exclude` moved to the midpoint of its gap.
pub fn default_alpha_grid(n: usize, exclude: &PlatformSet) -> Vec<f64> {
    let step = 1.0 / (n + 1) as f64;
    (1..=n)
        .map(|k| {
            let g = k as f64 * step;
            if !exclude.contains(g) {
                return g;
            }
            // Right-hand midpoint first, except for the last grid point.
            let side = if k == n { -1.0 } else { 1.0 };
            [0.5, -0.5, 0.25, -0.25]
                .into_iter()
                .map(|f| g + side * f * step)
                .find(|c| *c > 0.0 && *c < 1.0 && !exclude.contains(*c))
                .expect("a finite platform set cannot block four distinct offsets")
        })
        .collect()
}

/// Whether profile levels must avoid the limit's platform points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    Sufficiency,
    Necessity,
}

/// Per-level distance sequences `H([u_n]_α, [u]_α)` with tail verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    pub alphas: Vec<f64>,
    pub distances: Vec<Vec<f64>>,
    pub tail_max: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    pub rule: TailRule,
    pub verdict: Verdict,
}

impl LevelProfile {
    /// First level whose verdict is not `Pass`.
    pub fn witness(&self) -> Option<f64> {
        self.alphas
            .iter()
            .zip(&self.verdicts)
            .find(|(_, v)| !v.is_pass())
            .map(|(a, _)| *a)
    }
}

fn check_open_levels(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::Empty("alpha grid"));
    }
    for &a in alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::param("alpha", a, "must lie in (0, 1)"));
        }
    }
    Ok(())
}

fn check_sequence(space: &MetricSpace, seq: &[StepFuzzySet], u: &StepFuzzySet, rule: &TailRule) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::Empty("sequence"));
    }
    rule.check_len(seq.len())?;
    u.check_in(space)?;
    seq.iter().try_for_each(|un| un.check_in(space))
}

pub fn levelwise_profile(
    space: &MetricSpace,
    seq: &[StepFuzzySet],
    u: &StepFuzzySet,
    alphas: &[f64],
    rule: TailRule,
    mode: ProfileMode,
) -> Result<LevelProfile> {
    check_open_levels(alphas)?;
    check_sequence(space, seq, u, &rule)?;
    if mode == ProfileMode::Necessity {
        let platform = u.platform_points();
        if let Some(&a) = alphas.iter().find(|&&a| platform.contains(a)) {
            return Err(Error::PlatformCollision(a));
        }
    }
    let distances: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&a| {
            let cut = u.cut_at(a);
            seq.iter()
                .map(|un| hausdorff_unchecked(space, un.cut_at(a), cut))
                .collect()
        })
        .collect();
    let tail_max: Vec<f64> = distances.iter().map(|d| rule.tail_max(d)).collect();
    let verdicts: Vec<Verdict> = tail_max.iter().map(|&m| rule.verdict_of_max(m)).collect();
    let verdict = verdicts.iter().copied().fold(Verdict::Pass, Verdict::and);
    Ok(LevelProfile {
        alphas: alphas.to_vec(),
        distances,
        tail_max,
        verdicts,
        rule,
        verdict,
    })
}

/// Per-level sandwich sequences for Γ-convergence:
/// `lower[n] = H*(closure{u > α}, [u_n]_α)` (the liminf side, measured
/// against the strict cut) and `upper[n] = H*([u_n]_α, [u]_α)` (the limsup
/// side, measured against the full cut).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaDiagnostic {
    pub alphas: Vec<f64>,
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    pub rule: TailRule,
    pub verdict: Verdict,
}

impl GammaDiagnostic {
    pub fn witness(&self) -> Option<f64> {
        self.alphas
            .iter()
            .zip(&self.verdicts)
            .find(|(_, v)| !v.is_pass())
            .map(|(a, _)| *a)
    }
}

pub fn gamma_diagnostic(
    space: &MetricSpace,
    seq: &[StepFuzzySet],
    u: &StepFuzzySet,
    alphas: &[f64],
    rule: TailRule,
) -> Result<GammaDiagnostic> {
    check_open_levels(alphas)?;
    check_sequence(space, seq, u, &rule)?;
    let mut lower = Vec::with_capacity(alphas.len());
    let mut upper = Vec::with_capacity(alphas.len());
    let mut verdicts = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let strict = u.strict_cut_at(a);
        let full = u.cut_at(a);
        let lo: Vec<f64> = seq
            .iter()
            .map(|un| directed_unchecked(space, strict, un.cut_at(a)))
            .collect();
        let up: Vec<f64> = seq
            .iter()
            .map(|un| directed_unchecked(space, un.cut_at(a), full))
            .collect();
        verdicts.push(rule.verdict_of_max(rule.tail_max(&lo).max(rule.tail_max(&up))));
        lower.push(lo);
        upper.push(up);
    }
    let verdict = verdicts.iter().copied().fold(Verdict::Pass, Verdict::and);
    Ok(GammaDiagnostic {
        alphas: alphas.to_vec(),
        lower,
        upper,
        verdicts,
        rule,
        verdict,
    })
}

/// The three tail decisions behind the sendograph decomposition:
/// `H_send → 0` exactly when `H_end → 0` and the supports converge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SendDecomposition {
    pub send: Vec<f64>,
    pub end: Vec<f64>,
    pub cut0: Vec<f64>,
    pub send_verdict: Verdict,
    pub end_verdict: Verdict,
    pub cut0_verdict: Verdict,
    pub rule: TailRule,
}

impl SendDecomposition {
    pub fn identity_holds(&self) -> bool {
        self.send_verdict.is_pass() == (self.end_verdict.is_pass() && self.cut0_verdict.is_pass())
    }

    pub fn certificate(&self) -> Certificate {
        let mut cert = Certificate::new(
            CertificateKind::SendDecomposition,
            Verdict::from_bool(self.identity_holds()),
        )
        .with_evidence("send", self.send.clone())
        .with_evidence("end", self.end.clone())
        .with_evidence("cut0", self.cut0.clone())
        .with_note(format!("send: {}", self.send_verdict))
        .with_note(format!("end: {}", self.end_verdict))
        .with_note(format!("cut0: {}", self.cut0_verdict));
        if !self.identity_holds() {
            cert = cert.with_witness(Witness::Series {
                label: "send".into(),
                tail_max: self.rule.tail_max(&self.send),
            });
        }
        cert
    }
}

pub fn send_decomposition(
    space: &MetricSpace,
    seq: &[StepFuzzySet],
    u: &StepFuzzySet,
    rule: TailRule,
) -> Result<SendDecomposition> {
    check_sequence(space, seq, u, &rule)?;
    let send = metric_series(space, seq, u, Metric::Send)?;
    let end = metric_series(space, seq, u, Metric::End)?;
    let cut0 = support_series(space, seq, u)?;
    Ok(SendDecomposition {
        send_verdict: rule.verdict(&send),
        end_verdict: rule.verdict(&end),
        cut0_verdict: rule.verdict(&cut0),
        send,
        end,
        cut0,
        rule,
    })
}

pub fn send_decomposition_check(
    space: &MetricSpace,
    seq: &[StepFuzzySet],
    u: &StepFuzzySet,
    rule: TailRule,
) -> Result<Certificate> {
    Ok(send_decomposition(space, seq, u, rule)?.certificate())
}

/// Kuratowski tail diagnostics of the cut sequences `[u_n]_α → [u]_α`, one
/// per level.
pub fn levelwise_kuratowski(
    space: &MetricSpace,
    seq: &[StepFuzzySet],
    u: &StepFuzzySet,
    alphas: &[f64],
    rule: TailRule,
) -> Result<Vec<crate::hausdorff::KuratowskiDiagnostic>> {
    check_open_levels(alphas)?;
    alphas
        .iter()
        .map(|&a| {
            let cuts: Vec<FiniteSet> = seq.iter().map(|un| un.cut_at(a).clone()).collect();
            crate::hausdorff::kuratowski_tail_diagnostic(space, &cuts, u.cut_at(a), rule)
        })
        .collect()
}

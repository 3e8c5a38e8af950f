//! Family- and sequence-level certificates.
//!
//! Infinite families are represented by a generator tag plus the finite
//! sweep it produced. Claims of the form "for every member" are then decided
//! on the trend of a prefix series (net sizes, moduli) over the last window
//! of the sweep. Families without a tag are finite and are trivially
//! totally bounded and equi-right-continuous; their certificates still
//! carry the evidence series.

use serde::Serialize;
use std::collections::HashSet;

use crate::certificate::{
    default_window, trend_verdict, Certificate, CertificateKind, TailRule, Trend, Verdict, Witness, TOL,
};
use crate::error::{Error, Result};
use crate::fuzzy::StepFuzzySet;
use crate::generators::GeneratorTag;
use crate::hausdorff::{hausdorff_unchecked, FiniteSet};
use crate::metrics::Metric;
use crate::space::{MetricSpace, Point};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzyFamily {
    members: Vec<(String, StepFuzzySet)>,
    generator: Option<GeneratorTag>,
}

impl FuzzyFamily {
    pub fn new(members: Vec<(String, StepFuzzySet)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("family"));
        }
        let mut seen = HashSet::new();
        for (name, _) in &members {
            if !seen.insert(name.as_str()) {
                return Err(Error::Unsupported("duplicate member name in family"));
            }
        }
        Ok(FuzzyFamily {
            members,
            generator: None,
        })
    }

    /// Members named `prefix[1]`, `prefix[2]`, …
    pub fn from_sets(prefix: &str, sets: Vec<StepFuzzySet>) -> Result<Self> {
        Self::new(
            sets.into_iter()
                .enumerate()
                .map(|(i, u)| (format!("{prefix}[{}]", i + 1), u))
                .collect(),
        )
    }

    /// Expands a generator in `space` and tags the family with it.
    pub fn generated(prefix: &str, space: &MetricSpace, tag: GeneratorTag) -> Result<Self> {
        let sets = tag.expand(space)?;
        Ok(Self::from_sets(prefix, sets)?.with_generator(tag))
    }

    pub fn with_generator(mut self, tag: GeneratorTag) -> Self {
        self.generator = Some(tag);
        self
    }

    pub fn generator(&self) -> Option<&GeneratorTag> {
        self.generator.as_ref()
    }

    pub fn members(&self) -> &[(String, StepFuzzySet)] {
        &self.members
    }

    pub fn sets(&self) -> impl Iterator<Item = &StepFuzzySet> {
        self.members.iter().map(|(_, u)| u)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_in(&self, space: &MetricSpace) -> Result<()> {
        self.sets().try_for_each(|u| u.check_in(space))
    }

    fn window(&self) -> usize {
        default_window(self.len())
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::param("eps", eps, "must be positive"));
    }
    Ok(())
}

/// `U(α)`, the union of the members' α-cuts.
pub fn family_union_cut(family: &FuzzyFamily, alpha: f64) -> Result<FiniteSet> {
    let cuts = family
        .sets()
        .map(|u| u.alpha_cut(alpha))
        .collect::<Result<Vec<_>>>()?;
    crate::hausdorff::union_family(cuts)
}

/// Covering numbers of the growing unions `S_1 ∪ … ∪ S_k`, `k = 1..=len`.
///
/// Greedy nets extend incrementally: appending points to the input only
/// ever appends centers, so one pass gives the whole series.
fn prefix_net_sizes<'a>(space: &MetricSpace, sets: impl Iterator<Item = &'a FiniteSet>, eps: f64) -> Vec<f64> {
    let mut seen: Vec<&Point> = Vec::new();
    let mut centers: Vec<&Point> = Vec::new();
    let mut out = Vec::new();
    for s in sets {
        for p in s {
            if seen.iter().any(|q| q.approx_eq(p)) {
                continue;
            }
            seen.push(p);
            if !centers.iter().any(|c| space.dist(c, p) <= eps + TOL) {
                centers.push(p);
            }
        }
        out.push(centers.len() as f64);
    }
    out
}

fn net_size_verdict(family: &FuzzyFamily, series: &[f64]) -> Verdict {
    match family.generator {
        Some(_) => trend_verdict(series, family.window(), Trend::Increasing),
        None => Verdict::Pass,
    }
}

/// Total boundedness in `(F_USCG, H_end)` through the union cuts `U(α)`.
pub fn tb_end_report(space: &MetricSpace, family: &FuzzyFamily, eps: f64, alphas: &[f64]) -> Result<Certificate> {
    check_eps(eps)?;
    family.check_in(space)?;
    if alphas.is_empty() {
        return Err(Error::Empty("alpha grid"));
    }
    for &a in alphas {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::param("alpha", a, "must lie in (0, 1]"));
        }
    }
    let mut cert = Certificate::new(CertificateKind::TbEnd, Verdict::Pass);
    let mut first_bad: Option<(Verdict, f64)> = None;
    for &a in alphas {
        let series = prefix_net_sizes(space, family.sets().map(|u| u.cut_at(a)), eps);
        let v = net_size_verdict(family, &series);
        cert.verdict = cert.verdict.and(v);
        if !v.is_pass() && first_bad.is_none_or(|(w, _)| v > w) {
            first_bad = Some((v, a));
        }
        cert = cert.with_evidence(format!("net_size@{a}"), series);
    }
    if let Some((_, alpha)) = first_bad {
        cert = cert.with_witness(Witness::Level { alpha });
    }
    Ok(cert)
}

/// Total boundedness of `U(0)`, the union of the supports.
pub fn tb_send_report(space: &MetricSpace, family: &FuzzyFamily, eps: f64) -> Result<Certificate> {
    check_eps(eps)?;
    family.check_in(space)?;
    let series = prefix_net_sizes(space, family.sets().map(|u| u.support()), eps);
    let verdict = net_size_verdict(family, &series);
    let mut cert = Certificate::new(CertificateKind::TbSend, verdict).with_evidence("net_size@0", series);
    if !verdict.is_pass() {
        cert = cert.with_witness(Witness::Level { alpha: 0.0 });
    }
    Ok(cert)
}

/// Largest stored level `δ` with `H([u]_β, [u]_0) < eps` for every stored
/// `β ≤ δ`. The lowest level always qualifies since its cut is the support.
pub fn member_modulus(space: &MetricSpace, u: &StepFuzzySet, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    u.check_in(space)?;
    let support = u.support();
    let mut delta = u.levels().last().expect("nonempty").alpha;
    for level in u.levels().iter().rev().skip(1) {
        if hausdorff_unchecked(space, &level.cut, support) < eps {
            delta = level.alpha;
        } else {
            break;
        }
    }
    Ok(delta)
}

/// Equi-right-continuity at 0: per-member moduli, their running minimum
/// over the sweep, and a trend verdict on the running minimum.
pub fn erc_modulus(space: &MetricSpace, family: &FuzzyFamily, eps: f64) -> Result<Certificate> {
    check_eps(eps)?;
    let member: Vec<f64> = family
        .sets()
        .map(|u| member_modulus(space, u, eps))
        .collect::<Result<_>>()?;
    let mut running = f64::INFINITY;
    let prefix_min: Vec<f64> = member
        .iter()
        .map(|&d| {
            running = running.min(d);
            running
        })
        .collect();
    let verdict = match family.generator {
        Some(_) => trend_verdict(&prefix_min, family.window(), Trend::Decreasing),
        None => Verdict::Pass,
    };
    let mut cert = Certificate::new(CertificateKind::Erc, verdict)
        .with_evidence("member_modulus", member)
        .with_evidence("family_modulus", prefix_min.clone());
    if !verdict.is_pass() {
        cert = cert.with_witness(Witness::ModulusSequence { values: prefix_min });
    }
    Ok(cert)
}

pub const COMPLETENESS_NOTE: &str =
    "relative compactness certified as total boundedness; equivalent only when the ambient space is complete";

/// Relative compactness in `(F_USCB, H_send)`: total boundedness of `U(0)`
/// together with equi-right-continuity at 0.
pub fn rel_compact_send_report(space: &MetricSpace, family: &FuzzyFamily, eps: f64) -> Result<Certificate> {
    let tb = tb_send_report(space, family, eps)?;
    let erc = erc_modulus(space, family, eps)?;
    let mut cert = Certificate::new(CertificateKind::RelCompactSend, tb.verdict.and(erc.verdict)).with_note(COMPLETENESS_NOTE);
    for part in [&tb, &erc] {
        cert = cert.with_note(format!("{}: {}", part.kind, part.verdict));
        for e in &part.evidence {
            cert = cert.with_evidence(format!("{}:{}", part.kind, e.label), e.values.clone());
        }
    }
    let failed = [&tb, &erc].into_iter().find(|c| c.verdict == Verdict::Fail);
    let failed = failed.or_else(|| [&tb, &erc].into_iter().find(|c| !c.verdict.is_pass()));
    if let Some(part) = failed {
        if let Some(w) = &part.witness {
            cert = cert.with_witness(Witness::Component {
                kind: part.kind,
                inner: Box::new(w.clone()),
            });
        }
    }
    Ok(cert)
}

/// Looks for a witness of non-closedness: a candidate outside the family
/// that the tail of the sweep approaches within `tol`.
///
/// A `Pass` only means no witness was found. Closedness itself is not
/// finitely checkable.
pub fn closedness_witness(
    space: &MetricSpace,
    family: &FuzzyFamily,
    candidate: &StepFuzzySet,
    metric: Metric,
    tol: f64,
) -> Result<Certificate> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", tol, "must be positive"));
    }
    candidate.check_in(space)?;
    let distances: Vec<f64> = family
        .sets()
        .map(|u| metric.distance(space, candidate, u))
        .collect::<Result<_>>()?;
    let is_member = family.sets().any(|u| u.same_fuzzy_set(candidate));
    let start = distances.len().saturating_sub(family.window());
    let (nearest, distance) = distances
        .iter()
        .copied()
        .enumerate()
        .skip(start)
        .fold((start, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best });
    let witnessed = !is_member && distance < tol;

    let mut cert = Certificate::new(CertificateKind::ClosednessWitness, Verdict::from_bool(!witnessed))
        .with_evidence("distance", distances)
        .with_evidence("tail_min_distance", vec![distance])
        .with_note(format!("metric: {}", metric.as_str()))
        .with_note(format!("candidate is a member: {is_member}"))
        .with_note("PASS means no non-closedness witness was found, not that the family is closed");
    if let Some(bound) = family.generator().and_then(GeneratorTag::discretization_bound) {
        cert = cert.with_evidence("discretization_bound", vec![bound]);
    }
    if witnessed {
        cert = cert.with_witness(Witness::Candidate { nearest, distance });
    }
    Ok(cert)
}

/// Constructive Cauchy check: `r_n = max_{n < m ≤ N} metric(u_n, u_m)`
/// should be nonincreasing, and the tail should sit within `tol` of the last
/// member, which stands in for the limit.
pub fn cauchy_tail_profile(space: &MetricSpace, seq: &[StepFuzzySet], metric: Metric, rule: TailRule) -> Result<Certificate> {
    if seq.len() < 3 {
        return Err(Error::param("length", seq.len() as f64, "need at least 3 members"));
    }
    rule.check_len(seq.len())?;
    let n = seq.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric.distance(space, &seq[i], &seq[j])?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| dist[i][i + 1..].iter().copied().fold(0.0, f64::max))
        .collect();
    let to_last: Vec<f64> = (0..n).map(|i| dist[i][n - 1]).collect();
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0] + rule.tol);
    // The last entry is the candidate itself; judge the members before it.
    let tail = rule.tail_max(&to_last[..n - 1]);
    let verdict = if monotone {
        rule.verdict_of_max(tail)
    } else {
        Verdict::Fail
    };
    let mut cert = Certificate::new(CertificateKind::CauchyLimit, verdict)
        .with_evidence("residual", residuals.clone())
        .with_evidence("distance_to_last", to_last)
        .with_note(format!("metric: {}", metric.as_str()));
    if !verdict.is_pass() {
        let witness = if monotone {
            Witness::Series {
                label: "distance_to_last".into(),
                tail_max: tail,
            }
        } else {
            let index = residuals
                .windows(2)
                .position(|w| w[1] > w[0] + rule.tol)
                .expect("non-monotone")
                + 1;
            Witness::Member {
                index,
                name: format!("residual increases at {index}"),
            }
        };
        cert = cert.with_witness(witness);
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, GeneratorKind, RandomSpec};

    fn r(xs: &[f64]) -> FiniteSet {
        FiniteSet::reals(xs.iter().copied()).unwrap()
    }

    fn hat(x: f64) -> StepFuzzySet {
        StepFuzzySet::crisp(r(&[x]))
    }

    fn u_a() -> StepFuzzySet {
        StepFuzzySet::new([(1.0, r(&[0.0])), (0.5, r(&[0.0, 1.0]))]).unwrap()
    }

    fn line() -> MetricSpace {
        MetricSpace::line()
    }

    fn tagged(kind: GeneratorKind, params: Vec<f64>, count: usize) -> FuzzyFamily {
        FuzzyFamily::generated("f", &line(), GeneratorTag::new(kind, params, count, 0)).unwrap()
    }

    fn single(u: StepFuzzySet) -> FuzzyFamily {
        FuzzyFamily::new(vec![("u".into(), u)]).unwrap()
    }

    #[test]
    fn family_construction() {
        assert!(FuzzyFamily::new(vec![]).is_err());
        assert!(FuzzyFamily::new(vec![("a".into(), hat(0.0)), ("a".into(), hat(1.0))]).is_err());
    }

    #[test]
    fn union_cut_examples() {
        assert_eq!(family_union_cut(&single(hat(0.0)), 0.5).unwrap(), r(&[0.0]));
        let two = FuzzyFamily::from_sets("u", vec![hat(0.0), hat(3.0)]).unwrap();
        assert_eq!(family_union_cut(&two, 0.5).unwrap(), r(&[0.0, 3.0]));
        let mixed = FuzzyFamily::from_sets("u", vec![u_a(), hat(3.0)]).unwrap();
        assert!(family_union_cut(&mixed, 0.5).unwrap().same_set(&r(&[0.0, 1.0, 3.0])));
        assert!(family_union_cut(&mixed, 0.0).is_err());
    }

    #[test]
    fn tb_end_examples() {
        let s = line();
        let tr = tagged(GeneratorKind::Translates, vec![], 50);
        let cert = tb_end_report(&s, &tr, 0.4, &[0.5]).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert_eq!(cert.witness, Some(Witness::Level { alpha: 0.5 }));
        let expected: Vec<f64> = (1..=50).map(f64::from).collect();
        assert_eq!(cert.evidence("net_size@0.5").unwrap(), expected.as_slice());

        let rnd = tagged(GeneratorKind::Random, vec![0.0, 1.0], 50);
        let cert = tb_end_report(&s, &rnd, 0.5, &[0.25, 0.5, 0.75]).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        for e in &cert.evidence {
            assert!(e.values.iter().all(|&x| x <= 3.0));
        }

        let cert = tb_end_report(&s, &single(u_a()), 0.1, &[0.25, 0.5, 1.0]).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(tb_end_report(&s, &single(u_a()), 0.0, &[0.5]).is_err());
    }

    #[test]
    fn tb_send_examples() {
        let s = line();
        let cert = tb_send_report(&s, &tagged(GeneratorKind::Translates, vec![], 50), 0.4).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        let cert = tb_send_report(&s, &tagged(GeneratorKind::Random, vec![0.0, 1.0], 50), 0.5).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        let cert = tb_send_report(&s, &single(hat(2.0)), 0.5).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(cert.evidence("net_size@0").unwrap(), &[1.0]);
    }

    #[test]
    fn erc_examples() {
        let s = line();
        let cert = erc_modulus(&s, &single(u_a()), 0.1).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(cert.evidence("family_modulus").unwrap(), &[0.5]);

        let crisp = FuzzyFamily::from_sets("c", vec![hat(0.0), StepFuzzySet::crisp(r(&[1.0, 2.0]))]).unwrap();
        let cert = erc_modulus(&s, &crisp, 0.1).unwrap();
        assert_eq!(cert.evidence("member_modulus").unwrap(), &[1.0, 1.0]);

        let col = tagged(GeneratorKind::Collapse, vec![], 40);
        let cert = erc_modulus(&s, &col, 0.5).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        let moduli = cert.evidence("member_modulus").unwrap();
        for (k, &m) in moduli.iter().enumerate() {
            assert_eq!(m, 1.0 / (k + 1) as f64);
        }
        assert!(matches!(cert.witness, Some(Witness::ModulusSequence { .. })));
    }

    #[test]
    fn rel_compact_examples() {
        let s = line();
        let cert = rel_compact_send_report(&s, &tagged(GeneratorKind::Collapse, vec![], 40), 0.5).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(matches!(
            cert.witness,
            Some(Witness::Component {
                kind: CertificateKind::Erc,
                ..
            })
        ));
        let cert = rel_compact_send_report(&s, &tagged(GeneratorKind::Translates, vec![], 40), 0.4).unwrap();
        assert!(matches!(
            cert.witness,
            Some(Witness::Component {
                kind: CertificateKind::TbSend,
                ..
            })
        ));
        let fixed = FuzzyFamily::from_sets("f", vec![u_a(), hat(0.3), hat(1.0)]).unwrap();
        let cert = rel_compact_send_report(&s, &fixed, 0.2).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(cert.notes.iter().any(|n| n == COMPLETENESS_NOTE));
    }

    #[test]
    fn closedness_examples() {
        let s = line();
        let intervals = tagged(GeneratorKind::CrispIntervals, vec![0.3, 1.0, 0.01], 0);
        let missing = generators::discretized_interval(1, 30, 0.01);
        for metric in [Metric::End, Metric::Send] {
            let cert = closedness_witness(&s, &intervals, &missing, metric, 0.02).unwrap();
            assert_eq!(cert.verdict, Verdict::Fail);
            let d = cert.evidence("tail_min_distance").unwrap()[0];
            assert!((d - 0.01).abs() < 1e-9, "{d}");
            assert_eq!(cert.evidence("discretization_bound").unwrap(), &[0.005]);
        }

        let member = intervals.members()[10].1.clone();
        let cert = closedness_witness(&s, &intervals, &member, Metric::Send, 0.02).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(cert.evidence("distance").unwrap()[10] == 0.0);

        let far = closedness_witness(&s, &intervals, &hat(10.0), Metric::Send, 0.02).unwrap();
        assert_eq!(far.verdict, Verdict::Pass);
        assert!(far.evidence("distance").unwrap().iter().all(|&d| d >= 9.0));
    }

    #[test]
    fn cauchy_examples() {
        let s = line();
        let geo: Vec<StepFuzzySet> = (1..=20).map(|n| hat(1.0 - 0.5f64.powi(n))).collect();
        for metric in [Metric::Send, Metric::End] {
            let cert = cauchy_tail_profile(&s, &geo, metric, TailRule::default_for(20)).unwrap();
            assert_eq!(cert.verdict, Verdict::Pass);
            let res = cert.evidence("residual").unwrap();
            for n in 1..=19 {
                let expected = 0.5f64.powi(n) - 0.5f64.powi(20);
                assert!((res[n as usize - 1] - expected).abs() < 1e-15);
            }
        }
        let constant = vec![u_a(); 6];
        let cert = cauchy_tail_profile(&s, &constant, Metric::End, TailRule::default_for(6)).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(cert.evidence("residual").unwrap().iter().all(|&x| x == 0.0));

        let alt: Vec<StepFuzzySet> = (0..20).map(|n| hat((n % 2) as f64)).collect();
        let cert = cauchy_tail_profile(&s, &alt, Metric::Send, TailRule::default_for(20)).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(cert.evidence("residual").unwrap()[..19].iter().all(|&x| x == 1.0));
        assert!(cauchy_tail_profile(&s, &alt[..2], Metric::Send, TailRule::new(1, 0.1).unwrap()).is_err());
    }

    #[test]
    fn evidence_monotone_in_eps() {
        let s = MetricSpace::euclidean(2).unwrap();
        let fam = FuzzyFamily::from_sets(
            "r",
            generators::random_family(&s, &RandomSpec::default(), 30, 11).unwrap(),
        )
        .unwrap();
        let mut last_cover = f64::INFINITY;
        let mut last_modulus = 0.0;
        for eps in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let cover = *tb_send_report(&s, &fam, eps).unwrap().evidence("net_size@0").unwrap().last().unwrap();
            assert!(cover <= last_cover);
            last_cover = cover;
            let erc = erc_modulus(&s, &fam, eps).unwrap();
            let modulus = *erc.evidence("family_modulus").unwrap().last().unwrap();
            assert!(modulus >= last_modulus);
            last_modulus = modulus;
        }
    }
}

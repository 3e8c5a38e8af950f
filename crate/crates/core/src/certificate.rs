//! Verdicts, tail decision rules and certificates.
//!
//! Every convergence or compactness claim in this crate is decided on a
//! finite prefix. The decision rule is the same everywhere: take the
//! maximum of a series over its last `window` entries and compare it to
//! `tol` with a hysteresis band,
//!
//! * `max < tol` gives [`Verdict::Pass`],
//! * `max >= 2 * tol` gives [`Verdict::Fail`],
//! * anything in between is [`Verdict::Inconclusive`].

use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance used for real comparisons throughout the crate.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    /// The worse of two verdicts (`Fail` beats `Inconclusive` beats `Pass`).
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Fail => "FAIL",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Window and tolerance of a tail decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRule {
    pub window: usize,
    pub tol: f64,
}

impl TailRule {
    pub const DEFAULT_TOL: f64 = 1e-3;

    pub fn new(window: usize, tol: f64) -> Result<Self> {
        if window == 0 {
            return Err(Error::param("window", 0.0, "must be at least 1"));
        }
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::param("tol", tol, "must be positive"));
        }
        Ok(TailRule { window, tol })
    }

    /// `window = max(5, 10% of len)` capped at `len`, `tol = 1e-3`.
    pub fn default_for(len: usize) -> Self {
        TailRule {
            window: default_window(len),
            tol: Self::DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if self.window > len {
            return Err(Error::param(
                "window",
                self.window as f64,
                "exceeds the sequence length",
            ));
        }
        Ok(())
    }

    /// Maximum of the last `window` entries.
    pub fn tail_max(&self, series: &[f64]) -> f64 {
        let start = series.len().saturating_sub(self.window);
        series[start..].iter().copied().fold(0.0, f64::max)
    }

    pub fn verdict_of_max(&self, max: f64) -> Verdict {
        if max < self.tol {
            Verdict::Pass
        } else if max >= 2.0 * self.tol {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn verdict(&self, series: &[f64]) -> Verdict {
        self.verdict_of_max(self.tail_max(series))
    }
}

pub fn default_window(len: usize) -> usize {
    let w = (len / 10).max(5);
    w.min(len.max(1))
}

/// Direction a trend check looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
}

/// Trend decision over the last `window` entries of a series: strictly
/// monotone in the given direction fails, constant passes, anything else is
/// inconclusive.
pub fn trend_verdict(series: &[f64], window: usize, bad: Trend) -> Verdict {
    let start = series.len().saturating_sub(window);
    let tail = &series[start..];
    if tail.len() < 2 {
        return Verdict::Pass;
    }
    let strictly = tail.windows(2).all(|w| match bad {
        Trend::Increasing => w[1] > w[0] + TOL,
        Trend::Decreasing => w[1] < w[0] - TOL,
    });
    if strictly {
        return Verdict::Fail;
    }
    if tail.windows(2).all(|w| (w[1] - w[0]).abs() <= TOL) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    MetricValid,
    SendDecomposition,
    TbEnd,
    TbSend,
    Erc,
    RelCompactSend,
    ClosednessWitness,
    CauchyLimit,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::MetricValid => "METRIC_VALID",
            CertificateKind::SendDecomposition => "SEND_DECOMPOSITION",
            CertificateKind::TbEnd => "TB_END",
            CertificateKind::TbSend => "TB_SEND",
            CertificateKind::Erc => "ERC",
            CertificateKind::RelCompactSend => "REL_COMPACT_SEND",
            CertificateKind::ClosednessWitness => "CLOSEDNESS_WITNESS",
            CertificateKind::CauchyLimit => "CAUCHY_LIMIT",
        }
    }
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a failing certificate points at.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `d(i, j) != d(j, i)`.
    Asymmetry { i: usize, j: usize },
    /// `d(i, i) != 0`.
    NonzeroDiagonal { i: usize },
    /// Negative entry at `(i, j)`.
    Negative { i: usize, j: usize },
    /// `d(i, j) > d(i, via) + d(via, j)`.
    Triangle { i: usize, j: usize, via: usize },
    /// A level at which a series misbehaves.
    Level { alpha: f64 },
    /// Offending family or sequence member.
    Member { index: usize, name: String },
    /// Per-prefix family modulus series that tends to zero.
    ModulusSequence { values: Vec<f64> },
    /// Candidate limit that is approximated but not contained.
    Candidate { nearest: usize, distance: f64 },
    /// Named tail series that violated its rule.
    Series { label: String, tail_max: f64 },
    /// Failure inside a component certificate.
    Component {
        kind: CertificateKind,
        inner: Box<Witness>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub label: String,
    pub values: Vec<f64>,
}

impl Evidence {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Evidence {
            label: label.into(),
            values,
        }
    }
}

/// Structured verdict with the numbers it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(kind: CertificateKind, verdict: Verdict) -> Self {
        Certificate {
            kind,
            verdict,
            evidence: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn with_evidence(mut self, label: impl Into<String>, values: Vec<f64>) -> Self {
        self.evidence.push(Evidence::new(label, values));
        self
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn evidence(&self, label: &str) -> Option<&[f64]> {
        self.evidence
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.values.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hysteresis_band() {
        let rule = TailRule::new(2, 0.5).unwrap();
        assert_eq!(rule.verdict(&[9.0, 0.1, 0.2]), Verdict::Pass);
        assert_eq!(rule.verdict(&[0.0, 0.7, 0.2]), Verdict::Inconclusive);
        assert_eq!(rule.verdict(&[0.0, 1.0, 0.0]), Verdict::Fail);
    }

    #[test]
    fn default_window_bounds() {
        assert_eq!(default_window(100), 10);
        assert_eq!(default_window(20), 5);
        assert_eq!(default_window(3), 3);
        assert_eq!(default_window(1000), 100);
    }

    #[test]
    fn trend_rules() {
        let up: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(trend_verdict(&up, 5, Trend::Increasing), Verdict::Fail);
        assert_eq!(trend_verdict(&[3.0; 8], 5, Trend::Increasing), Verdict::Pass);
        assert_eq!(
            trend_verdict(&[1.0, 2.0, 2.0, 3.0, 3.0], 5, Trend::Increasing),
            Verdict::Inconclusive
        );
        let down: Vec<f64> = (1..=10).map(|n| 1.0 / n as f64).collect();
        assert_eq!(trend_verdict(&down, 5, Trend::Decreasing), Verdict::Fail);
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(TailRule::new(0, 1.0).is_err());
        assert!(TailRule::new(3, 0.0).is_err());
        assert!(TailRule::new(3, f64::NAN).is_err());
    }

    #[test]
    fn verdict_ordering() {
        assert_eq!(Verdict::Pass.and(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Fail.and(Verdict::Pass), Verdict::Fail);
    }
}

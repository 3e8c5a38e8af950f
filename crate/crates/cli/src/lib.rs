//! Batch front end for `fuzzy-hausdorff`: metric matrices, convergence
//! reports, compactness certificates and oracle checks over JSON documents.

pub mod document;

use std::fmt;
use std::str::FromStr;

use fuzzy_hausdorff::certificate::default_window;
use fuzzy_hausdorff::metrics::metric_series;
use fuzzy_hausdorff::{
    closedness_witness, default_alpha_grid, endograph_oracle, erc_modulus, gamma_diagnostic, levelwise_distance,
    levelwise_profile, rel_compact_send_report, send_decomposition, sendograph_oracle, tb_end_report, tb_send_report,
    Certificate, Metric, PlatformSet, ProfileMode, StepFuzzySet, TailRule, Verdict, TOL,
};
use serde_json::{json, Value};
use thiserror::Error;

pub use document::{load_document, parse_document, DocError, Document};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Core(#[from] fuzzy_hausdorff::Error),
    #[error("{0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Command output: CSV text, a JSON mirror and the verdicts that decide the
/// exit code.
#[derive(Debug, Clone)]
pub struct Report {
    pub csv: String,
    pub json: Value,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.is_pass())
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

/// Nine significant digits, '.' decimal point, no locale.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float");
    rounded.to_string()
}

struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &[&str]) -> CliResult<Self> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        Ok(Table(w))
    }

    fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> CliResult<String> {
        let bytes = self.0.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Tail and grid settings shared by the commands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub window: Option<usize>,
    pub tol: f64,
    pub alpha_grid: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            window: None,
            tol: TailRule::DEFAULT_TOL,
            alpha_grid: 101,
        }
    }
}

impl Settings {
    pub fn rule(&self, len: usize) -> CliResult<TailRule> {
        let window = self.window.unwrap_or_else(|| default_window(len));
        Ok(TailRule::new(window, self.tol)?)
    }
}

fn parse_metric(s: &str) -> CliResult<Metric> {
    match s {
        "end" => Ok(Metric::End),
        "send" => Ok(Metric::Send),
        other => Err(CliError::Usage(format!("unknown metric {other:?}, expected end or send"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    End,
    Send,
    Level(f64),
}

impl FromStr for MetricKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if let Some(a) = s.strip_prefix("level:") {
            let alpha: f64 = a
                .parse()
                .map_err(|_| CliError::Usage(format!("bad level {a:?}")))?;
            return Ok(MetricKind::Level(alpha));
        }
        Ok(match parse_metric(s)? {
            Metric::End => MetricKind::End,
            Metric::Send => MetricKind::Send,
        })
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::End => f.write_str("end"),
            MetricKind::Send => f.write_str("send"),
            MetricKind::Level(a) => write!(f, "level:{a}"),
        }
    }
}

fn select_sets<'a>(doc: &'a Document, names: &[String]) -> CliResult<Vec<(String, &'a StepFuzzySet)>> {
    let sets: Vec<(String, &StepFuzzySet)> = if names.is_empty() {
        doc.fuzzy_sets.iter().map(|(n, u)| (n.clone(), u)).collect()
    } else {
        names
            .iter()
            .map(|n| Ok((n.clone(), doc.fuzzy_set(n)?)))
            .collect::<CliResult<_>>()?
    };
    if sets.is_empty() {
        return Err(CliError::Usage("no fuzzy sets to compare".into()));
    }
    Ok(sets)
}

/// Pairwise distance matrix with a header row.
pub fn run_metrics(doc: &Document, kind: MetricKind, names: &[String]) -> CliResult<Report> {
    let sets = select_sets(doc, names)?;
    let n = sets.len();
    if n < 2 {
        return Err(CliError::Usage("a metric matrix needs at least two sets".into()));
    }
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (sets[i].1, sets[j].1);
            let d = match kind {
                MetricKind::End => Metric::End.distance(&doc.space, u, v)?,
                MetricKind::Send => Metric::Send.distance(&doc.space, u, v)?,
                MetricKind::Level(a) => levelwise_distance(&doc.space, u, v, a)?,
            };
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    let mut header = vec![kind.to_string()];
    header.extend(sets.iter().map(|(n, _)| n.clone()));
    let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>())?;
    for (i, (name, _)) in sets.iter().enumerate() {
        t.row(std::iter::once(name.clone()).chain(m[i].iter().map(|&x| fmt_num(x))))?;
    }
    Ok(Report {
        csv: t.finish()?,
        json: json!({
            "kind": kind.to_string(),
            "names": sets.iter().map(|(n, _)| n).collect::<Vec<_>>(),
            "matrix": m,
        }),
        verdicts: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergeMode {
    Gamma,
    End,
    Send,
    Level,
    All,
}

impl FromStr for ConvergeMode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "gamma" => ConvergeMode::Gamma,
            "end" => ConvergeMode::End,
            "send" => ConvergeMode::Send,
            "level" => ConvergeMode::Level,
            "all" => ConvergeMode::All,
            other => return Err(CliError::Usage(format!("unknown convergence mode {other:?}"))),
        })
    }
}

const CONVERGE_HEADER: [&str; 6] = ["mode", "component", "alpha", "index", "value", "verdict"];

fn series_rows(t: &mut Table, mode: &str, component: &str, alpha: &str, series: &[f64]) -> CliResult<()> {
    for (i, &x) in series.iter().enumerate() {
        t.row([mode, component, alpha, &(i + 1).to_string(), &fmt_num(x), ""])?;
    }
    Ok(())
}

fn summary_row(t: &mut Table, mode: &str, component: &str, alpha: &str, tail_max: f64, v: Verdict) -> CliResult<()> {
    t.row([mode, component, alpha, "tail_max", &fmt_num(tail_max), v.as_str()])
}

/// Tail report for `seq → limit`. One summary row per decision, plus the
/// raw series.
pub fn run_convergence(
    doc: &Document,
    sequence: &str,
    limit: &str,
    mode: ConvergeMode,
    settings: Settings,
) -> CliResult<Report> {
    let seq = doc.sequence(sequence)?;
    let u = doc.fuzzy_set(limit)?;
    let space = &doc.space;
    let rule = settings.rule(seq.len())?;
    let mut t = Table::new(&CONVERGE_HEADER)?;
    let mut verdicts = Vec::new();
    let mut out = serde_json::Map::new();
    out.insert("sequence".into(), json!(sequence));
    out.insert("limit".into(), json!(limit));
    out.insert("rule".into(), serde_json::to_value(rule).expect("serializable"));

    let wanted = |m: ConvergeMode| mode == m || mode == ConvergeMode::All;

    if wanted(ConvergeMode::End) {
        let series = metric_series(space, &seq, u, Metric::End)?;
        let v = rule.verdict(&series);
        series_rows(&mut t, "end", "end", "", &series)?;
        summary_row(&mut t, "end", "end", "", rule.tail_max(&series), v)?;
        verdicts.push(v);
        out.insert("end".into(), json!({"series": series, "verdict": v}));
    }
    if wanted(ConvergeMode::Send) {
        let d = send_decomposition(space, &seq, u, rule)?;
        for (component, series, v) in [
            ("send", &d.send, d.send_verdict),
            ("end", &d.end, d.end_verdict),
            ("cut0", &d.cut0, d.cut0_verdict),
        ] {
            series_rows(&mut t, "send", component, "", series)?;
            summary_row(&mut t, "send", component, "", rule.tail_max(series), v)?;
        }
        let identity = Verdict::from_bool(d.identity_holds());
        t.row(["send", "decomposition", "", "", "", identity.as_str()])?;
        verdicts.push(d.send_verdict);
        verdicts.push(identity);
        out.insert("send".into(), serde_json::to_value(&d).expect("serializable"));
    }
    let needs_grid = wanted(ConvergeMode::Level) || wanted(ConvergeMode::Gamma);
    if needs_grid {
        let platform = u.platform_points();
        let grid = default_alpha_grid(settings.alpha_grid, &platform);
        if wanted(ConvergeMode::Level) {
            let excluded: Vec<String> = platform.as_slice().iter().map(|&p| fmt_num(p)).collect();
            t.row(["level", "excluded_platform", &excluded.join(" "), "", "", ""])?;
            let profile = levelwise_profile(space, &seq, u, &grid, rule, ProfileMode::Necessity)?;
            for (k, &a) in profile.alphas.iter().enumerate() {
                let alpha = fmt_num(a);
                series_rows(&mut t, "level", "cut", &alpha, &profile.distances[k])?;
                summary_row(&mut t, "level", "cut", &alpha, profile.tail_max[k], profile.verdicts[k])?;
            }
            t.row(["level", "overall", "", "", "", profile.verdict.as_str()])?;
            verdicts.push(profile.verdict);
            out.insert(
                "level".into(),
                json!({
                    "excluded": platform.as_slice(),
                    "alphas": profile.alphas,
                    "tail_max": profile.tail_max,
                    "verdicts": profile.verdicts,
                    "verdict": profile.verdict,
                    "first_failing_alpha": profile.witness(),
                }),
            );
        }
        if wanted(ConvergeMode::Gamma) {
            let g = gamma_diagnostic(space, &seq, u, &grid, rule)?;
            for (k, &a) in g.alphas.iter().enumerate() {
                let alpha = fmt_num(a);
                series_rows(&mut t, "gamma", "lower", &alpha, &g.lower[k])?;
                series_rows(&mut t, "gamma", "upper", &alpha, &g.upper[k])?;
                let m = rule.tail_max(&g.lower[k]).max(rule.tail_max(&g.upper[k]));
                summary_row(&mut t, "gamma", "sandwich", &alpha, m, g.verdicts[k])?;
            }
            t.row(["gamma", "overall", "", "", "", g.verdict.as_str()])?;
            verdicts.push(g.verdict);
            out.insert(
                "gamma".into(),
                json!({
                    "alphas": g.alphas,
                    "verdicts": g.verdicts,
                    "verdict": g.verdict,
                    "first_failing_alpha": g.witness(),
                }),
            );
        }
    }
    Ok(Report {
        csv: t.finish()?,
        json: Value::Object(out),
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactMode {
    TbEnd,
    TbSend,
    Erc,
    RelSend,
    Closedness,
}

impl FromStr for CompactMode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "tb_end" => CompactMode::TbEnd,
            "tb_send" => CompactMode::TbSend,
            "erc" => CompactMode::Erc,
            "rel_send" => CompactMode::RelSend,
            "closedness" => CompactMode::Closedness,
            other => return Err(CliError::Usage(format!("unknown compactness mode {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompactArgs {
    pub eps: f64,
    pub candidate: Option<String>,
    pub metric: Option<String>,
}

fn certificate_rows(t: &mut Table, cert: &Certificate) -> CliResult<()> {
    let kind = cert.kind.as_str();
    t.row([kind, "verdict", "", "", cert.verdict.as_str()])?;
    for e in &cert.evidence {
        for (i, &x) in e.values.iter().enumerate() {
            t.row([kind, "evidence", &e.label, &(i + 1).to_string(), &fmt_num(x)])?;
        }
    }
    if let Some(w) = &cert.witness {
        let text = serde_json::to_string(w).expect("serializable");
        t.row([kind, "witness", "", "", &text])?;
    }
    for note in &cert.notes {
        t.row([kind, "note", "", "", note])?;
    }
    Ok(())
}

/// One certificate for `family`, flattened to `kind,field,label,index,value`.
pub fn run_compactness(
    doc: &Document,
    family: &str,
    mode: CompactMode,
    args: &CompactArgs,
    settings: Settings,
) -> CliResult<Report> {
    let fam = doc.family(family)?;
    let space = &doc.space;
    let cert = match mode {
        CompactMode::TbEnd => {
            let mut alphas = default_alpha_grid(settings.alpha_grid, &PlatformSet::default());
            alphas.push(1.0);
            tb_end_report(space, fam, args.eps, &alphas)?
        }
        CompactMode::TbSend => tb_send_report(space, fam, args.eps)?,
        CompactMode::Erc => erc_modulus(space, fam, args.eps)?,
        CompactMode::RelSend => rel_compact_send_report(space, fam, args.eps)?,
        CompactMode::Closedness => {
            let name = args
                .candidate
                .as_deref()
                .ok_or_else(|| CliError::Usage("closedness needs --candidate".into()))?;
            let metric = parse_metric(args.metric.as_deref().unwrap_or("send"))?;
            closedness_witness(space, fam, doc.fuzzy_set(name)?, metric, settings.tol)?
        }
    };
    let mut t = Table::new(&["kind", "field", "label", "index", "value"])?;
    certificate_rows(&mut t, &cert)?;
    Ok(Report {
        csv: t.finish()?,
        json: json!({"family": family, "certificate": cert}),
        verdicts: vec![cert.verdict],
    })
}

/// Closed forms against the grid oracles for every pair `i <= j`.
pub fn run_oracle_check(doc: &Document, resolution: f64, names: &[String]) -> CliResult<Report> {
    let sets = select_sets(doc, names)?;
    let bound = 2.0 * resolution;
    let mut t = Table::new(&["a", "b", "metric", "closed_form", "oracle", "abs_diff", "bound", "verdict"])?;
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for i in 0..sets.len() {
        for j in i..sets.len() {
            let ((a, u), (b, v)) = (&sets[i], &sets[j]);
            for metric in [Metric::End, Metric::Send] {
                let exact = metric.distance(&doc.space, u, v)?;
                let oracle = match metric {
                    Metric::End => endograph_oracle(&doc.space, u, v, resolution)?,
                    Metric::Send => sendograph_oracle(&doc.space, u, v, resolution)?,
                };
                let diff = (exact - oracle).abs();
                let verdict = Verdict::from_bool(diff <= bound + TOL);
                t.row([
                    a.as_str(),
                    b.as_str(),
                    metric.as_str(),
                    &fmt_num(exact),
                    &fmt_num(oracle),
                    &fmt_num(diff),
                    &fmt_num(bound),
                    verdict.as_str(),
                ])?;
                rows.push(json!({
                    "a": a, "b": b, "metric": metric.as_str(), "closed_form": exact,
                    "oracle": oracle, "abs_diff": diff, "bound": bound, "verdict": verdict,
                }));
                verdicts.push(verdict);
            }
        }
    }
    Ok(Report {
        csv: t.finish()?,
        json: json!({"resolution": resolution, "rows": rows}),
        verdicts,
    })
}

/// The document with every generator expanded, as pretty JSON.
pub fn run_gen(doc: &Document) -> CliResult<Report> {
    let json = serde_json::to_value(doc.expanded()).expect("serializable");
    let mut text = serde_json::to_string_pretty(&json).expect("serializable");
    text.push('\n');
    Ok(Report {
        csv: text,
        json,
        verdicts: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666667");
        assert_eq!(fmt_num(123456789012.0), "123456789000");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
    }

    #[test]
    fn metric_kinds() {
        assert_eq!("end".parse::<MetricKind>().unwrap(), MetricKind::End);
        assert_eq!("level:0.5".parse::<MetricKind>().unwrap(), MetricKind::Level(0.5));
        assert!("level:x".parse::<MetricKind>().is_err());
        assert!("foo".parse::<MetricKind>().is_err());
    }
}

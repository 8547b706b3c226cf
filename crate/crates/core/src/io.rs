//! File formats.
//!
//! | artifact     | format |
//! |--------------|--------|
//! | hypotheses   | JSON lines: `{"id": "s1", "hyps": ["a", "b"]}` |
//! | ground truth | TSV: `id<TAB>text` |
//! | predictions  | TSV: `id<TAB>label<TAB>score` |
//! | dictionary   | one word per line, blank lines skipped |
//! | cost matrix  | TSV grid, header row/column of characters, `default_cost<TAB>v` footer |
//! | F-curve      | JSON list of `[d, v]` pairs |
//! | mask         | bitstring, e.g. `0110` |
//! | run config   | JSON document with `"version": 1` |
//!
//! TSV fields escape `\\`, tab, newline and carriage return as `\\`, `\t`,
//! `\n`, `\r`. All files are UTF-8; invalid bytes are an error.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fusion::{FitOptions, ScoredCandidate, DEFAULT_GRID, DEFAULT_KNOTS};
use crate::pruning::GaParams;
use crate::types::{
    CandidateSource, CaseMode, Dictionary, DistanceKind, EnsembleConfig, FCurve, HypothesisSet, Label, LabeledSample,
    PruningMask, SubstitutionCostMatrix,
};

pub const CONFIG_VERSION: u32 = 1;

fn read_text(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    decode_utf8(bytes, path)
}

fn decode_utf8(bytes: Vec<u8>, path: &Path) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| {
        let valid = e.utf8_error().valid_up_to();
        let line = e.as_bytes()[..valid].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::parse(path, line, "invalid UTF-8")
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Lines with their 1-based numbers and any trailing `\r` removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypothesisLine {
    id: String,
    hyps: Vec<Label>,
}

pub fn parse_hypotheses(text: &str, path: &Path) -> Result<Vec<HypothesisSet>> {
    let mut out: Vec<HypothesisSet> = Vec::new();
    for (n, line) in lines(text) {
        if line.trim().is_empty() {
            continue;
        }
        let rec: HypothesisLine = serde_json::from_str(line).map_err(|e| Error::parse(path, n, e.to_string()))?;
        if let Some(first) = out.first() {
            if rec.hyps.len() != first.len() {
                return Err(Error::RaggedEnsemble {
                    path: path.to_owned(),
                    line: n,
                    expected: first.len(),
                    found: rec.hyps.len(),
                });
            }
        }
        let set = HypothesisSet::new(rec.id, rec.hyps).map_err(|e| Error::parse(path, n, e.to_string()))?;
        out.push(set);
    }
    Ok(out)
}

pub fn read_hypotheses(path: impl AsRef<Path>) -> Result<Vec<HypothesisSet>> {
    let path = path.as_ref();
    parse_hypotheses(&read_text(path)?, path)
}

pub fn format_hypotheses(sets: &[HypothesisSet]) -> String {
    let mut out = String::new();
    for s in sets {
        let line = HypothesisLine {
            id: s.sample_id().to_owned(),
            hyps: s.outputs().to_vec(),
        };
        out.push_str(&serde_json::to_string(&line).expect("strings serialize"));
        out.push('\n');
    }
    out
}

pub fn write_hypotheses(path: impl AsRef<Path>, sets: &[HypothesisSet]) -> Result<()> {
    write_text(path.as_ref(), &format_hypotheses(sets))
}

pub fn parse_dictionary(text: &str, case_mode: CaseMode) -> Dictionary {
    Dictionary::new(
        lines(text).map(|(_, l)| l).filter(|l| !l.is_empty()).map(str::to_owned),
        case_mode,
    )
}

pub fn read_dictionary(path: impl AsRef<Path>, case_mode: CaseMode) -> Result<Dictionary> {
    Ok(parse_dictionary(&read_text(path.as_ref())?, case_mode))
}

pub fn write_dictionary(path: impl AsRef<Path>, dict: &Dictionary) -> Result<()> {
    let mut out = String::new();
    for w in dict.words() {
        out.push_str(w);
        out.push('\n');
    }
    write_text(path.as_ref(), &out)
}

fn split_tsv<'a>(line: &'a str, n: usize, path: &Path, columns: usize) -> Result<Vec<String>> {
    let fields: Vec<&'a str> = line.split('\t').collect();
    if fields.len() != columns {
        return Err(Error::parse(
            path,
            n,
            format!("expected {columns} tab-separated fields, found {}", fields.len()),
        ));
    }
    fields
        .into_iter()
        .map(|f| unescape_field(f).map_err(|m| Error::parse(path, n, m)))
        .collect()
}

pub fn parse_ground_truth(text: &str, path: &Path) -> Result<Vec<LabeledSample>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, line) in lines(text) {
        if line.is_empty() {
            continue;
        }
        let mut f = split_tsv(line, n, path, 2)?;
        let text = f.pop().expect("two fields");
        let id = f.pop().expect("two fields");
        if !seen.insert(id.clone()) {
            return Err(Error::parse(path, n, format!("duplicate id {id:?}")));
        }
        out.push(LabeledSample::new(id, text));
    }
    Ok(out)
}

pub fn read_ground_truth(path: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    let path = path.as_ref();
    parse_ground_truth(&read_text(path)?, path)
}

pub fn format_ground_truth(samples: &[LabeledSample]) -> String {
    let mut out = String::new();
    for s in samples {
        let _ = writeln!(
            out,
            "{}\t{}",
            escape_field(&s.sample_id),
            escape_field(s.ground_truth.as_str())
        );
    }
    out
}

pub fn write_ground_truth(path: impl AsRef<Path>, samples: &[LabeledSample]) -> Result<()> {
    write_text(path.as_ref(), &format_ground_truth(samples))
}

/// One fused output: sample id, label and score.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub sample_id: String,
    pub label: Label,
    pub score: f64,
}

impl Prediction {
    pub fn new(sample_id: impl Into<String>, scored: ScoredCandidate) -> Self {
        Prediction {
            sample_id: sample_id.into(),
            label: scored.label,
            score: scored.score,
        }
    }
}

pub fn parse_predictions(text: &str, path: &Path) -> Result<Vec<Prediction>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, line) in lines(text) {
        if line.is_empty() {
            continue;
        }
        let f = split_tsv(line, n, path, 3)?;
        let score: f64 = f[2]
            .parse()
            .map_err(|_| Error::parse(path, n, format!("invalid score {:?}", f[2])))?;
        if !seen.insert(f[0].clone()) {
            return Err(Error::parse(path, n, format!("duplicate id {:?}", f[0])));
        }
        out.push(Prediction {
            sample_id: f[0].clone(),
            label: Label::from(f[1].clone()),
            score,
        });
    }
    Ok(out)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    parse_predictions(&read_text(path)?, path)
}

pub fn format_predictions(preds: &[Prediction]) -> String {
    let mut out = String::new();
    for p in preds {
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            escape_field(&p.sample_id),
            escape_field(p.label.as_str()),
            p.score
        );
    }
    out
}

pub fn write_predictions(path: impl AsRef<Path>, preds: &[Prediction]) -> Result<()> {
    write_text(path.as_ref(), &format_predictions(preds))
}

const DEFAULT_COST_KEY: &str = "default_cost";

pub fn format_cost_matrix(m: &SubstitutionCostMatrix) -> String {
    let alphabet: Vec<char> = m.alphabet().iter().copied().collect();
    let mut out = String::new();
    for &c in &alphabet {
        out.push('\t');
        out.push_str(&escape_field(&c.to_string()));
    }
    out.push('\n');
    for &a in &alphabet {
        out.push_str(&escape_field(&a.to_string()));
        for &b in &alphabet {
            out.push('\t');
            if a == b {
                out.push('0');
            } else if let Some(v) = m.get(a, b) {
                let _ = write!(out, "{v}");
            }
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{DEFAULT_COST_KEY}\t{}", m.default_cost());
    out
}

fn parse_char_cell(cell: &str, path: &Path, n: usize) -> Result<char> {
    let s = unescape_field(cell).map_err(|m| Error::parse(path, n, m))?;
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::parse(
            path,
            n,
            format!("expected a single character, found {s:?}"),
        )),
    }
}

fn parse_unit_value(cell: &str, path: &Path, n: usize) -> Result<f64> {
    let v: f64 = cell
        .parse()
        .map_err(|_| Error::parse(path, n, format!("invalid number {cell:?}")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::parse(path, n, format!("cost {v} is outside [0, 1]")));
    }
    Ok(v)
}

pub fn parse_cost_matrix(text: &str, path: &Path) -> Result<SubstitutionCostMatrix> {
    let mut it = lines(text).filter(|(_, l)| !l.is_empty());
    let (hn, header) = it.next().ok_or_else(|| Error::parse(path, 1, "empty cost matrix"))?;
    let mut cols = header.split('\t');
    if cols.next() != Some("") {
        return Err(Error::parse(path, hn, "header must start with an empty cell"));
    }
    let alphabet: Vec<char> = cols.map(|c| parse_char_cell(c, path, hn)).collect::<Result<_>>()?;
    if alphabet.iter().collect::<HashSet<_>>().len() != alphabet.len() {
        return Err(Error::parse(path, hn, "duplicate character in header"));
    }

    let mut entries = Vec::new();
    let mut rows_seen = HashSet::new();
    let mut default_cost = None;
    for (n, line) in it {
        if default_cost.is_some() {
            return Err(Error::parse(path, n, "content after the default_cost footer"));
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[0] == DEFAULT_COST_KEY {
            if fields.len() != 2 {
                return Err(Error::parse(path, n, "default_cost line needs exactly one value"));
            }
            default_cost = Some(parse_unit_value(fields[1], path, n)?);
            continue;
        }
        let a = parse_char_cell(fields[0], path, n)?;
        if !alphabet.contains(&a) {
            return Err(Error::parse(
                path,
                n,
                format!("row character {a:?} is not in the header"),
            ));
        }
        if !rows_seen.insert(a) {
            return Err(Error::parse(path, n, format!("duplicate row {a:?}")));
        }
        if fields.len() != alphabet.len() + 1 {
            return Err(Error::parse(
                path,
                n,
                format!("expected {} cells, found {}", alphabet.len(), fields.len() - 1),
            ));
        }
        for (&b, cell) in alphabet.iter().zip(&fields[1..]) {
            if cell.is_empty() {
                continue;
            }
            let v = parse_unit_value(cell, path, n)?;
            if a == b {
                if v != 0.0 {
                    return Err(Error::parse(path, n, format!("diagonal cost for {a:?} must be 0")));
                }
                continue;
            }
            entries.push(((a, b), v));
        }
    }
    let default_cost = default_cost.ok_or_else(|| Error::parse(path, hn, "missing default_cost footer"))?;
    SubstitutionCostMatrix::new(alphabet, entries, default_cost).map_err(|e| Error::parse(path, hn, e.to_string()))
}

pub fn read_cost_matrix(path: impl AsRef<Path>) -> Result<SubstitutionCostMatrix> {
    let path = path.as_ref();
    parse_cost_matrix(&read_text(path)?, path)
}

pub fn write_cost_matrix(path: impl AsRef<Path>, m: &SubstitutionCostMatrix) -> Result<()> {
    write_text(path.as_ref(), &format_cost_matrix(m))
}

pub fn format_f_curve(f: &FCurve) -> String {
    let mut s = serde_json::to_string(f).expect("finite values serialize");
    s.push('\n');
    s
}

pub fn parse_f_curve(text: &str, path: &Path) -> Result<FCurve> {
    serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
}

pub fn read_f_curve(path: impl AsRef<Path>) -> Result<FCurve> {
    let path = path.as_ref();
    parse_f_curve(&read_text(path)?, path)
}

pub fn write_f_curve(path: impl AsRef<Path>, f: &FCurve) -> Result<()> {
    write_text(path.as_ref(), &format_f_curve(f))
}

pub fn parse_mask(text: &str, path: &Path) -> Result<PruningMask> {
    let body = text.trim_end_matches(['\n', '\r']);
    if body.contains('\n') {
        return Err(Error::parse(path, 2, "mask must be a single line"));
    }
    body.parse().map_err(|e: Error| Error::parse(path, 1, e.to_string()))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<PruningMask> {
    let path = path.as_ref();
    parse_mask(&read_text(path)?, path)
}

pub fn write_mask(path: impl AsRef<Path>, mask: &PruningMask) -> Result<()> {
    write_text(path.as_ref(), &format!("{mask}\n"))
}

/// Pairs hypothesis sets with references by sample id, in hypothesis order.
/// Samples missing from either side are skipped; an empty join is an error.
pub fn join_by_id(hsets: &[HypothesisSet], gt: &[LabeledSample]) -> Result<Vec<(HypothesisSet, LabeledSample)>> {
    let by_id: std::collections::HashMap<&str, &LabeledSample> = gt.iter().map(|s| (s.sample_id.as_str(), s)).collect();
    let joined: Vec<_> = hsets
        .iter()
        .filter_map(|h| by_id.get(h.sample_id()).map(|s| (h.clone(), (*s).clone())))
        .collect();
    if joined.is_empty() {
        return Err(Error::Data(
            "no sample ids in common between hypotheses and ground truth".into(),
        ));
    }
    Ok(joined)
}

/// θ in JSON: a number, or the string `"inf"`.
mod theta_serde {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Num(*v).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "theta must be a number or \"inf\", found {t:?}"
            ))),
        }
    }
}

/// Which snapshots feed cost learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotSelection {
    #[default]
    All,
    Index(usize),
}

impl std::str::FromStr for SnapshotSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SnapshotSelection::All);
        }
        s.parse()
            .map(SnapshotSelection::Index)
            .map_err(|_| Error::invalid("snapshot", format!("{s:?} (expected \"all\" or an index)")))
    }
}

impl Serialize for SnapshotSelection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SnapshotSelection::All => s.serialize_str("all"),
            SnapshotSelection::Index(i) => s.serialize_u64(*i as u64),
        }
    }
}

impl<'de> Deserialize<'de> for SnapshotSelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Index(usize),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Index(i) => Ok(SnapshotSelection::Index(i)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSettings {
    pub hypotheses: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub costs: Option<PathBuf>,
    pub f_curve: Option<PathBuf>,
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSettings {
    pub knots: Vec<i64>,
    pub grid: Vec<f64>,
    pub max_sweeps: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            knots: DEFAULT_KNOTS.to_vec(),
            grid: DEFAULT_GRID.to_vec(),
            max_sweeps: FitOptions::default().max_sweeps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSettings {
    pub min_count: u64,
    pub default_cost: f64,
    pub snapshot: SnapshotSelection,
}

impl Default for CostSettings {
    fn default() -> Self {
        CostSettings {
            min_count: crate::cost::DEFAULT_MIN_COUNT,
            default_cost: crate::cost::DEFAULT_COST,
            snapshot: SnapshotSelection::All,
        }
    }
}

/// Everything a pipeline run needs, as one versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub likelihood_const: f64,
    #[serde(default = "infinity", with = "theta_serde")]
    pub theta: f64,
    #[serde(default)]
    pub case_mode: CaseMode,
    #[serde(default = "default_max_candidates")]
    pub max_candidates: usize,
    #[serde(default = "one")]
    pub indel_cost: f64,
    #[serde(default)]
    pub distance: DistanceKind,
    #[serde(default)]
    pub candidate_source: CandidateSource,
    #[serde(default)]
    pub paths: PathSettings,
    #[serde(default)]
    pub ga: GaParams,
    #[serde(default)]
    pub fit: FitSettings,
    #[serde(default)]
    pub cost_learning: CostSettings,
}

fn one() -> f64 {
    1.0
}

fn infinity() -> f64 {
    f64::INFINITY
}

fn default_max_candidates() -> usize {
    64
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            lambda: 1.0,
            likelihood_const: 1.0,
            theta: f64::INFINITY,
            case_mode: CaseMode::Exact,
            max_candidates: default_max_candidates(),
            indel_cost: 1.0,
            distance: DistanceKind::Cost,
            candidate_source: CandidateSource::Hypotheses,
            paths: PathSettings::default(),
            ga: GaParams::default(),
            fit: FitSettings::default(),
            cost_learning: CostSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn ensemble(&self, f_curve: FCurve) -> Result<EnsembleConfig> {
        let cfg = EnsembleConfig {
            lambda: self.lambda,
            likelihood_const: self.likelihood_const,
            theta: self.theta,
            f_curve,
            case_mode: self.case_mode,
            max_candidates: self.max_candidates,
            indel_cost: self.indel_cost,
            distance: self.distance,
            candidate_source: self.candidate_source,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

pub fn parse_run_config(text: &str, path: &Path) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
    if cfg.version != CONFIG_VERSION {
        return Err(Error::parse(
            path,
            1,
            format!("unsupported config version {} (expected {CONFIG_VERSION})", cfg.version),
        ));
    }
    Ok(cfg)
}

pub fn read_run_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    parse_run_config(&read_text(path)?, path)
}

pub fn write_run_config(path: impl AsRef<Path>, cfg: &RunConfig) -> Result<()> {
    write_text(path.as_ref(), &cfg.to_json())
}

//! Shared domain types: labels, hypothesis sets, dictionaries, cost
//! matrices, F-curves, pruning masks and the ensemble configuration.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A recognized or reference string. Compared by exact scalar equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Self {
        Label(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn chars(&self) -> Vec<char> {
        self.0.chars().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// How strings are compared for dictionary lookup and scoring against ground truth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseMode {
    #[default]
    Exact,
    FoldUpper,
}

impl CaseMode {
    pub fn normalize<'a>(self, s: &'a str) -> std::borrow::Cow<'a, str> {
        match self {
            CaseMode::Exact => std::borrow::Cow::Borrowed(s),
            CaseMode::FoldUpper => std::borrow::Cow::Owned(fold_upper(s)),
        }
    }

    pub fn matches(self, a: &str, b: &str) -> bool {
        match self {
            CaseMode::Exact => a == b,
            CaseMode::FoldUpper => a.chars().map(fold_char).eq(b.chars().map(fold_char)),
        }
    }
}

impl std::str::FromStr for CaseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CaseMode::Exact),
            "fold-upper" => Ok(CaseMode::FoldUpper),
            other => Err(Error::invalid(
                "case mode",
                format!("{other:?} (expected exact or fold-upper)"),
            )),
        }
    }
}

/// Uppercase one scalar. Scalars whose uppercase form is more than one
/// scalar (e.g. `ß`) are left unchanged so folding stays length-preserving.
pub fn fold_char(c: char) -> char {
    let mut up = c.to_uppercase();
    match (up.next(), up.next()) {
        (Some(u), None) => u,
        _ => c,
    }
}

/// Scalar-wise uppercase fold used by dictionary lookup and the `(upper)` metrics.
pub fn fold_upper(s: &str) -> String {
    s.chars().map(fold_char).collect()
}

/// The outputs of all L snapshots for one sample, in snapshot order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypothesisSet")]
pub struct HypothesisSet {
    sample_id: String,
    outputs: Vec<Label>,
}

#[derive(Deserialize)]
struct RawHypothesisSet {
    sample_id: String,
    outputs: Vec<Label>,
}

impl TryFrom<RawHypothesisSet> for HypothesisSet {
    type Error = Error;

    fn try_from(raw: RawHypothesisSet) -> Result<Self> {
        HypothesisSet::new(raw.sample_id, raw.outputs)
    }
}

impl HypothesisSet {
    pub fn new<S: Into<Label>>(sample_id: impl Into<String>, outputs: impl IntoIterator<Item = S>) -> Result<Self> {
        let outputs: Vec<Label> = outputs.into_iter().map(Into::into).collect();
        if outputs.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(HypothesisSet {
            sample_id: sample_id.into(),
            outputs,
        })
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn outputs(&self) -> &[Label] {
        &self.outputs
    }

    /// Number of snapshots, L.
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A word list with a membership rule.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    words: BTreeSet<String>,
    index: HashSet<String>,
    case_mode: CaseMode,
}

impl Dictionary {
    pub fn new<I, S>(words: I, case_mode: CaseMode) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: BTreeSet<String> = words.into_iter().map(Into::into).collect();
        let index = words.iter().map(|w| case_mode.normalize(w).into_owned()).collect();
        Dictionary {
            words,
            index,
            case_mode,
        }
    }

    pub fn empty() -> Self {
        Dictionary::default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains(self.case_mode.normalize(word).as_ref())
    }

    pub fn case_mode(&self) -> CaseMode {
        self.case_mode
    }

    /// Words as given, in sorted order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Character substitution costs `cost(a, b) = 1 - P(a | b)`, where `a` is
/// the hypothesis character and `b` the reference character.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionCostMatrix {
    alphabet: BTreeSet<char>,
    costs: BTreeMap<(char, char), f64>,
    default_cost: f64,
}

impl SubstitutionCostMatrix {
    /// Builds a matrix from explicit off-diagonal entries. Diagonal entries
    /// are ignored (always zero). Characters in `costs` join the alphabet.
    pub fn new(
        alphabet: impl IntoIterator<Item = char>,
        costs: impl IntoIterator<Item = ((char, char), f64)>,
        default_cost: f64,
    ) -> Result<Self> {
        check_unit_interval("default cost", default_cost)?;
        let mut alphabet: BTreeSet<char> = alphabet.into_iter().collect();
        let mut table = BTreeMap::new();
        for ((a, b), c) in costs {
            check_unit_interval("substitution cost", c)?;
            alphabet.insert(a);
            alphabet.insert(b);
            if a != b {
                table.insert((a, b), c);
            }
        }
        Ok(SubstitutionCostMatrix {
            alphabet,
            costs: table,
            default_cost,
        })
    }

    /// Every substitution costs 1: classical Levenshtein.
    pub fn unit() -> Self {
        SubstitutionCostMatrix {
            alphabet: BTreeSet::new(),
            costs: BTreeMap::new(),
            default_cost: 1.0,
        }
    }

    #[inline]
    pub fn cost(&self, a: char, b: char) -> f64 {
        if a == b {
            return 0.0;
        }
        self.costs.get(&(a, b)).copied().unwrap_or(self.default_cost)
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    /// Explicitly stored off-diagonal entries.
    pub fn entries(&self) -> impl Iterator<Item = ((char, char), f64)> + '_ {
        self.costs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn get(&self, a: char, b: char) -> Option<f64> {
        self.costs.get(&(a, b)).copied()
    }

    pub fn default_cost(&self) -> f64 {
        self.default_cost
    }
}

fn check_unit_interval(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(what, format!("{v} is outside [0, 1]")))
    }
}

/// Piecewise-linear function over signed distances, given by values at
/// integer knots and clamped to the endpoint values outside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, f64)>", into = "Vec<(i64, f64)>")]
pub struct FCurve {
    knots: Vec<(i64, f64)>,
}

impl FCurve {
    pub fn new(knots: Vec<(i64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("F-curve", "at least two knots are required"));
        }
        if let Some(w) = knots.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid(
                "F-curve",
                format!("abscissae must be strictly increasing ({} then {})", w[0].0, w[1].0),
            ));
        }
        if let Some((d, v)) = knots.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid("F-curve", format!("value at {d} is not finite ({v})")));
        }
        Ok(FCurve { knots })
    }

    /// All-zero curve over the given abscissae.
    pub fn zeros(abscissae: &[i64]) -> Result<Self> {
        FCurve::new(abscissae.iter().map(|&d| (d, 0.0)).collect())
    }

    pub fn knots(&self) -> &[(i64, f64)] {
        &self.knots
    }

    pub fn abscissae(&self) -> Vec<i64> {
        self.knots.iter().map(|&(d, _)| d).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if x <= first.0 as f64 {
            return first.1;
        }
        if x >= last.0 as f64 {
            return last.1;
        }
        // first index whose abscissa is >= x; in 1..len by the checks above
        let hi = self.knots.partition_point(|&(d, _)| (d as f64) < x);
        let (d0, v0) = self.knots[hi - 1];
        let (d1, v1) = self.knots[hi];
        let t = (x - d0 as f64) / (d1 - d0) as f64;
        v0 * (1.0 - t) + v1 * t
    }

    /// Copy of this curve with knot `index` set to `value`.
    pub fn with_value(&self, index: usize, value: f64) -> FCurve {
        let mut knots = self.knots.clone();
        knots[index].1 = value;
        FCurve { knots }
    }
}

impl TryFrom<Vec<(i64, f64)>> for FCurve {
    type Error = Error;

    fn try_from(knots: Vec<(i64, f64)>) -> Result<Self> {
        FCurve::new(knots)
    }
}

impl From<FCurve> for Vec<(i64, f64)> {
    fn from(f: FCurve) -> Self {
        f.knots
    }
}

/// Distance used for voting-candidate generation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    /// Cost Levenshtein distance with the learned substitution matrix.
    #[default]
    Cost,
    /// Unit-cost Levenshtein.
    Unit,
}

/// Where the initial voting candidates come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    /// Distinct hypothesis outputs only.
    #[default]
    Hypotheses,
    /// Hypothesis outputs plus every dictionary word.
    HypothesesAndDictionary,
}

/// Parameters of the combination rule.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    /// Positive scale applied to every vote weight.
    pub lambda: f64,
    /// Stand-in for the (constant) model likelihood of each snapshot.
    pub likelihood_const: f64,
    /// Candidate distance bound; `f64::INFINITY` disables the bound.
    pub theta: f64,
    pub f_curve: FCurve,
    /// Comparison against ground truth (fitness, fitting objective).
    pub case_mode: CaseMode,
    pub max_candidates: usize,
    pub indel_cost: f64,
    pub distance: DistanceKind,
    pub candidate_source: CandidateSource,
}

impl EnsembleConfig {
    pub fn new(f_curve: FCurve) -> Self {
        EnsembleConfig {
            lambda: 1.0,
            likelihood_const: 1.0,
            theta: f64::INFINITY,
            f_curve,
            case_mode: CaseMode::Exact,
            max_candidates: 64,
            indel_cost: 1.0,
            distance: DistanceKind::Cost,
            candidate_source: CandidateSource::Hypotheses,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid(
                "lambda",
                format!("{} must be finite and > 0", self.lambda),
            ));
        }
        if !(self.likelihood_const.is_finite() && self.likelihood_const > 0.0) {
            return Err(Error::invalid(
                "likelihood constant",
                format!("{} must be finite and > 0", self.likelihood_const),
            ));
        }
        if self.theta.is_nan() || self.theta < 0.0 || self.theta == f64::NEG_INFINITY {
            return Err(Error::invalid("theta", format!("{} must be >= 0 or +inf", self.theta)));
        }
        if !(self.indel_cost.is_finite() && self.indel_cost > 0.0) {
            return Err(Error::invalid(
                "indel cost",
                format!("{} must be finite and > 0", self.indel_cost),
            ));
        }
        if self.max_candidates == 0 {
            return Err(Error::invalid("max candidates", "must be > 0"));
        }
        Ok(())
    }
}

/// A validation/test sample with its reference transcription.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub sample_id: String,
    pub ground_truth: Label,
}

impl LabeledSample {
    pub fn new(sample_id: impl Into<String>, ground_truth: impl Into<Label>) -> Self {
        LabeledSample {
            sample_id: sample_id.into(),
            ground_truth: ground_truth.into(),
        }
    }
}

/// Which snapshots take part in the vote. At least one bit is always set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PruningMask {
    bits: Vec<bool>,
}

impl PruningMask {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.iter().any(|&b| b) {
            return Err(Error::EmptyEnsemble);
        }
        Ok(PruningMask { bits })
    }

    pub fn all(len: usize) -> Result<Self> {
        PruningMask::new(vec![true; len])
    }

    /// Only snapshot `index` of `len`.
    pub fn single(len: usize, index: usize) -> Result<Self> {
        let mut bits = vec![false; len];
        if let Some(b) = bits.get_mut(index) {
            *b = true;
        }
        PruningMask::new(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_set(&self, index: usize) -> bool {
        self.bits[index]
    }
}

impl fmt::Display for PruningMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PruningMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(
                    "mask",
                    format!("unexpected character {other:?} at column {}", i + 1),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::invalid("mask", "empty bitstring"));
        }
        if !bits.contains(&true) {
            return Err(Error::invalid("mask", "all bits are zero"));
        }
        PruningMask::new(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypothesis_set_constructor() {
        let h = HypothesisSet::new("s1", ["cat", "cat", "bat"]).unwrap();
        assert_eq!(h.len(), 3);
        assert!(matches!(
            HypothesisSet::new("s2", Vec::<&str>::new()),
            Err(Error::EmptyEnsemble)
        ));
        let h = HypothesisSet::new("s3", ["", "a"]).unwrap();
        assert!(h.outputs()[0].is_empty());
    }

    #[test]
    fn f_curve_knots_and_midpoints() {
        let f = FCurve::new(vec![(-2, -1.5), (0, 0.25), (1, 1.0), (4, 0.1)]).unwrap();
        for &(d, v) in f.knots() {
            assert_eq!(f.eval(d as f64), v);
        }
        assert_eq!(f.eval(-1.0), (-1.5 + 0.25) / 2.0);
        assert_eq!(f.eval(0.5), (0.25 + 1.0) / 2.0);
        assert_eq!(f.eval(-10.0), -1.5);
        assert_eq!(f.eval(99.0), 0.1);
    }

    #[test]
    fn f_curve_rejects_bad_knots() {
        assert!(FCurve::new(vec![(0, 1.0)]).is_err());
        assert!(FCurve::new(vec![(0, 1.0), (0, 2.0)]).is_err());
        assert!(FCurve::new(vec![(1, 1.0), (0, 2.0)]).is_err());
        assert!(FCurve::new(vec![(0, f64::NAN), (1, 2.0)]).is_err());
    }

    #[test]
    fn dictionary_case_modes() {
        let d = Dictionary::new(["THE"], CaseMode::FoldUpper);
        assert!(d.contains("The"));
        assert!(d.contains("the"));
        let d = Dictionary::new(["THE"], CaseMode::Exact);
        assert!(!d.contains("The"));
    }

    #[test]
    fn fold_is_scalar_wise() {
        assert_eq!(fold_upper("Straße"), "STRAßE");
        assert_eq!(fold_upper("word"), "WORD");
        assert!(CaseMode::FoldUpper.matches("Word", "WORD"));
        assert!(!CaseMode::Exact.matches("Word", "WORD"));
    }

    #[test]
    fn cost_matrix_diagonal_and_default() {
        let m = SubstitutionCostMatrix::new([], [(('o', 'a'), 0.75), (('a', 'a'), 0.5)], 1.0).unwrap();
        assert_eq!(m.cost('a', 'a'), 0.0);
        assert_eq!(m.cost('o', 'a'), 0.75);
        assert_eq!(m.cost('a', 'o'), 1.0);
        assert_eq!(m.cost('x', 'y'), 1.0);
        assert!(SubstitutionCostMatrix::new([], [(('a', 'b'), 1.5)], 1.0).is_err());
    }

    #[test]
    fn mask_parse() {
        let m: PruningMask = "0110".parse().unwrap();
        assert_eq!(m.count_ones(), 2);
        assert_eq!(m.to_string(), "0110");
        assert!("000".parse::<PruningMask>().is_err());
        assert!("01x".parse::<PruningMask>().is_err());
        assert!(PruningMask::new(vec![false, false]).is_err());
    }

    #[test]
    fn config_validation() {
        let f = FCurve::zeros(&[0, 1]).unwrap();
        let mut c = EnsembleConfig::new(f);
        assert!(c.validate().is_ok());
        c.lambda = 0.0;
        assert!(c.validate().is_err());
        c.lambda = 1.0;
        c.theta = -1.0;
        assert!(c.validate().is_err());
    }
}

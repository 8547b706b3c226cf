//! The weighted-voting combination rule.
//!
//! For a candidate label `y` and the retained snapshot outputs `h_i`:
//!
//! ```text
//! score(y) = Σ_i W(y, h_i) · likelihood_const
//! W(y, h)  = λ · ( I(y = h) + U(y) · V(y, h) )
//! U(y)     = 1 if y is a dictionary word, else 0
//! V(y, h)  = F(-CLD(y, h)) if h is a dictionary word, else F(CLD(y, h))
//! ```
//!
//! `combine` returns the highest-scoring candidate. Ties are broken by
//! dictionary membership, then by how many retained snapshots produced the
//! label, then by the lexicographically smallest label.

mod candidates;
mod fit;
mod prepared;

pub use candidates::{generate_candidates, generate_candidates_from, CandidateParams};
pub use fit::{fit_f_curve, FitOptions, FitOutcome, DEFAULT_GRID, DEFAULT_KNOTS};
pub use prepared::{Decision, PreparedSample, PreparedValidation, WeightTable};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{cld, levenshtein};
use crate::error::{Error, Result};
use crate::types::{
    Dictionary, DistanceKind, EnsembleConfig, FCurve, HypothesisSet, Label, LabeledSample, PruningMask,
    SubstitutionCostMatrix,
};

/// Read-only inputs shared by every fusion call.
#[derive(Debug, Clone, Copy)]
pub struct FusionContext<'a> {
    pub dict: &'a Dictionary,
    pub costs: &'a SubstitutionCostMatrix,
    pub config: &'a EnsembleConfig,
}

impl<'a> FusionContext<'a> {
    pub fn new(dict: &'a Dictionary, costs: &'a SubstitutionCostMatrix, config: &'a EnsembleConfig) -> Self {
        FusionContext { dict, costs, config }
    }

    pub fn with_config(self, config: &'a EnsembleConfig) -> Self {
        FusionContext { config, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    HypothesisOutput,
    DictionaryNeighbor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub label: Label,
    pub score: f64,
    pub provenance: Provenance,
}

/// CLD between a candidate label and a snapshot output.
///
/// The hypothesis is the first argument of the underlying distance, so a
/// substitution of candidate char `c` by hypothesis char `h` costs
/// `cost(h, c) = 1 - P(h | c)`.
pub fn label_distance(y: &str, h: &str, costs: &SubstitutionCostMatrix, indel_cost: f64) -> f64 {
    cld(h, y, costs, indel_cost)
}

/// Distance used inside candidate generation.
pub fn candidate_distance(
    y: &str,
    h: &str,
    kind: DistanceKind,
    costs: &SubstitutionCostMatrix,
    indel_cost: f64,
) -> f64 {
    match kind {
        DistanceKind::Cost => label_distance(y, h, costs, indel_cost),
        DistanceKind::Unit => levenshtein(y, h) as f64,
    }
}

/// 1 if `y` is in the dictionary, else 0.
pub fn u_indicator(y: &str, dict: &Dictionary) -> f64 {
    if dict.contains(y) {
        1.0
    } else {
        0.0
    }
}

pub fn v_weight(
    y: &str,
    h: &str,
    dict: &Dictionary,
    costs: &SubstitutionCostMatrix,
    f: &FCurve,
    indel_cost: f64,
) -> f64 {
    let d = label_distance(y, h, costs, indel_cost);
    if dict.contains(h) {
        f.eval(-d)
    } else {
        f.eval(d)
    }
}

pub fn w_weight(
    y: &str,
    h: &str,
    dict: &Dictionary,
    costs: &SubstitutionCostMatrix,
    f: &FCurve,
    lambda: f64,
    indel_cost: f64,
) -> f64 {
    lambda * unscaled_weight(y, h, dict, costs, f, indel_cost)
}

fn unscaled_weight(
    y: &str,
    h: &str,
    dict: &Dictionary,
    costs: &SubstitutionCostMatrix,
    f: &FCurve,
    indel_cost: f64,
) -> f64 {
    let same = if y == h { 1.0 } else { 0.0 };
    let u = u_indicator(y, dict);
    if u == 0.0 {
        same
    } else {
        same + v_weight(y, h, dict, costs, f, indel_cost)
    }
}

fn check_mask(hset: &HypothesisSet, mask: &PruningMask) -> Result<()> {
    if mask.len() != hset.len() {
        return Err(Error::MaskLengthMismatch {
            mask: mask.len(),
            ensemble: hset.len(),
        });
    }
    Ok(())
}

/// Σ over retained snapshots of `W(y, h_i) · likelihood_const`.
pub fn score_candidate(y: &str, hset: &HypothesisSet, mask: &PruningMask, ctx: FusionContext<'_>) -> Result<f64> {
    check_mask(hset, mask)?;
    let cfg = ctx.config;
    let support: f64 = hset
        .outputs()
        .iter()
        .zip(mask.bits())
        .filter(|(_, &keep)| keep)
        .map(|(h, _)| unscaled_weight(y, h.as_str(), ctx.dict, ctx.costs, &cfg.f_curve, cfg.indel_cost))
        .sum();
    Ok(support * cfg.lambda * cfg.likelihood_const)
}

/// Selects the best label for one sample from the snapshots kept by `mask`.
pub fn combine(hset: &HypothesisSet, mask: &PruningMask, ctx: FusionContext<'_>) -> Result<ScoredCandidate> {
    check_mask(hset, mask)?;
    ctx.config.validate()?;
    let prepared = PreparedSample::new(hset, ctx);
    let weights = prepared.weights(&ctx.config.f_curve);
    let decision = prepared.decide(&weights, mask, ctx.config);
    Ok(prepared.scored(&decision, ctx.config))
}

/// `combine` over many samples in parallel; output order follows input order.
pub fn combine_all(
    hsets: &[HypothesisSet],
    mask: &PruningMask,
    ctx: FusionContext<'_>,
) -> Result<Vec<ScoredCandidate>> {
    hsets.par_iter().map(|h| combine(h, mask, ctx)).collect()
}

/// Fraction of samples whose fused label matches the reference under the
/// configured case mode.
pub fn recognition_rate(
    val: &[(HypothesisSet, LabeledSample)],
    mask: &PruningMask,
    ctx: FusionContext<'_>,
) -> Result<f64> {
    if val.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (h, _) in val {
        check_mask(h, mask)?;
    }
    ctx.config.validate()?;
    let prepared: Vec<PreparedSample> = val.par_iter().map(|(h, _)| PreparedSample::new(h, ctx)).collect();
    let weights: Vec<WeightTable> = prepared.par_iter().map(|p| p.weights(&ctx.config.f_curve)).collect();
    let labels: Vec<&LabeledSample> = val.iter().map(|(_, s)| s).collect();
    Ok(prepared::accuracy(&prepared, &weights, &labels, mask, ctx.config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{CandidateSource, CaseMode};

    fn curve(knots: &[(i64, f64)]) -> FCurve {
        FCurve::new(knots.to_vec()).unwrap()
    }

    #[test]
    fn u_membership() {
        let d = Dictionary::new(["the"], CaseMode::Exact);
        assert_eq!(u_indicator("the", &d), 1.0);
        assert_eq!(u_indicator("zzzq", &d), 0.0);
        let d = Dictionary::new(["THE"], CaseMode::FoldUpper);
        assert_eq!(u_indicator("The", &d), 1.0);
    }

    #[test]
    fn v_examples() {
        let unit = SubstitutionCostMatrix::unit();
        let d = Dictionary::new(["word"], CaseMode::Exact);
        let f = curve(&[(0, 0.0), (4, 1.0)]);
        assert_eq!(v_weight("word", "word", &d, &unit, &f, 1.0), 0.0);
        // h not in dict, CLD 2: midpoint of (0,0)-(4,1)
        assert_eq!(v_weight("woxx", "wodd", &d, &unit, &f, 1.0), 0.5);
        // h in dict, CLD 2: F(-2) clamps to the left endpoint
        assert_eq!(v_weight("wodd", "word", &d, &unit, &f, 1.0), f.eval(-2.0));
        assert_eq!(f.eval(-2.0), 0.0);
    }

    #[test]
    fn w_examples() {
        let unit = SubstitutionCostMatrix::unit();
        let f = curve(&[(0, 0.0), (1, 0.8), (2, 0.2)]);
        let empty = Dictionary::empty();
        assert_eq!(w_weight("cat", "cat", &empty, &unit, &f, 1.0, 1.0), 1.0);
        assert_eq!(w_weight("cat", "bat", &empty, &unit, &f, 1.0, 1.0), 0.0);
        let d = Dictionary::new(["cat"], CaseMode::Exact);
        assert_eq!(w_weight("cat", "bat", &d, &unit, &f, 1.0, 1.0), 0.8);
        assert_eq!(w_weight("cat", "bat", &d, &unit, &f, 2.5, 1.0), 2.0);
    }

    #[test]
    fn label_distance_orientation() {
        // cost(hyp 'o', ref 'a') is cheap; the reverse is not
        let m = SubstitutionCostMatrix::new([], [(('o', 'a'), 0.25)], 1.0).unwrap();
        assert_eq!(label_distance("cat", "cot", &m, 1.0), 0.25);
        assert_eq!(label_distance("cot", "cat", &m, 1.0), 1.0);
    }

    #[test]
    fn score_vote_count_and_single_term() {
        let unit = SubstitutionCostMatrix::unit();
        let cfg = EnsembleConfig::new(curve(&[(0, 0.5), (1, 0.5)]));
        let empty = Dictionary::empty();
        let ctx = FusionContext::new(&empty, &unit, &cfg);
        let h = HypothesisSet::new("s", ["cat", "cat", "bat", "cat"]).unwrap();
        let all = PruningMask::all(4).unwrap();
        assert_eq!(score_candidate("cat", &h, &all, ctx).unwrap(), 3.0);

        let mut cfg2 = cfg.clone();
        cfg2.lambda = 2.0;
        cfg2.likelihood_const = 0.25;
        let one = PruningMask::single(4, 2).unwrap();
        assert_eq!(score_candidate("bat", &h, &one, ctx.with_config(&cfg2)).unwrap(), 0.5);

        let short = PruningMask::all(3).unwrap();
        assert!(matches!(
            score_candidate("cat", &h, &short, ctx),
            Err(Error::MaskLengthMismatch { mask: 3, ensemble: 4 })
        ));
    }

    #[test]
    fn score_three_terms() {
        // W terms composed by hand:
        //   y="word" vs "wrd"  (not in dict, CLD 1): 0 + 1·F(1)  = 0.6
        //   y="word" vs "word" (in dict, CLD 0):     1 + 1·F(-0) = 1.1
        //   y="word" vs "ward" (in dict, CLD 1):     0 + 1·F(-1) = -0.4
        let unit = SubstitutionCostMatrix::unit();
        let f = curve(&[(-1, -0.4), (0, 0.1), (1, 0.6)]);
        let d = Dictionary::new(["word", "ward"], CaseMode::Exact);
        let mut cfg = EnsembleConfig::new(f);
        cfg.lambda = 2.0;
        cfg.likelihood_const = 0.5;
        let ctx = FusionContext::new(&d, &unit, &cfg);
        let h = HypothesisSet::new("s", ["wrd", "word", "ward"]).unwrap();
        let got = score_candidate("word", &h, &PruningMask::all(3).unwrap(), ctx).unwrap();
        let expected = (0.6 + 1.1 - 0.4) * 2.0 * 0.5;
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn combine_plurality() {
        let unit = SubstitutionCostMatrix::unit();
        let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1]).unwrap());
        let empty = Dictionary::empty();
        let ctx = FusionContext::new(&empty, &unit, &cfg);
        let h = HypothesisSet::new("s", ["cat", "cat", "bat"]).unwrap();
        let out = combine(&h, &PruningMask::all(3).unwrap(), ctx).unwrap();
        assert_eq!(out.label.as_str(), "cat");
        assert_eq!(out.score, 2.0);
        assert_eq!(out.provenance, Provenance::HypothesisOutput);
    }

    #[test]
    fn combine_prefers_dictionary_word() {
        // candidates: wrd (1 vote), word (1 vote + F(1) from wrd + F(1) from w0rd),
        // w0rd (1 vote); with F(1) = 0.8 "word" scores 2.6
        let unit = SubstitutionCostMatrix::unit();
        let f = curve(&[(-1, -0.5), (0, 0.0), (1, 0.8), (3, 0.0)]);
        let cfg = EnsembleConfig::new(f);
        let d = Dictionary::new(["word"], CaseMode::Exact);
        let ctx = FusionContext::new(&d, &unit, &cfg);
        let h = HypothesisSet::new("s", ["wrd", "word", "w0rd"]).unwrap();
        let out = combine(&h, &PruningMask::all(3).unwrap(), ctx).unwrap();
        assert_eq!(out.label.as_str(), "word");
        assert!((out.score - 2.6).abs() < 1e-12);
    }

    #[test]
    fn tie_goes_to_dictionary_member() {
        let unit = SubstitutionCostMatrix::unit();
        let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1]).unwrap());
        let d = Dictionary::new(["bat"], CaseMode::Exact);
        let ctx = FusionContext::new(&d, &unit, &cfg);
        let h = HypothesisSet::new("s", ["abc", "bat"]).unwrap();
        let out = combine(&h, &PruningMask::all(2).unwrap(), ctx).unwrap();
        assert_eq!(out.label.as_str(), "bat");

        // without the dictionary the lexicographically smallest wins
        let empty = Dictionary::empty();
        let out = combine(
            &h,
            &PruningMask::all(2).unwrap(),
            FusionContext::new(&empty, &unit, &cfg),
        )
        .unwrap();
        assert_eq!(out.label.as_str(), "abc");
    }

    #[test]
    fn combine_respects_mask() {
        let unit = SubstitutionCostMatrix::unit();
        let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1]).unwrap());
        let empty = Dictionary::empty();
        let ctx = FusionContext::new(&empty, &unit, &cfg);
        let h = HypothesisSet::new("s", ["cat", "cat", "bat"]).unwrap();
        let mask = PruningMask::new(vec![false, false, true]).unwrap();
        assert_eq!(combine(&h, &mask, ctx).unwrap().label.as_str(), "bat");
    }

    #[test]
    fn masked_output_still_reachable_through_dictionary() {
        let d = Dictionary::new(["word"], CaseMode::Exact);
        let unit = SubstitutionCostMatrix::unit();
        let mut cfg = EnsembleConfig::new(curve(&[(0, 0.0), (1, 0.8), (2, 0.0)]));
        cfg.candidate_source = CandidateSource::HypothesesAndDictionary;
        let ctx = FusionContext::new(&d, &unit, &cfg);
        let h = HypothesisSet::new("s", ["wrd", "word", "w0rd"]).unwrap();
        let out = combine(&h, &"101".parse().unwrap(), ctx).unwrap();
        assert_eq!(out.label.as_str(), "word");
        assert_eq!(out.provenance, Provenance::DictionaryNeighbor);
        assert!((out.score - 1.6).abs() < 1e-12);
    }
}

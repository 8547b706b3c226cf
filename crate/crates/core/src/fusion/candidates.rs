//! Voting-candidate generation.
//!
//! A label `y` from the initial pool `Y0` is a candidate when some non-empty
//! subset `H*` of the hypotheses is pairwise within `2θ` and every member is
//! within `θ` of `y`. Any qualifying `H*` contains a member `h` with
//! `ED(y, h) ≤ θ`, and `{h}` alone is a qualifying subset, so the test is
//! equivalent to `min_h ED(y, h) ≤ θ`. With `Y0` drawn from the hypotheses
//! themselves every output qualifies through its own singleton.

use std::collections::HashMap;

use crate::types::{
    CandidateSource, Dictionary, DistanceKind, EnsembleConfig, HypothesisSet, Label, SubstitutionCostMatrix,
};

use super::candidate_distance;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateParams {
    /// Distance bound; `f64::INFINITY` keeps every pool member.
    pub theta: f64,
    pub max_candidates: usize,
    pub distance: DistanceKind,
    pub source: CandidateSource,
    pub indel_cost: f64,
}

impl Default for CandidateParams {
    fn default() -> Self {
        CandidateParams {
            theta: f64::INFINITY,
            max_candidates: 64,
            distance: DistanceKind::Cost,
            source: CandidateSource::Hypotheses,
            indel_cost: 1.0,
        }
    }
}

impl From<&EnsembleConfig> for CandidateParams {
    fn from(c: &EnsembleConfig) -> Self {
        CandidateParams {
            theta: c.theta,
            max_candidates: c.max_candidates,
            distance: c.distance,
            source: c.candidate_source,
            indel_cost: c.indel_cost,
        }
    }
}

/// Candidates for `hset`, with the pool chosen by `params.source`.
pub fn generate_candidates(
    hset: &HypothesisSet,
    dict: &Dictionary,
    costs: &SubstitutionCostMatrix,
    params: &CandidateParams,
) -> Vec<Label> {
    let mut pool: Vec<Label> = hset.outputs().to_vec();
    if params.source == CandidateSource::HypothesesAndDictionary {
        pool.extend(dict.words().map(Label::from));
    }
    generate_candidates_from(&pool, hset, costs, params)
}

/// Candidates drawn from an explicit initial pool `y0`.
///
/// The result is deduplicated and ordered by descending frequency among the
/// hypotheses, then lexicographically, and truncated to `max_candidates`.
pub fn generate_candidates_from(
    y0: &[Label],
    hset: &HypothesisSet,
    costs: &SubstitutionCostMatrix,
    params: &CandidateParams,
) -> Vec<Label> {
    let mut freq: HashMap<&Label, usize> = HashMap::new();
    for h in hset.outputs() {
        *freq.entry(h).or_default() += 1;
    }
    let mut kept: Vec<&Label> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for y in y0 {
        if !seen.insert(y) {
            continue;
        }
        let nearest = hset
            .outputs()
            .iter()
            .map(|h| candidate_distance(y.as_str(), h.as_str(), params.distance, costs, params.indel_cost))
            .fold(f64::INFINITY, f64::min);
        if nearest <= params.theta {
            kept.push(y);
        }
    }
    kept.sort_by(|a, b| {
        let fa = freq.get(a).copied().unwrap_or(0);
        let fb = freq.get(b).copied().unwrap_or(0);
        fb.cmp(&fa).then_with(|| a.cmp(b))
    });
    kept.truncate(params.max_candidates);
    kept.into_iter().cloned().collect()
}

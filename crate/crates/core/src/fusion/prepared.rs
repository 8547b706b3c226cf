//! Per-sample precomputation for the combination rule.
//!
//! Distances between every candidate and every distinct snapshot output do
//! not depend on the mask or on F, so pruning and curve fitting compute
//! them once and only redo the cheap weighted sums.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::types::{CandidateSource, EnsembleConfig, FCurve, HypothesisSet, Label, LabeledSample, PruningMask};

use super::{candidate_distance, label_distance, FusionContext, Provenance, ScoredCandidate};

#[derive(Debug, Clone)]
struct Candidate {
    label: Label,
    in_dict: bool,
    /// Signed CLD to each distinct output (negative when the output is a
    /// dictionary word). Empty when the candidate is not a dictionary word.
    signed: Vec<f64>,
    /// Candidate-generation distance to each distinct output. Empty when θ is infinite.
    bound: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PreparedSample {
    sample_id: String,
    /// Distinct outputs in first-occurrence order; candidate `k < outputs.len()` is output `k`.
    outputs: Vec<Label>,
    /// Snapshot index -> distinct output index.
    snapshot_output: Vec<usize>,
    candidates: Vec<Candidate>,
}

/// `I(y = h) + U(y)·F(±CLD)` for every (candidate, distinct output) pair.
#[derive(Debug, Clone)]
pub struct WeightTable {
    n_outputs: usize,
    w: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub candidate: usize,
    /// Score before scaling by λ and the likelihood constant.
    pub support: f64,
    pub provenance: Provenance,
}

impl PreparedSample {
    pub fn new(hset: &HypothesisSet, ctx: FusionContext<'_>) -> Self {
        let cfg = ctx.config;
        let mut outputs: Vec<Label> = Vec::new();
        let mut snapshot_output = Vec::with_capacity(hset.len());
        for h in hset.outputs() {
            let idx = match outputs.iter().position(|o| o == h) {
                Some(i) => i,
                None => {
                    outputs.push(h.clone());
                    outputs.len() - 1
                }
            };
            snapshot_output.push(idx);
        }
        let output_in_dict: Vec<bool> = outputs.iter().map(|o| ctx.dict.contains(o.as_str())).collect();

        let mut pool: Vec<Label> = outputs.clone();
        if cfg.candidate_source == CandidateSource::HypothesesAndDictionary {
            pool.extend(
                ctx.dict
                    .words()
                    .filter(|w| !outputs.iter().any(|o| o.as_str() == *w))
                    .map(Label::from),
            );
        }

        let bounded = cfg.theta.is_finite();
        let candidates = pool
            .into_iter()
            .map(|label| {
                let in_dict = ctx.dict.contains(label.as_str());
                let signed: Vec<f64> = if in_dict {
                    outputs
                        .iter()
                        .zip(&output_in_dict)
                        .map(|(o, &o_dict)| {
                            let d = label_distance(label.as_str(), o.as_str(), ctx.costs, cfg.indel_cost);
                            if o_dict {
                                -d
                            } else {
                                d
                            }
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                let bound = if bounded {
                    outputs
                        .iter()
                        .map(|o| {
                            candidate_distance(label.as_str(), o.as_str(), cfg.distance, ctx.costs, cfg.indel_cost)
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                Candidate {
                    label,
                    in_dict,
                    signed,
                    bound,
                }
            })
            .collect();

        PreparedSample {
            sample_id: hset.sample_id().to_owned(),
            outputs,
            snapshot_output,
            candidates,
        }
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn snapshots(&self) -> usize {
        self.snapshot_output.len()
    }

    pub fn weights(&self, f: &FCurve) -> WeightTable {
        let n = self.outputs.len();
        let mut w = vec![0.0; n * self.candidates.len()];
        for (c, cand) in self.candidates.iter().enumerate() {
            let row = &mut w[c * n..(c + 1) * n];
            if c < n {
                row[c] = 1.0;
            }
            if cand.in_dict {
                for (cell, &s) in row.iter_mut().zip(&cand.signed) {
                    *cell += f.eval(s);
                }
            }
        }
        WeightTable { n_outputs: n, w }
    }

    /// Runs candidate selection and scoring for the snapshots kept by `mask`.
    /// `mask` must have one bit per snapshot with at least one set.
    pub fn decide(&self, weights: &WeightTable, mask: &PruningMask, cfg: &EnsembleConfig) -> Decision {
        debug_assert_eq!(mask.len(), self.snapshot_output.len());
        let n = self.outputs.len();
        let mut freq = vec![0usize; n];
        for (&o, &keep) in self.snapshot_output.iter().zip(mask.bits()) {
            if keep {
                freq[o] += 1;
            }
        }
        let cand_freq = |c: usize| if c < n { freq[c] } else { 0 };

        let dict_pool = cfg.candidate_source == CandidateSource::HypothesesAndDictionary;
        // An output of a masked-out snapshot stays eligible through the
        // dictionary pool.
        let mut kept: Vec<usize> = (0..self.candidates.len())
            .filter(|&c| c >= n || freq[c] > 0 || (dict_pool && self.candidates[c].in_dict))
            .filter(|&c| {
                if !cfg.theta.is_finite() {
                    return true;
                }
                let bound = &self.candidates[c].bound;
                (0..n)
                    .filter(|&j| freq[j] > 0)
                    .map(|j| bound[j])
                    .fold(f64::INFINITY, f64::min)
                    <= cfg.theta
            })
            .collect();
        if kept.len() > cfg.max_candidates {
            kept.sort_by(|&a, &b| {
                cand_freq(b)
                    .cmp(&cand_freq(a))
                    .then_with(|| self.candidates[a].label.cmp(&self.candidates[b].label))
            });
            kept.truncate(cfg.max_candidates);
        }

        let mut best: Option<Decision> = None;
        for c in kept {
            let row = &weights.w[c * weights.n_outputs..(c + 1) * weights.n_outputs];
            let support: f64 = row.iter().zip(&freq).map(|(&w, &k)| w * k as f64).sum();
            let cand = Decision {
                candidate: c,
                support,
                provenance: if cand_freq(c) > 0 {
                    Provenance::HypothesisOutput
                } else {
                    Provenance::DictionaryNeighbor
                },
            };
            best = Some(match best {
                None => cand,
                Some(b) if self.better(&cand, &b, &cand_freq) => cand,
                Some(b) => b,
            });
        }
        // kept is never empty: every retained output is its own candidate
        best.expect("at least one snapshot retained")
    }

    fn better(&self, a: &Decision, b: &Decision, freq: &impl Fn(usize) -> usize) -> bool {
        let ca = &self.candidates[a.candidate];
        let cb = &self.candidates[b.candidate];
        a.support
            .partial_cmp(&b.support)
            .unwrap_or(Ordering::Equal)
            .then(ca.in_dict.cmp(&cb.in_dict))
            .then(freq(a.candidate).cmp(&freq(b.candidate)))
            .then(cb.label.cmp(&ca.label))
            == Ordering::Greater
    }

    pub fn label(&self, decision: &Decision) -> &Label {
        &self.candidates[decision.candidate].label
    }

    pub fn scored(&self, decision: &Decision, cfg: &EnsembleConfig) -> ScoredCandidate {
        let cand = &self.candidates[decision.candidate];
        ScoredCandidate {
            label: cand.label.clone(),
            score: decision.support * cfg.lambda * cfg.likelihood_const,
            provenance: decision.provenance,
        }
    }
}

pub(crate) fn accuracy(
    prepared: &[PreparedSample],
    weights: &[WeightTable],
    truths: &[&LabeledSample],
    mask: &PruningMask,
    cfg: &EnsembleConfig,
) -> f64 {
    let correct: usize = prepared
        .par_iter()
        .zip(weights.par_iter())
        .zip(truths.par_iter())
        .map(|((p, w), t)| {
            let d = p.decide(w, mask, cfg);
            usize::from(cfg.case_mode.matches(p.label(&d).as_str(), t.ground_truth.as_str()))
        })
        .sum();
    correct as f64 / prepared.len() as f64
}

/// A validation set with distances precomputed, for repeated evaluation
/// under different masks or curves.
#[derive(Debug, Clone)]
pub struct PreparedValidation {
    samples: Vec<PreparedSample>,
    truths: Vec<LabeledSample>,
    weights: Vec<WeightTable>,
    config: EnsembleConfig,
}

impl PreparedValidation {
    pub fn new(val: &[(HypothesisSet, LabeledSample)], ctx: FusionContext<'_>) -> Self {
        let samples: Vec<PreparedSample> = val.par_iter().map(|(h, _)| PreparedSample::new(h, ctx)).collect();
        let weights = samples.par_iter().map(|s| s.weights(&ctx.config.f_curve)).collect();
        PreparedValidation {
            samples,
            truths: val.iter().map(|(_, t)| t.clone()).collect(),
            weights,
            config: ctx.config.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Recognition rate with the stored curve.
    pub fn accuracy(&self, mask: &PruningMask) -> f64 {
        let truths: Vec<&LabeledSample> = self.truths.iter().collect();
        accuracy(&self.samples, &self.weights, &truths, mask, &self.config)
    }

    /// Recognition rate with a different curve.
    pub fn accuracy_with(&self, f: &FCurve, mask: &PruningMask) -> f64 {
        let weights: Vec<WeightTable> = self.samples.par_iter().map(|s| s.weights(f)).collect();
        let truths: Vec<&LabeledSample> = self.truths.iter().collect();
        accuracy(&self.samples, &weights, &truths, mask, &self.config)
    }
}

//! Weighted voting over the string outputs of an ensemble of recognizer
//! snapshots.
//!
//! Each snapshot of a sequence recognizer (e.g. checkpoints of one training
//! run) emits a word hypothesis per sample. [`fusion::combine`] picks the
//! fused label by scoring candidates with a learned character-level edit
//! distance ([`cost`]) and a dictionary-aware weight curve ([`types::FCurve`]).
//! [`pruning`] searches for a subset of snapshots that maximizes validation
//! accuracy, and [`metrics`] reports total edit distance and word accuracy.
//!
//! ```
//! use adafuse::{combine, Dictionary, CaseMode, EnsembleConfig, FCurve, FusionContext,
//!               HypothesisSet, PruningMask, SubstitutionCostMatrix};
//!
//! let dict = Dictionary::new(["word"], CaseMode::Exact);
//! let costs = SubstitutionCostMatrix::unit();
//! let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1]).unwrap());
//! let hs = HypothesisSet::new("s1", ["word", "wrd", "word"]).unwrap();
//! let fused = combine(&hs, &PruningMask::all(3).unwrap(), FusionContext::new(&dict, &costs, &cfg)).unwrap();
//! assert_eq!(fused.label.as_str(), "word");
//! ```

pub mod cli;
pub mod cost;
pub mod error;
pub mod fusion;
pub mod io;
pub mod metrics;
pub mod pruning;
pub mod simulator;
pub mod types;

pub use cost::{build_cost_matrix, cld, count_positional_pairs, levenshtein, AlignedPairCounts};
pub use error::{Error, Result};
pub use fusion::{
    combine, combine_all, fit_f_curve, generate_candidates, score_candidate, FusionContext, ScoredCandidate,
};
pub use metrics::{evaluate, EvalReport};
pub use pruning::{exhaustive_prune, ga_prune, GaParams, GaTrace};
pub use types::{
    CandidateSource, CaseMode, Dictionary, DistanceKind, EnsembleConfig, FCurve, HypothesisSet, Label, LabeledSample,
    PruningMask, SubstitutionCostMatrix,
};

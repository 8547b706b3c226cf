//! Word recognition metrics: total edit distance (T.E.D.) and
//! correctly recognized words (C.R.W.), case-sensitive and uppercase-folded.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::levenshtein;
use crate::error::{Error, Result};
use crate::types::{fold_upper, Label};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: u32,
    pub ted: f64,
    pub crw: f64,
    pub ted_upper: f64,
    pub crw_upper: f64,
    pub n_samples: usize,
}

/// Scores `(prediction, reference)` pairs. T.E.D. always uses unit costs.
pub fn evaluate<'a, I>(pairs: I) -> Result<EvalReport>
where
    I: IntoIterator<Item = (&'a Label, &'a Label)>,
{
    let pairs: Vec<(&Label, &Label)> = pairs.into_iter().collect();
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let per_pair: Vec<(usize, usize, usize, usize)> = pairs
        .par_iter()
        .map(|(p, r)| {
            let (p, r) = (p.as_str(), r.as_str());
            let (pu, ru) = (fold_upper(p), fold_upper(r));
            (
                levenshtein(p, r),
                usize::from(p == r),
                levenshtein(&pu, &ru),
                usize::from(pu == ru),
            )
        })
        .collect();
    let (ted, crw, ted_upper, crw_upper) = per_pair.iter().fold((0, 0, 0, 0), |acc, x| {
        (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2, acc.3 + x.3)
    });
    let n = pairs.len();
    Ok(EvalReport {
        version: REPORT_VERSION,
        ted: ted as f64,
        crw: crw as f64 / n as f64,
        ted_upper: ted_upper as f64,
        crw_upper: crw_upper as f64 / n as f64,
        n_samples: n,
    })
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Flat `key: value` block; C.R.W. shown as a percentage with two decimals.
impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n_samples: {}", self.n_samples)?;
        writeln!(f, "ted: {}", self.ted)?;
        writeln!(f, "crw: {:.2}", self.crw * 100.0)?;
        writeln!(f, "ted_upper: {}", self.ted_upper)?;
        writeln!(f, "crw_upper: {:.2}", self.crw_upper * 100.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(pairs: &[(&str, &str)]) -> Result<EvalReport> {
        let v: Vec<(Label, Label)> = pairs.iter().map(|&(p, r)| (p.into(), r.into())).collect();
        evaluate(v.iter().map(|(p, r)| (p, r)))
    }

    #[test]
    fn identity() {
        let r = eval(&[("word", "word")]).unwrap();
        assert_eq!(r.ted, 0.0);
        assert_eq!(r.crw, 1.0);
        assert_eq!(r.n_samples, 1);
    }

    #[test]
    fn case_fold() {
        let r = eval(&[("Word", "WORD")]).unwrap();
        assert_eq!(r.crw, 0.0);
        assert_eq!(r.crw_upper, 1.0);
        assert_eq!(r.ted, 3.0);
        assert_eq!(r.ted_upper, 0.0);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(eval(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn text_block() {
        let r = eval(&[("a", "a"), ("b", "c"), ("c", "c")]).unwrap();
        assert_eq!(
            r.to_string(),
            "n_samples: 3\nted: 1\ncrw: 66.67\nted_upper: 1\ncrw_upper: 66.67\n"
        );
        let back: EvalReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn folding_only_merges(pairs in proptest::collection::vec((any::<String>(), any::<String>()), 1..12)) {
            let v: Vec<(Label, Label)> = pairs.into_iter().map(|(p, r)| (p.into(), r.into())).collect();
            let r = evaluate(v.iter().map(|(p, r)| (p, r))).unwrap();
            prop_assert!(r.crw_upper >= r.crw);
            prop_assert!(r.ted_upper <= r.ted);
        }

        #[test]
        fn permutation_invariant(pairs in proptest::collection::vec(("[a-cA-C]{0,4}", "[a-cA-C]{0,4}"), 1..10), seed in any::<u64>()) {
            let v: Vec<(Label, Label)> = pairs.into_iter().map(|(p, r)| (p.into(), r.into())).collect();
            let mut shuffled = v.clone();
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let a = evaluate(v.iter().map(|(p, r)| (p, r))).unwrap();
            let b = evaluate(shuffled.iter().map(|(p, r)| (p, r))).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

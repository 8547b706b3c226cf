//! Learning the character-substitution cost matrix and computing the Cost
//! Levenshtein Distance (CLD).
//!
//! Costs come from positional co-occurrence: for every (hypothesis,
//! reference) pair, the characters at the same index are counted as
//! `(reference char, hypothesis char)`. Overhanging characters are ignored.
//! `cost(a, b) = 1 - P(hyp = a | ref = b)`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::Result;
use crate::types::{Label, SubstitutionCostMatrix};

pub const DEFAULT_MIN_COUNT: u64 = 5;
pub const DEFAULT_COST: f64 = 1.0;

/// Co-occurrence counts keyed by `(reference char, hypothesis char)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignedPairCounts {
    counts: BTreeMap<(char, char), u64>,
    totals: BTreeMap<char, u64>,
}

impl AlignedPairCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, reference: char, hypothesis: char) {
        *self.counts.entry((reference, hypothesis)).or_default() += 1;
        *self.totals.entry(reference).or_default() += 1;
    }

    /// Count of `hypothesis` observed where the reference had `reference`.
    pub fn count(&self, reference: char, hypothesis: char) -> u64 {
        self.counts.get(&(reference, hypothesis)).copied().unwrap_or(0)
    }

    pub fn total(&self, reference: char) -> u64 {
        self.totals.get(&reference).copied().unwrap_or(0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((char, char), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn totals(&self) -> impl Iterator<Item = (char, u64)> + '_ {
        self.totals.iter().map(|(&k, &v)| (k, v))
    }

    pub fn merge(&mut self, other: &AlignedPairCounts) {
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for (&k, &v) in &other.totals {
            *self.totals.entry(k).or_default() += v;
        }
    }

    fn alphabet(&self) -> BTreeSet<char> {
        self.counts.keys().flat_map(|&(b, a)| [a, b]).collect()
    }
}

/// Counts same-index character pairs over `(hypothesis, reference)` pairs.
pub fn count_positional_pairs<'a, I>(pairs: I) -> AlignedPairCounts
where
    I: IntoIterator<Item = (&'a Label, &'a Label)>,
{
    let mut counts = AlignedPairCounts::new();
    for (hyp, reference) in pairs {
        for (h, r) in hyp.as_str().chars().zip(reference.as_str().chars()) {
            counts.add(r, h);
        }
    }
    counts
}

/// Turns counts into `cost(a, b) = 1 - counts[(b, a)] / totals[b]`.
///
/// Reference characters seen fewer than `min_count` times are left out of
/// the table and fall back to `default_cost`.
pub fn build_cost_matrix(
    counts: &AlignedPairCounts,
    min_count: u64,
    default_cost: f64,
) -> Result<SubstitutionCostMatrix> {
    let alphabet = counts.alphabet();
    let mut entries = Vec::new();
    for &b in &alphabet {
        let total = counts.total(b);
        if total == 0 || total < min_count {
            continue;
        }
        for &a in &alphabet {
            if a == b {
                continue;
            }
            let p = counts.count(b, a) as f64 / total as f64;
            entries.push(((a, b), (1.0 - p).clamp(0.0, 1.0)));
        }
    }
    SubstitutionCostMatrix::new(alphabet, entries, default_cost)
}

/// Cost Levenshtein distance from `a` to `b`: substituting `a[i]` by `b[j]`
/// costs `costs.cost(a[i], b[j])`, insertions and deletions cost `indel_cost`.
pub fn cld(a: &str, b: &str, costs: &SubstitutionCostMatrix, indel_cost: f64) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    cld_chars(&a, &b, costs, indel_cost)
}

pub fn cld_chars(a: &[char], b: &[char], costs: &SubstitutionCostMatrix, indel_cost: f64) -> f64 {
    let mut prev: Vec<f64> = (0..=b.len()).map(|j| j as f64 * indel_cost).collect();
    let mut cur = vec![0.0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = (i + 1) as f64 * indel_cost;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + costs.cost(ca, cb);
            let del = prev[j + 1] + indel_cost;
            let ins = cur[j] + indel_cost;
            cur[j + 1] = sub.min(del).min(ins);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Full DP table for `cld`; `table[i][j]` is the distance between the
/// first `i` chars of `a` and the first `j` chars of `b`.
pub fn cld_table(a: &str, b: &str, costs: &SubstitutionCostMatrix, indel_cost: f64) -> Vec<Vec<f64>> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut t = vec![vec![0.0; b.len() + 1]; a.len() + 1];
    for (j, cell) in t[0].iter_mut().enumerate() {
        *cell = j as f64 * indel_cost;
    }
    for i in 1..=a.len() {
        t[i][0] = i as f64 * indel_cost;
        for j in 1..=b.len() {
            t[i][j] = (t[i - 1][j - 1] + costs.cost(a[i - 1], b[j - 1]))
                .min(t[i - 1][j] + indel_cost)
                .min(t[i][j - 1] + indel_cost);
        }
    }
    t
}

/// Unit-cost Levenshtein distance over Unicode scalars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(ca != cb)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `cld` over many pairs in parallel; output order matches input order.
pub fn cld_batch(pairs: &[(Label, Label)], costs: &SubstitutionCostMatrix, indel_cost: f64) -> Vec<f64> {
    pairs
        .par_iter()
        .map(|(a, b)| cld(a.as_str(), b.as_str(), costs, indel_cost))
        .collect()
}

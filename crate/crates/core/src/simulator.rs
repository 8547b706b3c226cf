//! Deterministic noisy-channel generator of synthetic snapshot ensembles.
//!
//! Each source character goes through one pass: a deletion check, otherwise
//! a substitution check, then an insertion check after it. Rates are the
//! channel rates scaled by the snapshot's trajectory multiplier.
//!
//! Randomness is derived per `(seed, sample_id, snapshot)` so adding or
//! reordering samples never perturbs existing ones:
//!
//! ```text
//! private stream  = ChaCha8(mix(mix(seed ^ fnv1a(sample_id)) + snapshot))
//! shared draw     = mix chain over (seed, fnv1a(sample_id), position, event kind)
//! ```
//!
//! A corruption decision at a given source position uses the shared draw
//! (identical for every snapshot of the sample) with probability
//! `shared_noise_fraction`, decided by a shared selector, else a private draw.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::AlignedPairCounts;
use crate::error::{Error, Result};
use crate::types::{HypothesisSet, LabeledSample};

/// Per reference character, the distribution of substituted characters.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionTable {
    rows: BTreeMap<char, Vec<(char, f64)>>,
}

impl ConfusionTable {
    /// Rows are normalized; diagonal and non-positive entries are dropped.
    pub fn new(rows: BTreeMap<char, Vec<(char, f64)>>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (c, row) in rows {
            if row.iter().any(|(_, p)| !p.is_finite() || *p < 0.0) {
                return Err(Error::invalid(
                    "confusion table",
                    format!("row {c:?} has a negative or non-finite weight"),
                ));
            }
            let row: Vec<(char, f64)> = row.into_iter().filter(|&(a, p)| a != c && p > 0.0).collect();
            let total: f64 = row.iter().map(|(_, p)| p).sum();
            if total > 0.0 {
                out.insert(c, row.into_iter().map(|(a, p)| (a, p / total)).collect());
            }
        }
        Ok(ConfusionTable { rows: out })
    }

    /// Off-diagonal substitution frequencies from positional counts.
    pub fn from_counts(counts: &AlignedPairCounts) -> Self {
        let mut rows: BTreeMap<char, Vec<(char, f64)>> = BTreeMap::new();
        for ((r, h), n) in counts.pairs() {
            rows.entry(r).or_default().push((h, n as f64));
        }
        ConfusionTable::new(rows).expect("counts are non-negative")
    }

    fn pick(&self, c: char, u: f64) -> Option<char> {
        let row = self.rows.get(&c)?;
        let mut acc = 0.0;
        for &(a, p) in row {
            acc += p;
            if u < acc {
                return Some(a);
            }
        }
        row.last().map(|&(a, _)| a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub sub_rate: f64,
    pub ins_rate: f64,
    pub del_rate: f64,
    pub confusion: Option<ConfusionTable>,
    /// 0 = independent snapshots, 1 = every decision shared.
    pub shared_noise_fraction: f64,
    pub alphabet: Vec<char>,
}

impl ChannelModel {
    pub fn new(sub_rate: f64, ins_rate: f64, del_rate: f64, alphabet: Vec<char>) -> Self {
        ChannelModel {
            sub_rate,
            ins_rate,
            del_rate,
            confusion: None,
            shared_noise_fraction: 0.0,
            alphabet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("substitution rate", self.sub_rate),
            ("insertion rate", self.ins_rate),
            ("deletion rate", self.del_rate),
            ("shared noise fraction", self.shared_noise_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(what, format!("{v} is outside [0, 1]")));
            }
        }
        if self.alphabet.is_empty() && (self.sub_rate > 0.0 || self.ins_rate > 0.0) {
            return Err(Error::invalid(
                "alphabet",
                "must not be empty when substitutions or insertions are enabled",
            ));
        }
        Ok(())
    }
}

/// Sorted distinct characters of the references.
pub fn alphabet_of(gt: &[LabeledSample]) -> Vec<char> {
    let set: std::collections::BTreeSet<char> = gt.iter().flat_map(|s| s.ground_truth.as_str().chars()).collect();
    set.into_iter().collect()
}

/// Per-snapshot multipliers on the channel rates.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryModel {
    multipliers: Vec<f64>,
}

impl TrajectoryModel {
    pub fn new(multipliers: Vec<f64>) -> Result<Self> {
        if let Some(m) = multipliers.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::invalid(
                "trajectory",
                format!("multiplier {m} must be finite and >= 0"),
            ));
        }
        Ok(TrajectoryModel { multipliers })
    }

    pub fn constant(snapshots: usize, multiplier: f64) -> Result<Self> {
        TrajectoryModel::new(vec![multiplier; snapshots])
    }

    /// Evenly spaced from `first` (snapshot 0) to `last` (snapshot L-1).
    pub fn linear(snapshots: usize, first: f64, last: f64) -> Result<Self> {
        let m = match snapshots {
            0 => Vec::new(),
            1 => vec![first],
            n => (0..n)
                .map(|i| first + (last - first) * i as f64 / (n - 1) as f64)
                .collect(),
        };
        TrajectoryModel::new(m)
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

/// Seed of the private stream for one (sample, snapshot).
pub fn stream_seed(seed: u64, sample_id: &str, snapshot: usize) -> u64 {
    mix(mix(seed ^ fnv1a(sample_id)).wrapping_add(snapshot as u64))
}

#[derive(Clone, Copy)]
#[repr(u64)]
enum Event {
    Delete = 1,
    Substitute = 2,
    SubstituteChar = 3,
    Insert = 4,
    InsertChar = 5,
}

struct Draws<'a> {
    seed: u64,
    sample: u64,
    shared_fraction: f64,
    private: &'a mut ChaCha8Rng,
}

impl Draws<'_> {
    fn shared(&self, pos: usize, event: Event, salt: u64) -> f64 {
        let h =
            mix(mix(mix(self.seed ^ self.sample).wrapping_add(pos as u64)).wrapping_add(((event as u64) << 8) | salt));
        unit_f64(h)
    }

    fn uniform(&mut self, pos: usize, event: Event) -> f64 {
        let private: f64 = self.private.random();
        if self.shared(pos, event, 0) < self.shared_fraction {
            self.shared(pos, event, 1)
        } else {
            private
        }
    }
}

fn pick_uniform(alphabet: &[char], exclude: Option<char>, u: f64) -> Option<char> {
    let choices: Vec<char> = alphabet.iter().copied().filter(|&a| Some(a) != exclude).collect();
    if choices.is_empty() {
        return None;
    }
    let i = ((u * choices.len() as f64) as usize).min(choices.len() - 1);
    Some(choices[i])
}

fn corrupt(text: &str, channel: &ChannelModel, multiplier: f64, draws: &mut Draws<'_>) -> String {
    let p_del = (channel.del_rate * multiplier).min(1.0);
    let p_sub = (channel.sub_rate * multiplier).min(1.0);
    let p_ins = (channel.ins_rate * multiplier).min(1.0);
    let mut out = String::with_capacity(text.len() + 4);
    for (pos, c) in text.chars().enumerate() {
        if draws.uniform(pos, Event::Delete) >= p_del {
            if draws.uniform(pos, Event::Substitute) < p_sub {
                let u = draws.uniform(pos, Event::SubstituteChar);
                let replacement = channel
                    .confusion
                    .as_ref()
                    .and_then(|t| t.pick(c, u))
                    .or_else(|| pick_uniform(&channel.alphabet, Some(c), u))
                    .unwrap_or(c);
                out.push(replacement);
            } else {
                out.push(c);
            }
        }
        if draws.uniform(pos, Event::Insert) < p_ins {
            let u = draws.uniform(pos, Event::InsertChar);
            if let Some(ins) = pick_uniform(&channel.alphabet, None, u) {
                out.push(ins);
            }
        }
    }
    out
}

/// Corrupts every reference once per snapshot. Output order follows `gt`.
pub fn generate(
    gt: &[LabeledSample],
    snapshots: usize,
    channel: &ChannelModel,
    traj: &TrajectoryModel,
    seed: u64,
) -> Result<Vec<HypothesisSet>> {
    if snapshots == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if traj.len() != snapshots {
        return Err(Error::invalid(
            "trajectory",
            format!("has {} multipliers for {snapshots} snapshots", traj.len()),
        ));
    }
    channel.validate()?;
    gt.par_iter()
        .map(|s| {
            let id = s.sample_id.as_str();
            let outputs: Vec<String> = traj
                .multipliers()
                .iter()
                .enumerate()
                .map(|(i, &m)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, id, i));
                    let mut draws = Draws {
                        seed,
                        sample: fnv1a(id),
                        shared_fraction: channel.shared_noise_fraction,
                        private: &mut rng,
                    };
                    corrupt(s.ground_truth.as_str(), channel, m, &mut draws)
                })
                .collect();
            HypothesisSet::new(id, outputs)
        })
        .collect()
}

/// Draws `count` references from a word list (without replacement when the
/// list is large enough). Sample ids are `w0000`, `w0001`, ...
pub fn sample_words<S: AsRef<str>>(words: &[S], count: usize, seed: u64) -> Result<Vec<LabeledSample>> {
    if words.is_empty() {
        return Err(Error::invalid("word list", "is empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = if count <= words.len() {
        index::sample(&mut rng, words.len(), count).into_vec()
    } else {
        (0..count).map(|_| rng.random_range(0..words.len())).collect()
    };
    let width = count.saturating_sub(1).to_string().len().max(4);
    Ok(picks
        .into_iter()
        .enumerate()
        .map(|(i, w)| LabeledSample::new(format!("w{i:0width$}"), words[w].as_ref()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::levenshtein;

    fn gt(words: &[&str]) -> Vec<LabeledSample> {
        words
            .iter()
            .enumerate()
            .map(|(i, w)| LabeledSample::new(format!("s{i}"), *w))
            .collect()
    }

    #[test]
    fn noiseless_channel_is_identity() {
        let g = gt(&["alpha", "beta", ""]);
        let ch = ChannelModel::new(0.0, 0.0, 0.0, alphabet_of(&g));
        let out = generate(&g, 4, &ch, &TrajectoryModel::constant(4, 1.0).unwrap(), 1).unwrap();
        for (h, s) in out.iter().zip(&g) {
            assert!(h.outputs().iter().all(|o| o == &s.ground_truth));
        }
    }

    #[test]
    fn full_substitution_changes_every_char() {
        let g = gt(&["aaa"; 20]);
        let ch = ChannelModel::new(1.0, 0.0, 0.0, vec!['a', 'b']);
        let out = generate(&g, 3, &ch, &TrajectoryModel::constant(3, 1.0).unwrap(), 9).unwrap();
        for h in &out {
            for o in h.outputs() {
                assert_eq!(o.as_str(), "bbb");
            }
        }
        // single-letter alphabet forces the source char
        let ch = ChannelModel::new(1.0, 0.0, 0.0, vec!['a']);
        let out = generate(&g, 2, &ch, &TrajectoryModel::constant(2, 1.0).unwrap(), 9).unwrap();
        assert!(out.iter().all(|h| h.outputs().iter().all(|o| o.as_str() == "aaa")));
    }

    #[test]
    fn deterministic_and_stream_stable() {
        let g = gt(&["house", "river", "stone", "light"]);
        let mut ch = ChannelModel::new(0.2, 0.05, 0.05, alphabet_of(&g));
        ch.shared_noise_fraction = 0.3;
        let traj = TrajectoryModel::linear(5, 1.5, 0.5).unwrap();
        let a = generate(&g, 5, &ch, &traj, 42).unwrap();
        let b = generate(&g, 5, &ch, &traj, 42).unwrap();
        assert_eq!(a, b);
        // dropping a sample leaves the others untouched
        let c = generate(&g[1..], 5, &ch, &traj, 42).unwrap();
        assert_eq!(&a[1..], &c[..]);
        let d = generate(&g, 5, &ch, &traj, 43).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn fully_shared_noise_gives_identical_snapshots() {
        let g = gt(&["corridor", "window", "street", "garden", "bridge"]);
        let mut ch = ChannelModel::new(0.3, 0.1, 0.1, alphabet_of(&g));
        ch.shared_noise_fraction = 1.0;
        let out = generate(&g, 6, &ch, &TrajectoryModel::constant(6, 1.0).unwrap(), 5).unwrap();
        for h in &out {
            assert!(h.outputs().windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn confusion_table_drives_substitutions() {
        let mut rows = BTreeMap::new();
        rows.insert('o', vec![('0', 1.0)]);
        let mut ch = ChannelModel::new(1.0, 0.0, 0.0, vec!['x']);
        ch.confusion = Some(ConfusionTable::new(rows).unwrap());
        let g = gt(&["oo"]);
        let out = generate(&g, 2, &ch, &TrajectoryModel::constant(2, 1.0).unwrap(), 0).unwrap();
        assert!(out[0].outputs().iter().all(|o| o.as_str() == "00"));
    }

    #[test]
    fn error_rate_near_nominal() {
        let words: Vec<String> = (0..500).map(|i| format!("word{:03}x", i)).collect();
        let g = sample_words(&words, 500, 7).unwrap();
        let ch = ChannelModel::new(0.1, 0.0, 0.0, "abcdefghijklmnopqrstuvwxyz0123456789".chars().collect());
        let out = generate(&g, 15, &ch, &TrajectoryModel::constant(15, 1.0).unwrap(), 2024).unwrap();
        let chars: usize = g.iter().map(|s| s.ground_truth.as_str().chars().count()).sum();
        for snap in 0..15 {
            let errs: usize = out
                .iter()
                .zip(&g)
                .map(|(h, s)| levenshtein(h.outputs()[snap].as_str(), s.ground_truth.as_str()))
                .sum();
            let cer = errs as f64 / chars as f64;
            assert!((cer - 0.1).abs() <= 0.03, "snapshot {snap}: {cer}");
        }
    }

    #[test]
    fn decreasing_multipliers_reduce_errors() {
        let words: Vec<String> = (0..600).map(|i| format!("token{i}")).collect();
        let g = sample_words(&words, 600, 3).unwrap();
        let ch = ChannelModel::new(0.15, 0.03, 0.03, alphabet_of(&g));
        let traj = TrajectoryModel::linear(6, 2.0, 0.25).unwrap();
        let out = generate(&g, 6, &ch, &traj, 11).unwrap();
        let ted: Vec<usize> = (0..6)
            .map(|snap| {
                out.iter()
                    .zip(&g)
                    .map(|(h, s)| levenshtein(h.outputs()[snap].as_str(), s.ground_truth.as_str()))
                    .sum()
            })
            .collect();
        for w in ted.windows(2) {
            // allow 5% sampling noise between neighbours
            assert!(w[1] as f64 <= w[0] as f64 * 1.05, "{ted:?}");
        }
        assert!(ted[5] * 3 < ted[0], "{ted:?}");
    }

    #[test]
    fn sample_words_ids_and_reuse() {
        let words = ["a", "b", "c"];
        let s = sample_words(&words, 3, 1).unwrap();
        let mut got: Vec<&str> = s.iter().map(|x| x.ground_truth.as_str()).collect();
        got.sort();
        assert_eq!(got, ["a", "b", "c"]);
        assert_eq!(s[0].sample_id, "w0000");
        assert_eq!(sample_words(&words, 10, 1).unwrap().len(), 10);
        assert!(sample_words::<&str>(&[], 1, 1).is_err());
    }

    #[test]
    fn trajectory_validation() {
        assert!(TrajectoryModel::new(vec![1.0, -0.5]).is_err());
        assert_eq!(
            TrajectoryModel::linear(3, 1.0, 0.0).unwrap().multipliers(),
            &[1.0, 0.5, 0.0]
        );
        let g = gt(&["x"]);
        let ch = ChannelModel::new(0.0, 0.0, 0.0, vec![]);
        assert!(generate(&g, 2, &ch, &TrajectoryModel::constant(3, 1.0).unwrap(), 0).is_err());
    }
}

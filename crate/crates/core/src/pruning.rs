//! Genetic-algorithm search for the subset of snapshots that maximizes the
//! validation recognition rate of the fused output.
//!
//! Chromosomes are pruning masks. Operators: tournament selection,
//! single-point crossover, per-bit flip mutation and elitism. Chromosomes
//! that end up all-zero are repaired by switching on one random bit.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{FusionContext, PreparedValidation};
use crate::types::{HypothesisSet, LabeledSample, PruningMask};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means `1 / L`.
    pub mutation_rate_per_bit: Option<f64>,
    pub tournament_size: usize,
    pub elite_count: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 32,
            generations: 50,
            crossover_rate: 0.9,
            mutation_rate_per_bit: None,
            tournament_size: 3,
            elite_count: 2,
            seed: 0x5eed,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("GA population size", "must be >= 2"));
        }
        if self.generations < 1 {
            return Err(Error::invalid("GA generations", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::invalid(
                "GA crossover rate",
                format!("{} is outside [0, 1]", self.crossover_rate),
            ));
        }
        if let Some(m) = self.mutation_rate_per_bit {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::invalid("GA mutation rate", format!("{m} is outside [0, 1]")));
            }
        }
        if self.tournament_size < 1 {
            return Err(Error::invalid("GA tournament size", "must be >= 1"));
        }
        if self.elite_count < 1 || self.elite_count >= self.population_size {
            return Err(Error::invalid(
                "GA elite count",
                format!("{} must be in 1..{}", self.elite_count, self.population_size),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_mask: PruningMask,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaTrace {
    pub generations: Vec<GenerationRecord>,
}

impl GaTrace {
    /// `generation,best_fitness,mean_fitness,best_mask` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best_fitness,mean_fitness,best_mask\n");
        for g in &self.generations {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                g.generation, g.best_fitness, g.mean_fitness, g.best_mask
            );
        }
        out
    }

    pub fn best_fitness(&self) -> impl Iterator<Item = f64> + '_ {
        self.generations.iter().map(|g| g.best_fitness)
    }
}

/// Validation recognition rate of the ensemble restricted to `mask`.
pub fn fitness(mask: &PruningMask, val: &[(HypothesisSet, LabeledSample)], ctx: FusionContext<'_>) -> Result<f64> {
    crate::fusion::recognition_rate(val, mask, ctx)
}

/// Memoized mask fitness over a prepared validation set.
pub struct FitnessCache<'a> {
    prepared: &'a PreparedValidation,
    cache: HashMap<Vec<bool>, f64>,
}

impl<'a> FitnessCache<'a> {
    pub fn new(prepared: &'a PreparedValidation) -> Self {
        FitnessCache {
            prepared,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, mask: &PruningMask) -> f64 {
        if let Some(&f) = self.cache.get(mask.bits()) {
            return f;
        }
        let f = self.prepared.accuracy(mask);
        self.cache.insert(mask.bits().to_vec(), f);
        f
    }

    /// Fitness of every mask, evaluating the uncached ones in parallel.
    pub fn get_all(&mut self, masks: &[PruningMask]) -> Vec<f64> {
        let mut missing: Vec<&PruningMask> = masks.iter().filter(|m| !self.cache.contains_key(m.bits())).collect();
        missing.sort();
        missing.dedup();
        let prepared = self.prepared;
        let computed: Vec<f64> = missing.par_iter().map(|m| prepared.accuracy(m)).collect();
        for (m, f) in missing.into_iter().zip(computed) {
            self.cache.insert(m.bits().to_vec(), f);
        }
        masks.iter().map(|m| self.cache[m.bits()]).collect()
    }

    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

/// Higher fitness first; among equal fitness, larger ensembles, then the
/// lexicographically larger bit pattern.
fn rank(a: (&PruningMask, f64), b: (&PruningMask, f64)) -> Ordering {
    a.1.partial_cmp(&b.1)
        .unwrap_or(Ordering::Equal)
        .then(a.0.count_ones().cmp(&b.0.count_ones()))
        .then(a.0.bits().cmp(b.0.bits()))
}

fn repair(bits: &mut [bool], rng: &mut impl Rng) {
    if !bits.contains(&true) {
        let i = rng.random_range(0..bits.len());
        bits[i] = true;
    }
}

fn random_mask(len: usize, rng: &mut impl Rng) -> PruningMask {
    let mut bits: Vec<bool> = (0..len).map(|_| rng.random_bool(0.5)).collect();
    repair(&mut bits, rng);
    PruningMask::new(bits).expect("repaired")
}

fn tournament<'p>(pop: &'p [PruningMask], fit: &[f64], size: usize, rng: &mut impl Rng) -> &'p PruningMask {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size {
        let i = rng.random_range(0..pop.len());
        if rank((&pop[i], fit[i]), (&pop[best], fit[best])) == Ordering::Greater {
            best = i;
        }
    }
    &pop[best]
}

/// Evolves pruning masks for an ensemble of `snapshots` members and returns
/// the best mask seen together with the per-generation trace.
///
/// Deterministic for a given `params.seed`.
pub fn ga_prune(
    snapshots: usize,
    val: &[(HypothesisSet, LabeledSample)],
    ctx: FusionContext<'_>,
    params: &GaParams,
) -> Result<(PruningMask, GaTrace)> {
    if snapshots == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if val.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((h, _)) = val.iter().find(|(h, _)| h.len() != snapshots) {
        return Err(Error::MaskLengthMismatch {
            mask: snapshots,
            ensemble: h.len(),
        });
    }
    params.validate()?;
    ctx.config.validate()?;
    let prepared = PreparedValidation::new(val, ctx);
    Ok(ga_prune_prepared(snapshots, &prepared, params))
}

/// `ga_prune` on an already prepared validation set.
pub fn ga_prune_prepared(snapshots: usize, prepared: &PreparedValidation, params: &GaParams) -> (PruningMask, GaTrace) {
    let mut cache = FitnessCache::new(prepared);
    let mut trace = GaTrace::default();

    if snapshots == 1 {
        let mask = PruningMask::all(1).expect("one bit");
        let f = cache.get(&mask);
        trace.generations.push(GenerationRecord {
            generation: 0,
            best_fitness: f,
            mean_fitness: f,
            best_mask: mask.clone(),
        });
        return (mask, trace);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mutation = params.mutation_rate_per_bit.unwrap_or(1.0 / snapshots as f64);

    let mut population: Vec<PruningMask> = (0..params.population_size)
        .map(|_| random_mask(snapshots, &mut rng))
        .collect();
    let mut fit = cache.get_all(&population);
    let mut best_ever: Option<(PruningMask, f64)> = None;

    for generation in 0..=params.generations {
        if generation > 0 {
            let mut order: Vec<usize> = (0..population.len()).collect();
            order.sort_by(|&a, &b| rank((&population[b], fit[b]), (&population[a], fit[a])));
            let mut next: Vec<PruningMask> = order[..params.elite_count]
                .iter()
                .map(|&i| population[i].clone())
                .collect();
            while next.len() < params.population_size {
                let a = tournament(&population, &fit, params.tournament_size, &mut rng)
                    .bits()
                    .to_vec();
                let b = tournament(&population, &fit, params.tournament_size, &mut rng)
                    .bits()
                    .to_vec();
                let (mut c1, mut c2) = if rng.random_bool(params.crossover_rate) {
                    let cut = rng.random_range(1..snapshots);
                    let c1 = a[..cut].iter().chain(&b[cut..]).copied().collect::<Vec<_>>();
                    let c2 = b[..cut].iter().chain(&a[cut..]).copied().collect::<Vec<_>>();
                    (c1, c2)
                } else {
                    (a, b)
                };
                for child in [&mut c1, &mut c2] {
                    for bit in child.iter_mut() {
                        if rng.random_bool(mutation) {
                            *bit = !*bit;
                        }
                    }
                    repair(child, &mut rng);
                }
                next.push(PruningMask::new(c1).expect("repaired"));
                if next.len() < params.population_size {
                    next.push(PruningMask::new(c2).expect("repaired"));
                }
            }
            population = next;
            fit = cache.get_all(&population);
        }

        let (bi, _) = population
            .iter()
            .zip(&fit)
            .enumerate()
            .max_by(|(_, a), (_, b)| rank((a.0, *a.1), (b.0, *b.1)))
            .expect("non-empty population");
        let gen_best = (population[bi].clone(), fit[bi]);
        let improved = match &best_ever {
            None => true,
            Some((m, f)) => rank((&gen_best.0, gen_best.1), (m, *f)) == Ordering::Greater,
        };
        if improved {
            best_ever = Some(gen_best.clone());
        }
        trace.generations.push(GenerationRecord {
            generation,
            best_fitness: gen_best.1,
            mean_fitness: fit.iter().sum::<f64>() / fit.len() as f64,
            best_mask: gen_best.0,
        });
    }

    let (mask, _) = best_ever.expect("at least one generation");
    (mask, trace)
}

/// Scores every non-empty mask. Only sensible for small ensembles.
pub fn exhaustive_prune(snapshots: usize, prepared: &PreparedValidation) -> Result<(PruningMask, f64)> {
    if snapshots == 0 || snapshots > 20 {
        return Err(Error::invalid(
            "exhaustive search",
            format!("{snapshots} snapshots (supported: 1..=20)"),
        ));
    }
    let masks: Vec<PruningMask> = (1u32..(1 << snapshots))
        .map(|m| PruningMask::new((0..snapshots).map(|i| m & (1 << i) != 0).collect()).expect("non-zero"))
        .collect();
    let fits: Vec<f64> = masks.par_iter().map(|m| prepared.accuracy(m)).collect();
    let (i, f) = fits
        .iter()
        .enumerate()
        .max_by(|a, b| rank((&masks[a.0], *a.1), (&masks[b.0], *b.1)))
        .expect("non-empty");
    Ok((masks[i].clone(), *f))
}

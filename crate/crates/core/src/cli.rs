//! Command-line interface.
//!
//! Exit status: 0 success, 1 usage error (bad flags or parameter values),
//! 2 data error (unreadable or inconsistent input files), 3 internal error.
//!
//! Settings resolve as: command-line flag, then `--config` file, then the
//! built-in default.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::cost::{build_cost_matrix, count_positional_pairs, AlignedPairCounts};
use crate::error::{Error, Result};
use crate::fusion::{combine_all, fit_f_curve, FitOptions, FusionContext};
use crate::io::{self, Prediction, RunConfig, SnapshotSelection};
use crate::metrics::evaluate;
use crate::pruning::ga_prune;
use crate::simulator::{self, ChannelModel, TrajectoryModel};
use crate::types::{
    CandidateSource, CaseMode, Dictionary, DistanceKind, FCurve, HypothesisSet, LabeledSample, PruningMask,
    SubstitutionCostMatrix,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(
    name = "adafuse",
    version,
    about = "Fuse the outputs of recognizer snapshots by weighted voting"
)]
pub struct Cli {
    /// Maximum number of worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// JSON run configuration; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate noisy snapshot hypotheses from reference words
    Simulate(SimulateArgs),
    /// Learn a substitution cost matrix from hypotheses and references
    LearnCosts(LearnCostsArgs),
    /// Fit the dictionary weight curve on a validation set
    FitF(FitArgs),
    /// Fuse hypotheses into one label per sample
    Fuse(FuseArgs),
    /// Search for the best snapshot subset with a genetic algorithm
    Prune(PruneArgs),
    /// Score predictions against references
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Reference TSV (id, text) to corrupt
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "sample_from",
        required_unless_present = "sample_from"
    )]
    pub gt: Option<PathBuf>,
    /// Word list to draw references from instead of --gt
    #[arg(long, value_name = "PATH", requires = "count")]
    pub sample_from: Option<PathBuf>,
    /// Number of words to draw with --sample-from
    #[arg(long, value_name = "N")]
    pub count: Option<usize>,
    /// Where to write the drawn references (TSV)
    #[arg(long, value_name = "PATH", requires = "sample_from")]
    pub gt_out: Option<PathBuf>,
    /// Number of snapshots per sample
    #[arg(long, value_name = "L", default_value_t = 10)]
    pub snapshots: usize,
    /// Per-character substitution probability
    #[arg(long, value_name = "P", default_value_t = 0.1)]
    pub sub_rate: f64,
    /// Per-character insertion probability
    #[arg(long, value_name = "P", default_value_t = 0.02)]
    pub ins_rate: f64,
    /// Per-character deletion probability
    #[arg(long, value_name = "P", default_value_t = 0.02)]
    pub del_rate: f64,
    /// Fraction of noise decisions shared by all snapshots of a sample
    #[arg(long, value_name = "P", default_value_t = 0.0)]
    pub shared_noise: f64,
    /// Noise multiplier of the first snapshot
    #[arg(long, value_name = "X", default_value_t = 1.0)]
    pub noise_first: f64,
    /// Noise multiplier of the last snapshot (linear in between)
    #[arg(long, value_name = "X", default_value_t = 1.0)]
    pub noise_last: f64,
    /// Characters used for substitutions and insertions (default: those in the references)
    #[arg(long, value_name = "CHARS")]
    pub alphabet: Option<String>,
    /// Random seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output hypotheses JSONL (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LearnCostsArgs {
    /// Hypotheses JSONL
    #[arg(long, value_name = "PATH")]
    pub hyps: Option<PathBuf>,
    /// Reference TSV (id, text)
    #[arg(long, value_name = "PATH")]
    pub gt: Option<PathBuf>,
    /// Snapshot to learn from: "all" or a 0-based index
    #[arg(long, value_name = "all|N")]
    pub snapshot: Option<SnapshotSelection>,
    /// Minimum reference-character count for a learned row
    #[arg(long, value_name = "N")]
    pub min_count: Option<u64>,
    /// Cost used for characters without a learned row
    #[arg(long, value_name = "C")]
    pub default_cost: Option<f64>,
    /// Output cost matrix TSV (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CaseArg {
    Exact,
    FoldUpper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DistanceArg {
    Cost,
    Unit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SourceArg {
    Hypotheses,
    HypothesesAndDictionary,
}

/// Inputs and parameters of the combination rule.
#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Hypotheses JSONL
    #[arg(long, value_name = "PATH")]
    pub hyps: Option<PathBuf>,
    /// Dictionary, one word per line (default: empty)
    #[arg(long, value_name = "PATH")]
    pub dict: Option<PathBuf>,
    /// Cost matrix TSV (default: unit costs)
    #[arg(long, value_name = "PATH")]
    pub costs: Option<PathBuf>,
    /// Snapshot mask bitstring file (default: all snapshots)
    #[arg(long, value_name = "PATH")]
    pub mask: Option<PathBuf>,
    /// Vote weight scale
    #[arg(long, value_name = "X")]
    pub lambda: Option<f64>,
    /// Per-snapshot likelihood constant
    #[arg(long, value_name = "X")]
    pub likelihood_const: Option<f64>,
    /// Candidate distance bound ("inf" for none)
    #[arg(long, value_name = "X")]
    pub theta: Option<f64>,
    /// Case handling for dictionary lookups and accuracy
    #[arg(long, value_enum)]
    pub case_mode: Option<CaseArg>,
    /// Maximum number of candidates per sample
    #[arg(long, value_name = "N")]
    pub max_candidates: Option<usize>,
    /// Insertion and deletion cost
    #[arg(long, value_name = "C")]
    pub indel_cost: Option<f64>,
    /// Distance used for the candidate bound
    #[arg(long, value_enum)]
    pub distance: Option<DistanceArg>,
    /// Candidate pool
    #[arg(long, value_enum)]
    pub candidates: Option<SourceArg>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Reference TSV (id, text)
    #[arg(long, value_name = "PATH")]
    pub gt: Option<PathBuf>,
    /// Knot positions, comma separated
    #[arg(long, value_name = "D,..", value_delimiter = ',', allow_hyphen_values = true)]
    pub knots: Option<Vec<i64>>,
    /// Candidate knot values, comma separated
    #[arg(long, value_name = "V,..", value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
    /// Maximum number of coordinate sweeps
    #[arg(long, value_name = "N")]
    pub max_sweeps: Option<usize>,
    /// Output F-curve JSON (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// F-curve JSON (default: zero curve)
    #[arg(long, value_name = "PATH")]
    pub f_curve: Option<PathBuf>,
    /// Output predictions TSV (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Reference TSV (id, text)
    #[arg(long, value_name = "PATH")]
    pub gt: Option<PathBuf>,
    /// F-curve JSON (default: zero curve)
    #[arg(long, value_name = "PATH")]
    pub f_curve: Option<PathBuf>,
    /// Population size
    #[arg(long, value_name = "N")]
    pub population: Option<usize>,
    /// Number of generations
    #[arg(long, value_name = "N")]
    pub generations: Option<usize>,
    /// Crossover probability
    #[arg(long, value_name = "P")]
    pub crossover: Option<f64>,
    /// Per-bit mutation probability (default: 1/L)
    #[arg(long, value_name = "P")]
    pub mutation: Option<f64>,
    /// Tournament size
    #[arg(long, value_name = "N")]
    pub tournament: Option<usize>,
    /// Number of elites carried over each generation
    #[arg(long, value_name = "N")]
    pub elite: Option<usize>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output mask file (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Per-generation trace CSV
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions TSV (id, label, score)
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,
    /// Reference TSV (id, text)
    #[arg(long, value_name = "PATH")]
    pub gt: Option<PathBuf>,
    /// Also write the report as JSON
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    let pool = match cli.threads {
        Some(0) => {
            let _ = writeln!(stderr, "error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_INTERNAL;
        }
    };

    // Commands write into buffers so the work can run inside the pool.
    let mut out_buf: Vec<u8> = Vec::new();
    let mut err_buf: Vec<u8> = Vec::new();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        pool.install(|| dispatch(&cli, &mut out_buf, &mut err_buf))
    }));
    let _ = stdout.write_all(&out_buf);
    let _ = stderr.write_all(&err_buf);
    match outcome {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(_) => {
            let _ = writeln!(stderr, "error: internal failure");
            EXIT_INTERNAL
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => io::read_run_config(p)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Simulate(a) => simulate(a, stdout, stderr),
        Command::LearnCosts(a) => learn_costs(a, &cfg, stdout, stderr),
        Command::FitF(a) => fit_f(a, cfg, stdout, stderr),
        Command::Fuse(a) => fuse(a, cfg, stdout, stderr),
        Command::Prune(a) => prune(a, cfg, stdout, stderr),
        Command::Eval(a) => eval(a, &cfg, stdout),
    }
}

fn require(flag: &Option<PathBuf>, config: &Option<PathBuf>, name: &'static str) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| config.clone())
        .ok_or_else(|| Error::invalid("arguments", format!("--{name} is required (or set it in the config)")))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn simulate(a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let gt = match (&a.gt, &a.sample_from) {
        (Some(p), _) => io::read_ground_truth(p)?,
        (None, Some(p)) => {
            let words = io::read_dictionary(p, CaseMode::Exact)?;
            let words: Vec<&str> = words.words().collect();
            simulator::sample_words(&words, a.count.unwrap_or(0), a.seed)?
        }
        (None, None) => unreachable!("clap requires one of --gt/--sample-from"),
    };
    if let Some(p) = &a.gt_out {
        io::write_ground_truth(p, &gt)?;
    }
    let alphabet = match &a.alphabet {
        Some(s) => {
            let set: std::collections::BTreeSet<char> = s.chars().collect();
            set.into_iter().collect()
        }
        None => simulator::alphabet_of(&gt),
    };
    let mut channel = ChannelModel::new(a.sub_rate, a.ins_rate, a.del_rate, alphabet);
    channel.shared_noise_fraction = a.shared_noise;
    let traj = TrajectoryModel::linear(a.snapshots, a.noise_first, a.noise_last)?;
    let hsets = simulator::generate(&gt, a.snapshots, &channel, &traj, a.seed)?;
    let _ = writeln!(stderr, "simulated {} samples x {} snapshots", hsets.len(), a.snapshots);
    emit(&a.out, &io::format_hypotheses(&hsets), stdout)
}

fn load_joined(hyps: &Path, gt: &Path) -> Result<Vec<(HypothesisSet, LabeledSample)>> {
    let h = io::read_hypotheses(hyps)?;
    let g = io::read_ground_truth(gt)?;
    io::join_by_id(&h, &g)
}

fn learn_costs(a: &LearnCostsArgs, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let hyps = require(&a.hyps, &cfg.paths.hypotheses, "hyps")?;
    let gt = require(&a.gt, &cfg.paths.ground_truth, "gt")?;
    let joined = load_joined(&hyps, &gt)?;
    let selection = a.snapshot.unwrap_or(cfg.cost_learning.snapshot);
    let snapshots = joined[0].0.len();
    let counts: AlignedPairCounts = match selection {
        SnapshotSelection::All => count_positional_pairs(
            joined
                .iter()
                .flat_map(|(h, s)| h.outputs().iter().map(move |o| (o, &s.ground_truth))),
        ),
        SnapshotSelection::Index(i) if i < snapshots => {
            count_positional_pairs(joined.iter().map(|(h, s)| (&h.outputs()[i], &s.ground_truth)))
        }
        SnapshotSelection::Index(i) => {
            return Err(Error::Data(format!(
                "snapshot {i} out of range (ensemble has {snapshots})"
            )));
        }
    };
    let min_count = a.min_count.unwrap_or(cfg.cost_learning.min_count);
    let default_cost = a.default_cost.unwrap_or(cfg.cost_learning.default_cost);
    let matrix = build_cost_matrix(&counts, min_count, default_cost)?;
    let _ = writeln!(
        stderr,
        "learned costs from {} samples, alphabet of {} characters",
        joined.len(),
        matrix.alphabet().len()
    );
    emit(&a.out, &io::format_cost_matrix(&matrix), stdout)
}

/// The loaded inputs shared by fit-f, fuse and prune.
struct Inputs {
    cfg: RunConfig,
    hsets: Vec<HypothesisSet>,
    dict: Dictionary,
    costs: SubstitutionCostMatrix,
    mask: PruningMask,
}

fn apply_overrides(a: &EnsembleArgs, cfg: &mut RunConfig) {
    if let Some(v) = a.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = a.likelihood_const {
        cfg.likelihood_const = v;
    }
    if let Some(v) = a.theta {
        cfg.theta = v;
    }
    if let Some(v) = a.case_mode {
        cfg.case_mode = match v {
            CaseArg::Exact => CaseMode::Exact,
            CaseArg::FoldUpper => CaseMode::FoldUpper,
        };
    }
    if let Some(v) = a.max_candidates {
        cfg.max_candidates = v;
    }
    if let Some(v) = a.indel_cost {
        cfg.indel_cost = v;
    }
    if let Some(v) = a.distance {
        cfg.distance = match v {
            DistanceArg::Cost => DistanceKind::Cost,
            DistanceArg::Unit => DistanceKind::Unit,
        };
    }
    if let Some(v) = a.candidates {
        cfg.candidate_source = match v {
            SourceArg::Hypotheses => CandidateSource::Hypotheses,
            SourceArg::HypothesesAndDictionary => CandidateSource::HypothesesAndDictionary,
        };
    }
}

fn load_inputs(a: &EnsembleArgs, mut cfg: RunConfig) -> Result<Inputs> {
    apply_overrides(a, &mut cfg);
    let hyps = require(&a.hyps, &cfg.paths.hypotheses, "hyps")?;
    let hsets = io::read_hypotheses(&hyps)?;
    let snapshots = hsets
        .first()
        .map(HypothesisSet::len)
        .ok_or_else(|| Error::Data(format!("{}: no samples", hyps.display())))?;
    let dict = match a.dict.as_ref().or(cfg.paths.dictionary.as_ref()) {
        Some(p) => io::read_dictionary(p, cfg.case_mode)?,
        None => Dictionary::new(std::iter::empty::<String>(), cfg.case_mode),
    };
    let costs = match a.costs.as_ref().or(cfg.paths.costs.as_ref()) {
        Some(p) => io::read_cost_matrix(p)?,
        None => SubstitutionCostMatrix::unit(),
    };
    let mask = match a.mask.as_ref().or(cfg.paths.mask.as_ref()) {
        Some(p) => io::read_mask(p)?,
        None => PruningMask::all(snapshots)?,
    };
    if mask.len() != snapshots {
        return Err(Error::MaskLengthMismatch {
            mask: mask.len(),
            ensemble: snapshots,
        });
    }
    Ok(Inputs {
        cfg,
        hsets,
        dict,
        costs,
        mask,
    })
}

fn load_curve(flag: &Option<PathBuf>, cfg: &RunConfig) -> Result<FCurve> {
    match flag.as_ref().or(cfg.paths.f_curve.as_ref()) {
        Some(p) => io::read_f_curve(p),
        None => FCurve::zeros(&cfg.fit.knots),
    }
}

fn fit_f(a: &FitArgs, cfg: RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let inp = load_inputs(&a.ensemble, cfg)?;
    let gt = io::read_ground_truth(require(&a.gt, &inp.cfg.paths.ground_truth, "gt")?)?;
    let val = io::join_by_id(&inp.hsets, &gt)?;
    let knots = a.knots.clone().unwrap_or_else(|| inp.cfg.fit.knots.clone());
    let grid = a.grid.clone().unwrap_or_else(|| inp.cfg.fit.grid.clone());
    let options = FitOptions {
        max_sweeps: a.max_sweeps.unwrap_or(inp.cfg.fit.max_sweeps),
    };
    let config = inp.cfg.ensemble(FCurve::zeros(&knots)?)?;
    let ctx = FusionContext::new(&inp.dict, &inp.costs, &config);
    let outcome = fit_f_curve(&knots, &grid, &val, &inp.mask, ctx, options)?;
    let _ = writeln!(stderr, "initial objective: {:.6}", outcome.initial_objective);
    for (i, obj) in outcome.sweep_objectives.iter().enumerate() {
        let _ = writeln!(stderr, "sweep {}: objective {obj:.6}", i + 1);
    }
    emit(&a.out, &io::format_f_curve(&outcome.curve), stdout)
}

fn fuse(a: &FuseArgs, cfg: RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let inp = load_inputs(&a.ensemble, cfg)?;
    let config = inp.cfg.ensemble(load_curve(&a.f_curve, &inp.cfg)?)?;
    let ctx = FusionContext::new(&inp.dict, &inp.costs, &config);
    let fused = combine_all(&inp.hsets, &inp.mask, ctx)?;
    let preds: Vec<Prediction> = inp
        .hsets
        .iter()
        .zip(fused)
        .map(|(h, s)| Prediction::new(h.sample_id(), s))
        .collect();
    let _ = writeln!(stderr, "fused {} samples with mask {}", preds.len(), inp.mask);
    emit(&a.out, &io::format_predictions(&preds), stdout)
}

fn prune(a: &PruneArgs, cfg: RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let inp = load_inputs(&a.ensemble, cfg)?;
    let gt = io::read_ground_truth(require(&a.gt, &inp.cfg.paths.ground_truth, "gt")?)?;
    let val = io::join_by_id(&inp.hsets, &gt)?;
    let mut ga = inp.cfg.ga.clone();
    if let Some(v) = a.population {
        ga.population_size = v;
    }
    if let Some(v) = a.generations {
        ga.generations = v;
    }
    if let Some(v) = a.crossover {
        ga.crossover_rate = v;
    }
    if a.mutation.is_some() {
        ga.mutation_rate_per_bit = a.mutation;
    }
    if let Some(v) = a.tournament {
        ga.tournament_size = v;
    }
    if let Some(v) = a.elite {
        ga.elite_count = v;
    }
    if let Some(v) = a.seed {
        ga.seed = v;
    }
    let config = inp.cfg.ensemble(load_curve(&a.f_curve, &inp.cfg)?)?;
    let ctx = FusionContext::new(&inp.dict, &inp.costs, &config);
    let (mask, trace) = ga_prune(inp.mask.len(), &val, ctx, &ga)?;
    let best = trace.best_fitness().last().unwrap_or(0.0);
    let _ = writeln!(
        stderr,
        "best mask {mask} ({} of {} snapshots), fitness {best:.6}",
        mask.count_ones(),
        mask.len()
    );
    if let Some(p) = &a.trace {
        emit(&Some(p.clone()), &trace.to_csv(), stdout)?;
    }
    emit(&a.out, &format!("{mask}\n"), stdout)
}

fn eval(a: &EvalArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let preds = io::read_predictions(&a.pred)?;
    let gt = io::read_ground_truth(require(&a.gt, &cfg.paths.ground_truth, "gt")?)?;
    let refs: std::collections::HashMap<&str, &LabeledSample> = gt.iter().map(|s| (s.sample_id.as_str(), s)).collect();
    let pairs: Vec<_> = preds
        .iter()
        .filter_map(|p| refs.get(p.sample_id.as_str()).map(|s| (&p.label, &s.ground_truth)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::Data(
            "no sample ids in common between predictions and ground truth".into(),
        ));
    }
    let report = evaluate(pairs)?;
    if let Some(p) = &a.json {
        emit(&Some(p.clone()), &(report.to_json() + "\n"), stdout)?;
    }
    emit(&None, &report.to_string(), stdout)
}

/// Help text of every subcommand, for documentation checks.
pub fn help_texts() -> Vec<(String, String)> {
    let mut cmd = Cli::command();
    cmd.build();
    let mut out = vec![("adafuse".to_owned(), cmd.render_long_help().to_string())];
    for sub in cmd.get_subcommands_mut() {
        out.push((sub.get_name().to_owned(), sub.render_long_help().to_string()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("adafuse").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn every_flag_has_help() {
        let mut cmd = Cli::command();
        cmd.build();
        let mut subs: Vec<&clap::Command> = cmd.get_subcommands().collect();
        subs.push(&cmd);
        for sub in subs {
            assert!(sub.get_about().is_some() || sub.get_name() == "adafuse");
            for arg in sub.get_arguments() {
                let id = arg.get_id().as_str();
                if id == "help" || id == "version" {
                    continue;
                }
                assert!(arg.get_help().is_some(), "{} --{id} has no help", sub.get_name());
            }
        }
        for (name, text) in help_texts() {
            let sub = cmd.find_subcommand(&name).unwrap_or(&cmd);
            for arg in sub.get_arguments() {
                if let Some(long) = arg.get_long() {
                    assert!(text.contains(&format!("--{long}")), "{name} help misses --{long}");
                }
            }
        }
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = run_args(&["fuse", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("Usage"));
        let (code, _, _) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("learn-costs"));
        let (code, _, err) = run_args(&["fuse"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--hyps"));
        let (code, _, _) = run_args(&["--threads", "0", "eval", "--pred", "x"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn missing_file_is_data_error() {
        let (code, _, err) = run_args(&["eval", "--pred", "/nonexistent/p.tsv", "--gt", "/nonexistent/g.tsv"]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("/nonexistent/p.tsv"));
    }
}

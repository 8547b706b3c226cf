// Prune a simulated ensemble where half of the snapshots are badly trained,
// and compare the GA result with an exhaustive scan.
//
//     cargo run --release --example prune_ensemble

use adafuse::fusion::PreparedValidation;
use adafuse::simulator::{alphabet_of, generate, sample_words, ChannelModel, TrajectoryModel};
use adafuse::{
    exhaustive_prune, ga_prune, CaseMode, Dictionary, EnsembleConfig, FCurve, FusionContext, GaParams,
    SubstitutionCostMatrix,
};

const WORDS: &str = include_str!("../fixtures/words.txt");

fn main() -> adafuse::Result<()> {
    let words: Vec<&str> = WORDS.lines().collect();
    let gt = sample_words(&words, 300, 7)?;
    let channel = ChannelModel::new(0.08, 0.01, 0.01, alphabet_of(&gt));
    let traj = TrajectoryModel::new(vec![5.0, 5.0, 4.0, 4.0, 1.0, 1.0, 0.8, 0.8])?;
    let hsets = generate(&gt, 8, &channel, &traj, 11)?;
    let val: Vec<_> = hsets.into_iter().zip(gt).collect();

    let dict = Dictionary::new(words.iter().copied(), CaseMode::Exact);
    let costs = SubstitutionCostMatrix::unit();
    let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1])?);
    let ctx = FusionContext::new(&dict, &costs, &cfg);

    let (mask, trace) = ga_prune(8, &val, ctx, &GaParams::default())?;
    let prepared = PreparedValidation::new(&val, ctx);
    let (best, best_fit) = exhaustive_prune(8, &prepared)?;
    let full = prepared.accuracy(&adafuse::PruningMask::all(8)?);

    println!("full ensemble     {full:.4}");
    println!("GA       {mask}  {:.4}", prepared.accuracy(&mask));
    println!("optimum  {best}  {best_fit:.4}");
    print!("{}", trace.to_csv().lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}

// Simulate independent snapshots, then score each snapshot and the fused
// output.
//
//     cargo run --release --example simulate_and_evaluate

use adafuse::simulator::{alphabet_of, generate, sample_words, ChannelModel, TrajectoryModel};
use adafuse::{
    combine_all, evaluate, CaseMode, Dictionary, EnsembleConfig, FCurve, FusionContext, PruningMask,
    SubstitutionCostMatrix,
};

const WORDS: &str = include_str!("../fixtures/words.txt");

fn main() -> adafuse::Result<()> {
    let words: Vec<&str> = WORDS.lines().collect();
    let gt = sample_words(&words, 400, 1)?;
    let snapshots = 9;
    let channel = ChannelModel::new(0.1, 0.02, 0.02, alphabet_of(&gt));
    let traj = TrajectoryModel::linear(snapshots, 1.5, 0.8)?;
    let hsets = generate(&gt, snapshots, &channel, &traj, 2)?;

    for i in 0..snapshots {
        let r = evaluate(hsets.iter().zip(&gt).map(|(h, s)| (&h.outputs()[i], &s.ground_truth)))?;
        println!("snapshot {i}: crw {:.2}  ted {}", r.crw * 100.0, r.ted);
    }

    let dict = Dictionary::new(words.iter().copied(), CaseMode::Exact);
    let costs = SubstitutionCostMatrix::unit();
    let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1])?);
    let fused = combine_all(
        &hsets,
        &PruningMask::all(snapshots)?,
        FusionContext::new(&dict, &costs, &cfg),
    )?;
    let r = evaluate(fused.iter().zip(&gt).map(|(f, s)| (&f.label, &s.ground_truth)))?;
    println!("\nfused:\n{r}");
    Ok(())
}

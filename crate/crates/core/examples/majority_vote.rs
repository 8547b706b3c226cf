// With no dictionary and a zero weight curve, fusion is plurality voting.
//
//     cargo run --example majority_vote

use adafuse::{
    combine, Dictionary, EnsembleConfig, FCurve, FusionContext, HypothesisSet, PruningMask, SubstitutionCostMatrix,
};

fn main() -> adafuse::Result<()> {
    let dict = Dictionary::empty();
    let costs = SubstitutionCostMatrix::unit();
    let cfg = EnsembleConfig::new(FCurve::zeros(&[0, 1])?);
    let ctx = FusionContext::new(&dict, &costs, &cfg);

    let sets = [
        HypothesisSet::new("s1", ["house", "hause", "house", "horse", "house"])?,
        HypothesisSet::new("s2", ["tree", "free", "free", "tree", "trea"])?,
        HypothesisSet::new("s3", ["cat", "cot", "cut", "cat", "cot"])?,
    ];
    for hs in &sets {
        let all = combine(hs, &PruningMask::all(hs.len())?, ctx)?;
        // Only the last two snapshots.
        let tail: PruningMask = "00011".parse()?;
        let pruned = combine(hs, &tail, ctx)?;
        println!(
            "{}: all -> {} ({}), 00011 -> {}",
            hs.sample_id(),
            all.label,
            all.score,
            pruned.label
        );
    }
    Ok(())
}

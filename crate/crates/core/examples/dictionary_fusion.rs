// A dictionary word can win the vote even when no snapshot agrees on it,
// as long as the weight curve rewards near misses.
//
//     cargo run --example dictionary_fusion

use adafuse::fusion::{u_indicator, v_weight, w_weight};
use adafuse::{
    combine, score_candidate, CaseMode, Dictionary, EnsembleConfig, FCurve, FusionContext, HypothesisSet, PruningMask,
    SubstitutionCostMatrix,
};

fn main() -> adafuse::Result<()> {
    let dict = Dictionary::new(["word"], CaseMode::Exact);
    let costs = SubstitutionCostMatrix::unit();
    // Positive at small distances from out-of-dictionary outputs.
    let f = FCurve::new(vec![(-2, -0.5), (0, 0.0), (1, 0.8), (2, 0.3), (3, 0.0)])?;
    let mut cfg = EnsembleConfig::new(f.clone());
    let hs = HypothesisSet::new("s1", ["wrd", "word", "w0rd"])?;
    let mask = PruningMask::all(3)?;

    for h in hs.outputs() {
        println!(
            "W(word, {h}) = U {} * V {:.2} + I -> {:.2}",
            u_indicator("word", &dict),
            v_weight("word", h.as_str(), &dict, &costs, &f, 1.0),
            w_weight("word", h.as_str(), &dict, &costs, &f, 1.0, 1.0)
        );
    }
    for y in ["wrd", "word", "w0rd"] {
        println!(
            "score({y}) = {:.2}",
            score_candidate(y, &hs, &mask, FusionContext::new(&dict, &costs, &cfg))?
        );
    }
    let fused = combine(&hs, &mask, FusionContext::new(&dict, &costs, &cfg))?;
    println!("fused: {} ({:.2})", fused.label, fused.score);

    // Only out-of-dictionary snapshots left: the curve still pulls towards "word"
    // once dictionary words are part of the candidate pool.
    cfg.candidate_source = adafuse::CandidateSource::HypothesesAndDictionary;
    let masked: PruningMask = "101".parse()?;
    let fused = combine(&hs, &masked, FusionContext::new(&dict, &costs, &cfg))?;
    println!(
        "mask 101 with dictionary candidates: {} ({:?})",
        fused.label, fused.provenance
    );
    Ok(())
}

// Fit the weight curve by coordinate ascent on a small validation set.
//
// Sample A needs a reward for dictionary words one edit away from the
// outputs; sample B is hurt by any reward at distance 2 or more.
//
//     cargo run --example fit_curve

use adafuse::fusion::FitOptions;
use adafuse::{
    fit_f_curve, CaseMode, Dictionary, EnsembleConfig, FCurve, FusionContext, HypothesisSet, LabeledSample,
    PruningMask, SubstitutionCostMatrix,
};

fn main() -> adafuse::Result<()> {
    let dict = Dictionary::new(["word", "dot"], CaseMode::Exact);
    let costs = SubstitutionCostMatrix::unit();
    let val = vec![
        (
            HypothesisSet::new("a", ["wrd", "wrd", "word"])?,
            LabeledSample::new("a", "word"),
        ),
        (
            HypothesisSet::new("b", ["xyz", "xyz", "dot"])?,
            LabeledSample::new("b", "xyz"),
        ),
    ];
    let knots = [0, 1, 2];
    let cfg = EnsembleConfig::new(FCurve::zeros(&knots)?);
    let ctx = FusionContext::new(&dict, &costs, &cfg);

    let out = fit_f_curve(
        &knots,
        &[0.0, 1.0],
        &val,
        &PruningMask::all(3)?,
        ctx,
        FitOptions::default(),
    )?;
    println!("zero curve accuracy: {}", out.initial_objective);
    for (i, o) in out.sweep_objectives.iter().enumerate() {
        println!("sweep {}: {o}", i + 1);
    }
    println!("knots: {:?}", out.curve.knots());
    Ok(())
}

// The whole file-based workflow: simulate, learn costs, fit the curve,
// prune, fuse and evaluate. Artifacts go to a temporary directory.
//
//     cargo run --release --example pipeline

use adafuse::cost::{build_cost_matrix, count_positional_pairs, DEFAULT_MIN_COUNT};
use adafuse::fusion::{FitOptions, DEFAULT_GRID, DEFAULT_KNOTS};
use adafuse::io::{self, Prediction};
use adafuse::simulator::{alphabet_of, generate, ChannelModel, TrajectoryModel};
use adafuse::{
    combine_all, evaluate, fit_f_curve, ga_prune, CaseMode, EnsembleConfig, FCurve, FusionContext, GaParams,
    PruningMask,
};

fn main() -> adafuse::Result<()> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let dir = std::env::temp_dir().join(format!("adafuse-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| adafuse::Error::Data(e.to_string()))?;

    let gt = io::read_ground_truth(format!("{fixtures}/gt200.tsv"))?;
    let dict = io::read_dictionary(format!("{fixtures}/words.txt"), CaseMode::FoldUpper)?;
    let channel = ChannelModel::new(0.1, 0.02, 0.02, alphabet_of(&gt));
    let traj = TrajectoryModel::linear(10, 2.0, 0.8)?;
    io::write_hypotheses(dir.join("hyps.jsonl"), &generate(&gt, 10, &channel, &traj, 42)?)?;

    let hsets = io::read_hypotheses(dir.join("hyps.jsonl"))?;
    let val = io::join_by_id(&hsets, &gt)?;

    let counts = count_positional_pairs(
        val.iter()
            .flat_map(|(h, s)| h.outputs().iter().map(move |o| (o, &s.ground_truth))),
    );
    let costs = build_cost_matrix(&counts, DEFAULT_MIN_COUNT, 1.0)?;
    io::write_cost_matrix(dir.join("costs.tsv"), &costs)?;

    let mut cfg = EnsembleConfig::new(FCurve::zeros(&DEFAULT_KNOTS)?);
    cfg.case_mode = CaseMode::FoldUpper;
    let all = PruningMask::all(10)?;
    let fit = fit_f_curve(
        &DEFAULT_KNOTS,
        &DEFAULT_GRID,
        &val,
        &all,
        FusionContext::new(&dict, &costs, &cfg),
        FitOptions::default(),
    )?;
    println!("fit: {:.4} -> {:.4}", fit.initial_objective, fit.objective());
    io::write_f_curve(dir.join("f.json"), &fit.curve)?;
    cfg.f_curve = fit.curve;

    let ctx = FusionContext::new(&dict, &costs, &cfg);
    let (mask, trace) = ga_prune(10, &val, ctx, &GaParams::default())?;
    io::write_mask(dir.join("mask.txt"), &mask)?;
    std::fs::write(dir.join("trace.csv"), trace.to_csv()).map_err(|e| adafuse::Error::Data(e.to_string()))?;
    println!("mask: {mask}");

    let fused = combine_all(&hsets, &mask, ctx)?;
    let preds: Vec<Prediction> = hsets
        .iter()
        .zip(fused)
        .map(|(h, f)| Prediction::new(h.sample_id(), f))
        .collect();
    io::write_predictions(dir.join("pred.tsv"), &preds)?;

    let report = evaluate(preds.iter().zip(&gt).map(|(p, s)| (&p.label, &s.ground_truth)))?;
    print!("{report}");
    println!("artifacts in {}", dir.display());
    Ok(())
}

// Candidate generation with a distance bound and an external pool.
//
//     cargo run --example candidates

use adafuse::fusion::{generate_candidates_from, CandidateParams};
use adafuse::{
    generate_candidates, CandidateSource, CaseMode, Dictionary, HypothesisSet, Label, SubstitutionCostMatrix,
};

fn main() -> adafuse::Result<()> {
    let costs = SubstitutionCostMatrix::unit();
    let dict = Dictionary::new(["word", "ward", "world", "sword"], CaseMode::Exact);
    let hs = HypothesisSet::new("s1", ["wrd", "w0rd", "wrd"])?;

    for theta in [0.0, 1.0, 2.0, f64::INFINITY] {
        let params = CandidateParams {
            theta,
            source: CandidateSource::HypothesesAndDictionary,
            ..CandidateParams::default()
        };
        let c = generate_candidates(&hs, &dict, &costs, &params);
        println!("theta {theta:>3}: {}", join(&c));
    }

    let pool: Vec<Label> = ["wood", "wrds", "xyz"].iter().map(|&s| s.into()).collect();
    let params = CandidateParams {
        theta: 1.0,
        ..CandidateParams::default()
    };
    println!(
        "external pool, theta 1: {}",
        join(&generate_candidates_from(&pool, &hs, &costs, &params))
    );
    Ok(())
}

fn join(v: &[Label]) -> String {
    v.iter().map(Label::as_str).collect::<Vec<_>>().join(" ")
}

// Learn a substitution cost matrix from aligned outputs and references,
// then compare the learned distance with plain Levenshtein.
//
//     cargo run --example learn_costs

use adafuse::cost::{build_cost_matrix, cld, count_positional_pairs};
use adafuse::{levenshtein, Label};

fn main() -> adafuse::Result<()> {
    // (hypothesis, reference) pairs; 'a' comes out as 'o' in two of six.
    let pairs: Vec<(Label, Label)> = [("oaaa", "aaaa"), ("cot", "cat"), ("cat", "cat"), ("dog", "dog")]
        .iter()
        .map(|&(h, r)| (h.into(), r.into()))
        .collect();
    let counts = count_positional_pairs(pairs.iter().map(|(h, r)| (h, r)));
    let costs = build_cost_matrix(&counts, 1, 1.0)?;

    println!("P(o|a) = {}/{}", counts.count('a', 'o'), counts.total('a'));
    println!("cost(o, a) = {}", costs.cost('o', 'a'));
    println!("cost(x, a) = {}", costs.cost('x', 'a'));

    for (h, r) in [("cot", "cat"), ("cxt", "cat"), ("ct", "cat")] {
        println!(
            "{h:>4} vs {r}: levenshtein {}, learned {:.3}",
            levenshtein(h, r),
            cld(h, r, &costs, 1.0)
        );
    }
    Ok(())
}

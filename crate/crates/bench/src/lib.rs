//! Fixtures shared by the benchmarks.

use hammock_core::{BipartiteRatingGraph, RatingScale};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random ratings: `people` people each rating `per_person` of `artifacts`
/// artifacts, with popularity skewed toward low artifact IDs.
pub fn synthetic_ratings(
    people: u32,
    artifacts: u32,
    per_person: usize,
    seed: u64,
) -> BipartiteRatingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for p in 1..=people {
        for _ in 0..per_person {
            let x: f64 = rng.gen();
            let a = 1 + (x * x * f64::from(artifacts)) as u32;
            triples.push((p, a.min(artifacts), rng.gen_range(1..=5)));
        }
    }
    triples.sort_unstable_by_key(|&(p, a, _)| (p, a));
    triples.dedup_by_key(|&mut (p, a, _)| (p, a));
    BipartiteRatingGraph::from_ratings(RatingScale::default(), triples)
        .expect("ratings within scale")
}

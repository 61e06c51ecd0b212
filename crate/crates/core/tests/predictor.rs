use approx::assert_abs_diff_eq;
use hammock_core::metrics::bfs_distances;
use hammock_core::predictor::{
    agreement_scalar, leave_one_out, predict_nn, LooMode, LooOptions, PathBucketConfig,
    PathSelection, SkipReason,
};
use hammock_core::{
    induce_social_network, ArtifactId, BipartiteRatingGraph, JumpSpec, PersonId, RatingScale,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_ratings(seed: u64, people: u32, artifacts: u32, density: f64) -> BipartiteRatingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for p in 1..=people {
        for a in 1..=artifacts {
            if rng.gen_bool(density) {
                triples.push((p, a, rng.gen_range(1..=5)));
            }
        }
    }
    BipartiteRatingGraph::from_ratings(RatingScale::default(), triples).unwrap()
}

fn score(d: u8) -> i64 {
    [2, 1, 0, -1, -1][d as usize]
}

// Direct evaluation of the scoring table and tiebreaks over every candidate,
// on a graph that does not contain the person's rating of `a`.
fn brute_force(
    g: &BipartiteRatingGraph,
    u: PersonId,
    a: ArtifactId,
) -> Option<(PersonId, f64, u32)> {
    let mean = |p: PersonId| {
        let r: Vec<f64> = g
            .artifacts()
            .iter()
            .filter(|&&x| x != a)
            .filter_map(|&x| g.rating(p, x))
            .map(|v| f64::from(v.0))
            .collect();
        (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
    };
    let mut best: Option<(i64, u32, PersonId)> = None;
    for &v in g.people() {
        if v == u || g.rating(v, a).is_none() {
            continue;
        }
        let mut value = 0;
        let mut common = 0;
        for &x in g.artifacts() {
            if let (Some(ru), Some(rv)) = (g.rating(u, x), g.rating(v, x)) {
                value += score(ru.0.abs_diff(rv.0));
                common += 1;
            }
        }
        let better = match best {
            None => true,
            Some((bv, bc, bp)) => {
                value > bv || (value == bv && (common > bc || (common == bc && v < bp)))
            }
        };
        if better {
            best = Some((value, common, v));
        }
    }
    let (_, common, v) = best?;
    let offset = match (mean(u), mean(v)) {
        (Some(x), Some(y)) => x - y,
        _ => 0.0,
    };
    let raw = f64::from(g.rating(v, a).unwrap().0) + offset;
    Some((v, raw.clamp(1.0, 5.0), common))
}

#[test]
fn ten_person_fixture_matches_brute_force() {
    for seed in 0..40 {
        let g = random_ratings(seed, 10, 12, 0.5);
        for &u in g.people() {
            for &a in g.artifacts() {
                let masked = if g.rating(u, a).is_some() {
                    g.without_rating(u, a).unwrap()
                } else {
                    g.clone()
                };
                match brute_force(&masked, u, a) {
                    None => assert!(predict_nn(&g, u, a).is_err()),
                    Some((v, predicted, common)) => {
                        let out = predict_nn(&g, u, a).unwrap();
                        assert_eq!(out.neighbor, v, "seed {seed} {u} {a}");
                        assert_abs_diff_eq!(out.predicted, predicted, epsilon = 1e-9);
                        assert_eq!(out.hammock_width_used, common);
                    }
                }
            }
        }
    }
}

#[test]
fn masking_equals_physical_removal() {
    for seed in 0..20 {
        let g = random_ratings(500 + seed, 15, 15, 0.4);
        let loo = leave_one_out(
            &g,
            LooOptions {
                mode: LooMode::ByWidth,
                sample: None,
                seed: 0,
            },
        )
        .unwrap();
        assert_eq!(loo.len(), g.rating_count());
        for rec in &loo {
            let removed = g.without_rating(rec.person, rec.artifact).unwrap();
            let direct = predict_nn(&g, rec.person, rec.artifact);
            let physical = predict_nn(&removed, rec.person, rec.artifact);
            match (direct, physical) {
                (Ok(d), Ok(p)) => {
                    assert_eq!(d.neighbor, p.neighbor);
                    assert_eq!(d.predicted, p.predicted);
                    assert_eq!(d.agreement, p.agreement);
                    assert_abs_diff_eq!(rec.predicted.unwrap(), p.predicted, epsilon = 1e-9);
                    assert_eq!(rec.width, Some(p.hammock_width_used));
                }
                (Err(_), Err(_)) => assert_eq!(rec.skipped, Some(SkipReason::NoOtherRaters)),
                other => panic!("routes disagree: {other:?}"),
            }
        }
    }
}

#[test]
fn path_buckets_follow_masked_network_distances() {
    for seed in 0..15 {
        let g = random_ratings(900 + seed, 25, 20, 0.25);
        for w in [1, 2, 3] {
            let loo = leave_one_out(
                &g,
                LooOptions {
                    mode: LooMode::ByPathBucket(PathBucketConfig::new(w)),
                    sample: None,
                    seed: 0,
                },
            )
            .unwrap();
            for rec in &loo {
                let removed = g.without_rating(rec.person, rec.artifact).unwrap();
                let s = induce_social_network(&removed, JumpSpec::hammock(w).unwrap());
                let from = s.index_of(rec.person).unwrap();
                let d = bfs_distances(&s, from);
                let nearest = removed
                    .raters_of(rec.artifact)
                    .unwrap()
                    .iter()
                    .filter_map(|&(p, _)| d[s.index_of(p).unwrap()])
                    .min();
                match nearest {
                    _ if removed.raters_of(rec.artifact).unwrap().is_empty() => {
                        assert_eq!(rec.skipped, Some(SkipReason::NoOtherRaters))
                    }
                    Some(h) if h <= 3 => assert_eq!(rec.bucket, Some(h + 1), "seed {seed} w {w}"),
                    _ => assert_eq!(rec.skipped, Some(SkipReason::Unreachable)),
                }
            }
        }
    }
}

#[test]
fn every_length_selection_extends_nearest() {
    let g = random_ratings(3, 40, 30, 0.2);
    let run = |selection| {
        leave_one_out(
            &g,
            LooOptions {
                mode: LooMode::ByPathBucket(PathBucketConfig {
                    selection,
                    ..PathBucketConfig::new(2)
                }),
                sample: None,
                seed: 0,
            },
        )
        .unwrap()
    };
    let nearest = run(PathSelection::Nearest);
    let every = run(PathSelection::EveryLength);
    assert!(every.len() >= nearest.len());
    for rec in &nearest {
        let first = every
            .iter()
            .find(|r| r.person == rec.person && r.artifact == rec.artifact)
            .unwrap();
        assert_eq!(first, rec);
    }
}

#[test]
fn translation_is_identity_along_equal_mean_chain() {
    // person p rates artifacts p and p + 1 with alternating 2 and 4, so all
    // means are 3 and neighbors agree on the artifact they share
    let x = |a: u32| if a.is_multiple_of(2) { 4 } else { 2 };
    let mut triples = Vec::new();
    for p in 1..=4u32 {
        triples.push((p, p, x(p)));
        triples.push((p, p + 1, x(p + 1)));
    }
    triples.push((4, 100, 3));
    triples.push((1, 100, 3));
    let g = BipartiteRatingGraph::from_ratings(RatingScale::default(), triples).unwrap();
    let loo = leave_one_out(
        &g,
        LooOptions {
            mode: LooMode::ByPathBucket(PathBucketConfig {
                selection: PathSelection::EveryLength,
                ..PathBucketConfig::new(1)
            }),
            sample: None,
            seed: 0,
        },
    )
    .unwrap();
    let rec: Vec<_> = loo
        .iter()
        .filter(|r| r.person == PersonId(1) && r.artifact == ArtifactId(100))
        .collect();
    assert_eq!(rec.len(), 1);
    assert_eq!(rec[0].bucket, Some(4));
    for r in rec {
        assert_eq!(r.abs_error(), Some(0.0), "{r:?}");
    }
}

#[test]
fn sampling_is_seeded() {
    let g = random_ratings(1, 30, 30, 0.3);
    let opts = LooOptions {
        mode: LooMode::ByWidth,
        sample: Some(50),
        seed: 9,
    };
    let a = leave_one_out(&g, opts).unwrap();
    assert_eq!(a.len(), 50);
    assert_eq!(a, leave_one_out(&g, opts).unwrap());
    assert_ne!(
        a,
        leave_one_out(&g, LooOptions { seed: 10, ..opts }).unwrap()
    );
}

proptest! {
    #[test]
    fn agreement_is_symmetric(seed in 0u64..10_000) {
        let g = random_ratings(seed, 6, 8, 0.5);
        let people = g.people().to_vec();
        for &u in &people {
            for &v in &people {
                if u != v {
                    let (x, y) = (agreement_scalar(&g, u, v).unwrap(), agreement_scalar(&g, v, u).unwrap());
                    prop_assert_eq!(x, y);
                    prop_assert!(x.value.abs() <= 2 * i64::from(x.common_count));
                }
            }
        }
    }
}

//! Nearest-neighbor rating prediction and leave-one-out evaluation.
//!
//! Agreement between two people is scored per co-rated artifact from the gap
//! between their ratings: +2 for equal ratings, +1 for a gap of one, 0 for a gap
//! of two and -1 beyond that. A neighbor's rating is carried over to the
//! target person by a translation: the mean rating offset (`predict_nn`) or the
//! mean per-artifact difference over common ratings, summed along the path
//! (`leave_one_out` in path-bucket mode).

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ratings::{ArtifactId, BipartiteRatingGraph, PersonId, RatingValue};

pub fn agreement_score(a: RatingValue, b: RatingValue) -> i64 {
    match a.0.abs_diff(b.0) {
        0 => 2,
        1 => 1,
        2 => 0,
        _ => -1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AgreementScalar {
    pub value: i64,
    pub common_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct PairStats {
    value: i64,
    common: u32,
    // sum over common artifacts of (first person's rating - second person's rating)
    diff_sum: i64,
}

impl PairStats {
    fn add(&mut self, a: RatingValue, b: RatingValue) {
        self.value += agreement_score(a, b);
        self.common += 1;
        self.diff_sum += i64::from(a.0) - i64::from(b.0);
    }

    fn remove(mut self, a: RatingValue, b: RatingValue) -> Self {
        self.value -= agreement_score(a, b);
        self.common -= 1;
        self.diff_sum -= i64::from(a.0) - i64::from(b.0);
        self
    }

    fn translation(&self) -> f64 {
        if self.common == 0 {
            0.0
        } else {
            self.diff_sum as f64 / f64::from(self.common)
        }
    }
}

// Merge of two sorted rating rows, ignoring `skip` (an artifact index).
fn pair_stats(g: &BipartiteRatingGraph, u: usize, v: usize, skip: Option<usize>) -> PairStats {
    let (ru, rv) = (g.ratings_of_index(u), g.ratings_of_index(v));
    let (mut i, mut j) = (0, 0);
    let mut stats = PairStats::default();
    while i < ru.len() && j < rv.len() {
        match ru[i].0.cmp(&rv[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if skip != Some(ru[i].0 as usize) {
                    stats.add(ru[i].1, rv[j].1);
                }
                i += 1;
                j += 1;
            }
        }
    }
    stats
}

pub fn agreement_scalar(
    g: &BipartiteRatingGraph,
    u: PersonId,
    v: PersonId,
) -> Result<AgreementScalar> {
    if u == v {
        return Err(Error::InvalidConfig(format!(
            "agreement of person {u} with itself"
        )));
    }
    let ui = g.person_index(u).ok_or(Error::UnknownPerson(u))?;
    let vi = g.person_index(v).ok_or(Error::UnknownPerson(v))?;
    let s = pair_stats(g, ui, vi, None);
    Ok(AgreementScalar {
        value: s.value,
        common_count: s.common,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionOutcome {
    pub person: PersonId,
    pub artifact: ArtifactId,
    pub predicted: f64,
    /// The person's own rating of the artifact, if the graph holds one.
    pub actual: Option<RatingValue>,
    pub neighbor: PersonId,
    pub agreement: AgreementScalar,
    /// Common ratings with the contributing neighbor.
    pub hammock_width_used: u32,
    /// Hops in the recommender graph, final person-to-artifact hop included.
    pub path_length_bucket: u32,
}

impl PredictionOutcome {
    /// False when the neighbor shares no rating with the person.
    pub fn has_commonality(&self) -> bool {
        self.hammock_width_used > 0
    }
}

fn mean_rating(g: &BipartiteRatingGraph, person: usize, skip: Option<usize>) -> Option<f64> {
    let (sum, n) = g
        .ratings_of_index(person)
        .iter()
        .filter(|&&(a, _)| skip != Some(a as usize))
        .fold((0u64, 0u64), |(s, n), &(_, v)| (s + u64::from(v.0), n + 1));
    (n > 0).then(|| sum as f64 / n as f64)
}

/// Predicts `person`'s rating of `artifact` from the rater with the highest
/// agreement scalar (ties: more common ratings, then lower person ID).
///
/// The translation is the difference of the two people's mean ratings, both
/// taken without `artifact`. Any rating the person already gave `artifact` is
/// treated as masked: it is left out of the agreement scalars as well.
pub fn predict_nn(
    g: &BipartiteRatingGraph,
    person: PersonId,
    artifact: ArtifactId,
) -> Result<PredictionOutcome> {
    let pi = g.person_index(person).ok_or(Error::UnknownPerson(person))?;
    let ai = g
        .artifact_index(artifact)
        .ok_or(Error::UnknownArtifact(artifact))?;
    let mut best: Option<(usize, RatingValue, PairStats)> = None;
    for &(v, rv) in g.raters_of_index(ai) {
        let v = v as usize;
        if v == pi {
            continue;
        }
        let s = pair_stats(g, pi, v, Some(ai));
        let better = match &best {
            None => true,
            Some((_, _, b)) => (s.value, s.common) > (b.value, b.common),
        };
        if better {
            best = Some((v, rv, s));
        }
    }
    let (v, rv, stats) = best.ok_or(Error::NoCandidateRaters(artifact))?;
    let offset = match (mean_rating(g, pi, Some(ai)), mean_rating(g, v, Some(ai))) {
        (Some(mu), Some(mv)) => mu - mv,
        _ => 0.0,
    };
    Ok(PredictionOutcome {
        person,
        artifact,
        predicted: g.scale().clamp(f64::from(rv.0) + offset),
        actual: g.rating_by_index(pi, ai),
        neighbor: g.people()[v],
        agreement: AgreementScalar {
            value: stats.value,
            common_count: stats.common,
        },
        hammock_width_used: stats.common,
        path_length_bucket: 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LooMode {
    /// Nearest neighbor by agreement; width is the common-rating count.
    ByWidth,
    /// Raters within three hops of the social network at a minimum width.
    ByPathBucket(PathBucketConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathBucketConfig {
    pub min_width: u32,
    pub measure: WidthMeasure,
    pub selection: PathSelection,
}

impl PathBucketConfig {
    pub fn new(min_width: u32) -> Self {
        PathBucketConfig {
            min_width,
            measure: WidthMeasure::default(),
            selection: PathSelection::default(),
        }
    }

    fn admits(&self, s: &PairStats) -> bool {
        match self.measure {
            WidthMeasure::CommonRatings => s.common >= self.min_width,
            WidthMeasure::AgreementScalar => s.value >= i64::from(self.min_width),
        }
    }
}

/// What the minimum width of path-bucket mode is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WidthMeasure {
    /// Number of co-rated artifacts.
    #[default]
    CommonRatings,
    /// Agreement scalar of the pair.
    AgreementScalar,
}

/// Which raters contribute in path-bucket mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathSelection {
    /// Only the nearest rater: one record per masked rating.
    #[default]
    Nearest,
    /// The best rater at each distance of one to three person-hops: up to
    /// three records per masked rating, one per bucket.
    EveryLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LooOptions {
    pub mode: LooMode,
    /// Number of ratings to mask, drawn with `seed`; `None` masks every rating.
    pub sample: Option<usize>,
    pub seed: u64,
}

impl Default for LooOptions {
    fn default() -> Self {
        LooOptions {
            mode: LooMode::ByWidth,
            sample: Some(10_000),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    NoOtherRaters,
    Unreachable,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipReason::NoOtherRaters => "no_other_raters",
            SkipReason::Unreachable => "unreachable_within_3_hops",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LooRecord {
    pub person: PersonId,
    pub artifact: ArtifactId,
    pub actual: RatingValue,
    pub predicted: Option<f64>,
    pub width: Option<u32>,
    pub bucket: Option<u32>,
    pub skipped: Option<SkipReason>,
}

impl LooRecord {
    pub fn abs_error(&self) -> Option<f64> {
        self.predicted.map(|p| (p - f64::from(self.actual.0)).abs())
    }

    fn skipped(
        person: PersonId,
        artifact: ArtifactId,
        actual: RatingValue,
        reason: SkipReason,
    ) -> Self {
        LooRecord {
            person,
            artifact,
            actual,
            predicted: None,
            width: None,
            bucket: None,
            skipped: Some(reason),
        }
    }
}

/// Pairwise agreement statistics for every pair of people with a common rating.
struct AgreementIndex {
    rows: Vec<Vec<(u32, PairStats)>>,
    sums: Vec<u64>,
}

impl AgreementIndex {
    fn build(g: &BipartiteRatingGraph) -> Self {
        let n = g.person_count();
        let rows = (0..n)
            .into_par_iter()
            .map_init(
                || (vec![PairStats::default(); n], Vec::new()),
                |(scratch, touched), u| {
                    for &(a, ru) in g.ratings_of_index(u) {
                        for &(v, rv) in g.raters_of_index(a as usize) {
                            if v as usize == u {
                                continue;
                            }
                            if scratch[v as usize].common == 0 {
                                touched.push(v);
                            }
                            scratch[v as usize].add(ru, rv);
                        }
                    }
                    touched.sort_unstable();
                    let row = touched
                        .iter()
                        .map(|&v| (v, std::mem::take(&mut scratch[v as usize])))
                        .collect::<Vec<_>>();
                    touched.clear();
                    row
                },
            )
            .collect();
        let sums = (0..n)
            .map(|u| {
                g.ratings_of_index(u)
                    .iter()
                    .map(|&(_, v)| u64::from(v.0))
                    .sum()
            })
            .collect();
        AgreementIndex { rows, sums }
    }

    fn get(&self, u: usize, v: usize) -> PairStats {
        let row = &self.rows[u];
        row.binary_search_by_key(&(v as u32), |&(w, _)| w)
            .map(|i| row[i].1)
            .unwrap_or_default()
    }
}

fn select_masks(g: &BipartiteRatingGraph, options: &LooOptions) -> Vec<(usize, usize)> {
    let all: Vec<(usize, usize)> = (0..g.person_count())
        .flat_map(|p| {
            g.ratings_of_index(p)
                .iter()
                .map(move |&(a, _)| (p, a as usize))
        })
        .collect();
    match options.sample {
        Some(k) if k < all.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let mut picked = rand::seq::index::sample(&mut rng, all.len(), k).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| all[i]).collect()
        }
        _ => all,
    }
}

/// Masks ratings one at a time and predicts each from the remaining data.
/// Records come back ordered by (person, artifact, bucket).
pub fn leave_one_out(g: &BipartiteRatingGraph, options: LooOptions) -> Result<Vec<LooRecord>> {
    if let LooMode::ByPathBucket(PathBucketConfig { min_width: 0, .. }) = options.mode {
        return Err(Error::ZeroWidth);
    }
    let masks = select_masks(g, &options);
    let index = AgreementIndex::build(g);
    let adjacency: Option<Vec<Vec<u32>>> = match options.mode {
        LooMode::ByWidth => None,
        LooMode::ByPathBucket(cfg) => Some(
            index
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .filter(|(_, s)| cfg.admits(s))
                        .map(|&(v, _)| v)
                        .collect()
                })
                .collect(),
        ),
    };
    let n = g.person_count();
    let records = masks
        .par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, &(u, a)| match (options.mode, &adjacency) {
                (LooMode::ByPathBucket(cfg), Some(adj)) => {
                    predict_by_path(g, &index, adj, cfg, u, a, scratch)
                }
                _ => vec![predict_by_width(g, &index, u, a)],
            },
        )
        .flatten()
        .collect();
    Ok(records)
}

struct Scratch {
    rater: Vec<Option<RatingValue>>,
    seen: Vec<u32>,
    parent: Vec<u32>,
    stamp: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            rater: vec![None; n],
            seen: vec![0; n],
            parent: vec![u32::MAX; n],
            stamp: 0,
        }
    }
}

fn masked_mean(
    g: &BipartiteRatingGraph,
    index: &AgreementIndex,
    u: usize,
    ru: RatingValue,
) -> Option<f64> {
    let deg = g.ratings_of_index(u).len() as u64;
    (deg > 1).then(|| (index.sums[u] - u64::from(ru.0)) as f64 / (deg - 1) as f64)
}

fn predict_by_width(
    g: &BipartiteRatingGraph,
    index: &AgreementIndex,
    u: usize,
    a: usize,
) -> LooRecord {
    let person = g.people()[u];
    let artifact = g.artifacts()[a];
    let ru = g.rating_by_index(u, a).expect("masked rating exists");
    let mut best: Option<(usize, RatingValue, PairStats)> = None;
    for &(v, rv) in g.raters_of_index(a) {
        let v = v as usize;
        if v == u {
            continue;
        }
        // v rated a as well, so the pair's statistics include the masked artifact
        let s = index.get(u, v).remove(ru, rv);
        let better = match &best {
            None => true,
            Some((_, _, b)) => (s.value, s.common) > (b.value, b.common),
        };
        if better {
            best = Some((v, rv, s));
        }
    }
    let Some((v, rv, stats)) = best else {
        return LooRecord::skipped(person, artifact, ru, SkipReason::NoOtherRaters);
    };
    let offset = match (masked_mean(g, index, u, ru), masked_mean(g, index, v, rv)) {
        (Some(mu), Some(mv)) => mu - mv,
        _ => 0.0,
    };
    LooRecord {
        person,
        artifact,
        actual: ru,
        predicted: Some(g.scale().clamp(f64::from(rv.0) + offset)),
        width: Some(stats.common),
        bucket: Some(2),
        skipped: None,
    }
}

const MAX_PERSON_HOPS: u32 = 3;

fn predict_by_path(
    g: &BipartiteRatingGraph,
    index: &AgreementIndex,
    adj: &[Vec<u32>],
    cfg: PathBucketConfig,
    u: usize,
    a: usize,
    scratch: &mut Scratch,
) -> Vec<LooRecord> {
    let person = g.people()[u];
    let artifact = g.artifacts()[a];
    let ru = g.rating_by_index(u, a).expect("masked rating exists");
    let raters = g.raters_of_index(a);
    if raters.len() < 2 {
        return vec![LooRecord::skipped(
            person,
            artifact,
            ru,
            SkipReason::NoOtherRaters,
        )];
    }
    for &(v, rv) in raters {
        scratch.rater[v as usize] = Some(rv);
    }
    scratch.rater[u] = None;
    scratch.stamp += 1;
    let stamp = scratch.stamp;
    scratch.seen[u] = stamp;

    // first hop: the masked person's own edges, recounted without the masked artifact
    let mut frontier: Vec<u32> = Vec::new();
    for &(v, s) in &index.rows[u] {
        let s = match scratch.rater[v as usize] {
            Some(rv) => s.remove(ru, rv),
            None => s,
        };
        if cfg.admits(&s) {
            scratch.seen[v as usize] = stamp;
            scratch.parent[v as usize] = u as u32;
            frontier.push(v);
        }
    }
    let mut found: Vec<(usize, u32)> = Vec::new();
    let mut depth = 1;
    loop {
        // the rater at this depth agreeing best with its predecessor on the path
        let best = frontier
            .iter()
            .filter(|&&v| scratch.rater[v as usize].is_some())
            .map(|&v| {
                let s = edge_stats(
                    index,
                    scratch,
                    u,
                    ru,
                    scratch.parent[v as usize] as usize,
                    v as usize,
                );
                (s.value, s.common, std::cmp::Reverse(v))
            })
            .max();
        if let Some((_, _, std::cmp::Reverse(r))) = best {
            found.push((r as usize, depth));
            if cfg.selection == PathSelection::Nearest {
                break;
            }
        }
        if depth == MAX_PERSON_HOPS || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in &adj[x as usize] {
                if scratch.seen[y as usize] != stamp {
                    scratch.seen[y as usize] = stamp;
                    scratch.parent[y as usize] = x;
                    next.push(y);
                }
            }
        }
        frontier = next;
        depth += 1;
    }

    let records = if found.is_empty() {
        vec![LooRecord::skipped(
            person,
            artifact,
            ru,
            SkipReason::Unreachable,
        )]
    } else {
        found
            .into_iter()
            .map(|(r, hops)| {
                let rr = scratch.rater[r].unwrap();
                let mut shift = 0.0;
                let mut width = u32::MAX;
                let mut y = r;
                loop {
                    let x = scratch.parent[y] as usize;
                    let s = edge_stats(index, scratch, u, ru, x, y);
                    shift += s.translation();
                    width = width.min(s.common);
                    if x == u {
                        break;
                    }
                    y = x;
                }
                LooRecord {
                    person,
                    artifact,
                    actual: ru,
                    predicted: Some(g.scale().clamp(f64::from(rr.0) + shift)),
                    width: Some(width),
                    bucket: Some(hops + 1),
                    skipped: None,
                }
            })
            .collect()
    };
    for &(v, _) in raters {
        scratch.rater[v as usize] = None;
    }
    records
}

// Pair statistics for the path edge x -> y, without the masked rating of `u`.
fn edge_stats(
    index: &AgreementIndex,
    scratch: &Scratch,
    u: usize,
    ru: RatingValue,
    x: usize,
    y: usize,
) -> PairStats {
    let s = index.get(x, y);
    match scratch.rater[y] {
        Some(ry) if x == u => s.remove(ru, ry),
        _ => s,
    }
}

/// Mean absolute error of one width quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthBin {
    pub mean_width: f64,
    pub mean_abs_error: f64,
    pub count: usize,
}

/// Splits predictions with a width of at least one into `bins` equally sized
/// groups by increasing width.
pub fn width_quantile_bins(records: &[LooRecord], bins: usize) -> Vec<WidthBin> {
    let mut rows: Vec<(u32, f64)> = records
        .iter()
        .filter_map(|r| Some((r.width.filter(|&w| w > 0)?, r.abs_error()?)))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if bins == 0 || rows.is_empty() {
        return Vec::new();
    }
    (0..bins)
        .filter_map(|i| {
            let chunk = &rows[i * rows.len() / bins..(i + 1) * rows.len() / bins];
            (!chunk.is_empty()).then(|| WidthBin {
                mean_width: chunk.iter().map(|r| f64::from(r.0)).sum::<f64>() / chunk.len() as f64,
                mean_abs_error: chunk.iter().map(|r| r.1).sum::<f64>() / chunk.len() as f64,
                count: chunk.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketSummary {
    pub bucket: u32,
    pub mean_abs_error: f64,
    pub count: usize,
}

pub fn bucket_summary(records: &[LooRecord]) -> Vec<BucketSummary> {
    let mut acc: std::collections::BTreeMap<u32, (f64, usize)> = Default::default();
    for r in records {
        if let (Some(b), Some(e)) = (r.bucket, r.abs_error()) {
            let slot = acc.entry(b).or_default();
            slot.0 += e;
            slot.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(bucket, (sum, count))| BucketSummary {
            bucket,
            mean_abs_error: sum / count as f64,
            count,
        })
        .collect()
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties; NaN when either
/// side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

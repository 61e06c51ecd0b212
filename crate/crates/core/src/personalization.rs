//! Benefit (`w / l²`) and risk (rate of path-length reduction) metrics, and the
//! experiments built on them: rewiring sweeps over `p`, width sweeps over `w`,
//! and the incremental-rating benefit experiment.

use std::collections::BTreeMap;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{generate_wreath, rewire};
use crate::jump::{CooccurrenceCounts, JumpSpec};
use crate::metrics::{
    average_path_length, clustering_coefficient, connected_components, multi_source_bfs,
    path_length, PathLengthMode,
};
use crate::ratings::{ArtifactId, BipartiteRatingGraph};

/// `w / l²`.
pub fn benefit(w: u32, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::ZeroPathLength);
    }
    if w == 0 {
        return Err(Error::ZeroWidth);
    }
    Ok(f64::from(w) / f64::from(l).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenefitRecord {
    pub w: u32,
    pub l: u32,
    pub benefit: f64,
}

impl BenefitRecord {
    pub fn new(w: u32, l: u32) -> Result<Self> {
        Ok(BenefitRecord {
            w,
            l,
            benefit: benefit(w, l)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSample {
    pub parameter: f64,
    pub scaled_length: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskCurve {
    pub samples: Vec<RiskSample>,
}

impl RiskCurve {
    /// Position of the largest risk; the earliest sample wins ties.
    pub fn peak_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, s) in self.samples.iter().enumerate() {
            if best.is_none_or(|b| s.risk > self.samples[b].risk) {
                best = Some(i);
            }
        }
        best
    }

    pub fn peak(&self) -> Option<&RiskSample> {
        self.peak_index().map(|i| &self.samples[i])
    }
}

/// `-dl/dp` on a sampled curve: central differences inside, one-sided at the
/// two ends, always over the actual parameter gaps.
pub fn risk_from_length_curve(samples: &[(f64, f64)]) -> Result<RiskCurve> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    for pair in samples.windows(2) {
        if !(pair[1].0 > pair[0].0) {
            return Err(Error::UnorderedParameters(pair[1].0));
        }
    }
    let last = samples.len() - 1;
    let curve = (0..samples.len())
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(last));
            let slope = (samples[hi].1 - samples[lo].1) / (samples[hi].0 - samples[lo].0);
            RiskSample {
                parameter: samples[i].0,
                scaled_length: samples[i].1,
                risk: -slope,
            }
        })
        .collect();
    Ok(RiskCurve { samples: curve })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewiringPoint {
    pub p: f64,
    /// Mean over trials of `L(p) / L(0)`.
    pub length_scaled: f64,
    /// Mean over trials of `C(p) / C(0)`.
    pub clustering_scaled: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewiringSweep {
    pub baseline_length: f64,
    pub baseline_clustering: f64,
    pub points: Vec<RewiringPoint>,
}

impl RewiringSweep {
    pub fn risk_curve(&self) -> RiskCurve {
        RiskCurve {
            samples: self
                .points
                .iter()
                .map(|p| RiskSample {
                    parameter: p.p,
                    scaled_length: p.length_scaled,
                    risk: p.risk,
                })
                .collect(),
        }
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// Rewires an `n`/`k` wreath at every `p` of the grid, `trials` times each
/// (trial `t` uses seed `seed + t`), and reports lengths and clustering scaled
/// by the unrewired wreath together with the risk derived from the scaled lengths.
pub fn p_risk_sweep(
    n: usize,
    k: usize,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<RewiringSweep> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidProbability(p));
    }
    if grid.len() < 2 {
        return Err(Error::TooFewSamples(grid.len()));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig(
            "at least one trial is required".into(),
        ));
    }
    let wreath = generate_wreath(n, k)?;
    let baseline_length = average_path_length(&wreath)?;
    let baseline_clustering = clustering_coefficient(&wreath);

    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|i| (0..trials as u64).map(move |t| (i, t)))
        .collect();
    let measured: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(i, t)| -> Result<(f64, f64)> {
            let g = rewire(&wreath, grid[i], seed.wrapping_add(t))?;
            Ok((average_path_length(&g)?, clustering_coefficient(&g)))
        })
        .collect::<Result<_>>()?;

    let mut scaled = Vec::with_capacity(grid.len());
    for (i, &p) in grid.iter().enumerate() {
        let chunk = &measured[i * trials..(i + 1) * trials];
        let l = chunk.iter().map(|m| m.0 / baseline_length).sum::<f64>() / trials as f64;
        let c = chunk.iter().map(|m| m.1 / baseline_clustering).sum::<f64>() / trials as f64;
        scaled.push((p, l, c));
    }
    let curve =
        risk_from_length_curve(&scaled.iter().map(|&(p, l, _)| (p, l)).collect::<Vec<_>>())?;
    let points = scaled
        .iter()
        .zip(&curve.samples)
        .map(|(&(p, l, c), s)| RewiringPoint {
            p,
            length_scaled: l,
            clustering_scaled: c,
            risk: s.risk,
        })
        .collect();
    Ok(RewiringSweep {
        baseline_length,
        baseline_clustering,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthRiskSweep {
    pub baseline_width: u32,
    pub mode: PathLengthMode,
    /// Samples in sweep order (descending width); `parameter` is the width.
    pub curve: RiskCurve,
    pub component_counts: Vec<usize>,
}

impl WidthRiskSweep {
    /// True when scaled lengths never grow as the width decreases.
    pub fn is_monotone(&self) -> bool {
        self.curve
            .samples
            .windows(2)
            .all(|s| s[1].scaled_length <= s[0].scaled_length + 1e-12)
    }

    /// Sweep index of the first width at which the network is a single component.
    pub fn first_connected_index(&self) -> Option<usize> {
        self.component_counts.iter().position(|&c| c == 1)
    }
}

/// Path lengths of the social networks induced at each width (strictly
/// descending), scaled by the length at `baseline`.
///
/// `risk` at a width is the drop in scaled length relative to the previous
/// (larger) width of the sweep; the first width has risk 0, so the risks
/// telescope to `scaled(first) - scaled(last)`.
pub fn width_risk_sweep(
    counts: &CooccurrenceCounts,
    widths: &[u32],
    baseline: u32,
    mode: PathLengthMode,
) -> Result<WidthRiskSweep> {
    if widths.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for pair in widths.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::UnorderedParameters(f64::from(pair[1])));
        }
    }
    if widths.contains(&0) {
        return Err(Error::ZeroWidth);
    }
    if !widths.contains(&baseline) {
        return Err(Error::InvalidBaseline(baseline));
    }
    let measured: Vec<(f64, usize)> = widths
        .iter()
        .map(|&w| {
            let s = counts.induce(JumpSpec::hammock(w)?);
            let comps = connected_components(&s).component_count;
            let length = path_length(&s, mode).map_err(|e| match e {
                Error::NoEdges if w == baseline => Error::InvalidBaseline(w),
                Error::NoEdges => {
                    Error::InvalidConfig(format!("social network at width {w} has no edges"))
                }
                other => other,
            })?;
            Ok((length, comps))
        })
        .collect::<Result<_>>()?;
    let base = measured[widths.iter().position(|&w| w == baseline).unwrap()].0;
    let mut samples = Vec::with_capacity(widths.len());
    for (i, (&w, &(length, _))) in widths.iter().zip(&measured).enumerate() {
        let scaled = length / base;
        let risk = if i == 0 {
            0.0
        } else {
            samples
                .last()
                .map(|s: &RiskSample| s.scaled_length)
                .unwrap()
                - scaled
        };
        samples.push(RiskSample {
            parameter: f64::from(w),
            scaled_length: scaled,
            risk,
        });
    }
    Ok(WidthRiskSweep {
        baseline_width: baseline,
        mode,
        curve: RiskCurve { samples },
        component_counts: measured.iter().map(|m| m.1).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenefitExperimentConfig {
    pub targets: Vec<ArtifactId>,
    pub max_ratings: usize,
    pub repetitions: usize,
    /// Widths evaluated after every added rating.
    pub widths: Vec<u32>,
    pub seed: u64,
    pub bin_width: f64,
    /// Keep the targets out of the new person's sampled ratings.
    pub exclude_targets: bool,
}

impl Default for BenefitExperimentConfig {
    fn default() -> Self {
        BenefitExperimentConfig {
            targets: Vec::new(),
            max_ratings: 300,
            repetitions: 20,
            widths: (1..=32).collect(),
            seed: 0,
            bin_width: 1.0,
            exclude_targets: true,
        }
    }
}

/// Which benefit levels became reachable for which target after how many ratings.
///
/// For every repetition and target, each benefit bin maps to the smallest
/// number of added ratings at which some width produced it. A cell
/// `(ratings_added, bin)` is achievable from that count on.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityMatrix {
    pub targets: Vec<ArtifactId>,
    pub max_ratings: usize,
    pub bin_width: f64,
    /// `[repetition][target]`: bin index -> first ratings count achieving it.
    pub first_reached: Vec<Vec<BTreeMap<u32, usize>>>,
}

impl FeasibilityMatrix {
    pub fn repetitions(&self) -> usize {
        self.first_reached.len()
    }

    pub fn bin_value(&self, bin: u32) -> f64 {
        f64::from(bin) * self.bin_width
    }

    pub fn achievable(
        &self,
        repetition: usize,
        target: usize,
        ratings_added: usize,
        bin: u32,
    ) -> bool {
        self.first_reached[repetition][target]
            .get(&bin)
            .is_some_and(|&k| k <= ratings_added)
    }

    pub fn achievable_count(&self, target: usize, ratings_added: usize, bin: u32) -> usize {
        (0..self.repetitions())
            .filter(|&r| self.achievable(r, target, ratings_added, bin))
            .count()
    }

    /// Every cell achievable for target `inner` is achievable for `outer`.
    pub fn is_nested(&self, repetition: usize, outer: usize, inner: usize) -> bool {
        let o = &self.first_reached[repetition][outer];
        self.first_reached[repetition][inner]
            .iter()
            .all(|(bin, &k)| o.get(bin).is_some_and(|&ko| ko <= k))
    }

    /// Rows `(target, ratings_added, bin value, achievable count)` for every
    /// cell reached in at least one repetition, ordered by target position,
    /// ratings count and bin.
    pub fn cells(&self) -> Vec<(ArtifactId, usize, f64, usize)> {
        let mut out = Vec::new();
        for (t, &target) in self.targets.iter().enumerate() {
            let bins: std::collections::BTreeSet<u32> = self
                .first_reached
                .iter()
                .flat_map(|rep| rep[t].keys().copied())
                .collect();
            for k in 0..=self.max_ratings {
                for &bin in &bins {
                    let count = self.achievable_count(t, k, bin);
                    if count > 0 {
                        out.push((target, k, self.bin_value(bin), count));
                    }
                }
            }
        }
        out
    }
}

fn sampling_weights(
    g: &BipartiteRatingGraph,
    target_idx: &[usize],
    exclude_targets: bool,
) -> Vec<f64> {
    (0..g.artifact_count())
        .map(|a| {
            if exclude_targets && target_idx.contains(&a) {
                0.0
            } else {
                g.raters_of_index(a).len() as f64
            }
        })
        .collect()
}

// Weighted sampling without replacement of up to `max` artifact indices.
fn sample_sequence(weights: &[f64], max: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = weights.to_vec();
    let available = weights.iter().filter(|&&w| w > 0.0).count();
    let mut order = Vec::with_capacity(max.min(available));
    while order.len() < max.min(available) {
        let a = WeightedIndex::new(&weights)
            .expect("positive weight remains")
            .sample(&mut rng);
        weights[a] = 0.0;
        order.push(a);
    }
    order
}

/// Artifacts the new person rates in `repetition` of the benefit experiment,
/// in rating order.
pub fn sampled_ratings(
    g: &BipartiteRatingGraph,
    cfg: &BenefitExperimentConfig,
    repetition: usize,
) -> Result<Vec<ArtifactId>> {
    let target_idx: Vec<usize> = cfg
        .targets
        .iter()
        .map(|&t| g.artifact_index(t).ok_or(Error::UnknownArtifact(t)))
        .collect::<Result<_>>()?;
    let weights = sampling_weights(g, &target_idx, cfg.exclude_targets);
    Ok(sample_sequence(
        &weights,
        cfg.max_ratings,
        cfg.seed.wrapping_add(repetition as u64),
    )
    .into_iter()
    .map(|a| g.artifacts()[a])
    .collect())
}

/// Benefit bin of `w / l²`; benefits below half a bin round up to the first bin.
pub fn benefit_bin(benefit: f64, bin_width: f64) -> u32 {
    ((benefit / bin_width).round() as u32).max(1)
}

/// Adds a fresh person to `g` and lets it rate artifacts one at a time,
/// sampled without replacement with probability proportional to their rating
/// counts (mid-scale values; only the structure matters). After each rating the
/// shortest hammock path from the new person to every target is measured at
/// every width, and `w / l²` is recorded. Repetition `r` uses seed `seed + r`.
pub fn incremental_benefit_experiment(
    g: &BipartiteRatingGraph,
    counts: &CooccurrenceCounts,
    cfg: &BenefitExperimentConfig,
) -> Result<FeasibilityMatrix> {
    if cfg.widths.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if cfg.widths.contains(&0) {
        return Err(Error::ZeroWidth);
    }
    if !(cfg.bin_width > 0.0) {
        return Err(Error::InvalidConfig("bin width must be positive".into()));
    }
    let target_idx: Vec<usize> = cfg
        .targets
        .iter()
        .map(|&t| g.artifact_index(t).ok_or(Error::UnknownArtifact(t)))
        .collect::<Result<_>>()?;
    let n = g.person_count();

    // dist[w][t][v]: hops from v to the nearest rater of target t at width w
    let dist: Vec<Vec<Vec<u32>>> = cfg
        .widths
        .par_iter()
        .map(|&w| -> Result<Vec<Vec<u32>>> {
            let s = counts.induce(JumpSpec::hammock(w)?);
            Ok(target_idx
                .iter()
                .map(|&ai| {
                    multi_source_bfs(&s, g.raters_of_index(ai).iter().map(|&(p, _)| p as usize))
                        .into_iter()
                        .map(|d| d.unwrap_or(u32::MAX))
                        .collect()
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let base_weights = sampling_weights(g, &target_idx, cfg.exclude_targets);

    let first_reached = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut common = vec![0u32; n];
            let mut touched: Vec<usize> = Vec::new();
            let mut rated_target = vec![false; target_idx.len()];
            let mut reached: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); target_idx.len()];
            let order = sample_sequence(
                &base_weights,
                cfg.max_ratings,
                cfg.seed.wrapping_add(rep as u64),
            );
            for (k, a) in (1..).zip(order) {
                if let Some(t) = target_idx.iter().position(|&ai| ai == a) {
                    rated_target[t] = true;
                }
                for &(v, _) in g.raters_of_index(a) {
                    let v = v as usize;
                    if common[v] == 0 {
                        touched.push(v);
                    }
                    common[v] += 1;
                }
                for (wi, &w) in cfg.widths.iter().enumerate() {
                    for (t, per_target) in reached.iter_mut().enumerate() {
                        if rated_target[t] {
                            continue;
                        }
                        let nearest = touched
                            .iter()
                            .filter(|&&v| common[v] >= w)
                            .map(|&v| dist[wi][t][v])
                            .min()
                            .unwrap_or(u32::MAX);
                        if nearest == u32::MAX {
                            continue;
                        }
                        let l = nearest + 1;
                        let bin = benefit_bin(f64::from(w) / f64::from(l).powi(2), cfg.bin_width);
                        per_target.entry(bin).or_insert(k);
                    }
                }
            }
            reached
        })
        .collect();

    Ok(FeasibilityMatrix {
        targets: cfg.targets.clone(),
        max_ratings: cfg.max_ratings,
        bin_width: cfg.bin_width,
        first_reached,
    })
}

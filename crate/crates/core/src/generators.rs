//! Synthetic worlds: Watts-Strogatz wreaths with random rewiring, and the
//! three-community power-law rating dataset joined by a few bridge people.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ratings::{ArtifactId, BipartiteRatingGraph, GraphBuilder, PersonId, RatingScale};
use crate::topology::{Topology, UndirectedGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WattsStrogatzConfig {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
}

impl Default for WattsStrogatzConfig {
    fn default() -> Self {
        WattsStrogatzConfig {
            n: 1000,
            k: 10,
            p: 0.0,
            seed: 0,
        }
    }
}

impl WattsStrogatzConfig {
    pub fn generate(&self) -> Result<UndirectedGraph> {
        let wreath = generate_wreath(self.n, self.k)?;
        rewire(&wreath, self.p, self.seed)
    }
}

/// Ring lattice on `n` vertices, each joined to its `k / 2` nearest neighbors on either side.
pub fn generate_wreath(n: usize, k: usize) -> Result<UndirectedGraph> {
    if k == 0 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::InvalidWreath { n, k });
    }
    let edges = (0..n).flat_map(|v| (1..=k / 2).map(move |d| (v, (v + d) % n)));
    Ok(UndirectedGraph::from_edges(n, edges))
}

/// Watts-Strogatz rewiring.
///
/// Lattice edges are visited ring offset by ring offset, vertex by vertex; each
/// one has its clockwise endpoint moved with probability `p` to a uniformly
/// chosen vertex that is neither the anchor nor already adjacent to it.
/// Edge count is preserved and the result is a pure function of `seed`.
pub fn rewire(g: &UndirectedGraph, p: f64, seed: u64) -> Result<UndirectedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let n = g.node_count();
    let mut lattice: Vec<(usize, usize, usize)> = g
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let forward = (v + n - u) % n;
            if forward <= n / 2 {
                (forward, u, v)
            } else {
                (n - forward, v, u)
            }
        })
        .collect();
    lattice.sort_unstable();

    let mut adj: Vec<BTreeSet<u32>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (_, anchor, far) in lattice {
        if !rng.gen_bool(p) || adj[anchor].len() + 1 >= n {
            continue;
        }
        let target = loop {
            let c = rng.gen_range(0..n);
            if c != anchor && !adj[anchor].contains(&(c as u32)) {
                break c;
            }
        };
        adj[anchor].remove(&(far as u32));
        adj[far].remove(&(anchor as u32));
        adj[anchor].insert(target as u32);
        adj[target].insert(anchor as u32);
    }
    Ok(UndirectedGraph::from_adjacency(
        adj.into_iter().map(|s| s.into_iter().collect()).collect(),
    ))
}

/// Exponent for which `⌈max · people^-ε⌉ = min`, i.e. the last-ranked person
/// rates exactly `min` artifacts.
pub fn calibrate_epsilon(max_artifacts: usize, min_ratings: usize, people: usize) -> Result<f64> {
    if max_artifacts == 0 || min_ratings == 0 || people == 0 {
        return Err(Error::InvalidConfig(
            "calibration inputs must all be positive".into(),
        ));
    }
    if min_ratings > max_artifacts {
        return Err(Error::InfeasibleCalibration {
            max: max_artifacts,
            min: min_ratings,
        });
    }
    if min_ratings == max_artifacts {
        return Ok(0.0);
    }
    if people == 1 {
        return Err(Error::InfeasibleCalibration {
            max: max_artifacts,
            min: min_ratings,
        });
    }
    Ok((max_artifacts as f64 / min_ratings as f64).ln() / (people as f64).ln())
}

/// `⌈max · rank^-ε⌉`, clamped to `1..=max`.
///
/// The ceiling ignores a relative excess below 1e-9 so that calibrated
/// exponents land on their exact integer targets despite rounding in `powf`.
pub fn power_law_count(max: usize, rank: usize, epsilon: f64) -> usize {
    let x = max as f64 * (rank as f64).powf(-epsilon);
    let c = (x - x * 1e-9).ceil();
    (c as usize).clamp(1, max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatingValues {
    /// Every rating is the scale midpoint.
    #[default]
    Midpoint,
    /// Ratings drawn uniformly from the scale using the config seed.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeCommunityConfig {
    pub communities: usize,
    pub people_per_community: usize,
    pub artifacts_per_community: usize,
    /// Ratings of the last-ranked person in each community.
    pub min_ratings: usize,
    /// `None` calibrates from the three sizes above.
    pub epsilon: Option<f64>,
    pub bridge_people: usize,
    /// Rating budget of the first bridge person; later ones follow the same power law.
    pub bridge_budget: usize,
    pub scale: RatingScale,
    pub rating_values: RatingValues,
    pub seed: u64,
}

impl Default for ThreeCommunityConfig {
    fn default() -> Self {
        ThreeCommunityConfig {
            communities: 3,
            people_per_community: 200,
            artifacts_per_community: 75,
            min_ratings: 15,
            epsilon: None,
            bridge_people: 3,
            bridge_budget: 15,
            scale: RatingScale::default(),
            rating_values: RatingValues::Midpoint,
            seed: 0,
        }
    }
}

impl ThreeCommunityConfig {
    pub fn epsilon(&self) -> Result<f64> {
        match self.epsilon {
            Some(e) if e.is_finite() && e >= 0.0 => Ok(e),
            Some(e) => Err(Error::InvalidConfig(format!(
                "epsilon {e} must be finite and non-negative"
            ))),
            None => calibrate_epsilon(
                self.artifacts_per_community,
                self.min_ratings,
                self.people_per_community,
            ),
        }
    }

    pub fn person_id(&self, community: usize, rank: usize) -> PersonId {
        PersonId((community * self.people_per_community + rank) as u32)
    }

    pub fn bridge_id(&self, j: usize) -> PersonId {
        PersonId((self.communities * self.people_per_community + j) as u32)
    }

    pub fn artifact_id(&self, community: usize, position: usize) -> ArtifactId {
        ArtifactId((community * self.artifacts_per_community + position + 1) as u32)
    }

    /// Artifacts of each bridge person, as (community, 0-based position) pairs.
    ///
    /// Bridge person `j` (1-based) gets `⌈budget · j^-ε⌉` ratings, handed out
    /// community by community with at most `⌈budget / communities⌉` per
    /// community. Within a community each bridge takes the next unused
    /// artifacts, so bridge people share no artifact with each other.
    pub fn bridge_assignments(&self) -> Result<Vec<Vec<(usize, usize)>>> {
        let eps = self.epsilon()?;
        let share = self.bridge_budget.div_ceil(self.communities);
        let mut cursor = vec![0usize; self.communities];
        let mut out = Vec::with_capacity(self.bridge_people);
        for j in 1..=self.bridge_people {
            let mut remaining = power_law_count(self.bridge_budget, j, eps);
            let mut assigned = Vec::with_capacity(remaining);
            for (c, next) in cursor.iter_mut().enumerate() {
                let take = share.min(remaining);
                if *next + take > self.artifacts_per_community {
                    return Err(Error::InvalidConfig(
                        "bridge budgets exceed the artifact pool".into(),
                    ));
                }
                assigned.extend((*next..*next + take).map(|pos| (c, pos)));
                *next += take;
                remaining -= take;
            }
            out.push(assigned);
        }
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        if self.communities == 0
            || self.people_per_community == 0
            || self.artifacts_per_community == 0
        {
            return Err(Error::InvalidConfig(
                "community sizes must be positive".into(),
            ));
        }
        if self.min_ratings == 0 || self.min_ratings > self.artifacts_per_community {
            return Err(Error::InfeasibleCalibration {
                max: self.artifacts_per_community,
                min: self.min_ratings,
            });
        }
        Ok(())
    }
}

/// Three (by default) disjoint power-law rating communities plus bridge people.
///
/// In community `c` the person of rank `b` (1-based) rates the first
/// `⌈A · b^-ε⌉` of the community's `A` artifacts.
pub fn generate_three_community(cfg: &ThreeCommunityConfig) -> Result<BipartiteRatingGraph> {
    cfg.validate()?;
    let eps = cfg.epsilon()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut value = || -> i64 {
        match cfg.rating_values {
            RatingValues::Midpoint => i64::from(cfg.scale.midpoint().0),
            RatingValues::Uniform => i64::from(rng.gen_range(cfg.scale.min..=cfg.scale.max)),
        }
    };
    let mut builder = GraphBuilder::new(cfg.scale);
    for c in 0..cfg.communities {
        for pos in 0..cfg.artifacts_per_community {
            builder.add_artifact(cfg.artifact_id(c, pos));
        }
        for b in 1..=cfg.people_per_community {
            let count = power_law_count(cfg.artifacts_per_community, b, eps);
            for pos in 0..count {
                builder.add_rating(cfg.person_id(c, b), cfg.artifact_id(c, pos), value())?;
            }
        }
    }
    for (j, assigned) in cfg.bridge_assignments()?.into_iter().enumerate() {
        let person = cfg.bridge_id(j + 1);
        builder.add_person(person);
        for (c, pos) in assigned {
            builder.add_rating(person, cfg.artifact_id(c, pos), value())?;
        }
    }
    Ok(builder.build())
}

//! Connectivity, reachability, path-length and clustering statistics.
//!
//! All-pairs quantities are exact: one breadth-first traversal per source,
//! spread across the rayon pool. Per-source results are reduced as integer
//! distance histograms so that the output does not depend on thread count.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jump::RecommenderGraph;
use crate::ratings::{ArtifactId, PersonId};
use crate::topology::Topology;

/// Hop distances from `source`; `None` for unreachable vertices.
pub fn bfs_distances<T: Topology + ?Sized>(g: &T, source: usize) -> Vec<Option<u32>> {
    multi_source_bfs(g, std::iter::once(source))
}

/// Distance from each vertex to the nearest of `sources`.
pub fn multi_source_bfs<T: Topology + ?Sized>(
    g: &T,
    sources: impl IntoIterator<Item = usize>,
) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap() + 1;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if dist[w].is_none() {
                dist[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub component_count: usize,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    /// Component index per vertex; indices are dense and numbered in order of
    /// each component's smallest vertex.
    pub membership: Vec<usize>,
}

impl ComponentSummary {
    pub fn non_singleton_count(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 1).count()
    }

    pub fn largest_size(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    /// Index of the largest component; ties go to the lower index.
    pub fn largest_component(&self) -> Option<usize> {
        let mut counts = vec![0usize; self.component_count];
        for &c in &self.membership {
            counts[c] += 1;
        }
        let mut best: Option<usize> = None;
        for (c, &n) in counts.iter().enumerate() {
            if best.is_none_or(|b| n > counts[b]) {
                best = Some(c);
            }
        }
        best
    }

    fn component_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.component_count];
        for &c in &self.membership {
            counts[c] += 1;
        }
        counts
    }
}

pub fn connected_components<T: Topology + ?Sized>(g: &T) -> ComponentSummary {
    let n = g.node_count();
    let mut membership = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for root in 0..n {
        if membership[root] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        membership[root] = c;
        stack.push(root);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in g.neighbors(v) {
                let w = w as usize;
                if membership[w] == usize::MAX {
                    membership[w] = c;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let component_count = sizes.len();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ComponentSummary {
        component_count,
        sizes,
        membership,
    }
}

/// Who the reachable fractions are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReachScope {
    /// Coverage of the largest connected component.
    #[default]
    LargestComponent,
    /// Average over every person of the coverage of that person's component.
    PerSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachabilityOptions {
    pub scope: ReachScope,
    /// An artifact counts as reachable when at least this many members of the
    /// component rated it. With 2, every reachable artifact has a rating that
    /// can be masked and still predicted from within the component.
    pub min_raters: usize,
}

impl Default for ReachabilityOptions {
    fn default() -> Self {
        ReachabilityOptions {
            scope: ReachScope::LargestComponent,
            min_raters: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachableFractions {
    pub people: f64,
    pub artifacts: f64,
}

pub fn reachable_fractions(
    r: &RecommenderGraph<'_>,
    options: ReachabilityOptions,
) -> ReachableFractions {
    let social = r.social();
    let g = r.ratings();
    let n = social.node_count();
    if n == 0 || g.artifact_count() == 0 {
        return ReachableFractions {
            people: 0.0,
            artifacts: 0.0,
        };
    }
    let comps = connected_components(social);
    let sizes = comps.component_sizes();
    // raters per (component, artifact), only for the components we need
    let covered = |c: usize| -> usize {
        let mut raters = vec![0usize; g.artifact_count()];
        for si in (0..n).filter(|&si| comps.membership[si] == c) {
            for &(a, _) in g.ratings_of_index(r.rating_index_of_social(si)) {
                raters[a as usize] += 1;
            }
        }
        raters
            .iter()
            .filter(|&&k| k >= options.min_raters.max(1))
            .count()
    };
    let artifacts = g.artifact_count() as f64;
    match options.scope {
        ReachScope::LargestComponent => {
            let c = comps.largest_component().unwrap();
            ReachableFractions {
                people: sizes[c] as f64 / n as f64,
                artifacts: covered(c) as f64 / artifacts,
            }
        }
        ReachScope::PerSource => {
            let per_component: Vec<usize> = (0..comps.component_count)
                .into_par_iter()
                .map(covered)
                .collect();
            let (mut people, mut arts) = (0.0, 0.0);
            for &c in &comps.membership {
                people += sizes[c] as f64 / n as f64;
                arts += per_component[c] as f64 / artifacts;
            }
            ReachableFractions {
                people: people / n as f64,
                artifacts: arts / n as f64,
            }
        }
    }
}

/// Number of person-to-person hammock jumps needed to reach a rater of the
/// target artifact; `None` when no rater is reachable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathLengthResult {
    pub hops: Option<u32>,
}

impl PathLengthResult {
    pub fn reachable(&self) -> bool {
        self.hops.is_some()
    }
}

pub fn shortest_hammock_path(
    r: &RecommenderGraph<'_>,
    from: PersonId,
    to: ArtifactId,
) -> Result<PathLengthResult> {
    let g = r.ratings();
    let gi = g.person_index(from).ok_or(Error::UnknownPerson(from))?;
    let si = r
        .social_index_of_rating(gi)
        .ok_or(Error::UnknownPerson(from))?;
    let ai = g.artifact_index(to).ok_or(Error::UnknownArtifact(to))?;
    let raters = g.raters_of_index(ai);
    if raters
        .binary_search_by_key(&(gi as u32), |&(p, _)| p)
        .is_ok()
    {
        return Err(Error::SelfRatingQuery {
            person: from,
            artifact: to,
        });
    }
    let social = r.social();
    let mut is_rater = vec![false; social.node_count()];
    for &(p, _) in raters {
        if let Some(s) = r.social_index_of_rating(p as usize) {
            is_rater[s] = true;
        }
    }
    // BFS with early exit at the first rater discovered
    let mut dist = vec![u32::MAX; social.node_count()];
    dist[si] = 0;
    let mut queue = VecDeque::from([si]);
    while let Some(v) = queue.pop_front() {
        for &w in social.neighbors(v) {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                if is_rater[w] {
                    return Ok(PathLengthResult {
                        hops: Some(dist[w]),
                    });
                }
                queue.push_back(w);
            }
        }
    }
    Ok(PathLengthResult { hops: None })
}

/// How disconnected vertex pairs enter an average path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathLengthMode {
    /// Mean over connected, distinct pairs; unreachable pairs are ignored.
    #[default]
    ConnectedPairs,
    /// Mean over pairs inside the largest component.
    LargestComponent,
    /// Harmonic mean over all distinct pairs, unreachable pairs contributing
    /// zero inverse distance. Never increases when edges are added.
    Harmonic,
}

/// Counts of ordered vertex pairs by hop distance (index = distance, index 0 unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceHistogram {
    counts: Vec<u64>,
    nodes: usize,
}

impl DistanceHistogram {
    pub fn connected_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> Option<f64> {
        let pairs = self.connected_pairs();
        (pairs > 0).then(|| {
            let total: u64 = self
                .counts
                .iter()
                .enumerate()
                .map(|(d, &c)| d as u64 * c)
                .sum();
            total as f64 / pairs as f64
        })
    }

    pub fn harmonic_mean(&self) -> Option<f64> {
        let inverse: f64 = self
            .counts
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, &c)| c as f64 / d as f64)
            .sum();
        let all = self.nodes as f64 * (self.nodes as f64 - 1.0);
        (inverse > 0.0).then(|| all / inverse)
    }
}

fn distance_histogram<T: Topology + ?Sized>(g: &T, sources: &[usize]) -> DistanceHistogram {
    let n = g.node_count();
    let counts = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new(), Vec::new()),
            |(dist, queue, seen), &s| {
                let mut hist: Vec<u64> = Vec::new();
                dist[s] = 0;
                seen.push(s);
                queue.push_back(s);
                while let Some(v) = queue.pop_front() {
                    let d = dist[v] + 1;
                    for &w in g.neighbors(v) {
                        let w = w as usize;
                        if dist[w] == u32::MAX {
                            dist[w] = d;
                            seen.push(w);
                            queue.push_back(w);
                            if hist.len() <= d as usize {
                                hist.resize(d as usize + 1, 0);
                            }
                            hist[d as usize] += 1;
                        }
                    }
                }
                for &v in seen.iter() {
                    dist[v] = u32::MAX;
                }
                seen.clear();
                hist
            },
        )
        .reduce(Vec::new, |mut a, b| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    DistanceHistogram { counts, nodes: n }
}

/// Histogram over all ordered pairs of distinct, connected vertices.
pub fn all_pairs_distances<T: Topology + ?Sized>(g: &T) -> DistanceHistogram {
    let sources: Vec<usize> = (0..g.node_count()).collect();
    distance_histogram(g, &sources)
}

pub fn path_length<T: Topology + ?Sized>(g: &T, mode: PathLengthMode) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let value = match mode {
        PathLengthMode::ConnectedPairs => all_pairs_distances(g).mean(),
        PathLengthMode::Harmonic => all_pairs_distances(g).harmonic_mean(),
        PathLengthMode::LargestComponent => {
            let comps = connected_components(g);
            let c = comps.largest_component().unwrap();
            let members: Vec<usize> = (0..g.node_count())
                .filter(|&v| comps.membership[v] == c)
                .collect();
            distance_histogram(g, &members).mean()
        }
    };
    value.ok_or(Error::NoEdges)
}

/// Mean shortest-path length over connected, distinct vertex pairs.
pub fn average_path_length<T: Topology + ?Sized>(g: &T) -> Result<f64> {
    path_length(g, PathLengthMode::ConnectedPairs)
}

/// Local clustering of each vertex; 0 for degree below 2.
pub fn local_clustering<T: Topology + ?Sized>(g: &T) -> Vec<f64> {
    let n = g.node_count();
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![false; n],
            |mark, v| {
                let nv = g.neighbors(v);
                let k = nv.len();
                if k < 2 {
                    return 0.0;
                }
                for &u in nv {
                    mark[u as usize] = true;
                }
                let mut links = 0usize;
                for &u in nv {
                    links += g
                        .neighbors(u as usize)
                        .iter()
                        .filter(|&&w| mark[w as usize])
                        .count();
                }
                for &u in nv {
                    mark[u as usize] = false;
                }
                // each neighbor link was seen from both ends
                (links / 2) as f64 / (k * (k - 1) / 2) as f64
            },
        )
        .collect()
}

/// Vertex-averaged clustering coefficient, low-degree vertices counted as 0.
pub fn clustering_coefficient<T: Topology + ?Sized>(g: &T) -> f64 {
    let local = local_clustering(g);
    if local.is_empty() {
        return 0.0;
    }
    local.iter().sum::<f64>() / local.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStatistics {
    pub average_path_length: f64,
    pub clustering_coefficient: f64,
}

pub fn graph_statistics<T: Topology + ?Sized>(g: &T) -> Result<GraphStatistics> {
    Ok(GraphStatistics {
        average_path_length: average_path_length(g)?,
        clustering_coefficient: clustering_coefficient(g),
    })
}

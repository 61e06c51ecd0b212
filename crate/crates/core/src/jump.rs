//! Skip and hammock jumps: inducing people-only social networks from rating
//! data, the recommender graph built on top of them, and tie detection
//! (triads as strong ties, bridges as weak ties).

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ratings::{ArtifactId, BipartiteRatingGraph, PersonId};
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    Skip,
    Hammock,
}

/// A jump connecting two people who co-rated at least `width` artifacts.
/// A skip is the width-one hammock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JumpSpec {
    width: u32,
}

impl JumpSpec {
    pub fn skip() -> Self {
        JumpSpec { width: 1 }
    }

    pub fn hammock(width: u32) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        Ok(JumpSpec { width })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn kind(&self) -> JumpKind {
        if self.width == 1 {
            JumpKind::Skip
        } else {
            JumpKind::Hammock
        }
    }
}

/// Co-rating counts for every pair of people sharing at least one artifact.
///
/// Rows are symmetric and indexed by the rating graph's dense person index.
#[derive(Debug, Clone)]
pub struct CooccurrenceCounts {
    people: Vec<PersonId>,
    rows: Vec<Vec<(u32, u32)>>,
}

/// Counts co-rated artifacts for all person pairs by accumulating the rater
/// pairs of each artifact. Pairs with no common artifact are omitted.
pub fn cooccurrence_counts(g: &BipartiteRatingGraph) -> CooccurrenceCounts {
    let n = g.person_count();
    let rows = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::new()),
            |(scratch, touched), u| {
                for &(a, _) in g.ratings_of_index(u) {
                    for &(v, _) in g.raters_of_index(a as usize) {
                        let v = v as usize;
                        if v == u {
                            continue;
                        }
                        if scratch[v] == 0 {
                            touched.push(v as u32);
                        }
                        scratch[v] += 1;
                    }
                }
                touched.sort_unstable();
                let row: Vec<(u32, u32)> = touched
                    .iter()
                    .map(|&v| (v, std::mem::take(&mut scratch[v as usize])))
                    .collect();
                touched.clear();
                row
            },
        )
        .collect();
    CooccurrenceCounts {
        people: g.people().to_vec(),
        rows,
    }
}

impl CooccurrenceCounts {
    pub fn people(&self) -> &[PersonId] {
        &self.people
    }

    /// `(other index, common count)` pairs for the person at dense index `u`.
    pub fn row(&self, u: usize) -> &[(u32, u32)] {
        &self.rows[u]
    }

    pub fn get_index(&self, u: usize, v: usize) -> u32 {
        let row = &self.rows[u];
        row.binary_search_by_key(&(v as u32), |&(w, _)| w)
            .map(|i| row[i].1)
            .unwrap_or(0)
    }

    pub fn get(&self, a: PersonId, b: PersonId) -> u32 {
        match (self.people.binary_search(&a), self.people.binary_search(&b)) {
            (Ok(u), Ok(v)) => self.get_index(u, v),
            _ => 0,
        }
    }

    /// Every pair `(a, b, count)` with `a < b`, sorted.
    pub fn pairs(&self) -> Vec<(PersonId, PersonId, u32)> {
        let mut out = Vec::new();
        for (u, row) in self.rows.iter().enumerate() {
            for &(v, c) in row.iter().filter(|&&(v, _)| v as usize > u) {
                out.push((self.people[u], self.people[v as usize], c));
            }
        }
        out
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_count(&self) -> u32 {
        self.rows
            .iter()
            .flatten()
            .map(|&(_, c)| c)
            .max()
            .unwrap_or(0)
    }

    /// Social network keeping the pairs whose count reaches the jump width.
    pub fn induce(&self, jump: JumpSpec) -> SocialNetworkGraph {
        let w = jump.width();
        let (adj, counts) = self
            .rows
            .iter()
            .map(|row| row.iter().filter(|&&(_, c)| c >= w).copied().unzip())
            .unzip();
        SocialNetworkGraph::from_parts(self.people.clone(), adj, counts, w)
    }
}

/// People-only graph; an edge joins two people whose co-rating count reached
/// the inducing width. Isolated people are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialNetworkGraph {
    people: Vec<PersonId>,
    index: HashMap<PersonId, u32>,
    adj: Vec<Vec<u32>>,
    counts: Vec<Vec<u32>>,
    width: u32,
}

impl SocialNetworkGraph {
    fn from_parts(
        people: Vec<PersonId>,
        adj: Vec<Vec<u32>>,
        counts: Vec<Vec<u32>>,
        width: u32,
    ) -> Self {
        let index = people
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        SocialNetworkGraph {
            people,
            index,
            adj,
            counts,
            width,
        }
    }

    /// Builds a network directly from weighted edges, e.g. for fixtures.
    /// `width` is recorded as the smallest edge count (1 for an edgeless graph).
    pub fn from_edges(
        people: impl IntoIterator<Item = PersonId>,
        edges: impl IntoIterator<Item = (PersonId, PersonId, u32)>,
    ) -> Result<Self> {
        let mut people: Vec<PersonId> = people.into_iter().collect();
        people.sort_unstable();
        people.dedup();
        let index: HashMap<PersonId, u32> = people
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let mut rows: Vec<Vec<(u32, u32)>> = vec![Vec::new(); people.len()];
        let mut width = u32::MAX;
        for (a, b, c) in edges {
            if a == b {
                return Err(Error::InvalidConfig(format!("self-loop on person {a}")));
            }
            let u = *index.get(&a).ok_or(Error::UnknownPerson(a))?;
            let v = *index.get(&b).ok_or(Error::UnknownPerson(b))?;
            rows[u as usize].push((v, c));
            rows[v as usize].push((u, c));
            width = width.min(c);
        }
        let mut adj = Vec::with_capacity(rows.len());
        let mut counts = Vec::with_capacity(rows.len());
        for mut row in rows {
            row.sort_unstable();
            row.dedup_by_key(|&mut (v, _)| v);
            let (a, c): (Vec<u32>, Vec<u32>) = row.into_iter().unzip();
            adj.push(a);
            counts.push(c);
        }
        Ok(SocialNetworkGraph::from_parts(
            people,
            adj,
            counts,
            if width == u32::MAX { 1 } else { width.max(1) },
        ))
    }

    pub fn people(&self) -> &[PersonId] {
        &self.people
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn index_of(&self, person: PersonId) -> Option<usize> {
        self.index.get(&person).map(|&i| i as usize)
    }

    /// Common-rating count on the edge `(u, v)`, by dense index.
    pub fn count_index(&self, u: usize, v: usize) -> Option<u32> {
        self.adj[u]
            .binary_search(&(v as u32))
            .ok()
            .map(|i| self.counts[u][i])
    }

    pub fn common_count(&self, a: PersonId, b: PersonId) -> Option<u32> {
        self.count_index(self.index_of(a)?, self.index_of(b)?)
    }

    /// Edges `(a, b, common_count)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(PersonId, PersonId, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, row) in self.adj.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v as usize > u {
                    out.push((self.people[u], self.people[v as usize], self.counts[u][k]));
                }
            }
        }
        out
    }

    /// `person_a<TAB>person_b<TAB>common_count`, `a < b`, sorted.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (a, b, c) in self.edges() {
            writeln!(out, "{a}\t{b}\t{c}")?;
        }
        Ok(())
    }
}

impl Topology for SocialNetworkGraph {
    fn node_count(&self) -> usize {
        self.people.len()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }
}

pub fn induce_social_network(g: &BipartiteRatingGraph, jump: JumpSpec) -> SocialNetworkGraph {
    cooccurrence_counts(g).induce(jump)
}

/// Social network plus the rating edges from people to artifacts.
///
/// Person-person edges are traversed in both directions; every person has an
/// outgoing edge to each artifact it rated.
#[derive(Debug, Clone)]
pub struct RecommenderGraph<'g> {
    social: SocialNetworkGraph,
    ratings: &'g BipartiteRatingGraph,
    // social index -> rating-graph person index
    to_rating_index: Vec<u32>,
    // rating-graph person index -> social index
    to_social_index: Vec<Option<u32>>,
}

pub fn build_recommender_graph(
    s: SocialNetworkGraph,
    g: &BipartiteRatingGraph,
) -> Result<RecommenderGraph<'_>> {
    let mut to_rating_index = Vec::with_capacity(s.people.len());
    let mut to_social_index = vec![None; g.person_count()];
    for (si, &p) in s.people.iter().enumerate() {
        let gi = g.person_index(p).ok_or(Error::MismatchedGraphs(p))?;
        to_rating_index.push(gi as u32);
        to_social_index[gi] = Some(si as u32);
    }
    Ok(RecommenderGraph {
        social: s,
        ratings: g,
        to_rating_index,
        to_social_index,
    })
}

impl<'g> RecommenderGraph<'g> {
    pub fn social(&self) -> &SocialNetworkGraph {
        &self.social
    }

    pub fn ratings(&self) -> &'g BipartiteRatingGraph {
        self.ratings
    }

    pub(crate) fn rating_index_of_social(&self, si: usize) -> usize {
        self.to_rating_index[si] as usize
    }

    pub(crate) fn social_index_of_rating(&self, gi: usize) -> Option<usize> {
        self.to_social_index[gi].map(|s| s as usize)
    }

    /// Artifacts reachable from `person` along person-person edges followed by
    /// one rating edge, including the person's own ratings. Sorted.
    pub fn reachable_artifacts(&self, person: PersonId) -> Result<Vec<ArtifactId>> {
        let start = self
            .social
            .index_of(person)
            .ok_or(Error::UnknownPerson(person))?;
        let dist = crate::metrics::bfs_distances(&self.social, start);
        let mut seen = vec![false; self.ratings.artifact_count()];
        for (si, d) in dist.iter().enumerate() {
            if d.is_some() {
                for &(a, _) in self
                    .ratings
                    .ratings_of_index(self.rating_index_of_social(si))
                {
                    seen[a as usize] = true;
                }
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(a, _)| self.ratings.artifacts()[a])
            .collect())
    }
}

/// Triangles as ascending index triples, sorted.
pub fn triangles<T: Topology>(g: &T) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for u in 0..g.node_count() {
        let nu = g.neighbors(u);
        for &v in nu.iter().filter(|&&v| v as usize > u) {
            let nv = g.neighbors(v as usize);
            // sorted intersection restricted to w > v
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if nu[i] > v {
                            out.push([u, v as usize, nu[i] as usize]);
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    out
}

/// Bridge edges `(u, v)`, `u < v`, sorted; iterative lowpoint DFS.
pub fn bridge_edges<T: Topology>(g: &T) -> Vec<(usize, usize)> {
    const UNSEEN: u32 = u32::MAX;
    let n = g.node_count();
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut next = 0u32;
    let mut out = Vec::new();
    // (vertex, parent, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if order[root] != UNSEEN {
            continue;
        }
        order[root] = next;
        low[root] = next;
        next += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&(v, parent, pos)) = stack.last() {
            let nbrs = g.neighbors(v);
            if pos < nbrs.len() {
                stack.last_mut().unwrap().2 += 1;
                let w = nbrs[pos] as usize;
                if w == parent {
                    continue;
                }
                if order[w] == UNSEEN {
                    order[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > order[parent] {
                        out.push((parent.min(v), parent.max(v)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Strong ties (triads) and weak ties (bridges) of a social network.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TieReport {
    pub triads: Vec<[PersonId; 3]>,
    pub bridges: Vec<(PersonId, PersonId)>,
}

pub fn find_triads(s: &SocialNetworkGraph) -> Vec<[PersonId; 3]> {
    triangles(s)
        .into_iter()
        .map(|t| t.map(|i| s.people[i]))
        .collect()
}

pub fn find_bridges(s: &SocialNetworkGraph) -> Vec<(PersonId, PersonId)> {
    bridge_edges(s)
        .into_iter()
        .map(|(u, v)| (s.people[u], s.people[v]))
        .collect()
}

pub fn tie_report(s: &SocialNetworkGraph) -> TieReport {
    TieReport {
        triads: find_triads(s),
        bridges: find_bridges(s),
    }
}

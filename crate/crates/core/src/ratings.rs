//! Bipartite people/artifact rating graph, file ingestion and degree statistics.
//!
//! Identifiers are taken verbatim from the input files; nothing is re-indexed.
//! Internally every person and artifact also gets a dense index (its rank in
//! ascending ID order) which the graph algorithms use for array-backed state.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArtifactId(pub u32);

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArtifactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatingValue(pub u8);

impl RatingValue {
    pub fn get(self) -> u8 {
        self.0
    }
}

/// Inclusive bounds of the rating scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatingScale {
    pub min: u8,
    pub max: u8,
}

impl Default for RatingScale {
    fn default() -> Self {
        RatingScale { min: 1, max: 5 }
    }
}

impl RatingScale {
    pub fn new(min: u8, max: u8) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidScale { min, max });
        }
        Ok(RatingScale { min, max })
    }

    pub fn validate(&self, value: i64) -> Result<RatingValue> {
        if value < i64::from(self.min) || value > i64::from(self.max) {
            return Err(Error::RatingOutOfScale {
                value,
                min: self.min,
                max: self.max,
            });
        }
        Ok(RatingValue(value as u8))
    }

    /// Middle of the scale, rounded down (3 on a 1..=5 scale).
    pub fn midpoint(&self) -> RatingValue {
        RatingValue(((u16::from(self.min) + u16::from(self.max)) / 2) as u8)
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(f64::from(self.min), f64::from(self.max))
    }
}

/// Line formats accepted by [`load_ratings`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatingFormat {
    /// `person<TAB>artifact<TAB>rating<TAB>timestamp`; the timestamp is discarded.
    MovieLens,
    /// `person<TAB>artifact<TAB>rating`, optionally preceded by one header line.
    GenericTsv { header: bool },
}

/// People, artifacts and the ratings joining them.
///
/// Immutable once built; use [`GraphBuilder`] or [`BipartiteRatingGraph::add_person`]
/// to obtain new graphs.
#[derive(Debug, Clone)]
pub struct BipartiteRatingGraph {
    scale: RatingScale,
    people: Vec<PersonId>,
    artifacts: Vec<ArtifactId>,
    person_index: HashMap<PersonId, u32>,
    artifact_index: HashMap<ArtifactId, u32>,
    // (artifact index, value), ascending by artifact index
    by_person: Vec<Vec<(u32, RatingValue)>>,
    // (person index, value), ascending by person index
    by_artifact: Vec<Vec<(u32, RatingValue)>>,
    rating_count: usize,
}

#[derive(Debug, Clone)]
pub struct GraphBuilder {
    scale: RatingScale,
    people: BTreeSet<PersonId>,
    artifacts: BTreeSet<ArtifactId>,
    ratings: BTreeMap<(PersonId, ArtifactId), RatingValue>,
}

impl GraphBuilder {
    pub fn new(scale: RatingScale) -> Self {
        GraphBuilder {
            scale,
            people: BTreeSet::new(),
            artifacts: BTreeSet::new(),
            ratings: BTreeMap::new(),
        }
    }

    pub fn add_person(&mut self, person: PersonId) -> &mut Self {
        self.people.insert(person);
        self
    }

    pub fn add_artifact(&mut self, artifact: ArtifactId) -> &mut Self {
        self.artifacts.insert(artifact);
        self
    }

    /// Adds a rating, registering both endpoints. Duplicate pairs are rejected.
    pub fn add_rating(
        &mut self,
        person: PersonId,
        artifact: ArtifactId,
        value: i64,
    ) -> Result<&mut Self> {
        let value = self.scale.validate(value)?;
        if self.ratings.insert((person, artifact), value).is_some() {
            return Err(Error::DuplicateRating { person, artifact });
        }
        self.people.insert(person);
        self.artifacts.insert(artifact);
        Ok(self)
    }

    pub fn build(self) -> BipartiteRatingGraph {
        let people: Vec<PersonId> = self.people.into_iter().collect();
        let artifacts: Vec<ArtifactId> = self.artifacts.into_iter().collect();
        let person_index: HashMap<PersonId, u32> = people
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let artifact_index: HashMap<ArtifactId, u32> = artifacts
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i as u32))
            .collect();
        let mut by_person = vec![Vec::new(); people.len()];
        let mut by_artifact = vec![Vec::new(); artifacts.len()];
        // BTreeMap iteration is (person, artifact)-ordered, so both lists come out sorted.
        for (&(p, a), &v) in &self.ratings {
            let pi = person_index[&p];
            let ai = artifact_index[&a];
            by_person[pi as usize].push((ai, v));
            by_artifact[ai as usize].push((pi, v));
        }
        BipartiteRatingGraph {
            scale: self.scale,
            people,
            artifacts,
            person_index,
            artifact_index,
            by_person,
            by_artifact,
            rating_count: self.ratings.len(),
        }
    }
}

impl BipartiteRatingGraph {
    pub fn empty(scale: RatingScale) -> Self {
        GraphBuilder::new(scale).build()
    }

    /// Builds a graph from `(person, artifact, value)` triples.
    pub fn from_ratings<I>(scale: RatingScale, ratings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, i64)>,
    {
        let mut builder = GraphBuilder::new(scale);
        for (p, a, v) in ratings {
            builder.add_rating(PersonId(p), ArtifactId(a), v)?;
        }
        Ok(builder.build())
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    /// People in ascending ID order; position is the person's dense index.
    pub fn people(&self) -> &[PersonId] {
        &self.people
    }

    pub fn artifacts(&self) -> &[ArtifactId] {
        &self.artifacts
    }

    pub fn person_count(&self) -> usize {
        self.people.len()
    }

    pub fn artifact_count(&self) -> usize {
        self.artifacts.len()
    }

    pub fn rating_count(&self) -> usize {
        self.rating_count
    }

    pub fn person_index(&self, person: PersonId) -> Option<usize> {
        self.person_index.get(&person).map(|&i| i as usize)
    }

    pub fn artifact_index(&self, artifact: ArtifactId) -> Option<usize> {
        self.artifact_index.get(&artifact).map(|&i| i as usize)
    }

    pub fn contains_person(&self, person: PersonId) -> bool {
        self.person_index.contains_key(&person)
    }

    pub fn contains_artifact(&self, artifact: ArtifactId) -> bool {
        self.artifact_index.contains_key(&artifact)
    }

    /// Ratings of the person at dense index `person`, as (artifact index, value).
    pub fn ratings_of_index(&self, person: usize) -> &[(u32, RatingValue)] {
        &self.by_person[person]
    }

    /// Raters of the artifact at dense index `artifact`, as (person index, value).
    pub fn raters_of_index(&self, artifact: usize) -> &[(u32, RatingValue)] {
        &self.by_artifact[artifact]
    }

    pub fn artifacts_of(&self, person: PersonId) -> Result<Vec<(ArtifactId, RatingValue)>> {
        let pi = self
            .person_index(person)
            .ok_or(Error::UnknownPerson(person))?;
        Ok(self.by_person[pi]
            .iter()
            .map(|&(ai, v)| (self.artifacts[ai as usize], v))
            .collect())
    }

    pub fn raters_of(&self, artifact: ArtifactId) -> Result<Vec<(PersonId, RatingValue)>> {
        let ai = self
            .artifact_index(artifact)
            .ok_or(Error::UnknownArtifact(artifact))?;
        Ok(self.by_artifact[ai]
            .iter()
            .map(|&(pi, v)| (self.people[pi as usize], v))
            .collect())
    }

    pub fn rating(&self, person: PersonId, artifact: ArtifactId) -> Option<RatingValue> {
        let pi = self.person_index(person)?;
        let ai = self.artifact_index(artifact)? as u32;
        let row = &self.by_person[pi];
        row.binary_search_by_key(&ai, |&(a, _)| a)
            .ok()
            .map(|i| row[i].1)
    }

    pub(crate) fn rating_by_index(&self, person: usize, artifact: usize) -> Option<RatingValue> {
        let row = &self.by_person[person];
        row.binary_search_by_key(&(artifact as u32), |&(a, _)| a)
            .ok()
            .map(|i| row[i].1)
    }

    /// Number of people who rated `artifact`.
    pub fn artifact_rating_count(&self, artifact: ArtifactId) -> Result<usize> {
        let ai = self
            .artifact_index(artifact)
            .ok_or(Error::UnknownArtifact(artifact))?;
        Ok(self.by_artifact[ai].len())
    }

    /// All ratings in (person, artifact) order.
    pub fn iter_ratings(&self) -> impl Iterator<Item = (PersonId, ArtifactId, RatingValue)> + '_ {
        self.by_person
            .iter()
            .enumerate()
            .flat_map(move |(pi, row)| {
                row.iter()
                    .map(move |&(ai, v)| (self.people[pi], self.artifacts[ai as usize], v))
            })
    }

    fn to_builder(&self) -> GraphBuilder {
        let mut builder = GraphBuilder::new(self.scale);
        builder.people.extend(self.people.iter().copied());
        builder.artifacts.extend(self.artifacts.iter().copied());
        builder
            .ratings
            .extend(self.iter_ratings().map(|(p, a, v)| ((p, a), v)));
        builder
    }

    /// Returns a new graph with `person` and its ratings added; `self` is untouched.
    pub fn add_person(
        &self,
        person: PersonId,
        ratings: &[(ArtifactId, RatingValue)],
    ) -> Result<Self> {
        if self.contains_person(person) {
            return Err(Error::DuplicatePerson(person));
        }
        let mut builder = self.to_builder();
        builder.add_person(person);
        for &(artifact, value) in ratings {
            if !self.contains_artifact(artifact) {
                return Err(Error::UnknownArtifact(artifact));
            }
            builder.add_rating(person, artifact, i64::from(value.0))?;
        }
        Ok(builder.build())
    }

    /// Returns a new graph without the single rating `(person, artifact)`.
    /// Both endpoints stay in the graph.
    pub fn without_rating(&self, person: PersonId, artifact: ArtifactId) -> Result<Self> {
        let mut builder = self.to_builder();
        if builder.ratings.remove(&(person, artifact)).is_none() {
            if !self.contains_person(person) {
                return Err(Error::UnknownPerson(person));
            }
            return Err(Error::UnknownArtifact(artifact));
        }
        Ok(builder.build())
    }

    /// Writes `person<TAB>artifact<TAB>rating` rows sorted by (person, artifact).
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (p, a, v) in self.iter_ratings() {
            writeln!(out, "{}\t{}\t{}", p, a, v.0)?;
        }
        Ok(())
    }
}

fn parse_id(field: &str, what: &str) -> Result<u32> {
    let id: u32 = field
        .trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("{what} id {field:?} is not a positive integer")))?;
    if id == 0 {
        return Err(Error::Malformed(format!("{what} id must be at least 1")));
    }
    Ok(id)
}

fn parse_line(line: &str, format: RatingFormat) -> Result<(u32, u32, i64)> {
    let fields: Vec<&str> = line.split('\t').collect();
    let expected = match format {
        RatingFormat::MovieLens => 4,
        RatingFormat::GenericTsv { .. } => 3,
    };
    if fields.len() != expected {
        return Err(Error::Malformed(format!(
            "expected {expected} tab-separated fields, found {}",
            fields.len()
        )));
    }
    let person = parse_id(fields[0], "person")?;
    let artifact = parse_id(fields[1], "artifact")?;
    let value: i64 = fields[2]
        .trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("rating {:?} is not an integer", fields[2])))?;
    if format == RatingFormat::MovieLens && fields[3].trim().parse::<i64>().is_err() {
        return Err(Error::Malformed(format!(
            "timestamp {:?} is not an integer",
            fields[3]
        )));
    }
    Ok((person, artifact, value))
}

/// Parses ratings from any reader. Blank lines are skipped; errors carry 1-based line numbers.
pub fn parse_ratings<R: BufRead>(
    reader: R,
    format: RatingFormat,
    scale: RatingScale,
) -> Result<BipartiteRatingGraph> {
    let mut builder = GraphBuilder::new(scale);
    let skip_header = matches!(format, RatingFormat::GenericTsv { header: true });
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Malformed(e.to_string()).at_line(lineno))?;
        let line = line.trim_end_matches('\r');
        if (skip_header && i == 0) || line.trim().is_empty() {
            continue;
        }
        let (p, a, v) = parse_line(line, format).map_err(|e| e.at_line(lineno))?;
        builder
            .add_rating(PersonId(p), ArtifactId(a), v)
            .map_err(|e| e.at_line(lineno))?;
    }
    Ok(builder.build())
}

pub fn load_ratings(
    path: &Path,
    format: RatingFormat,
    scale: RatingScale,
) -> Result<BipartiteRatingGraph> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ratings(BufReader::new(file), format, scale)
}

/// Degree counts on both sides of the rating graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeSummary {
    pub person_degrees: BTreeMap<PersonId, usize>,
    pub artifact_degrees: BTreeMap<ArtifactId, usize>,
    /// person degree -> number of people with that degree
    pub person_histogram: BTreeMap<usize, usize>,
    /// artifact degree -> number of artifacts with that degree
    pub artifact_histogram: BTreeMap<usize, usize>,
}

impl DegreeSummary {
    pub fn min_person_degree(&self) -> Option<usize> {
        self.person_histogram.keys().next().copied()
    }

    pub fn max_artifact_degree(&self) -> Option<usize> {
        self.artifact_histogram.keys().next_back().copied()
    }
}

pub fn degree_stats(g: &BipartiteRatingGraph) -> DegreeSummary {
    let mut summary = DegreeSummary::default();
    for (pi, row) in g.by_person.iter().enumerate() {
        summary.person_degrees.insert(g.people[pi], row.len());
        *summary.person_histogram.entry(row.len()).or_default() += 1;
    }
    for (ai, col) in g.by_artifact.iter().enumerate() {
        summary.artifact_degrees.insert(g.artifacts[ai], col.len());
        *summary.artifact_histogram.entry(col.len()).or_default() += 1;
    }
    summary
}

/// Artifact titles from a MovieLens `u.item`-style file (`id|title|...`).
#[derive(Debug, Clone, Default)]
pub struct ArtifactTitles {
    titles: BTreeMap<ArtifactId, String>,
}

// "Star Wars (1977)" -> "Star Wars"
fn strip_year(title: &str) -> &str {
    let t = title.trim_end();
    if let Some(open) = t.rfind(" (") {
        let inner = &t[open + 2..];
        if let Some(year) = inner.strip_suffix(')') {
            if year.len() == 4 && year.bytes().all(|b| b.is_ascii_digit()) {
                return &t[..open];
            }
        }
    }
    t
}

impl ArtifactTitles {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        // u.item is Latin-1; every byte maps to the code point of the same value.
        let text: String = bytes.iter().map(|&b| b as char).collect();
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut titles = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('|');
            let id = fields
                .next()
                .ok_or_else(|| Error::Malformed("missing id".into()).at_line(i + 1))
                .and_then(|f| parse_id(f, "artifact").map_err(|e| e.at_line(i + 1)))?;
            let title = fields
                .next()
                .ok_or_else(|| Error::Malformed("missing title".into()).at_line(i + 1))?;
            titles.insert(ArtifactId(id), title.to_string());
        }
        Ok(ArtifactTitles { titles })
    }

    pub fn title(&self, artifact: ArtifactId) -> Option<&str> {
        self.titles.get(&artifact).map(String::as_str)
    }

    /// Finds an artifact by name. An exact match on the title (with or without its
    /// trailing release year) wins; otherwise a unique title starting with
    /// `"{name} ("` is accepted, so "Scream of Stone" finds
    /// "Scream of Stone (Schrei aus Stein) (1991)".
    pub fn find(&self, name: &str) -> Option<ArtifactId> {
        let name = name.trim();
        let exact = self
            .titles
            .iter()
            .find(|(_, t)| t.trim() == name || strip_year(t) == name);
        if let Some((&id, _)) = exact {
            return Some(id);
        }
        let prefix = format!("{name} (");
        let mut hits = self.titles.iter().filter(|(_, t)| t.starts_with(&prefix));
        match (hits.next(), hits.next()) {
            (Some((&id, _)), None) => Some(id),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.titles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.titles.is_empty()
    }
}

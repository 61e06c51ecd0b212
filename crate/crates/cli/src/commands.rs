use std::io::BufRead;

use hammock_core::generators::{
    generate_three_community, RatingValues, ThreeCommunityConfig, WattsStrogatzConfig,
};
use hammock_core::jump::{find_bridges, find_triads};
use hammock_core::metrics::{
    clustering_coefficient, connected_components, path_length, reachable_fractions, ReachScope,
};
use hammock_core::personalization::{
    incremental_benefit_experiment, p_risk_sweep, width_risk_sweep, BenefitExperimentConfig,
};
use hammock_core::predictor::{
    bucket_summary, leave_one_out, spearman, width_quantile_bins, LooMode, LooOptions,
    PathBucketConfig, PathSelection, WidthMeasure,
};
use hammock_core::ratings::degree_stats;
use hammock_core::{
    build_recommender_graph, cooccurrence_counts, load_ratings, ArtifactId, ArtifactTitles,
    BipartiteRatingGraph, Error, JumpSpec, PathLengthMode, PersonId, RatingFormat, RatingScale,
    ReachabilityOptions, SocialNetworkGraph, Topology,
};
use rayon::prelude::*;

use crate::args::*;
use crate::output::{CliError, CliResult, Outputs};
use crate::parse;

pub fn run(command: &Command) -> CliResult<Outputs> {
    let mut out = Outputs::default();
    match command {
        Command::Ingest(a) => ingest(a, &mut out)?,
        Command::Stats(a) => stats(a, &mut out)?,
        Command::Induce(a) => induce(a, &mut out)?,
        Command::SweepWidth(a) => sweep_width(a, &mut out)?,
        Command::SweepP(a) => sweep_p(a, &mut out)?,
        Command::RiskWidth(a) => risk_width(a, &mut out)?,
        Command::BenefitExperiment(a) => benefit(a, &mut out)?,
        Command::PredictLoo(a) => predict_loo(a, &mut out)?,
        Command::Generate(GenerateCommand::Ws(a)) => generate_ws(a, &mut out)?,
        Command::Generate(GenerateCommand::ThreeCommunity(a)) => three_community(a, &mut out)?,
    }
    Ok(out)
}

fn load(input: &InputArgs) -> CliResult<BipartiteRatingGraph> {
    if !input.input.exists() {
        return Err(CliError::MissingInput(input.input.clone()));
    }
    let (min, max) = parse::scale(&input.scale)?;
    let scale = RatingScale::new(min, max)?;
    let format = match input.format {
        FormatArg::Movielens => RatingFormat::MovieLens,
        FormatArg::Tsv => RatingFormat::GenericTsv {
            header: input.header,
        },
        FormatArg::Auto => detect_format(input)?,
    };
    Ok(load_ratings(&input.input, format, scale)?)
}

fn detect_format(input: &InputArgs) -> CliResult<RatingFormat> {
    let file = std::fs::File::open(&input.input).map_err(|e| Error::Io {
        path: input.input.clone(),
        source: e,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut lines = reader.lines();
    if input.header {
        lines.next();
    }
    for line in lines {
        let line = line.map_err(|e| CliError::BadInput(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        return Ok(match line.split('\t').count() {
            4 => RatingFormat::MovieLens,
            _ => RatingFormat::GenericTsv {
                header: input.header,
            },
        });
    }
    Ok(RatingFormat::GenericTsv {
        header: input.header,
    })
}

fn reach_options(r: &ReachArgs) -> ReachabilityOptions {
    ReachabilityOptions {
        scope: match r.reach_scope {
            ReachScopeArg::Largest => ReachScope::LargestComponent,
            ReachScopeArg::PerSource => ReachScope::PerSource,
        },
        min_raters: r.min_raters,
    }
}

fn length_mode(m: LengthModeArg) -> PathLengthMode {
    match m {
        LengthModeArg::Connected => PathLengthMode::ConnectedPairs,
        LengthModeArg::Largest => PathLengthMode::LargestComponent,
        LengthModeArg::Harmonic => PathLengthMode::Harmonic,
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn tsv<F>(write: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(buf)
}

fn ingest(a: &IngestArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let titles = match &a.items {
        Some(p) => Some(ArtifactTitles::load(p)?),
        None => None,
    };
    out.add("ratings.tsv", tsv(|w| g.write_tsv(w))?);
    let degrees = degree_stats(&g);
    out.csv(
        "artifacts.csv",
        &["artifact", "rating_count", "title"],
        degrees.artifact_degrees.iter().map(|(&id, &count)| {
            let title = titles
                .as_ref()
                .and_then(|t| t.title(id))
                .unwrap_or("")
                .to_string();
            vec![id.to_string(), count.to_string(), title]
        }),
    )?;
    out.result("people", g.person_count());
    out.result("artifacts", g.artifact_count());
    out.result("ratings", g.rating_count());
    Ok(())
}

struct WidthRow {
    w: u32,
    components: usize,
    people: f64,
    artifacts: f64,
    length: Option<f64>,
    clustering: f64,
}

impl WidthRow {
    fn cells(&self) -> Vec<String> {
        vec![
            self.w.to_string(),
            self.components.to_string(),
            num(self.people),
            num(self.artifacts),
            self.length.map(num).unwrap_or_default(),
            num(self.clustering),
        ]
    }
}

const WIDTH_HEADER: [&str; 6] = [
    "w",
    "component_count",
    "people_fraction",
    "artifact_fraction",
    "L",
    "C",
];

fn width_row(
    g: &BipartiteRatingGraph,
    s: SocialNetworkGraph,
    reach: ReachabilityOptions,
    mode: PathLengthMode,
) -> CliResult<WidthRow> {
    let w = s.width();
    let components = connected_components(&s).component_count;
    let clustering = clustering_coefficient(&s);
    let length = match path_length(&s, mode) {
        Ok(l) => Some(l),
        Err(Error::NoEdges) => None,
        Err(e) => return Err(e.into()),
    };
    let r = build_recommender_graph(s, g)?;
    let f = reachable_fractions(&r, reach);
    Ok(WidthRow {
        w,
        components,
        people: f.people,
        artifacts: f.artifacts,
        length,
        clustering,
    })
}

fn stats(a: &StatsArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let jump = parse::jump(&a.w)?;
    let s = cooccurrence_counts(&g).induce(jump);
    let row = width_row(&g, s, reach_options(&a.reach), length_mode(a.length_mode))?;
    out.csv("stats.csv", &WIDTH_HEADER, [row.cells()])
}

fn induce(a: &InduceArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let s = cooccurrence_counts(&g).induce(parse::jump(&a.w)?);
    out.add("social.tsv", tsv(|w| s.write_tsv(w))?);
    let triads = find_triads(&s);
    let bridges = find_bridges(&s);
    let rows = triads
        .iter()
        .map(|t| {
            vec![
                "triad".to_string(),
                t[0].to_string(),
                t[1].to_string(),
                t[2].to_string(),
            ]
        })
        .chain(bridges.iter().map(|(x, y)| {
            vec![
                "bridge".to_string(),
                x.to_string(),
                y.to_string(),
                String::new(),
            ]
        }));
    out.csv(
        "ties.csv",
        &["kind", "person_a", "person_b", "person_c"],
        rows,
    )?;
    out.result("edges", s.edge_count());
    out.result("triads", triads.len());
    out.result("bridges", bridges.len());
    Ok(())
}

fn sweep_width(a: &SweepWidthArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let widths = parse::int_range(&a.w)?;
    if widths.contains(&0) {
        return Err(Error::ZeroWidth.into());
    }
    let counts = cooccurrence_counts(&g);
    let reach = reach_options(&a.reach);
    let mode = length_mode(a.length_mode);
    let rows: Vec<WidthRow> = widths
        .par_iter()
        .map(|&w| width_row(&g, counts.induce(JumpSpec::hammock(w)?), reach, mode))
        .collect::<CliResult<_>>()?;
    let max_connected = rows.iter().filter(|r| r.components == 1).map(|r| r.w).max();
    out.csv(
        "sweep_width.csv",
        &WIDTH_HEADER,
        rows.iter().map(WidthRow::cells),
    )?;
    out.result("max_connected_width", max_connected);
    Ok(())
}

fn sweep_p(a: &SweepPArgs, out: &mut Outputs) -> CliResult<()> {
    let grid = parse::p_grid(&a.p)?;
    let sweep = p_risk_sweep(a.n, a.k, &grid, a.trials, a.run.seed)?;
    out.csv(
        "sweep_p.csv",
        &["p", "L_scaled", "C_scaled", "risk"],
        sweep.points.iter().map(|p| {
            vec![
                num(p.p),
                num(p.length_scaled),
                num(p.clustering_scaled),
                num(p.risk),
            ]
        }),
    )?;
    out.result("baseline_length", sweep.baseline_length);
    out.result("baseline_clustering", sweep.baseline_clustering);
    out.result("peak_p", sweep.risk_curve().peak().map(|s| s.parameter));
    Ok(())
}

fn risk_width(a: &RiskWidthArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let mut widths = parse::int_range(&a.w)?;
    widths.reverse();
    let sweep = width_risk_sweep(
        &cooccurrence_counts(&g),
        &widths,
        a.baseline,
        length_mode(a.length_mode),
    )?;
    out.csv(
        "risk_width.csv",
        &["w", "scaled_length", "risk", "component_count"],
        sweep
            .curve
            .samples
            .iter()
            .zip(&sweep.component_counts)
            .map(|(s, c)| {
                vec![
                    (s.parameter as u32).to_string(),
                    num(s.scaled_length),
                    num(s.risk),
                    c.to_string(),
                ]
            }),
    )?;
    out.result("peak_w", sweep.curve.peak().map(|s| s.parameter as u32));
    out.result(
        "first_connected_w",
        sweep
            .first_connected_index()
            .map(|i| sweep.curve.samples[i].parameter as u32),
    );
    Ok(())
}

fn benefit(a: &BenefitArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let targets: Vec<ArtifactId> = match (&a.titles, &a.items) {
        (Some(names), Some(items)) => {
            let titles = ArtifactTitles::load(items)?;
            names
                .split(';')
                .map(|n| {
                    titles.find(n).ok_or_else(|| {
                        CliError::InvalidConfig(format!("no unique title matches `{}`", n.trim()))
                    })
                })
                .collect::<CliResult<_>>()?
        }
        _ => parse::id_list(&a.targets)?
            .into_iter()
            .map(ArtifactId)
            .collect(),
    };
    let cfg = BenefitExperimentConfig {
        targets,
        max_ratings: a.max_ratings,
        repetitions: a.repetitions,
        widths: parse::int_range(&a.widths)?,
        seed: a.run.seed,
        bin_width: a.bin_width,
        exclude_targets: !a.include_targets,
    };
    let m = incremental_benefit_experiment(&g, &cooccurrence_counts(&g), &cfg)?;
    let count_header = format!("achievable_count_of_{}", cfg.repetitions);
    out.csv(
        "benefit.csv",
        &["target", "ratings_added", "benefit_bin", &count_header],
        m.cells()
            .into_iter()
            .map(|(t, k, b, c)| vec![t.to_string(), k.to_string(), num(b), c.to_string()]),
    )?;
    let mut rows = Vec::new();
    let mut fully_nested = 0;
    for rep in 0..m.repetitions() {
        let mut all = true;
        for t in 1..cfg.targets.len() {
            let nested = m.is_nested(rep, t - 1, t);
            all &= nested;
            rows.push(vec![
                rep.to_string(),
                cfg.targets[t - 1].to_string(),
                cfg.targets[t].to_string(),
                nested.to_string(),
            ]);
        }
        fully_nested += usize::from(all);
    }
    out.csv(
        "nesting.csv",
        &["repetition", "outer", "inner", "nested"],
        rows,
    )?;
    out.result("fully_nested_repetitions", fully_nested);
    Ok(())
}

fn predict_loo(a: &LooArgs, out: &mut Outputs) -> CliResult<()> {
    let g = load(&a.input)?;
    let mode = match a.mode {
        LooModeArg::Width => LooMode::ByWidth,
        LooModeArg::Path => LooMode::ByPathBucket(PathBucketConfig {
            min_width: a.min_width,
            measure: match a.measure {
                MeasureArg::Common => WidthMeasure::CommonRatings,
                MeasureArg::Agreement => WidthMeasure::AgreementScalar,
            },
            selection: match a.selection {
                SelectionArg::Nearest => PathSelection::Nearest,
                SelectionArg::EveryLength => PathSelection::EveryLength,
            },
        }),
    };
    let options = LooOptions {
        mode,
        sample: (!a.all).then_some(a.sample),
        seed: a.run.seed,
    };
    let records = leave_one_out(&g, options)?;
    let opt = |x: Option<u32>| x.map(|v| v.to_string()).unwrap_or_default();
    out.csv(
        "loo.csv",
        &[
            "person",
            "artifact",
            "actual",
            "predicted",
            "abs_error",
            "width",
            "bucket",
            "skipped_reason",
        ],
        records.iter().map(|r| {
            vec![
                r.person.to_string(),
                r.artifact.to_string(),
                r.actual.0.to_string(),
                r.predicted.map(num).unwrap_or_default(),
                r.abs_error().map(num).unwrap_or_default(),
                opt(r.width),
                opt(r.bucket),
                r.skipped.map(|s| s.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    out.result("records", records.len());
    out.result(
        "skipped",
        records.iter().filter(|r| r.skipped.is_some()).count(),
    );
    match a.mode {
        LooModeArg::Width => {
            let bins = width_quantile_bins(&records, a.bins);
            out.csv(
                "loo_summary.csv",
                &["bin", "mean_width", "mean_abs_error", "count"],
                bins.iter().enumerate().map(|(i, b)| {
                    vec![
                        (i + 1).to_string(),
                        num(b.mean_width),
                        num(b.mean_abs_error),
                        b.count.to_string(),
                    ]
                }),
            )?;
            let x: Vec<f64> = bins.iter().map(|b| b.mean_width).collect();
            let y: Vec<f64> = bins.iter().map(|b| b.mean_abs_error).collect();
            let rho = spearman(&x, &y);
            out.result("spearman", rho.is_finite().then_some(rho));
            out.result(
                "zero_width",
                records.iter().filter(|r| r.width == Some(0)).count(),
            );
        }
        LooModeArg::Path => {
            out.csv(
                "loo_summary.csv",
                &["bucket", "mean_abs_error", "count"],
                bucket_summary(&records).iter().map(|b| {
                    vec![
                        b.bucket.to_string(),
                        num(b.mean_abs_error),
                        b.count.to_string(),
                    ]
                }),
            )?;
        }
    }
    Ok(())
}

fn generate_ws(a: &WsArgs, out: &mut Outputs) -> CliResult<()> {
    let cfg = WattsStrogatzConfig {
        n: a.n,
        k: a.k,
        p: a.p,
        seed: a.run.seed,
    };
    let graph = cfg.generate()?;
    // written in the social network format, vertex v as person v + 1, each edge counting 1
    let people = (1..=a.n as u32).map(PersonId);
    let edges = graph
        .edges()
        .into_iter()
        .map(|(u, v)| (PersonId(u as u32 + 1), PersonId(v as u32 + 1), 1));
    let s = SocialNetworkGraph::from_edges(people, edges)?;
    out.add(a.out.clone(), tsv(|w| s.write_tsv(w))?);
    out.result("edges", graph.edge_count());
    Ok(())
}

fn three_community(a: &ThreeCommunityArgs, out: &mut Outputs) -> CliResult<()> {
    let epsilon = match a.epsilon.as_str() {
        "auto" => None,
        e => Some(
            e.parse::<f64>()
                .map_err(|_| CliError::InvalidConfig(format!("cannot parse epsilon `{e}`")))?,
        ),
    };
    let cfg = ThreeCommunityConfig {
        communities: a.communities,
        people_per_community: a.people,
        artifacts_per_community: a.artifacts,
        min_ratings: a.min_ratings,
        epsilon,
        bridge_people: a.bridges,
        bridge_budget: a.bridge_budget,
        scale: RatingScale::default(),
        rating_values: match a.values {
            ValuesArg::Midpoint => RatingValues::Midpoint,
            ValuesArg::Uniform => RatingValues::Uniform,
        },
        seed: a.run.seed,
    };
    let g = generate_three_community(&cfg)?;
    out.add(a.out.clone(), tsv(|w| g.write_tsv(w))?);
    out.result("epsilon", cfg.epsilon()?);
    out.result("people", g.person_count());
    out.result("ratings", g.rating_count());
    Ok(())
}

//! Seeded Monte Carlo experiments.
//!
//! Trials run on the ambient rayon pool. Each trial owns its stream and the
//! per-size tallies are integer histograms, so reports do not depend on the
//! number of threads.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{ClassCounts, GraphStats, ProcessStats, SizeRow, SummaryReport};
use super::stats::Z99;
use crate::bounds::{entropy_beta, graph_rate, wigner_rate};
use crate::ensembles::{GraphRule, MatrixKind, SizedScheme};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::seed::SeedSource;
use crate::xlinalg::{classify_rows, classify_singular, rank, ExactMatrix, Normality};

/// Runs whichever experiment the config names.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SummaryReport> {
    match config.kind {
        ExperimentKind::Ginibre | ExperimentKind::Wigner => mc_singularity(config),
        ExperimentKind::RankProcess => run_rank_process(config),
        ExperimentKind::Graph => graph_experiment(config),
    }
}

fn histogram(counts: &[u64]) -> BTreeMap<usize, u64> {
    counts.iter().enumerate().filter(|(_, c)| **c > 0).map(|(d, c)| (d, *c)).collect()
}

fn add_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn kappa_f64(sized: &SizedScheme) -> f64 {
    to_f64(&sized.kappa())
}

/// `C_KR / ((1−κ)·√(β n))` with `β` from the entropy search at `α = 1/2`.
fn ginibre_bound(kappa: f64, n: usize, c_kr: f64) -> Option<f64> {
    let beta = entropy_beta(0.5, kappa).ok()?;
    Some(c_kr / ((1.0 - kappa) * (beta * n as f64).sqrt()))
}

#[derive(Clone)]
struct Tally {
    deficiency: Vec<u64>,
    classes: ClassCounts,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally { deficiency: vec![0; n + 1], classes: ClassCounts::default() }
    }

    fn merge(mut self, other: Tally) -> Tally {
        add_into(&mut self.deficiency, &other.deficiency);
        let (a, b) = (&mut self.classes, other.classes);
        a.normal += b.normal;
        a.abnormal += b.abnormal;
        a.perfect += b.perfect;
        a.imperfect += b.imperfect;
        a.unclassified += b.unclassified;
        self
    }
}

fn classify_into(m: &ExactMatrix, r: usize, epsilon: f64, classes: &mut ClassCounts) {
    if r < m.rows() {
        match classify_singular(m, epsilon) {
            Ok(c) if c.class == Normality::Normal => classes.normal += 1,
            Ok(_) => classes.abnormal += 1,
            Err(_) => classes.unclassified += 1,
        }
    } else {
        match classify_rows(m, epsilon) {
            Ok(c) if c.perfect => classes.perfect += 1,
            Ok(_) => classes.imperfect += 1,
            Err(_) => classes.unclassified += 1,
        }
    }
}

/// Frequency of `rank < n` for Ginibre or Wigner draws at every grid size.
pub fn mc_singularity(config: &ExperimentConfig) -> Result<SummaryReport> {
    config.validate()?;
    let kind = config.kind.matrix_kind().ok_or_else(|| {
        Error::Config(format!("singularity runs need kind ginibre or wigner, got {}", config.kind.name()))
    })?;
    let seed = SeedSource::new(config.seed);
    let tag = config.experiment_tag();
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let sized = config.scheme.at_size(n)?;
        let tally = (0..config.trials)
            .into_par_iter()
            .fold(
                || Tally::new(n),
                |mut t, trial| {
                    let mut rng = seed.trial_stream(tag, n, trial);
                    let m = sized.sample(kind, &mut rng);
                    let r = rank(&m);
                    t.deficiency[n - r] += 1;
                    if config.classify {
                        classify_into(&m, r, config.epsilon, &mut t.classes);
                    }
                    t
                },
            )
            .reduce(|| Tally::new(n), Tally::merge);
        let kappa = kappa_f64(&sized);
        let bound = match kind {
            MatrixKind::Ginibre => ginibre_bound(kappa, n, config.c_kr),
            MatrixKind::Wigner => wigner_rate(kappa, n, config.epsilon).ok().map(|w| w.f_value),
        };
        let mut row = SizeRow::from_deficiencies(n, histogram(&tally.deficiency), bound);
        if config.classify {
            row.classes = Some(tally.classes);
        }
        rows.push(row);
    }
    Ok(SummaryReport::new(config.clone(), rows))
}

#[derive(Clone)]
struct ProcessTally {
    /// `deficiency[n-1][d]`
    deficiency: Vec<Vec<u64>>,
    increments: Vec<[u64; 3]>,
}

impl ProcessTally {
    fn new(n_max: usize) -> Self {
        ProcessTally {
            deficiency: (1..=n_max).map(|n| vec![0; n + 1]).collect(),
            increments: vec![[0; 3]; n_max],
        }
    }

    fn merge(mut self, other: ProcessTally) -> ProcessTally {
        for (a, b) in self.deficiency.iter_mut().zip(&other.deficiency) {
            add_into(a, b);
        }
        for (a, b) in self.increments.iter_mut().zip(&other.increments) {
            add_into(a, b);
        }
        self
    }
}

/// Mean and 99% normal interval of `X = growth^d` on `d > 0`, `0` otherwise.
fn process_stats(counts: &[u64], growth: f64, increments: [u64; 3]) -> ProcessStats {
    let trials: u64 = counts.iter().sum();
    let t = trials as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for (d, &c) in counts.iter().enumerate().skip(1) {
        let x = growth.powi(d as i32);
        s1 += c as f64 * x;
        s2 += c as f64 * x * x;
    }
    let mean = s1 / t;
    let ci99 = if trials > 1 {
        let var = ((s2 - t * mean * mean) / (t - 1.0)).max(0.0);
        let half = Z99 * (var / t).sqrt();
        (mean - half, mean + half)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    ProcessStats { mean, ci99, increments }
}

/// Largest `κ_n` over `1 ≤ n ≤ n_max`.
pub fn process_kappa(config: &ExperimentConfig, n_max: usize) -> Result<f64> {
    let mut kappa = 0.0f64;
    for n in 1..=n_max {
        kappa = kappa.max(to_f64(&config.scheme.kappa_n(n)?));
    }
    Ok(kappa)
}

/// Grows `W_1 → W_{n_max}` per trial and tracks the rank deficiency, the
/// process `X_n` and the rank increments.
pub fn run_rank_process(config: &ExperimentConfig) -> Result<SummaryReport> {
    config.validate()?;
    if !config.scheme.is_symmetric() {
        return Err(Error::Config("the rank process needs a symmetric scheme".into()));
    }
    let n_max = *config.n_grid.last().expect("validated");
    let sizes: Vec<SizedScheme> = (1..=n_max).map(|n| config.scheme.at_size(n)).collect::<Result<_>>()?;
    let kappa = process_kappa(config, n_max)?;
    let growth = kappa.powf(-0.125);
    let seed = SeedSource::new(config.seed);
    let tag = config.experiment_tag();
    let tally = (0..config.trials)
        .into_par_iter()
        .fold(
            || ProcessTally::new(n_max),
            |mut t, trial| {
                let mut rng = seed.trial_stream(tag, n_max, trial);
                let mut w = sizes[0].sample_wigner(&mut rng);
                let mut prev = 0;
                for n in 1..=n_max {
                    if n > 1 {
                        w = sizes[n - 1].grow(&w, &mut rng).expect("sizes agree");
                    }
                    let r = rank(&w);
                    t.deficiency[n - 1][n - r] += 1;
                    t.increments[n - 1][r - prev] += 1;
                    prev = r;
                }
                t
            },
        )
        .reduce(|| ProcessTally::new(n_max), ProcessTally::merge);
    let rows = config
        .n_grid
        .iter()
        .map(|&n| {
            let counts = &tally.deficiency[n - 1];
            let bound = wigner_rate(kappa, n, config.epsilon).ok().map(|w| w.f_value);
            let mut row = SizeRow::from_deficiencies(n, histogram(counts), bound);
            row.process = Some(process_stats(counts, growth, tally.increments[n - 1]));
            row
        })
        .collect();
    Ok(SummaryReport::new(config.clone(), rows))
}

#[derive(Clone)]
struct GraphTally {
    deficiency: Vec<u64>,
    isolated: Vec<u64>,
    violations: u64,
}

impl GraphTally {
    fn new(n: usize) -> Self {
        GraphTally { deficiency: vec![0; n + 1], isolated: vec![0; n + 1], violations: 0 }
    }

    fn merge(mut self, other: GraphTally) -> GraphTally {
        add_into(&mut self.deficiency, &other.deficiency);
        add_into(&mut self.isolated, &other.isolated);
        self.violations += other.violations;
        self
    }
}

fn isolated_vertices(a: &ExactMatrix) -> usize {
    (0..a.rows()).filter(|&i| a.row(i).iter().all(Zero::is_zero)).count()
}

/// Rank deficiency and isolated vertices of random-graph adjacency matrices.
pub fn graph_experiment(config: &ExperimentConfig) -> Result<SummaryReport> {
    config.validate()?;
    let rule = config
        .graph_rule()
        .ok_or_else(|| Error::Config("graph experiments need a scheme of kind \"graph\"".into()))?;
    let log_params = match rule {
        GraphRule::Homogeneous(r) => r.log_power_params(),
        GraphRule::Table { .. } => None,
    };
    let seed = SeedSource::new(config.seed);
    let tag = config.experiment_tag();
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let sized = config.scheme.at_size(n)?;
        let tally = (0..config.trials)
            .into_par_iter()
            .fold(
                || GraphTally::new(n),
                |mut t, trial| {
                    let mut rng = seed.trial_stream(tag, n, trial);
                    let a = sized.sample_wigner_offdiag(&mut rng);
                    let r = rank(&a);
                    let iso = isolated_vertices(&a);
                    t.deficiency[n - r] += 1;
                    t.isolated[iso] += 1;
                    if iso > 0 && r == n {
                        t.violations += 1;
                    }
                    t
                },
            )
            .reduce(|| GraphTally::new(n), GraphTally::merge);
        let bound = match log_params {
            Some((c, beta)) if n >= 2 => Some(graph_rate(c, beta, config.epsilon, n)?),
            _ => None,
        };
        let mut row = SizeRow::from_deficiencies(n, histogram(&tally.deficiency), bound);
        row.graph = Some(GraphStats { isolated: histogram(&tally.isolated), zero_row_violations: tally.violations });
        rows.push(row);
    }
    Ok(SummaryReport::new(config.clone(), rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DiscreteDist;
    use crate::ensembles::{EntryScheme, PRule};
    use crate::exact::{int, ratio};
    use crate::oracle::{enumerate_singularity, exact_rank_process};

    fn bern_half() -> EntryScheme {
        EntryScheme::iid(DiscreteDist::bernoulli(ratio(1, 2)).unwrap())
    }

    #[test]
    fn point_mass_always_singular() {
        let cfg = ExperimentConfig::new(
            ExperimentKind::Ginibre,
            EntryScheme::iid(DiscreteDist::point(int(1))),
            vec![2, 3, 5],
            50,
            1,
        );
        let rep = mc_singularity(&cfg).unwrap();
        for r in &rep.rows {
            assert_eq!(r.p_hat, 1.0);
            assert_eq!(r.mean_deficiency, (r.n - 1) as f64);
        }
    }

    #[test]
    fn small_ginibre_matches_oracle() {
        let cfg = ExperimentConfig::new(ExperimentKind::Ginibre, bern_half(), vec![2, 3], 20_000, 11);
        let rep = mc_singularity(&cfg).unwrap();
        for r in &rep.rows {
            let exact = to_f64(&enumerate_singularity(&bern_half(), r.n, MatrixKind::Ginibre).unwrap());
            assert!(r.wilson99.0 <= exact && exact <= r.wilson99.1, "n={} {:?} vs {exact}", r.n, r.wilson99);
        }
    }

    #[test]
    fn reruns_are_identical() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Wigner, bern_half(), vec![3, 4], 500, 3);
        cfg.classify = true;
        let a = mc_singularity(&cfg).unwrap();
        let b = mc_singularity(&cfg).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        assert_eq!(a, b);
        let c = a.rows[0].classes.as_ref().unwrap();
        assert_eq!(c.normal + c.abnormal + c.perfect + c.imperfect + c.unclassified, 500);
        assert_eq!(c.normal + c.abnormal + c.unclassified, a.rows[0].singular_count);
    }

    #[test]
    fn rank_process_tracks_oracle() {
        let cfg = ExperimentConfig::new(ExperimentKind::RankProcess, bern_half(), vec![1, 2, 3], 20_000, 5);
        let rep = run_rank_process(&cfg).unwrap();
        let exact = exact_rank_process(&bern_half(), 3, 0.5).unwrap();
        for (r, e) in rep.rows.iter().zip(&exact) {
            let p = r.process.as_ref().unwrap();
            assert!(p.ci99.0 <= e.expectation && e.expectation <= p.ci99.1, "n={} {p:?} vs {}", r.n, e.expectation);
            assert_eq!(p.increments.iter().sum::<u64>(), 20_000);
            assert!(r.bound_value.is_some());
        }
        let cfg = ExperimentConfig::new(ExperimentKind::RankProcess, EntryScheme::iid(DiscreteDist::rademacher()), vec![1], 100, 5);
        let rep = run_rank_process(&cfg).unwrap();
        assert_eq!(rep.rows[0].process.as_ref().unwrap().mean, 0.0);
    }

    #[test]
    fn two_vertex_graph() {
        let scheme = EntryScheme::Graph { rule: GraphRule::Homogeneous(PRule::Fixed { p: ratio(1, 2) }) };
        let cfg = ExperimentConfig::new(ExperimentKind::Graph, scheme, vec![2, 5], 4000, 9);
        let rep = graph_experiment(&cfg).unwrap();
        let r = &rep.rows[0];
        assert!(r.wilson99.0 <= 0.5 && 0.5 <= r.wilson99.1);
        // deficiency is 0 or 2 at n = 2
        assert!(r.deficiency.keys().all(|&d| d == 0 || d == 2));
        for r in &rep.rows {
            let g = r.graph.as_ref().unwrap();
            assert_eq!(g.zero_row_violations, 0);
            let with_iso: u64 = g.isolated.iter().filter(|(k, _)| **k > 0).map(|(_, c)| c).sum();
            assert!(with_iso <= r.singular_count);
        }
    }

    #[test]
    fn complete_graph_has_full_rank() {
        // J − I is invertible for n ≥ 2
        for n in 2..8 {
            let mut a = ExactMatrix::zeros(n, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        a.set(i, j, int(1));
                    }
                }
            }
            assert_eq!(rank(&a), n);
        }
    }

    #[test]
    fn wrong_kind_is_a_config_error() {
        let cfg = ExperimentConfig::new(ExperimentKind::Graph, bern_half(), vec![2], 10, 0);
        assert_eq!(graph_experiment(&cfg).unwrap_err().exit_code(), 2);
        let cfg = ExperimentConfig::new(ExperimentKind::RankProcess, bern_half(), vec![2], 10, 0);
        assert_eq!(mc_singularity(&cfg).unwrap_err().exit_code(), 2);
    }
}

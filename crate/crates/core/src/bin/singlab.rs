use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use singlab::bounds::{self, BoundConstants, BoundInput};
use singlab::dist::DiscreteDist;
use singlab::ensembles::{EntryScheme, MatrixKind};
use singlab::exact::{parse_rational, to_f64, Rational};
use singlab::harness::{
    check_bounds, fit_power_law, read_rate_points, run_experiment, BoundCheckConfig, ExperimentConfig, ExperimentKind,
    SummaryReport,
};
use singlab::oracle::{self, Interval};
use singlab::xlinalg::ExactMatrix;
use singlab::{Error, Result};

#[derive(Parser)]
#[command(name = "singlab", version, about = "Singularity of discrete random matrices: oracles, bounds, Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo singularity frequencies (any experiment kind).
    Mc(RunArgs),
    /// Growth process W_1 -> W_n for a symmetric scheme.
    RankProcess(RunArgs),
    /// Random-graph adjacency experiment.
    Graph(RunArgs),
    /// Exact probabilities by enumeration.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Closed-form bounds.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Fit log p_hat against log n from a results CSV.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Empirical tail probabilities against their bounds.
    CheckBounds {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `output` from the config.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// P(rank < n).
    Singularity {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "ginibre")]
        kind: MatrixKind,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Largest atom of sum alpha_i xi_i.
    Linear {
        /// One law for every variable, or one per variable as a JSON list.
        #[arg(long)]
        dist: String,
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<String>,
    },
    /// Largest atom of sum c_ij xi_i xi_j.
    Quadratic {
        #[arg(long)]
        c: String,
        #[arg(long)]
        dist: String,
    },
    /// P(phi in I)^2 against P(phi(X,Y) in I, phi(X',Y) in I).
    Decoupling {
        #[arg(long)]
        c: String,
        #[arg(long)]
        dist: String,
        #[arg(long, value_delimiter = ',')]
        s1: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        s2: Vec<usize>,
        /// Closed interval endpoints; omit both for the whole line.
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
    },
    /// Law of the rank increment when bordering W.
    Border {
        #[arg(long)]
        w: String,
        #[arg(long)]
        scheme: String,
    },
    /// Exact E[X_n] for n = 1..n_max.
    RankProcess {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// P(first row is zero).
    FirstRowZero {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "ginibre")]
        kind: MatrixKind,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    Kr(ConcArgs),
    Kesten(ConcArgs),
    Linear {
        #[arg(long, value_delimiter = ',')]
        kappa: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        kappa_delta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        c_kr: f64,
    },
    LinearSimplified {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        c_kr: f64,
    },
    QuadraticSimplified {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        c_kr: f64,
    },
    GinibreTail {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    EntropyBeta {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        kappa: f64,
    },
    WignerRate {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    GraphRate {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct ConcArgs {
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    #[arg(long = "L")]
    l: f64,
    /// Q(xi_i; lambda_i)
    #[arg(long, value_delimiter = ',')]
    q: Vec<f64>,
    /// Q(xi_i; L); Kesten only
    #[arg(long, value_delimiter = ',')]
    q_l: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    c_kr: f64,
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn rational_json(r: &Rational) -> Value {
    json!({ "exact": r.to_string(), "approx": to_f64(r) })
}

fn dists_for(text: &str, n: usize) -> Result<Vec<DiscreteDist>> {
    match parse_json::<Vec<DiscreteDist>>("dist", text) {
        Ok(v) if v.len() == n => Ok(v),
        Ok(v) => Err(Error::InvalidArgument(format!("{} laws for {n} variables", v.len()))),
        Err(_) => Ok(vec![parse_json::<DiscreteDist>("dist", text)?; n]),
    }
}

fn symmetric_matrix(text: &str) -> Result<ExactMatrix> {
    ExactMatrix::from_json(&parse_json::<Value>("matrix", text)?, true)
}

fn run_with_csv(args: &RunArgs, kind: Option<ExperimentKind>) -> Result<Value> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(k) = kind {
        if cfg.kind != k {
            return Err(Error::Config(format!("config kind is {}, expected {}", cfg.kind.name(), k.name())));
        }
    }
    if let Some(p) = &args.csv {
        cfg.output = Some(p.clone());
    }
    let report: SummaryReport = run_experiment(&cfg)?;
    if let Some(path) = &cfg.output {
        report.write_csv(std::fs::File::create(path)?)?;
    }
    Ok(serde_json::to_value(&report)?)
}

fn oracle(cmd: OracleCommand) -> Result<Value> {
    Ok(match cmd {
        OracleCommand::Singularity { scheme, n, kind, budget } => {
            let scheme: EntryScheme = parse_json("scheme", &scheme)?;
            let budget = budget.unwrap_or(oracle::DEFAULT_ENUMERATION_BUDGET);
            let p = oracle::enumerate_singularity_with_budget(&scheme, n, kind, budget)?;
            json!({ "n": n, "kind": kind, "singular": rational_json(&p) })
        }
        OracleCommand::Linear { dist, alphas } => {
            let alphas: Vec<Rational> = alphas.iter().map(|a| parse_rational(a)).collect::<Result<_>>()?;
            let dists = dists_for(&dist, alphas.len())?;
            let (p, x) = oracle::exact_linear_concentration(&alphas, &dists)?;
            json!({ "sup_atom": rational_json(&p), "argmax": x.to_string() })
        }
        OracleCommand::Quadratic { c, dist } => {
            let c = symmetric_matrix(&c)?;
            let dists = dists_for(&dist, c.rows())?;
            let (p, x) = oracle::exact_quadratic_concentration(&c, &dists)?;
            json!({ "sup_atom": rational_json(&p), "argmax": x.to_string() })
        }
        OracleCommand::Decoupling { c, dist, s1, s2, lo, hi } => {
            let c = symmetric_matrix(&c)?;
            let dists = dists_for(&dist, c.rows())?;
            let interval = match (lo, hi) {
                (None, None) => Interval::whole(),
                (Some(a), Some(b)) => Interval::closed(parse_rational(&a)?, parse_rational(&b)?),
                _ => return Err(Error::InvalidArgument("give both --lo and --hi or neither".into())),
            };
            let chk = oracle::verify_decoupling(&c, &dists, &s1, &s2, &interval)?;
            json!({
                "lhs": rational_json(&chk.lhs),
                "lhs_sq": rational_json(&chk.lhs_sq),
                "rhs": rational_json(&chk.rhs),
                "holds": chk.holds,
            })
        }
        OracleCommand::Border { w, scheme } => {
            let w = symmetric_matrix(&w)?;
            let scheme: EntryScheme = parse_json("scheme", &scheme)?;
            json!({ "increments": oracle::exact_border_law(&w, &scheme)? })
        }
        OracleCommand::RankProcess { scheme, n_max, kappa } => {
            let scheme: EntryScheme = parse_json("scheme", &scheme)?;
            let kappa = match kappa {
                Some(k) => k,
                None => (1..=n_max)
                    .map(|n| scheme.kappa_n(n).map(|k| to_f64(&k)))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max),
            };
            let values = oracle::exact_rank_process(&scheme, n_max, kappa)?;
            json!({ "kappa": kappa, "values": values })
        }
        OracleCommand::FirstRowZero { scheme, n, kind } => {
            let scheme: EntryScheme = parse_json("scheme", &scheme)?;
            json!({ "n": n, "prob": rational_json(&oracle::first_row_zero_prob(&scheme, n, kind)?) })
        }
    })
}

fn conc_input(a: &ConcArgs) -> BoundInput {
    BoundInput { lambdas: a.lambda.clone(), l: a.l, q_at_lambda: a.q.clone(), q_at_l: a.q_l.clone() }
}

fn bound(cmd: BoundCommand) -> Result<Value> {
    let out = |value: f64, components: Value| json!({ "value": value, "components": components });
    Ok(match cmd {
        BoundCommand::Kr(a) => {
            let c = BoundConstants::new(a.c_kr)?;
            out(bounds::kr_bound(&conc_input(&a), &c)?, json!({ "c_kr": a.c_kr }))
        }
        BoundCommand::Kesten(a) => {
            let c = BoundConstants::new(a.c_kr)?;
            out(
                bounds::kesten_bound(&conc_input(&a), &c)?,
                json!({ "c_kr": a.c_kr, "kesten_factor": c.kesten_factor() }),
            )
        }
        BoundCommand::Linear { kappa, kappa_delta, c_kr } => {
            let c = BoundConstants::new(c_kr)?;
            out(bounds::linear_bound(&kappa, &kappa_delta, &c)?, json!({ "kesten_factor": c.kesten_factor() }))
        }
        BoundCommand::LinearSimplified { kappa, n, c_kr } => {
            out(bounds::linear_bound_simplified(kappa, n, &BoundConstants::new(c_kr)?)?, json!({}))
        }
        BoundCommand::QuadraticSimplified { kappa, n, eps, c_kr } => {
            out(bounds::quadratic_bound_simplified(kappa, n, eps, &BoundConstants::new(c_kr)?)?, json!({}))
        }
        BoundCommand::GinibreTail { kappa, m, k, n } => {
            let (b1, b2, b3) = bounds::ginibre_tail(kappa, m, k, n)?;
            out(b1, json!({ "b1": b1, "b2": b2, "b3": b3 }))
        }
        BoundCommand::EntropyBeta { alpha, kappa } => {
            let beta = bounds::entropy_beta(alpha, kappa)?;
            out(
                beta,
                json!({
                    "g": bounds::entropy_g(beta, kappa),
                    "gamma_kappa": bounds::gamma_kappa(alpha, beta, kappa)?,
                }),
            )
        }
        BoundCommand::WignerRate { kappa, n, eps } => {
            let r = bounds::wigner_rate(kappa, n, eps)?;
            out(r.final_rate, json!({ "f_value": r.f_value, "final_rate": r.final_rate }))
        }
        BoundCommand::GraphRate { c, beta, eps, n } => {
            let p = bounds::graph_edge_probability(c, beta, n)?;
            out(bounds::graph_rate(c, beta, eps, n)?, json!({ "p": p }))
        }
    })
}

fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Mc(a) => run_with_csv(&a, None),
        Command::RankProcess(a) => run_with_csv(&a, Some(ExperimentKind::RankProcess)),
        Command::Graph(a) => run_with_csv(&a, Some(ExperimentKind::Graph)),
        Command::Oracle(c) => oracle(c),
        Command::Bound(c) => bound(c),
        Command::Fit { input } => {
            let points = read_rate_points(std::fs::File::open(&input)?)?;
            Ok(serde_json::to_value(fit_power_law(&points)?)?)
        }
        Command::CheckBounds { config } => {
            let cfg = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
                }
                None => BoundCheckConfig::default(),
            };
            Ok(json!({ "rows": check_bounds(&cfg)? }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("singlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

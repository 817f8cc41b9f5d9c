use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use distsketch_core::apsum::{aps_from_estimates, estimate_aps_metric, pair_sample_size};
use distsketch_core::baseline::{uniform_estimate_w, uniform_median, uniform_sample_size, uniform_subset};
use distsketch_core::estimation::{approx_median, closeness, estimate_all_nodes, estimate_point};
use distsketch_core::hardness::{detect_negative_triangle_via_aps, has_negative_triangle_bruteforce, reduce};
use distsketch_core::io::{self as formats, ReportRow};
use distsketch_core::oracle::exact_w_all;
use distsketch_core::sampling::build_sample;
use distsketch_core::stats::{run_trials, run_trials_on, TrialConfig};
use distsketch_core::{BasePolicy, DistanceSpace, EstimateVector, Graph, Query, SampleSize, WeightedSample};

const DEFAULT_K: f64 = 100.0;
const DEFAULT_PAIR_EPSILON: f64 = 0.1;

/// Distance-sum sketches: closeness centrality, 1-median and all-pairs sums
/// from one weighted sample.
#[derive(Parser)]
#[command(name = "distsketch", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Weighted edge list: `u v w` per line, optional `n m` header.
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "points")]
    graph: Option<PathBuf>,
    /// Point file: CSV coordinates, or `matrix n` followed by n rows.
    #[arg(long, global = true, value_name = "FILE")]
    points: Option<PathBuf>,
    /// RNG seed. Without it a seed is drawn from entropy and echoed to stderr.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample size parameter (pairs count for `aps --method pairs`).
    #[arg(long, global = true)]
    k: Option<f64>,
    /// Target accuracy; sets k when --k is absent.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// With --epsilon: k = ⌈ε⁻²⌉ (per-query) or ⌈ε⁻² ln n⌉ (high-probability).
    #[arg(long, global = true, value_enum, default_value_t = Regime::PerQuery)]
    regime: Regime,
    /// Base set policy: uniform:<b>, wp or relaxed-wp.
    #[arg(long, global = true, default_value = "uniform:2")]
    base: BasePolicy,
    /// Add exact values computed by brute force.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    PerQuery,
    HighProbability,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApsMethod {
    Nodes,
    Pairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MedianMethod {
    Weighted,
    Uniform,
}

#[derive(Subcommand)]
enum Command {
    /// Compute coefficients and draw a weighted sample; writes a sample file.
    Sample {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Estimate W(v) and closeness for every node.
    AllNodes {
        /// Reuse a sample file instead of drawing a new sample.
        #[arg(long, value_name = "FILE")]
        sample: Option<PathBuf>,
    },
    /// Estimate W at one node or at arbitrary coordinates.
    Query {
        #[arg(long, conflicts_with = "at", required_unless_present = "at")]
        node: Option<usize>,
        /// Comma-separated coordinates (Euclidean point files only).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
        #[arg(long, value_name = "FILE")]
        sample: Option<PathBuf>,
    },
    /// Estimate the all-pairs distance sum.
    Aps {
        #[arg(long, value_enum, default_value_t = ApsMethod::Nodes)]
        method: ApsMethod,
    },
    /// Approximate 1-median.
    Median {
        #[arg(long, value_enum, default_value_t = MedianMethod::Weighted)]
        method: MedianMethod,
        /// Failure probability for the uniform method.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Exact W(v) and closeness by brute force.
    Exact,
    /// Reduce negative-triangle detection on a signed edge list to an
    /// all-pairs sum; prints the verdict and the reduced instance.
    ReduceTriangle { file: PathBuf },
    /// Run a Monte-Carlo evaluation from a key = value config file.
    Eval {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<distsketch_core::Error> for Failure {
    fn from(e: distsketch_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

impl GlobalOpts {
    fn space(&self) -> CliResult<DistanceSpace> {
        match (&self.graph, &self.points) {
            (Some(p), None) => Ok(formats::parse_edge_list(&read(p)?)?.into()),
            (None, Some(p)) => Ok(formats::parse_points(&read(p)?)?.into()),
            _ => Err(Failure::Usage("exactly one of --graph or --points is required".into())),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            let seed = rand::random::<u64>();
            eprintln!("seed: {seed}");
            seed
        })
    }

    fn k(&self, n: usize) -> CliResult<f64> {
        let size = match (self.k, self.epsilon) {
            (Some(k), _) => SampleSize::Fixed(k),
            (None, Some(epsilon)) => match self.regime {
                Regime::PerQuery => SampleSize::PerQuery { epsilon },
                Regime::HighProbability => SampleSize::HighProbability { epsilon },
            },
            (None, None) => SampleSize::Fixed(DEFAULT_K),
        };
        size.resolve(n).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn pair_count(&self) -> CliResult<usize> {
        match (self.k, self.epsilon) {
            (Some(k), _) if k >= 1.0 => Ok(k.ceil() as usize),
            (Some(k), _) => Err(Failure::Usage(format!("pair count must be at least 1, got {k}"))),
            (None, eps) => pair_sample_size(eps.unwrap_or(DEFAULT_PAIR_EPSILON))
                .map_err(|e| Failure::Usage(e.to_string())),
        }
    }

    fn sample(&self, space: &DistanceSpace, file: Option<&Path>) -> CliResult<WeightedSample> {
        if let Some(path) = file {
            let sample = formats::parse_sample(&read(path)?)?;
            if sample.n != space.n() {
                return Err(Failure::Data(format!(
                    "sample was drawn from {} elements, input has {}",
                    sample.n,
                    space.n()
                )));
            }
            return Ok(sample);
        }
        let k = self.k(space.n())?;
        Ok(build_sample(space, self.base, k, self.seed())?.1)
    }
}

fn report(method: &str, w: &[f64], exact: Option<&[f64]>) -> String {
    let cc = closeness(&EstimateVector { w_hat: w.to_vec() }).cc;
    let exact_cc = exact.map(|x| closeness(&EstimateVector { w_hat: x.to_vec() }).cc);
    let rows: Vec<ReportRow> = (0..w.len())
        .map(|v| ReportRow {
            v,
            w_hat: w[v],
            cc_hat: cc[v],
            exact: exact.zip(exact_cc.as_ref()).map(|(x, c)| (x[v], c[v])),
        })
        .collect();
    formats::report_csv(method, &rows)
}

fn run(cli: Cli) -> CliResult<String> {
    let opts = &cli.opts;
    let out = match cli.command {
        Command::Sample { out } => {
            let space = opts.space()?;
            let text = formats::serialize_sample(&opts.sample(&space, None)?);
            if let Some(path) = out {
                fs::write(&path, &text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
                String::new()
            } else {
                text
            }
        }
        Command::AllNodes { sample } => {
            let space = opts.space()?;
            let sample = opts.sample(&space, sample.as_deref())?;
            let est = estimate_all_nodes(&space, &sample)?;
            let exact = if opts.verify { Some(exact_w_all(&space)?) } else { None };
            report("weighted", &est.w_hat, exact.as_deref())
        }
        Command::Query { node, at, sample } => {
            let space = opts.space()?;
            let sample = opts.sample(&space, sample.as_deref())?;
            let query = match (&node, &at) {
                (Some(v), _) => Query::Node(*v),
                (None, Some(x)) => Query::Point(x),
                (None, None) => unreachable!("clap requires --node or --at"),
            };
            let w_hat = estimate_point(&space, &sample, query)?;
            let label = match (node, &at) {
                (Some(v), _) => v.to_string(),
                (None, Some(x)) => x.iter().map(f64::to_string).collect::<Vec<_>>().join(" "),
                (None, None) => unreachable!(),
            };
            let mut csv = String::from("query,w_hat,sample_size");
            let mut row = format!("{label},{w_hat},{}", sample.len());
            if opts.verify {
                let exact: f64 = match query {
                    Query::Node(v) => space.single_source(v)?.sum,
                    Query::Point(x) => (0..space.n())
                        .map(|u| space.distance_to_point(x, u))
                        .sum::<distsketch_core::Result<f64>>()?,
                };
                csv.push_str(",w_exact");
                row.push_str(&format!(",{exact}"));
            }
            format!("{csv}\n{row}\n")
        }
        Command::Aps { method } => {
            let space = opts.space()?;
            let seed = opts.seed();
            let (estimate, k) = match method {
                ApsMethod::Nodes => {
                    let k = opts.k(space.n())?;
                    let (_, sample) = build_sample(&space, opts.base, k, seed)?;
                    (aps_from_estimates(&estimate_all_nodes(&space, &sample)?), k)
                }
                ApsMethod::Pairs => {
                    let k = opts.pair_count()?;
                    (estimate_aps_metric(&space, k, seed)?.estimate, k as f64)
                }
            };
            let evals = space.budget().distance_evals;
            let mut csv = format!("aps_estimate,k,distance_evals,seed\n{estimate},{k},{evals},{seed}\n");
            if opts.verify {
                let exact = exact_w_all(&space.fork())?.iter().sum::<f64>() / 2.0;
                csv.push_str(&format!("# aps_exact={exact}\n"));
            }
            csv
        }
        Command::Median { method, delta } => {
            let space = opts.space()?;
            let seed = opts.seed();
            let (name, median, w_hat) = match method {
                MedianMethod::Weighted => {
                    let k = opts.k(space.n())?;
                    let (_, sample) = build_sample(&space, opts.base, k, seed)?;
                    let est = estimate_all_nodes(&space, &sample)?;
                    let m = approx_median(&est)?;
                    ("weighted", m, est.w_hat[m])
                }
                MedianMethod::Uniform => {
                    let epsilon = opts.epsilon.unwrap_or(0.25);
                    let m = uniform_median(&space, epsilon, delta, seed)?;
                    let size = uniform_sample_size(space.n(), epsilon, delta)?;
                    let w = uniform_estimate_w(&space, &uniform_subset(space.n(), size, seed), m)?;
                    ("uniform", m, w)
                }
            };
            let mut csv = String::from("method,median,w_hat");
            let mut row = format!("{name},{median},{w_hat}");
            if opts.verify {
                csv.push_str(",w_exact");
                row.push_str(&format!(",{}", space.single_source(median)?.sum));
            }
            format!("{csv}\n{row}\n")
        }
        Command::Exact => {
            let space = opts.space()?;
            report("exact", &exact_w_all(&space)?, None)
        }
        Command::ReduceTriangle { file } => {
            let g = formats::parse_signed_edge_list(&read(&file)?)?;
            let reduced = reduce(&g);
            let verdict = detect_negative_triangle_via_aps(&g);
            let mut out = format!(
                "# negative_triangle={verdict}\n# aps={} edge_sum={}\n",
                reduced.doubled_aps() as f64 / 2.0,
                reduced.doubled_edge_sum() as f64 / 2.0
            );
            if opts.verify {
                out.push_str(&format!("# brute_force={}\n", has_negative_triangle_bruteforce(&g)));
            }
            let m = reduced.size();
            let edges = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b)));
            let graph = Graph::new(m, edges.map(|(a, b)| (a, b, reduced.length(a, b))))?;
            out.push_str(&formats::serialize_graph(&graph));
            out
        }
        Command::Eval { config } => {
            let mut cfg = TrialConfig::from_key_values(&read(&config)?)?;
            if let Some(seed) = opts.seed {
                cfg.seed = seed;
            }
            let report = if opts.graph.is_some() || opts.points.is_some() {
                run_trials_on(&opts.space()?, &cfg)?
            } else if cfg.instance.is_some() {
                run_trials(&cfg)?
            } else {
                return Err(Failure::Usage("config names no instance and no input file was given".into()));
            };
            let mut out = report.to_csv();
            for line in report.summary().lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
            out
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use graphlim::bslimit::{self, SamplingMode};
use graphlim::config::ExperimentConfig;
use graphlim::embedding::{self, RotationSystem};
use graphlim::error::Error;
use graphlim::experiments::{self, RunOptions, Table};
use graphlim::graph::Graph;
use graphlim::pointsupport::{self, CenterMode, FiniteMetric};
use graphlim::potential::{self, CapacityProblem};
use graphlim::spectral;

#[derive(Parser)]
#[command(name = "graphlim", version, about = "graph limits toolkit: genus, cuts, potentials, rooted-ball sampling")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// experiment config file (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// master seed override
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory for tables and artifacts
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// also emit SVG plots where the experiment defines them
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Necessary,
    Sufficient,
}

#[derive(Subcommand)]
enum Cmd {
    /// Euler genus of a rotation system, or exhaustive minimum genus of a graph
    Genus {
        /// rotation-system text file
        #[arg(long, conflicts_with = "graph")]
        rotation: Option<PathBuf>,
        /// edge-list text file (searches all rotation systems)
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Triangulate every face of a rotation system
    Fill {
        #[arg(long)]
        rotation: PathBuf,
        /// declared valence bound of the input
        #[arg(long, default_value_t = 6)]
        max_valence: usize,
    },
    /// Exact Cheeger constant (<= 24 vertices)
    Cheeger {
        #[arg(long)]
        graph: PathBuf,
    },
    /// p-capacity between vertex sets
    Cap {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        source: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ground: Vec<usize>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Effective resistance between vertex sets
    Resistance {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        source: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ground: Vec<usize>,
    },
    /// Monte-Carlo escape probability from a root to a boundary set
    Escape {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        root: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        boundary: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Total-variation distance between depth-r ball distributions
    Bsdist {
        #[arg(long)]
        graph_a: PathBuf,
        #[arg(long)]
        graph_b: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Count (delta, s)-supported points of a finite metric space
    Supported {
        /// point-cloud text file ("d n" header)
        #[arg(long, conflicts_with = "matrix")]
        points: Option<PathBuf>,
        /// distance-matrix text file
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum, default_value_t = Mode::Necessary)]
        mode: Mode,
    },
    /// Cheeger contrast suite: grids against random regular graphs
    E1,
    /// Recurrence suite: capacity profiles and escape probabilities
    E2,
    /// Supported-point counting suite
    E3,
    /// Triangulation property suite
    E4,
    /// Distributional-limit diagnostics suite
    E5,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::NonConvergence { residual }) => {
            eprintln!("error: failed to converge (residual {residual:e})");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &PathBuf) -> graphlim::Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_graph(path: &PathBuf) -> graphlim::Result<Graph> {
    Graph::from_edge_list_text(&read(path)?)
}

fn print_kv(format: Format, pairs: &[(&str, String)]) {
    match format {
        Format::Csv => {
            for (k, v) in pairs {
                println!("{k},{v}");
            }
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .iter()
                .map(|(k, v)| {
                    let val = v
                        .parse::<f64>()
                        .map(|x| serde_json::json!(x))
                        .unwrap_or_else(|_| serde_json::json!(v));
                    (k.to_string(), val)
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&map).expect("serializes"));
        }
    }
}

fn print_tables(format: Format, tables: &[Table]) {
    for t in tables {
        match format {
            Format::Csv => {
                println!("# {}", t.title);
                print!("{}", t.to_csv());
            }
            Format::Json => println!("{}", t.to_json()),
        }
    }
}

fn run_suite(cli: &Cli, id: &str) -> graphlim::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_json(&read(path)?)?,
        None => ExperimentConfig::default_for(id)?,
    };
    if cfg.experiment != id {
        return Err(Error::InvalidParameter(format!(
            "config is for {:?}, subcommand is {id:?}",
            cfg.experiment
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    let opts = RunOptions { out: cli.out.clone(), plot: cli.plot };
    let tables = experiments::run_experiment(&cfg, &opts)?;
    print_tables(cli.format, &tables);
    Ok(())
}

fn run(cli: Cli) -> graphlim::Result<()> {
    match &cli.cmd {
        Cmd::Genus { rotation, graph } => match (rotation, graph) {
            (Some(path), _) => {
                let rs = RotationSystem::from_text(&read(path)?)?;
                print_kv(cli.format, &[("euler_genus", rs.euler_genus()?.to_string())]);
                Ok(())
            }
            (None, Some(path)) => {
                let g = load_graph(path)?;
                print_kv(cli.format, &[("min_genus", embedding::min_genus_exhaustive(&g)?.to_string())]);
                Ok(())
            }
            (None, None) => {
                Err(Error::InvalidParameter("pass --rotation FILE or --graph FILE".into()))
            }
        },
        Cmd::Fill { rotation, max_valence } => {
            let rs = RotationSystem::from_text(&read(rotation)?)?;
            let filled = embedding::triangulate_fill(&rs, *max_valence)?;
            print!("{}", filled.to_text());
            Ok(())
        }
        Cmd::Cheeger { graph } => {
            let g = load_graph(graph)?;
            let cut = spectral::cheeger_exact(&g)?;
            let witness: Vec<String> = cut.witness.iter().map(|v| v.to_string()).collect();
            print_kv(
                cli.format,
                &[
                    ("h", cut.value.to_string()),
                    ("boundary", cut.boundary.to_string()),
                    ("size", cut.size.to_string()),
                    ("witness", witness.join(" ")),
                ],
            );
            Ok(())
        }
        Cmd::Cap { graph, source, ground, p } => {
            let g = load_graph(graph)?;
            let prob = CapacityProblem::new(g, source.clone(), ground.clone(), *p)?;
            let sol = potential::p_capacity(&prob, 1e-8)?;
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&sol).expect("serializes")),
                Format::Csv => print_kv(
                    cli.format,
                    &[
                        ("capacity", sol.energy.to_string()),
                        ("iterations", sol.iterations.to_string()),
                        ("residual", sol.residual.to_string()),
                    ],
                ),
            }
            Ok(())
        }
        Cmd::Resistance { graph, source, ground } => {
            let g = load_graph(graph)?;
            let r = potential::effective_resistance(&g, source, ground)?;
            print_kv(cli.format, &[("effective_resistance", r.to_string())]);
            Ok(())
        }
        Cmd::Escape { graph, root, boundary, trials } => {
            let g = load_graph(graph)?;
            let seed = cli.seed.unwrap_or(0);
            let (est, se) = potential::escape_probability_mc(&g, *root, boundary, *trials, seed)?;
            print_kv(
                cli.format,
                &[("escape_probability", est.to_string()), ("std_error", se.to_string())],
            );
            Ok(())
        }
        Cmd::Bsdist { graph_a, graph_b, radius } => {
            let a = bslimit::neighborhood_distribution(&load_graph(graph_a)?, *radius, SamplingMode::Exact)?;
            let b = bslimit::neighborhood_distribution(&load_graph(graph_b)?, *radius, SamplingMode::Exact)?;
            print_kv(cli.format, &[("tv_distance", bslimit::tv_distance(&a, &b)?.to_string())]);
            Ok(())
        }
        Cmd::Supported { points, matrix, delta, s, mode } => {
            let metric = match (points, matrix) {
                (Some(path), _) => FiniteMetric::from_point_cloud_text(&read(path)?)?,
                (None, Some(path)) => FiniteMetric::from_matrix_text(&read(path)?)?,
                (None, None) => {
                    return Err(Error::InvalidParameter(
                        "pass --points FILE or --matrix FILE".into(),
                    ))
                }
            };
            let mode = match mode {
                Mode::Necessary => CenterMode::Necessary,
                Mode::Sufficient => CenterMode::Sufficient,
            };
            let count = pointsupport::count_supported(&metric, *delta, *s, mode)?;
            print_kv(
                cli.format,
                &[("count", count.to_string()), ("size", metric.len().to_string())],
            );
            Ok(())
        }
        Cmd::E1 => run_suite(&cli, "e1"),
        Cmd::E2 => run_suite(&cli, "e2"),
        Cmd::E3 => run_suite(&cli, "e3"),
        Cmd::E4 => run_suite(&cli, "e4"),
        Cmd::E5 => run_suite(&cli, "e5"),
    }
}

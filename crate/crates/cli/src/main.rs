use std::collections::hash_map::DefaultHasher;
use std::fs::File;
use std::hash::{Hash, Hasher};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use evroute::graph::{read_snapshot, write_snapshot};
use evroute::io::solution::{write_solution, OutputFormat};
use evroute::io::stations::read_stations;
use evroute::io::synthetic::{GridSpec, WeightSpec};
use evroute::{load_tiles, Bounds, EvParams, EvRouter, PlanError, RoadGraph, RouteSolution, RouterOptions};

#[derive(Parser, Debug)]
#[command(name = "evroute", version, about = "Charging-stop route planning on road graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Merge road tiles into a graph snapshot.
    BuildGraph {
        /// Output snapshot path.
        #[arg(long)]
        out: PathBuf,
        /// Tile CSV files (`seg,direction,time`).
        #[arg(required = true)]
        tiles: Vec<PathBuf>,
    },
    /// Plan a route with charging stops.
    Route {
        #[command(flatten)]
        route: RouteArgs,
        /// Worker threads, 0 for every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact optimum over every station (small instances only).
    Oracle {
        #[command(flatten)]
        route: RouteArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Refuse station tables larger than this.
        #[arg(long, default_value_t = 100)]
        oracle_limit: usize,
    },
    /// Write a synthetic grid network and station table.
    GenSynthetic {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// `10`, `const:C`, `uniform:LO:HI` or `uniform-int:LO:HI` (seconds).
        #[arg(long, default_value = "10")]
        edge_weight: WeightSpec,
        #[arg(long, default_value_t = 0)]
        stations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of tile files to split the grid into.
        #[arg(long, default_value_t = 1)]
        tiles: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Time the planner for several worker counts.
    Bench {
        #[command(flatten)]
        route: RouteArgs,
        /// Comma separated worker counts.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        threads: Vec<usize>,
        /// Runs per thread count; the fastest is reported.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
}

#[derive(Args, Debug)]
struct RouteArgs {
    /// Graph snapshot written by `build-graph`.
    #[arg(long, conflicts_with = "tiles", required_unless_present = "tiles")]
    graph: Option<PathBuf>,
    /// Tile CSVs to load directly instead of a snapshot.
    #[arg(long, num_args = 1..)]
    tiles: Vec<PathBuf>,
    /// Station CSV (`id,lon,lat`).
    #[arg(long)]
    stations: PathBuf,
    /// Origin as `lon,lat`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    source: (f64, f64),
    /// Destination as `lon,lat`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    target: (f64, f64),
    /// Seconds of driving on a full charge.
    #[arg(long, default_value_t = 20000.0)]
    capacity: f64,
    /// Full recharge time in seconds.
    #[arg(long, default_value_t = 2400.0)]
    penalty: f64,
    #[arg(long, default_value_t = 5)]
    candidates: usize,
    /// Station lattice cell size in km.
    #[arg(long, default_value_t = 10.0)]
    gridsize: f64,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// One aggregated route instead of per-leg rows.
    #[arg(long)]
    aggregate_output: bool,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (lon, lat) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lon,lat, got {s:?}"))?;
    let lon: f64 = lon.trim().parse().map_err(|e| format!("bad longitude {lon:?}: {e}"))?;
    let lat: f64 = lat.trim().parse().map_err(|e| format!("bad latitude {lat:?}: {e}"))?;
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        return Err(format!("({lon}, {lat}) is not a valid position"));
    }
    Ok((lon, lat))
}

impl RouteArgs {
    fn params(&self) -> Result<EvParams> {
        Ok(EvParams::new(self.capacity, self.penalty)?
            .with_candidates(self.candidates)?
            .with_alpha(self.alpha)?)
    }

    fn load_graph(&self) -> Result<RoadGraph> {
        match &self.graph {
            Some(path) => read_snapshot(path).with_context(|| format!("[load] graph snapshot {}", path.display())),
            None => load_tiles(&self.tiles).context("[load] road tiles"),
        }
    }

    fn router(&self, graph: RoadGraph, threads: usize, oracle_limit: usize) -> Result<EvRouter> {
        let records = read_stations(&self.stations).context("[load] station table")?;
        let options = RouterOptions {
            grid_km: self.gridsize,
            grid_bounds: Bounds::WORLD,
            threads,
            oracle_limit,
        };
        EvRouter::new(graph, &records, options).context("[load] router setup")
    }
}

impl OutputArgs {
    fn emit(&self, router: &EvRouter, sol: &RouteSolution) -> Result<()> {
        let write = |out: &mut dyn Write| {
            write_solution(
                &mut *out,
                sol,
                router.graph(),
                router.stations(),
                self.format,
                self.aggregate_output,
            )?;
            out.flush()
        };
        match &self.output {
            Some(path) => {
                let file = File::create(path).with_context(|| format!("[output] cannot create {}", path.display()))?;
                write(&mut BufWriter::new(file)).with_context(|| format!("[output] {}", path.display()))
            }
            None => write(&mut io::stdout().lock()).context("[output] stdout"),
        }
    }
}

fn route_hash(sol: &RouteSolution) -> u64 {
    let mut h = DefaultHasher::new();
    sol.route.hash(&mut h);
    sol.stations_visited.hash(&mut h);
    sol.total_cost.to_bits().hash(&mut h);
    for leg in &sol.legs {
        leg.cost.to_bits().hash(&mut h);
    }
    h.finish()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildGraph { out, tiles } => {
            let graph = load_tiles(&tiles).context("[load] road tiles")?;
            write_snapshot(&graph, &out).with_context(|| format!("[output] {}", out.display()))?;
            eprintln!(
                "{} nodes, {} edges -> {}",
                graph.node_count(),
                graph.edge_count(),
                out.display()
            );
        }
        Command::Route {
            route: args,
            threads,
            output,
        } => {
            let params = args.params()?;
            let router = args.router(args.load_graph()?, threads, RouterOptions::default().oracle_limit)?;
            let sol = router.plan_route(args.source, args.target, &params)?;
            output.emit(&router, &sol)?;
        }
        Command::Oracle {
            route: args,
            output,
            oracle_limit,
        } => {
            let params = args.params()?;
            let router = args.router(args.load_graph()?, 1, oracle_limit)?;
            let sol = router.exact_oracle(args.source, args.target, &params)?;
            output.emit(&router, &sol)?;
        }
        Command::GenSynthetic {
            width,
            height,
            edge_weight,
            stations,
            seed,
            tiles,
            out_dir,
        } => {
            let net = GridSpec::new(width, height, edge_weight)
                .with_stations(stations, seed)
                .with_tiles(tiles)
                .generate()
                .map_err(anyhow::Error::msg)
                .context("invalid synthetic spec")?;
            let paths = net
                .write_to(&out_dir)
                .with_context(|| format!("[output] {}", out_dir.display()))?;
            for p in &paths {
                println!("{}", p.display());
            }
            println!("{}", out_dir.join("stations.csv").display());
        }
        Command::Bench {
            route: args,
            threads,
            repeat,
        } => bench(&args, &threads, repeat.max(1))?,
    }
    Ok(())
}

fn bench(args: &RouteArgs, thread_list: &[usize], repeat: usize) -> Result<()> {
    if thread_list.is_empty() {
        bail!("--threads is empty");
    }
    let params = args.params()?;
    let graph = args.load_graph()?;
    let mut out = io::stdout().lock();
    writeln!(out, "threads,wall_seconds,route_hash")?;
    for &threads in thread_list {
        let router = args.router(graph.clone(), threads, 0)?;
        let mut best = f64::INFINITY;
        let mut hash = 0;
        for _ in 0..repeat {
            let start = Instant::now();
            let sol = router.plan_route(args.source, args.target, &params)?;
            best = best.min(start.elapsed().as_secs_f64());
            hash = route_hash(&sol);
        }
        writeln!(out, "{},{best:.6},{hash:016x}", router.threads())?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PlanError>() {
        Some(PlanError::NoPath { .. }) => 2,
        Some(PlanError::NoStationReachable { .. }) => 3,
        Some(PlanError::InfeasibleTrip { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evroute: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use evroute::Stage;

    #[test]
    fn points_parse_lon_first() {
        assert_eq!(parse_point("-84.5, 39.1"), Ok((-84.5, 39.1)));
        assert!(parse_point("39.1").is_err());
        assert!(parse_point("200,0").is_err());
        assert!(parse_point("a,b").is_err());
    }

    #[test]
    fn plan_errors_map_to_distinct_codes() {
        let code = |e: PlanError| exit_code(&anyhow::Error::new(e).context("[outer]"));
        assert_eq!(
            code(PlanError::NoPath {
                stage: Stage::InitialPath,
                source_node: 0,
                target: 1
            }),
            2
        );
        assert_eq!(code(PlanError::NoStationReachable { base: 0, node: 3 }), 3);
        assert_eq!(code(PlanError::InfeasibleTrip { stage: Stage::Solve }), 4);
        assert_eq!(code(PlanError::InvalidParams("x".into())), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 1);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

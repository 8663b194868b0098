mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exact sampling and dynamics of lozenge tilings of a hexagon.
#[derive(Debug, Parser)]
#[command(name = "hexshuffle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Random seed; HEXSHUFFLE_SEED takes precedence when set.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file for the JSON result (default: stdout).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Include wall_time in the JSON metadata.
    #[arg(long)]
    timing: bool,
    /// Worker threads for independent chains.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args, Clone)]
pub struct RenderArgs {
    /// Side length of one lozenge in SVG units.
    #[arg(long, default_value_t = 10.0)]
    scale: f64,
    /// classic or gray.
    #[arg(long, default_value = "classic")]
    palette: String,
    /// Overlay the non-intersecting paths.
    #[arg(long)]
    paths: bool,
    /// Coarse-grain pictures wider than this many lozenges.
    #[arg(long, default_value_t = hexshuffle::render::DEFAULT_MAX_CELLS)]
    max_cells: usize,
}

#[derive(Debug, Args, Clone)]
pub struct PlanArgs {
    #[arg(long = "N")]
    n: i64,
    #[arg(long = "T")]
    t: i64,
    /// Shift at r = 0.
    #[arg(long = "S0", default_value_t = 0)]
    s0: i64,
    /// grow, alternate, or comma-separated steps such as "1,-1,1".
    #[arg(long, default_value = "alternate", allow_hyphen_values = true)]
    plan: String,
    /// Number of steps of the alternate plan.
    #[arg(long, default_value_t = 0)]
    steps: usize,
    /// Target S of the grow plan (default: S0, with the chain started at 0).
    #[arg(long)]
    target: Option<i64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a uniformly random tiling of the (T-S) x S x N hexagon.
    Sample {
        #[arg(long = "N")]
        n: i64,
        #[arg(long = "T")]
        t: i64,
        #[arg(long = "S")]
        s: i64,
        /// Number of independent samples; sample i uses stream i of the seed.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Also write an SVG picture of the first sample.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        render: RenderArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run the S -> S +- 1 dynamics and report snapshots.
    Dynamics {
        #[command(flatten)]
        plan: PlanArgs,
        /// uniform, filled, lowest or a path-family JSON file.
        #[arg(long, default_value = "uniform")]
        start: String,
        /// Steps r at which snapshots are reported, e.g. "0,20,100".
        #[arg(long, value_delimiter = ',')]
        snapshots: Vec<usize>,
        /// Directory for snapshot SVGs of the first replica.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
        /// Stream the first replica's trajectory as JSON lines.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Independent replicas; replica i uses stream i of the seed.
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// Sections whose occupation counts are accumulated over replicas.
        #[arg(long, value_delimiter = ',')]
        profile: Vec<i64>,
        /// Include the first replica's snapshot families in the output.
        #[arg(long)]
        families: bool,
        #[command(flatten)]
        render: RenderArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Render a path-family JSON file as SVG.
    Render {
        /// Path-family JSON, or "-" for stdin.
        input: PathBuf,
        #[command(flatten)]
        render: RenderArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Space-time correlation functions of the dynamics.
    Correlate {
        #[command(flatten)]
        plan: PlanArgs,
        /// A configuration "r,t,x;r,t,x;..."; repeat for several.
        #[arg(long = "points", required = true)]
        points: Vec<String>,
        /// Monte Carlo trials; estimates every configuration by simulation.
        #[arg(long)]
        mc: Option<u64>,
        /// Fall back to Monte Carlo (default 100000 trials) for unsupported orderings.
        #[arg(long)]
        mc_fallback: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Bulk limit kernel and correlations at a macroscopic point.
    BulkKernel {
        #[arg(long = "S0")]
        s0: f64,
        #[arg(long = "T")]
        t_total: f64,
        #[arg(long = "N")]
        n: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        /// Lattice offsets "r,dt,dx;..." (default: one point at the origin).
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Steps eps_1, eps_2, ... between consecutive r.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps: Vec<i8>,
        #[arg(long, default_value_t = hexshuffle::bulk::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Also compare with finite boxes at these scaling parameters.
        #[arg(long, value_delimiter = ',')]
        convergence: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// List every tiling of a small hexagon in lexicographic order.
    Enumerate {
        #[arg(long = "N")]
        n: i64,
        #[arg(long = "T")]
        t: i64,
        #[arg(long = "S")]
        s: i64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// Report only the number of tilings.
        #[arg(long)]
        count_only: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Sample {
            n,
            t,
            s,
            count,
            svg,
            render,
            common,
        } => commands::sample(n, t, s, count, svg, &render, &common),
        Command::Dynamics {
            plan,
            start,
            snapshots,
            svg_dir,
            trajectory,
            replicas,
            profile,
            families,
            render,
            common,
        } => commands::dynamics(commands::DynamicsArgs {
            plan,
            start,
            snapshots,
            svg_dir,
            trajectory,
            replicas,
            profile,
            families,
            render,
            common,
        }),
        Command::Render { input, render, common } => commands::render(&input, &render, &common),
        Command::Correlate {
            plan,
            points,
            mc,
            mc_fallback,
            common,
        } => commands::correlate(&plan, &points, mc, mc_fallback, &common),
        Command::BulkKernel {
            s0,
            t_total,
            n,
            t,
            x,
            points,
            eps,
            tol,
            convergence,
            common,
        } => commands::bulk(
            hexshuffle::bulk::BulkRegime::new(s0, t_total, n, t, x),
            points.as_deref(),
            &eps,
            tol,
            &convergence,
            &common,
        ),
        Command::Enumerate {
            n,
            t,
            s,
            cap,
            count_only,
            common,
        } => commands::enumerate(n, t, s, cap, count_only, &common),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

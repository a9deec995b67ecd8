use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sss_delta::io::{dump_subdivision, export_geometry, parse_scene, ResultFile, RunConfig};
use sss_delta::planner::{Planner, SplitPolicy, Strategy, Verdict};
use sss_delta::Error;

/// Plan a path for the triangle robot, or certify NO-PATH at resolution epsilon.
#[derive(Parser, Debug)]
#[command(name = "sss-delta", version)]
struct Args {
    /// Obstacle scene (native JSON or OFF).
    #[arg(long)]
    scene: PathBuf,
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// bfs or gbf.
    #[arg(long)]
    strategy: Option<Strategy>,
    /// auto, alternate or t-first.
    #[arg(long)]
    split: Option<SplitPolicy>,
    /// No R-split at or beyond this rotational depth (FULL is 0, chart roots 1).
    #[arg(long)]
    max_rot_depth: Option<u32>,
    /// Result file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write leaf boxes (JSON lines) here.
    #[arg(long)]
    dump_subdivision: Option<PathBuf>,
    /// Write an OBJ export of leaves, channel and path here.
    #[arg(long)]
    export_obj: Option<PathBuf>,
    /// Check union-find against the FREE graph every 100 expansions.
    #[arg(long)]
    audit: bool,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn read(p: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))
}

fn run(args: Args) -> Result<Verdict, Error> {
    let scene = parse_scene(&read(&args.scene)?)?;
    let mut cfg = RunConfig::parse(&read(&args.config)?)?;
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if let Some(s) = args.strategy {
        cfg.strategy = s;
    }
    if let Some(s) = args.split {
        cfg.split = s;
    }
    if let Some(d) = args.max_rot_depth {
        cfg.max_rot_depth = Some(d);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let (input, opts, warnings) = cfg.planner_input(scene.obstacles()?, args.audit)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let mut planner = Planner::new(input, opts)?;
    let result = planner.run()?;
    let json = ResultFile::new(&result).to_json();
    match &args.out {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    if let Some(p) = &args.dump_subdivision {
        std::fs::write(p, dump_subdivision(&planner))?;
    }
    if let Some(p) = &args.export_obj {
        std::fs::write(p, export_geometry(&result, &planner))?;
    }
    let s = &result.stats;
    eprintln!(
        "{}: {} boxes, {} expansions, {:.1} ms",
        if result.verdict == Verdict::Path { "PATH" } else { "NO-PATH" },
        s.created,
        s.expanded,
        s.elapsed_ms
    );
    Ok(result.verdict)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(args) {
        Ok(Verdict::Path) => ExitCode::SUCCESS,
        Ok(Verdict::NoPath) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

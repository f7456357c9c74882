//! `analyze`: the full pipeline. Refine an initial scene against its
//! keypoint measurements with the pose chain, compute query marginals
//! on the best scene found, and write the resulting graph, marginals,
//! and chain trace.

use std::path::{Path, PathBuf};

use clap::Args;

use tabletop_core::geometry::extract_evidence;
use tabletop_core::harness::Scenario;
use tabletop_core::knowledge::ground;
use tabletop_core::sampler::{run_chain, ChainParams};
use tabletop_core::scene::SceneModel;
use tabletop_core::scenegraph::build_graph;
use tabletop_core::sensing::{CameraModel, Measurement};
use tabletop_core::Error;

use crate::config::RunConfig;
use crate::infer::{check_feasible, compute_marginals, load_kb, marginals_json, resolve_mode};
use crate::{output, read_input, CmdResult, Failure};

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Scenario bundle from `synth`; exclusive with the split inputs.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Initial scene JSON; needs --measurements and --cameras.
    #[arg(long, value_name = "FILE")]
    scene: Option<PathBuf>,

    /// Measurement list JSON.
    #[arg(long, value_name = "FILE")]
    measurements: Option<PathBuf>,

    /// Camera list JSON.
    #[arg(long, value_name = "FILE")]
    cameras: Option<PathBuf>,

    /// Rule file overriding the built-in knowledge base.
    #[arg(long, value_name = "FILE")]
    kb: Option<PathBuf>,

    /// Chain length; overrides chain.iterations.
    #[arg(long)]
    iterations: Option<u64>,

    /// Marginal computation: exact, gibbs, or auto. Overrides
    /// inference.mode.
    #[arg(long)]
    mode: Option<String>,
}

pub fn run(args: &AnalyzeArgs, cfg: &RunConfig, out: &Path) -> CmdResult<()> {
    let (initial, measurements, cameras) = load_inputs(args)?;
    let kb = load_kb(args.kb.as_deref())?;
    let mode = resolve_mode(args.mode.as_deref(), cfg)?;
    let seed = cfg.require_seed("analyze")?;
    let geo = cfg.geometry();
    let noise = cfg.noise()?;
    let iterations = args.iterations.unwrap_or(cfg.iterations);

    // Surface an impossible starting point as a diagnosis, not as a
    // chain that silently never accepts.
    let evidence0 = extract_evidence(&initial, &geo)?;
    let gn0 = ground(&kb, &initial.constants(), &evidence0)?;
    check_feasible(&gn0, cfg)?;

    let chain = run_chain(
        &initial,
        &measurements,
        &cameras,
        &noise,
        &kb,
        &geo,
        cfg.prior_mode,
        &ChainParams { iterations, seed, proposals: cfg.proposals() },
    )?;

    let evidence = extract_evidence(&chain.map_scene, &geo)?;
    let gn = ground(&kb, &chain.map_scene.constants(), &evidence)?;
    let marginals = compute_marginals(&gn, mode, cfg, Some(seed))?;
    let graph = build_graph(&evidence, &marginals, cfg.lo, cfg.hi);

    let trace: String = chain
        .records
        .iter()
        .map(|r| serde_json::to_string(r).expect("trace record serializes") + "\n")
        .collect();
    let files = [
        ("graph.json", graph.to_json()),
        ("graph.dot", graph.to_dot()),
        ("marginals.json", marginals_json(&marginals, cfg)),
        ("trace.jsonl", trace),
        ("map_scene.json", chain.map_scene.to_json()),
    ];
    let paths = output::write_set(out, &files)?;

    let accepted = chain.records.iter().filter(|r| r.accepted).count();
    println!(
        "chain: {} steps, {} accepted, best log posterior {:.3}",
        chain.records.len(),
        accepted,
        chain.map_log_posterior
    );
    for node in &graph.nodes {
        println!(
            "  {}: hidden {} ({:.3}), false {} ({:.3})",
            node.id, node.hidden, node.p_hidden, node.false_estimate, node.p_false
        );
    }
    for w in &graph.warnings {
        println!("  warning: {w}");
    }
    for p in &paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn load_inputs(args: &AnalyzeArgs) -> CmdResult<(SceneModel, Vec<Measurement>, Vec<CameraModel>)> {
    let split = [&args.scene, &args.measurements, &args.cameras];
    match &args.scenario {
        Some(path) => {
            if split.iter().any(|p| p.is_some()) {
                return Err(Failure::Usage(
                    "--scenario already bundles scene, measurements, and cameras; drop the split flags".into(),
                ));
            }
            let s = Scenario::from_json(&read_input(path)?)?;
            Ok((s.estimated, s.measurements, s.cameras))
        }
        None => {
            let [Some(scene), Some(measurements), Some(cameras)] = split else {
                return Err(Failure::Usage(
                    "pass --scenario, or all three of --scene, --measurements, --cameras".into(),
                ));
            };
            let scene = SceneModel::from_json(&read_input(scene)?)?;
            let measurements: Vec<Measurement> =
                serde_json::from_str(&read_input(measurements)?).map_err(Error::Json)?;
            let cameras: Vec<CameraModel> =
                serde_json::from_str(&read_input(cameras)?).map_err(Error::Json)?;
            Ok((scene, measurements, cameras))
        }
    }
}

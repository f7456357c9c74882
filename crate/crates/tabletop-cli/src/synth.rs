//! `synth`: generate a scenario bundle and print its answer key.

use std::path::Path;

use clap::Args;

use tabletop_core::geometry::extract_evidence;
use tabletop_core::harness::{generate_scenario, Scenario, ScenarioKind, ScenarioSpec};
use tabletop_core::knowledge::{QueryResult, Support};
use tabletop_core::scenegraph::build_graph;

use crate::config::RunConfig;
use crate::{output, CmdResult, Failure};

#[derive(Args)]
pub struct SynthArgs {
    /// Scene layout: flat, stack, lean, hidden_support, false_estimate,
    /// or mixed.
    #[arg(long)]
    kind: String,

    /// How many objects to place; kinds with a fixed cast ignore this.
    #[arg(long, default_value_t = 3)]
    objects: usize,

    /// False-estimate flavor: intersect or hover.
    #[arg(long)]
    variant: Option<String>,

    /// Pixel noise sigma on rendered observations.
    #[arg(long)]
    pixel_noise: Option<f64>,

    /// Translation jitter sigma (meters) on initial estimates.
    #[arg(long)]
    jitter_trans: Option<f64>,

    /// Rotation jitter sigma (radians) on initial estimates.
    #[arg(long)]
    jitter_rot: Option<f64>,
}

pub fn run(args: &SynthArgs, cfg: &RunConfig, out: &Path) -> CmdResult<()> {
    if args.objects == 0 {
        return Err(Failure::Usage("--objects must be at least 1".into()));
    }
    let kind: ScenarioKind =
        args.kind.parse().map_err(|e: tabletop_core::Error| Failure::Usage(e.to_string()))?;
    let seed = cfg.require_seed("synth")?;

    let mut spec = ScenarioSpec::new(kind, args.objects, seed);
    if let Some(v) = &args.variant {
        spec.variant =
            Some(v.parse().map_err(|e: tabletop_core::Error| Failure::Usage(e.to_string()))?);
    }
    if let Some(px) = args.pixel_noise {
        if !(px >= 0.0) {
            return Err(Failure::Usage("--pixel-noise must be at least 0".into()));
        }
        spec.pixel_noise = px;
    }
    if let Some(t) = args.jitter_trans {
        if !(t >= 0.0) {
            return Err(Failure::Usage("--jitter-trans must be at least 0".into()));
        }
        spec.init_jitter_trans = t;
    }
    if let Some(r) = args.jitter_rot {
        if !(r >= 0.0) {
            return Err(Failure::Usage("--jitter-rot must be at least 0".into()));
        }
        spec.init_jitter_rot = r;
    }

    let scenario = generate_scenario(&spec)?;
    print_summary(&args.kind, &scenario, cfg)?;
    let path = output::write_one(out, "scenario.json", scenario.to_json())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// True-world relations plus the answer key. The edges come from the
/// same extractor and graph assembly the pipeline uses, applied to the
/// actual scene instead of the estimate; marginals are left empty since
/// the truth needs no inference.
fn print_summary(kind: &str, s: &Scenario, cfg: &RunConfig) -> CmdResult<()> {
    println!(
        "scenario {kind}: {} real objects, {} measured, seed {}",
        s.scene.objects().len(),
        s.measurements.len(),
        s.spec.seed
    );
    let evidence = extract_evidence(&s.scene, &cfg.geometry())?;
    let empty = QueryResult::from_entries(Vec::new(), Support::FeasibleWorlds(0));
    let graph = build_graph(&evidence, &empty, cfg.lo, cfg.hi);
    for (supporter, supported) in &graph.support {
        println!("  support: {supporter} holds up {supported}");
    }
    for (a, b) in &graph.contact {
        println!("  contact: {a} and {b}");
    }
    let ids = |v: &[u32]| v.iter().map(|i| format!("O{i}")).collect::<Vec<_>>().join(", ");
    if !s.truth.unobserved.is_empty() {
        println!("  unobserved: {}", ids(&s.truth.unobserved));
    }
    if !s.truth.phantom.is_empty() {
        println!("  phantom: {}", ids(&s.truth.phantom));
    }
    if !s.truth.expect_hidden.is_empty() {
        println!("  expect hidden: {}", s.truth.expect_hidden.join(", "));
    }
    if !s.truth.expect_false.is_empty() {
        println!("  expect false: {}", s.truth.expect_false.join(", "));
    }
    Ok(())
}

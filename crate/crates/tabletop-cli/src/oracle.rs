//! `oracle`: cross-check the production paths on a scenario bundle.
//!
//! Two checks, each printed as its own PASS/FAIL line:
//!
//! 1. marginals: the fast grounded inference (with the configured rule
//!    file, if any) against the independent brute-force enumerator,
//!    which always runs the built-in rules. A corrupted rule file shows
//!    up here, named by its worst-disagreeing atom.
//! 2. likelihood: the summed log form of the keypoint likelihood
//!    against a plain product of Gaussian densities recomputed from
//!    scratch, including the projection.
//!
//! Any FAIL exits 5. A scene past the exact-enumeration cap is refused
//! up front rather than silently checked some other way.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;

use tabletop_core::geometry::extract_evidence;
use tabletop_core::harness::{oracle_query_marginals, Scenario};
use tabletop_core::knowledge::{default_knowledge_base, ground, query_marginals_exact, Support};
use tabletop_core::sensing::{scene_log_likelihood, NoiseParams, BEHIND_CAMERA_FLOOR};
use tabletop_core::Error;

use crate::config::RunConfig;
use crate::infer::load_kb;
use crate::{read_input, CmdResult, Failure};

/// Disagreement on a probability beyond float noise is an implementation
/// (or rule-file) difference, not rounding.
const MARGINAL_TOL: f64 = 1e-9;
const LIKELIHOOD_RTOL: f64 = 1e-9;

#[derive(Args)]
pub struct OracleArgs {
    /// Scenario bundle to check.
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,

    /// Rule file for the production path; the reference enumeration
    /// always runs the built-in rules.
    #[arg(long, value_name = "FILE")]
    kb: Option<PathBuf>,
}

pub fn run(args: &OracleArgs, cfg: &RunConfig) -> CmdResult<()> {
    let scenario = Scenario::from_json(&read_input(&args.scenario)?)?;
    let kb = load_kb(args.kb.as_deref())?;
    let reference_kb = default_knowledge_base();
    let noise = cfg.noise()?;

    let evidence = extract_evidence(&scenario.estimated, &cfg.geometry())?;
    let constants = scenario.estimated.constants();
    let gn = ground(&kb, &constants, &evidence)?;
    if gn.atom_count() > cfg.exact_cap {
        return Err(Failure::Core(Error::Capacity { atoms: gn.atom_count(), cap: cfg.exact_cap }));
    }

    let production = query_marginals_exact(&gn, cfg.exact_cap)?;
    let reference = oracle_query_marginals(&reference_kb, &constants, &evidence, cfg.exact_cap)?;

    let mut failures: Vec<String> = Vec::new();

    // Worst-atom comparison over the union of both atom sets.
    let mut worst: Option<(String, f64, f64, f64)> = None;
    let mut atoms = 0usize;
    for (atom, p_ref) in reference.entries() {
        atoms += 1;
        let p = production.get(atom).unwrap_or(f64::NAN);
        let delta = (p - p_ref).abs();
        if !delta.is_finite() || worst.as_ref().is_none_or(|w| delta > w.3) {
            worst = Some((atom.clone(), p, *p_ref, delta));
        }
    }
    for (atom, _) in production.entries() {
        if reference.get(atom).is_none() {
            worst = Some((atom.clone(), f64::NAN, f64::NAN, f64::INFINITY));
        }
    }
    match worst {
        Some((atom, p, p_ref, delta)) if !(delta <= MARGINAL_TOL) => {
            let line = format!("marginals: FAIL {atom} production={p:.12} reference={p_ref:.12}");
            println!("ORACLE {line}");
            failures.push(line);
        }
        _ => {
            let delta = worst.map_or(0.0, |w| w.3);
            println!("ORACLE marginals: PASS (max |delta| {delta:.2e} over {atoms} atoms)");
        }
    }

    let worlds = |s: Support| match s {
        Support::FeasibleWorlds(n) => Some(n),
        Support::Samples(_) => None,
    };
    if worlds(production.support) == worlds(reference.support) {
        println!("ORACLE feasible worlds: PASS ({:?})", worlds(production.support).unwrap_or(0));
    } else {
        let line = format!(
            "feasible worlds: FAIL production={:?} reference={:?}",
            worlds(production.support),
            worlds(reference.support)
        );
        println!("ORACLE {line}");
        failures.push(line);
    }

    let log_form =
        scene_log_likelihood(&scenario.estimated, &scenario.measurements, &scenario.cameras, &noise)?;
    let product_form = product_log_likelihood(&scenario, &noise)?;
    let tol = LIKELIHOOD_RTOL * log_form.abs().max(1.0);
    if (log_form - product_form).abs() <= tol {
        println!("ORACLE likelihood: PASS (log form {log_form:.6})");
    } else {
        let line =
            format!("likelihood: FAIL log form {log_form:.12} vs product form {product_form:.12}");
        println!("ORACLE {line}");
        failures.push(line);
    }

    match failures.into_iter().next() {
        None => {
            println!("oracle checks passed");
            Ok(())
        }
        Some(first) => Err(Failure::Mismatch(first)),
    }
}

/// The likelihood recomputed the obvious way: project every keypoint
/// with raw pinhole arithmetic and multiply plain Gaussian densities,
/// logging per keypoint. The log has to come in at that granularity; a
/// whole-measurement product underflows f64 once a few dozen noisy
/// keypoints stack up. Behind-camera points add the same floor penalty
/// the production path uses.
fn product_log_likelihood(scenario: &Scenario, noise: &NoiseParams) -> CmdResult<f64> {
    let density = |d: f64, sigma: f64| (-d * d / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
    let mut total = 0.0;
    for m in &scenario.measurements {
        let object = scenario
            .estimated
            .object(m.object)
            .ok_or_else(|| Error::Schema(format!("measurement names unknown object {}", m.object)))?;
        for obs in &m.cameras {
            let cam = scenario
                .cameras
                .iter()
                .find(|c| c.cam_id == obs.cam_id)
                .ok_or_else(|| Error::Schema(format!("no camera with id {}", obs.cam_id)))?;
            for kp in &obs.points {
                let world = object.obb.pose().transform_point(&kp.model);
                let local = cam.pose.inverse_transform_point(&world);
                if local.z <= 0.0 {
                    total += BEHIND_CAMERA_FLOOR;
                    continue;
                }
                let u = cam.fx * local.x / local.z + cam.cx;
                let v = cam.fy * local.y / local.z + cam.cy;
                let product =
                    density(kp.obs[0] - u, noise.sigma_x) * density(kp.obs[1] - v, noise.sigma_y);
                total += product.ln();
            }
        }
    }
    Ok(total)
}

//! `estimate`: initial object poses from 3D-3D correspondences.
//!
//! The input file mirrors the measurement schema but carries observed
//! 3D points instead of pixels, one entry per object:
//!
//! ```json
//! {
//!   "objects": [
//!     { "id": 1,
//!       "half_extents": [0.03, 0.03, 0.03],
//!       "correspondences": [
//!         { "model": [x, y, z], "observed": [x, y, z] },
//!         ...
//!       ] }
//!   ]
//! }
//! ```
//!
//! Each object runs the full hypothesize-cluster-refine path and lands
//! in `scene.json` with its refined pose.

use std::path::{Path, PathBuf};

use clap::Args;
use nalgebra::Vector3;
use serde::Deserialize;

use tabletop_core::estimation::{
    cluster_hypotheses, generate_hypotheses, ransac_refine, Correspondence3D,
};
use tabletop_core::geometry::Obb;
use tabletop_core::scene::{SceneModel, SceneObject};
use tabletop_core::Error;

use crate::config::RunConfig;
use crate::{output, read_input, CmdResult, Failure};

#[derive(Args)]
pub struct EstimateArgs {
    /// Correspondence JSON (see the module format).
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

#[derive(Deserialize)]
struct CorrespondenceFile {
    objects: Vec<ObjectCorrespondences>,
}

#[derive(Deserialize)]
struct ObjectCorrespondences {
    id: u32,
    half_extents: [f64; 3],
    correspondences: Vec<Correspondence3D>,
}

pub fn run(args: &EstimateArgs, cfg: &RunConfig, out: &Path) -> CmdResult<()> {
    let seed = cfg.require_seed("estimate")?;
    let text = read_input(&args.input)?;
    let file: CorrespondenceFile =
        serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Json(e)))?;
    if file.objects.is_empty() {
        return Err(Failure::Core(Error::Schema("correspondence file lists no objects".into())));
    }

    let params = cfg.estimation();
    let mut objects = Vec::new();
    for obj in &file.objects {
        // Independent draw streams per object, stable under reordering.
        let hyps =
            generate_hypotheses(&obj.correspondences, &params, seed.wrapping_add(obj.id as u64))?;
        let clusters = cluster_hypotheses(&hyps, params.pos_eps, params.rot_eps);
        let best = hyps.iter().max_by_key(|h| h.inlier_count).ok_or_else(|| {
            Error::RefinementFailed(format!("object {}: every sampled triple was degenerate", obj.id))
        })?;
        let refined = ransac_refine(&obj.correspondences, best, &params)?;
        println!(
            "O{}: {} hypotheses in {} clusters, refined to {}/{} inliers",
            obj.id,
            hyps.len(),
            clusters.len(),
            refined.inlier_count,
            obj.correspondences.len()
        );
        let obb = Obb::new(refined.pose, Vector3::from(obj.half_extents))?;
        objects.push(SceneObject { id: obj.id, obb });
    }

    let scene = SceneModel::new(SceneModel::standard_table(), objects, None)?;
    let path = output::write_one(out, "scene.json", scene.to_json())?;
    println!("wrote {}", path.display());
    Ok(())
}

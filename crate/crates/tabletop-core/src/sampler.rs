//! Data-driven Metropolis-Hastings over object poses.
//!
//! Each step perturbs one measured object: a batch of candidate poses
//! is drawn around the current one, the candidate with the highest
//! measurement likelihood is put forward, and the move is accepted with
//! the usual ratio. Because the pick is the argmax of the batch, the
//! proposal is asymmetric; the forward and backward probabilities share
//! one normalizer over the batch plus the current pose, which is what
//! makes the correction cheap to compute.
//!
//! The posterior combines the knowledge-base weight of the relations a
//! scene exhibits with the keypoint likelihood of its poses. Both are
//! recomputed from scratch for every candidate; no incremental caching.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{extract_evidence, GeometryParams, Pose6D};
use crate::knowledge::{ground, unnormalized_prior, KnowledgeBase, PriorMode};
use crate::scene::SceneModel;
use crate::sensing::{object_log_likelihood, scene_log_likelihood, CameraModel, Measurement, NoiseParams};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProposalParams {
    /// Candidate poses drawn per step.
    pub n: usize,
    /// Standard deviation of each translation axis, meters.
    pub sigma_trans: f64,
    /// Standard deviation of the rotation angle, radians. The axis is
    /// uniform on the sphere.
    pub sigma_rot: f64,
}

impl Default for ProposalParams {
    fn default() -> Self {
        Self { n: 10, sigma_trans: 0.01, sigma_rot: 0.05 }
    }
}

/// The pose a proposal batch put forward, with the log probabilities of
/// picking it (forward) and of the reverse move picking the current
/// pose back (backward).
#[derive(Clone, Copy, Debug)]
pub struct Proposal {
    pub pose: Pose6D,
    pub log_q_forward: f64,
    pub log_q_backward: f64,
}

/// Shared normalizer for the pick probabilities. `log_weights[0]` is
/// the current pose, the rest are the candidates; the candidate with
/// the largest weight is the one put forward. Returns its index within
/// the candidate slice along with log Q_forward and log Q_backward.
pub fn proposal_log_probs(log_weights: &[f64]) -> (usize, f64, f64) {
    assert!(log_weights.len() >= 2, "need the current pose and at least one candidate");
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = if max.is_finite() {
        max + log_weights.iter().map(|w| (w - max).exp()).sum::<f64>().ln()
    } else {
        max
    };
    let (best, best_w) = log_weights[1..]
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidate slice is nonempty");
    (best, best_w - lse, log_weights[0] - lse)
}

fn perturb(current: &Pose6D, params: &ProposalParams, rng: &mut ChaCha8Rng) -> Pose6D {
    let mut t = current.translation();
    for axis in 0..3 {
        let step: f64 = StandardNormal.sample(rng);
        t[axis] += params.sigma_trans * step;
    }
    let axis: [f64; 3] = UnitSphere.sample(rng);
    let angle: f64 = StandardNormal.sample(rng);
    let spin = nalgebra::UnitQuaternion::from_scaled_axis(
        nalgebra::Vector3::new(axis[0], axis[1], axis[2]) * (params.sigma_rot * angle),
    );
    Pose6D::from_parts(t, spin * current.rotation())
}

/// Draws a candidate batch around `current` and selects the member with
/// the highest measurement likelihood.
pub fn propose(
    measurement: &Measurement,
    current: &Pose6D,
    cams: &[CameraModel],
    noise: &NoiseParams,
    params: &ProposalParams,
    rng: &mut ChaCha8Rng,
) -> Result<Proposal> {
    assert!(params.n >= 1, "proposal batch must be nonempty");
    let mut log_weights = Vec::with_capacity(params.n + 1);
    log_weights.push(object_log_likelihood(measurement, current, cams, noise)?);
    let mut candidates = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let pose = perturb(current, params, rng);
        log_weights.push(object_log_likelihood(measurement, &pose, cams, noise)?);
        candidates.push(pose);
    }
    let (best, log_q_forward, log_q_backward) = proposal_log_probs(&log_weights);
    Ok(Proposal { pose: candidates[best], log_q_forward, log_q_backward })
}

/// Acceptance probability of a proposed move, infinities handled
/// explicitly: a minus-infinity candidate is never accepted, a move out
/// of a minus-infinity state always is.
pub fn acceptance_probability(
    log_post_new: f64,
    log_post_old: f64,
    log_q_backward: f64,
    log_q_forward: f64,
) -> f64 {
    if log_post_new == f64::NEG_INFINITY {
        return 0.0;
    }
    if log_post_old == f64::NEG_INFINITY {
        return 1.0;
    }
    let log_ratio = log_post_new - log_post_old + log_q_backward - log_q_forward;
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp()
    }
}

pub fn mh_accept(p_a: f64, rng: &mut ChaCha8Rng) -> bool {
    rng.random::<f64>() < p_a
}

/// One chain step as written to the trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: u64,
    pub object: u32,
    pub p_a: f64,
    pub accepted: bool,
    pub log_posterior: f64,
    pub best_log_posterior: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ChainParams {
    pub iterations: u64,
    pub seed: u64,
    pub proposals: ProposalParams,
}

#[derive(Clone, Debug)]
pub struct ChainResult {
    /// Highest-posterior scene visited by the chain.
    pub map_scene: SceneModel,
    pub map_log_posterior: f64,
    /// State of the chain after the last step.
    pub final_scene: SceneModel,
    pub records: Vec<IterationRecord>,
}

/// Unnormalized log posterior of a scene: knowledge-base weight of its
/// extracted relations plus the keypoint log-likelihood of its poses.
pub fn scene_log_posterior(
    scene: &SceneModel,
    measurements: &[Measurement],
    cams: &[CameraModel],
    noise: &NoiseParams,
    kb: &KnowledgeBase,
    geo: &GeometryParams,
    mode: PriorMode,
) -> Result<f64> {
    let evidence = extract_evidence(scene, geo)?;
    let gn = ground(kb, &scene.constants(), &evidence)?;
    let prior = unnormalized_prior(&gn, mode)?;
    if !prior.feasible {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(prior.log_weight + scene_log_likelihood(scene, measurements, cams, noise)?)
}

/// Runs the chain for `params.iterations` steps, visiting measured
/// objects round-robin in id order. With zero iterations the initial
/// scene is returned untouched.
pub fn run_chain(
    initial: &SceneModel,
    measurements: &[Measurement],
    cams: &[CameraModel],
    noise: &NoiseParams,
    kb: &KnowledgeBase,
    geo: &GeometryParams,
    mode: PriorMode,
    params: &ChainParams,
) -> Result<ChainResult> {
    let mut targets: Vec<&Measurement> = measurements.iter().collect();
    targets.sort_by_key(|m| m.object);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut scene = initial.clone();
    let mut current_lp =
        scene_log_posterior(&scene, measurements, cams, noise, kb, geo, mode)?;
    let mut best_scene = scene.clone();
    let mut best_lp = current_lp;
    let mut records = Vec::new();

    if !targets.is_empty() {
        for t in 1..=params.iterations {
            let m = targets[((t - 1) % targets.len() as u64) as usize];
            let current_pose = *scene
                .object(m.object)
                .expect("measured objects were validated by the initial posterior")
                .obb
                .pose();
            let prop = propose(m, &current_pose, cams, noise, &params.proposals, &mut rng)?;
            let mut candidate = scene.clone();
            candidate.set_object_pose(m.object, prop.pose)?;
            let cand_lp =
                scene_log_posterior(&candidate, measurements, cams, noise, kb, geo, mode)?;
            let p_a =
                acceptance_probability(cand_lp, current_lp, prop.log_q_backward, prop.log_q_forward);
            let accepted = mh_accept(p_a, &mut rng);
            if accepted {
                scene = candidate;
                current_lp = cand_lp;
                if cand_lp > best_lp {
                    best_lp = cand_lp;
                    best_scene = scene.clone();
                }
            }
            records.push(IterationRecord {
                t,
                object: m.object,
                p_a,
                accepted,
                log_posterior: current_lp,
                best_log_posterior: best_lp,
            });
        }
    }

    Ok(ChainResult {
        map_scene: best_scene,
        map_log_posterior: best_lp,
        final_scene: scene,
        records,
    })
}

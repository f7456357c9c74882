//! Pose hypotheses from 3D point correspondences.
//!
//! Detection and triangulation happen upstream; this module starts from
//! model-to-world point correspondences and produces candidate object
//! poses: closed-form rigid alignment on random triples, greedy
//! clustering of the resulting hypotheses, and an inlier-driven
//! refinement pass that refits on the consensus set.

use nalgebra::{Matrix3, Point3, Rotation3, UnitQuaternion, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose6D;
use crate::sensing::point3_array;

/// A model keypoint (object frame) paired with its triangulated
/// position in the table frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correspondence3D {
    #[serde(with = "point3_array")]
    pub model: Point3<f64>,
    #[serde(with = "point3_array")]
    pub observed: Point3<f64>,
}

/// Candidate pose with its consensus count and the triple it came from.
#[derive(Clone, Copy, Debug)]
pub struct PoseHypothesis {
    pub pose: Pose6D,
    pub inlier_count: usize,
    pub source_triple: [usize; 3],
}

/// Aggregate of nearby hypotheses: inlier-weighted mean pose, member
/// count, and total inlier weight.
#[derive(Clone, Copy, Debug)]
pub struct PoseCluster {
    pub pose: Pose6D,
    pub size: usize,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct EstimationParams {
    /// World-space distance below which a correspondence counts as an
    /// inlier of a pose.
    pub inlier_eps: f64,
    /// Cluster linkage threshold on translation distance.
    pub pos_eps: f64,
    /// Cluster linkage threshold on rotation angle (radians).
    pub rot_eps: f64,
    /// Random triples drawn per hypothesis generation run.
    pub attempts: usize,
}

impl Default for EstimationParams {
    fn default() -> Self {
        Self { inlier_eps: 0.01, pos_eps: 0.02, rot_eps: 0.10, attempts: 64 }
    }
}

const MIN_TRIANGLE_AREA: f64 = 1e-9;

/// Least-squares rigid alignment of model points onto world points.
/// Requires at least three correspondences and a non-collinear model
/// set; the rotation is a proper rotation (no reflections).
fn kabsch(model: &[Point3<f64>], world: &[Point3<f64>]) -> Result<Pose6D> {
    debug_assert_eq!(model.len(), world.len());
    debug_assert!(model.len() >= 3);
    let n = model.len() as f64;
    let m_bar = model.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;
    let w_bar = world.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;
    let mut k = Matrix3::zeros();
    for (m, w) in model.iter().zip(world) {
        k += (w.coords - w_bar) * (m.coords - m_bar).transpose();
    }
    let svd = k.svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    if svd.singular_values[1] < 1e-12 {
        return Err(Error::RefinementFailed(
            "correspondence set is collinear, rotation is not determined".into(),
        ));
    }
    let d = (u * v_t).determinant().signum();
    let r = u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t;
    let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(r));
    let t = w_bar - rot * m_bar;
    Ok(Pose6D::from_parts(t, rot))
}

fn triangle_area(a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Rigid pose from exactly three correspondences. The model triple must
/// span a triangle; collinear triples are rejected.
pub fn pose_from_triple(corrs: &[Correspondence3D], triple: [usize; 3]) -> Result<Pose6D> {
    let pick = |i: usize| -> Result<&Correspondence3D> {
        corrs
            .get(i)
            .ok_or_else(|| Error::Schema(format!("triple index {i} out of range")))
    };
    let (a, b, c) = (pick(triple[0])?, pick(triple[1])?, pick(triple[2])?);
    let area = triangle_area(&a.model, &b.model, &c.model);
    if area <= MIN_TRIANGLE_AREA {
        return Err(Error::DegenerateTriple { area });
    }
    kabsch(&[a.model, b.model, c.model], &[a.observed, b.observed, c.observed])
}

/// Number of correspondences whose transformed model point lands within
/// `eps` of its observed position.
pub fn count_inliers(corrs: &[Correspondence3D], pose: &Pose6D, eps: f64) -> usize {
    corrs
        .iter()
        .filter(|c| (pose.transform_point(&c.model) - c.observed).norm() <= eps)
        .count()
}

fn inlier_indices(corrs: &[Correspondence3D], pose: &Pose6D, eps: f64) -> Vec<usize> {
    corrs
        .iter()
        .enumerate()
        .filter(|(_, c)| (pose.transform_point(&c.model) - c.observed).norm() <= eps)
        .map(|(i, _)| i)
        .collect()
}

/// Draws random triples and aligns each into a pose hypothesis.
/// Degenerate triples are skipped, so fewer than `params.attempts`
/// hypotheses may come back. Deterministic for a fixed seed.
pub fn generate_hypotheses(
    corrs: &[Correspondence3D],
    params: &EstimationParams,
    seed: u64,
) -> Result<Vec<PoseHypothesis>> {
    if corrs.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: corrs.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..params.attempts {
        let triple = distinct_triple(&mut rng, corrs.len());
        match pose_from_triple(corrs, triple) {
            Ok(pose) => {
                let inlier_count = count_inliers(corrs, &pose, params.inlier_eps);
                out.push(PoseHypothesis { pose, inlier_count, source_triple: triple });
            }
            Err(Error::DegenerateTriple { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn distinct_triple(rng: &mut ChaCha8Rng, n: usize) -> [usize; 3] {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let mut c = rng.random_range(0..n - 2);
    for lo in [a.min(b), a.max(b)] {
        if c >= lo {
            c += 1;
        }
    }
    [a, b, c]
}

fn rotation_distance(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    let dot = a.coords.dot(&b.coords).abs().min(1.0);
    2.0 * dot.acos()
}

struct RunningCluster {
    members: Vec<PoseHypothesis>,
    weight: f64,
    t_sum: Vector3<f64>,
    // Quaternion coefficients sign-aligned to the first member before
    // accumulation, otherwise q and -q would cancel.
    q_sum: nalgebra::Vector4<f64>,
}

impl RunningCluster {
    fn new(h: PoseHypothesis) -> Self {
        let w = h.inlier_count.max(1) as f64;
        Self {
            weight: w,
            t_sum: h.pose.translation() * w,
            q_sum: h.pose.rotation().coords * w,
            members: vec![h],
        }
    }

    fn mean_pose(&self) -> Pose6D {
        let t = self.t_sum / self.weight;
        let q = nalgebra::Quaternion::from_vector(self.q_sum / self.weight);
        Pose6D::from_parts(t, UnitQuaternion::from_quaternion(q))
    }

    fn add(&mut self, h: PoseHypothesis) {
        let w = h.inlier_count.max(1) as f64;
        let mut coords = h.pose.rotation().coords;
        if coords.dot(&self.q_sum) < 0.0 {
            coords = -coords;
        }
        self.weight += w;
        self.t_sum += h.pose.translation() * w;
        self.q_sum += coords * w;
        self.members.push(h);
    }
}

/// Greedy leader clustering: each hypothesis joins the first cluster
/// whose running mean is within both linkage thresholds, else starts a
/// new one. Clusters come back sorted by member count, largest first.
pub fn cluster_hypotheses(
    hypotheses: &[PoseHypothesis],
    pos_eps: f64,
    rot_eps: f64,
) -> Vec<PoseCluster> {
    let mut clusters: Vec<RunningCluster> = Vec::new();
    for h in hypotheses {
        let slot = clusters.iter_mut().find(|c| {
            let mean = c.mean_pose();
            (mean.translation() - h.pose.translation()).norm() <= pos_eps
                && rotation_distance(&mean.rotation(), &h.pose.rotation()) <= rot_eps
        });
        match slot {
            Some(c) => c.add(*h),
            None => clusters.push(RunningCluster::new(*h)),
        }
    }
    let mut out: Vec<PoseCluster> = clusters
        .iter()
        .map(|c| PoseCluster { pose: c.mean_pose(), size: c.members.len(), weight: c.weight })
        .collect();
    out.sort_by(|a, b| b.size.cmp(&a.size).then(b.weight.total_cmp(&a.weight)));
    out
}

/// Consensus refinement: refit the pose on its inlier set and repeat
/// while the inlier count grows. The input hypothesis is scored first,
/// so the result never has fewer inliers than the input. Fails if a
/// consensus set is too small or collinear.
pub fn ransac_refine(
    corrs: &[Correspondence3D],
    hypothesis: &PoseHypothesis,
    params: &EstimationParams,
) -> Result<PoseHypothesis> {
    let mut best = PoseHypothesis {
        inlier_count: count_inliers(corrs, &hypothesis.pose, params.inlier_eps),
        ..*hypothesis
    };
    for _ in 0..10 {
        let inliers = inlier_indices(corrs, &best.pose, params.inlier_eps);
        if inliers.len() < 3 {
            return Err(Error::RefinementFailed(format!(
                "consensus set has {} correspondences, need at least 3",
                inliers.len()
            )));
        }
        let model: Vec<_> = inliers.iter().map(|&i| corrs[i].model).collect();
        let world: Vec<_> = inliers.iter().map(|&i| corrs[i].observed).collect();
        let pose = kabsch(&model, &world)?;
        let inlier_count = count_inliers(corrs, &pose, params.inlier_eps);
        if inlier_count <= best.inlier_count {
            break;
        }
        best = PoseHypothesis { pose, inlier_count, source_triple: best.source_triple };
    }
    Ok(best)
}

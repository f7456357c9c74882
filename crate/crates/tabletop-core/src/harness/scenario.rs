//! Canned scenes with known structure and fabricated measurements.
//!
//! Each scenario carries two scenes: `scene` is what actually stands on
//! the table, `estimated` is the initial guess handed to the sampler.
//! They differ exactly where the interesting queries live: an occluded
//! supporter exists in `scene` but has no measurements, a false
//! estimate has measurements but no real object. Measurements are
//! rendered from whichever pose the detector would believe, so a false
//! estimate is pinned to its bogus pose by its own fabricated evidence.

use nalgebra::{Matrix3, Point3, Rotation3, UnitQuaternion, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Obb, Pose6D};
use crate::scene::{SceneModel, SceneObject};
use crate::sensing::{project, CameraModel, CameraObservations, Keypoint, Measurement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Separated objects resting on the table.
    FlatLayout,
    /// A single tower of touching cubes.
    Stack,
    /// A tilted object propped against an upright one.
    Lean,
    /// A visible object resting on an unobserved supporter, so the
    /// estimate hovers.
    HiddenSupport,
    /// A fabricated detection alongside one real object.
    FalseEstimate,
    /// Stack, flat object, and hidden support in one scene.
    Mixed,
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Self::FlatLayout),
            "stack" => Ok(Self::Stack),
            "lean" => Ok(Self::Lean),
            "hidden_support" => Ok(Self::HiddenSupport),
            "false_estimate" => Ok(Self::FalseEstimate),
            "mixed" => Ok(Self::Mixed),
            other => Err(Error::Schema(format!(
                "unknown scenario kind {other:?}; expected flat, stack, lean, \
                 hidden_support, false_estimate, or mixed"
            ))),
        }
    }
}

/// How a false estimate conflicts with the rest of the scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FalseVariant {
    /// The bogus pose interpenetrates the real object.
    Intersect,
    /// The bogus pose floats free of everything.
    Hover,
}

impl std::str::FromStr for FalseVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intersect" => Ok(Self::Intersect),
            "hover" => Ok(Self::Hover),
            other => Err(Error::Schema(format!(
                "unknown variant {other:?}; expected intersect or hover"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Object count; for kinds with a fixed cast this is ignored.
    pub objects: usize,
    pub seed: u64,
    /// Only read for `FalseEstimate`.
    pub variant: Option<FalseVariant>,
    /// Standard deviation of the pixel noise added to observations.
    pub pixel_noise: f64,
    /// Pose jitter applied to the initial estimate of real objects.
    pub init_jitter_trans: f64,
    pub init_jitter_rot: f64,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, objects: usize, seed: u64) -> Self {
        Self {
            kind,
            objects,
            seed,
            variant: None,
            pixel_noise: 0.5,
            init_jitter_trans: 0.002,
            init_jitter_rot: 0.01,
        }
    }
}

/// What the answer key says about a generated scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Ids of real objects absent from every measurement.
    pub unobserved: Vec<u32>,
    /// Ids of measured objects that do not exist on the table.
    pub phantom: Vec<u32>,
    /// Constants whose hidden flag should come out true.
    pub expect_hidden: Vec<String>,
    /// Constants whose false flag should come out true.
    pub expect_false: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    /// The actual world, including objects no camera reports.
    pub scene: SceneModel,
    /// Initial guess for the sampler: measured objects only, real ones
    /// jittered, phantoms at their bogus poses.
    pub estimated: SceneModel,
    pub cameras: Vec<CameraModel>,
    pub measurements: Vec<Measurement>,
    pub truth: GroundTruth,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Camera at `eye` aimed at `target`, image x level with the table,
/// image y pointing downhill. `eye` and `target` must not be vertically
/// aligned.
pub fn look_at_camera(cam_id: u32, eye: Point3<f64>, target: Point3<f64>) -> CameraModel {
    let forward = (target - eye).normalize();
    let right = Vector3::new(forward.y, -forward.x, 0.0);
    assert!(
        right.norm() > 1e-9,
        "camera axis is vertical, image orientation is ambiguous"
    );
    let right = right.normalize();
    let down = forward.cross(&right);
    let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
        Matrix3::from_columns(&[right, down, forward]),
    ));
    CameraModel {
        cam_id,
        fx: 500.0,
        fy: 500.0,
        cx: 320.0,
        cy: 320.0,
        pose: Pose6D::from_parts(eye.coords, rot),
    }
}

/// Stereo pair in front of the table, 0.1 m baseline, both aimed at the
/// table center. Close range matters: with this baseline the depth
/// resolution falls off with the square of the distance, and at half a
/// meter it stays well inside the contact tolerance.
pub fn standard_rig() -> Vec<CameraModel> {
    let target = Point3::new(0.0, 0.0, 0.05);
    vec![
        look_at_camera(0, Point3::new(-0.05, -0.4, 0.32), target),
        look_at_camera(1, Point3::new(0.05, -0.4, 0.32), target),
    ]
}

/// Cube half extent used throughout the canned scenes.
const HALF: f64 = 0.03;

/// Feature points rendered per object. With the narrow default stereo
/// baseline, depth precision grows with the feature count; this many
/// keep the refined poses inside the contact tolerance.
const KEYPOINTS_PER_OBJECT: usize = 48;

/// Keypoints drawn uniformly over an object's surface, in its own
/// frame: a face is picked with probability proportional to its area,
/// then a point uniformly on it.
fn surface_keypoints(half_extents: &Vector3<f64>, rng: &mut ChaCha8Rng) -> Vec<Point3<f64>> {
    let h = half_extents;
    // One entry per axis-normal face pair; both faces share an area.
    let areas = [h.y * h.z, h.x * h.z, h.x * h.y];
    let total: f64 = 2.0 * areas.iter().sum::<f64>();
    let mut pts = Vec::with_capacity(KEYPOINTS_PER_OBJECT);
    for _ in 0..KEYPOINTS_PER_OBJECT {
        let mut pick = rng.random_range(0.0..total);
        let mut normal = 2;
        for axis in 0..3 {
            if pick < 2.0 * areas[axis] {
                normal = axis;
                break;
            }
            pick -= 2.0 * areas[axis];
        }
        let side = if rng.random_range(0..2u32) == 0 { -1.0 } else { 1.0 };
        let (u, v) = ((normal + 1) % 3, (normal + 2) % 3);
        let mut p = Point3::origin();
        p[normal] = side * h[normal];
        p[u] = rng.random_range(-h[u]..h[u]);
        p[v] = rng.random_range(-h[v]..h[v]);
        pts.push(p);
    }
    pts
}

/// Renders a measurement of one object as seen at `believed_pose`.
fn render_measurement(
    object: u32,
    believed_pose: &Pose6D,
    half_extents: &Vector3<f64>,
    cams: &[CameraModel],
    pixel_noise: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Measurement> {
    // One draw per object: every camera observes the same feature set.
    let keypoints = surface_keypoints(half_extents, rng);
    let mut cameras = Vec::with_capacity(cams.len());
    for cam in cams {
        let mut points = Vec::new();
        for &model in &keypoints {
            let world = believed_pose.transform_point(&model);
            let mut obs = project(cam, &world)?;
            if pixel_noise > 0.0 {
                let nx: f64 = StandardNormal.sample(rng);
                let ny: f64 = StandardNormal.sample(rng);
                obs[0] += pixel_noise * nx;
                obs[1] += pixel_noise * ny;
            }
            points.push(Keypoint { model, obs });
        }
        cameras.push(CameraObservations { cam_id: cam.cam_id, points });
    }
    Ok(Measurement { object, cameras })
}

fn jitter_pose(pose: &Pose6D, trans: f64, rot: f64, rng: &mut ChaCha8Rng) -> Pose6D {
    let mut t = pose.translation();
    for axis in 0..3 {
        let step: f64 = StandardNormal.sample(rng);
        t[axis] += trans * step;
    }
    let axis: [f64; 3] = UnitSphere.sample(rng);
    let angle: f64 = StandardNormal.sample(rng);
    let spin = UnitQuaternion::from_scaled_axis(
        Vector3::new(axis[0], axis[1], axis[2]) * (rot * angle),
    );
    Pose6D::from_parts(t, spin * pose.rotation())
}

fn upright_cube(x: f64, y: f64, z: f64) -> Obb {
    Obb::new(
        Pose6D::from_parts(Vector3::new(x, y, z), UnitQuaternion::identity()),
        Vector3::new(HALF, HALF, HALF),
    )
    .expect("cube extents are positive")
}

fn tilted_cube(x: f64, y: f64, z: f64, tilt: f64) -> Obb {
    Obb::new(
        Pose6D::from_parts(
            Vector3::new(x, y, z),
            UnitQuaternion::from_axis_angle(&Vector3::y_axis(), tilt),
        ),
        Vector3::new(HALF, HALF, HALF),
    )
    .expect("cube extents are positive")
}

const PLACEMENT_ATTEMPTS: usize = 1000;

/// Rejection-samples separated table positions.
fn scatter_positions(
    count: usize,
    min_distance: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(f64, f64)>> {
    let mut placed: Vec<(f64, f64)> = Vec::with_capacity(count);
    let mut attempts = 0;
    while placed.len() < count {
        if attempts >= PLACEMENT_ATTEMPTS {
            return Err(Error::Placement { attempts });
        }
        attempts += 1;
        let x = rng.random_range(-0.6..0.6);
        let y = rng.random_range(-0.45..0.45);
        if placed
            .iter()
            .all(|&(px, py)| (x - px).hypot(y - py) >= min_distance)
        {
            placed.push((x, y));
        }
    }
    Ok(placed)
}

/// Tilt used for leaning and bogus objects: well past the stability
/// tolerance, shallow enough that the box clearly overlaps its mate.
const TILT: f64 = 0.17453292519943295; // ten degrees

/// Builds the scenario for a spec. Deterministic in the seed.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cams = standard_rig();

    // True objects, ids of the unobserved ones, and phantom objects
    // (id, believed obb).
    let mut objects: Vec<SceneObject> = Vec::new();
    let mut truth = GroundTruth::default();
    let mut phantoms: Vec<SceneObject> = Vec::new();

    match spec.kind {
        ScenarioKind::FlatLayout => {
            let count = spec.objects.max(1);
            for (i, (x, y)) in scatter_positions(count, 0.15, &mut rng)?.into_iter().enumerate() {
                objects.push(SceneObject { id: i as u32 + 1, obb: upright_cube(x, y, HALF) });
            }
        }
        ScenarioKind::Stack => {
            let count = spec.objects.max(2);
            for i in 0..count {
                let z = HALF * (2 * i + 1) as f64;
                objects.push(SceneObject { id: i as u32 + 1, obb: upright_cube(0.0, 0.0, z) });
            }
        }
        ScenarioKind::Lean => {
            objects.push(SceneObject { id: 1, obb: upright_cube(0.0, 0.0, HALF) });
            // Lowest corner on the table, rightmost point flush with
            // the upright cube's face.
            let reach = HALF * (TILT.cos() + TILT.sin());
            objects.push(SceneObject {
                id: 2,
                obb: tilted_cube(-HALF - reach, 0.0, reach, TILT),
            });
        }
        ScenarioKind::HiddenSupport => {
            objects.push(SceneObject { id: 1, obb: upright_cube(0.0, 0.0, 3.0 * HALF) });
            objects.push(SceneObject { id: 2, obb: upright_cube(0.0, 0.0, HALF) });
            truth.unobserved.push(2);
            truth.expect_hidden.push("O1".to_owned());
        }
        ScenarioKind::FalseEstimate => {
            objects.push(SceneObject { id: 1, obb: upright_cube(0.0, 0.0, HALF) });
            let bogus = match spec.variant.unwrap_or(FalseVariant::Intersect) {
                FalseVariant::Intersect => tilted_cube(0.015, 0.0, 1.5 * HALF, TILT),
                FalseVariant::Hover => tilted_cube(0.3, 0.0, 0.1, TILT),
            };
            phantoms.push(SceneObject { id: 2, obb: bogus });
            truth.phantom.push(2);
            if spec.variant.unwrap_or(FalseVariant::Intersect) == FalseVariant::Intersect {
                truth.expect_false.push("O2".to_owned());
            }
        }
        ScenarioKind::Mixed => {
            objects.push(SceneObject { id: 1, obb: upright_cube(0.0, 0.0, HALF) });
            objects.push(SceneObject { id: 2, obb: upright_cube(0.0, 0.0, 3.0 * HALF) });
            objects.push(SceneObject { id: 3, obb: upright_cube(0.4, -0.3, HALF) });
            objects.push(SceneObject { id: 4, obb: upright_cube(-0.4, 0.3, 3.0 * HALF) });
            objects.push(SceneObject { id: 5, obb: upright_cube(-0.4, 0.3, HALF) });
            truth.unobserved.push(5);
            truth.expect_hidden.push("O4".to_owned());
        }
    }

    let scene = SceneModel::new(SceneModel::standard_table(), objects.clone(), None)?;

    // Measurements for every visible real object at its true pose and
    // for every phantom at its believed pose.
    let mut measurements = Vec::new();
    let mut estimated_objects = Vec::new();
    for obj in &objects {
        if truth.unobserved.contains(&obj.id) {
            continue;
        }
        measurements.push(render_measurement(
            obj.id,
            obj.obb.pose(),
            &obj.obb.half_extents(),
            &cams,
            spec.pixel_noise,
            &mut rng,
        )?);
        let start = jitter_pose(
            obj.obb.pose(),
            spec.init_jitter_trans,
            spec.init_jitter_rot,
            &mut rng,
        );
        estimated_objects.push(SceneObject { id: obj.id, obb: obj.obb.with_pose(start) });
    }
    for ph in &phantoms {
        measurements.push(render_measurement(
            ph.id,
            ph.obb.pose(),
            &ph.obb.half_extents(),
            &cams,
            spec.pixel_noise,
            &mut rng,
        )?);
        estimated_objects.push(ph.clone());
    }
    measurements.sort_by_key(|m| m.object);
    let estimated = SceneModel::new(SceneModel::standard_table(), estimated_objects, None)?;

    Ok(Scenario { spec: *spec, scene, estimated, cameras: cams, measurements, truth })
}

/// Root-mean-square pixel distance between reprojected keypoints and
/// their observations, over every measured keypoint in the scene.
pub fn reprojection_rms(
    scene: &SceneModel,
    measurements: &[Measurement],
    cams: &[CameraModel],
) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for m in measurements {
        let object = scene.object(m.object).ok_or_else(|| {
            Error::Schema(format!("measurement references unknown object {}", m.object))
        })?;
        for obs in &m.cameras {
            let cam = cams
                .iter()
                .find(|c| c.cam_id == obs.cam_id)
                .ok_or_else(|| Error::Schema(format!("no camera with id {}", obs.cam_id)))?;
            for kp in &obs.points {
                let world = object.obb.pose().transform_point(&kp.model);
                let px = project(cam, &world)?;
                sum += (px[0] - kp.obs[0]).powi(2) + (px[1] - kp.obs[1]).powi(2);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok((sum / count as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{extract_evidence, GeometryParams, PairRelation};
    use crate::knowledge::pred_by_name;

    fn evidence_of(scene: &SceneModel) -> crate::knowledge::EvidenceSet {
        extract_evidence(scene, &GeometryParams::default()).unwrap()
    }

    fn holds(e: &crate::knowledge::EvidenceSet, pred: &str, args: &[&str]) -> bool {
        let id = pred_by_name(pred).unwrap();
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        e.entry(id, &owned).unwrap_or(false)
    }

    #[test]
    fn flat_layout_objects_rest_apart() {
        let spec = ScenarioSpec::new(ScenarioKind::FlatLayout, 4, 9);
        let s = generate_scenario(&spec).unwrap();
        assert_eq!(s.scene.objects().len(), 4);
        let e = evidence_of(&s.scene);
        for i in 1..=4u32 {
            let c = format!("O{i}");
            assert!(holds(&e, "stable", &[&c]));
            assert!(holds(&e, "contact", &[&c, "table"]), "{c} should rest on the table");
            assert!(!holds(&e, "hover", &[&c]));
        }
        for i in 1..=4u32 {
            for j in 1..=4u32 {
                if i != j {
                    assert!(!holds(&e, "contact", &[&format!("O{i}"), &format!("O{j}")]));
                }
            }
        }
        assert!(s.truth.unobserved.is_empty() && s.truth.phantom.is_empty());
    }

    #[test]
    fn stack_objects_touch_in_sequence() {
        let spec = ScenarioSpec::new(ScenarioKind::Stack, 3, 1);
        let s = generate_scenario(&spec).unwrap();
        let e = evidence_of(&s.scene);
        assert!(holds(&e, "contact", &["O1", "table"]));
        assert!(holds(&e, "contact", &["O2", "O1"]));
        assert!(holds(&e, "contact", &["O3", "O2"]));
        assert!(!holds(&e, "contact", &["O3", "O1"]));
        assert!(holds(&e, "higher", &["O3", "O2"]));
        assert!(!holds(&e, "higher", &["O2", "O3"]));
    }

    #[test]
    fn lean_touches_without_stability() {
        let spec = ScenarioSpec::new(ScenarioKind::Lean, 2, 2);
        let s = generate_scenario(&spec).unwrap();
        let e = evidence_of(&s.scene);
        assert!(holds(&e, "stable", &["O1"]));
        assert!(!holds(&e, "stable", &["O2"]), "the leaning cube is tilted");
        assert!(holds(&e, "contact", &["O2", "table"]));
        assert!(holds(&e, "contact", &["O2", "O1"]));
        assert!(!holds(&e, "intersect", &["O2", "O1"]));
    }

    #[test]
    fn hidden_support_estimate_hovers() {
        let spec = ScenarioSpec::new(ScenarioKind::HiddenSupport, 2, 3);
        let s = generate_scenario(&spec).unwrap();
        // True scene: a resting stack, nothing hovers.
        let true_e = evidence_of(&s.scene);
        assert!(holds(&true_e, "contact", &["O1", "O2"]));
        assert!(!holds(&true_e, "hover", &["O1"]));
        // Estimate: the supporter is missing, so the top floats.
        assert_eq!(s.estimated.objects().len(), 1);
        let est_e = evidence_of(&s.estimated);
        assert!(holds(&est_e, "hover", &["O1"]));
        assert!(holds(&est_e, "stable", &["O1"]));
        assert_eq!(s.truth.unobserved, vec![2]);
        assert_eq!(s.truth.expect_hidden, vec!["O1".to_owned()]);
        assert!(s.measurements.iter().all(|m| m.object == 1));
    }

    #[test]
    fn false_estimate_intersects_the_real_object() {
        let mut spec = ScenarioSpec::new(ScenarioKind::FalseEstimate, 2, 4);
        spec.variant = Some(FalseVariant::Intersect);
        let s = generate_scenario(&spec).unwrap();
        assert_eq!(s.scene.objects().len(), 1);
        assert_eq!(s.estimated.objects().len(), 2);
        let e = evidence_of(&s.estimated);
        assert!(holds(&e, "intersect", &["O2", "O1"]));
        assert!(!holds(&e, "stable", &["O2"]));
        assert!(holds(&e, "stable", &["O1"]));
        assert_eq!(s.truth.phantom, vec![2]);
        assert_eq!(s.truth.expect_false, vec!["O2".to_owned()]);
    }

    #[test]
    fn hovering_false_estimate_floats_clear() {
        let mut spec = ScenarioSpec::new(ScenarioKind::FalseEstimate, 2, 5);
        spec.variant = Some(FalseVariant::Hover);
        let s = generate_scenario(&spec).unwrap();
        let e = evidence_of(&s.estimated);
        assert!(holds(&e, "hover", &["O2"]));
        assert!(!holds(&e, "stable", &["O2"]));
        assert!(s.truth.expect_false.is_empty(), "hover alone stays undecided");
    }

    #[test]
    fn mixed_scene_fits_exact_inference() {
        let spec = ScenarioSpec::new(ScenarioKind::Mixed, 5, 6);
        let s = generate_scenario(&spec).unwrap();
        // Estimated scene keeps four objects: five constants with the
        // table, twenty ground query atoms, inside the exact cap.
        assert_eq!(s.estimated.objects().len(), 4);
        // Flush contacts are exact only in the true scene; the initial
        // estimate is jittered and relies on the sampler to close gaps.
        let true_e = evidence_of(&s.scene);
        assert!(holds(&true_e, "contact", &["O2", "O1"]));
        assert!(holds(&true_e, "contact", &["O3", "table"]));
        assert!(holds(&true_e, "contact", &["O4", "O5"]));
        let est_e = evidence_of(&s.estimated);
        assert!(holds(&est_e, "hover", &["O4"]));
        assert!(holds(&est_e, "stable", &["O4"]));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ScenarioSpec::new(ScenarioKind::Mixed, 5, 77);
        let a = generate_scenario(&spec).unwrap();
        let b = generate_scenario(&spec).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn scenario_json_round_trips() {
        let spec = ScenarioSpec::new(ScenarioKind::Stack, 2, 8);
        let s = generate_scenario(&spec).unwrap();
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn overcrowding_fails_with_placement_error() {
        let spec = ScenarioSpec::new(ScenarioKind::FlatLayout, 200, 1);
        assert!(matches!(
            generate_scenario(&spec),
            Err(Error::Placement { attempts: 1000 })
        ));
    }

    #[test]
    fn noiseless_measurements_reproject_exactly() {
        let mut spec = ScenarioSpec::new(ScenarioKind::Stack, 2, 10);
        spec.pixel_noise = 0.0;
        let s = generate_scenario(&spec).unwrap();
        let rms = reprojection_rms(&s.scene, &s.measurements, &s.cameras).unwrap();
        assert!(rms < 1e-9, "rms {rms}");
    }

    #[test]
    fn pixel_noise_shows_up_in_the_rms() {
        let spec = ScenarioSpec::new(ScenarioKind::Stack, 2, 10);
        let s = generate_scenario(&spec).unwrap();
        let rms = reprojection_rms(&s.scene, &s.measurements, &s.cameras).unwrap();
        // Two-axis Gaussian noise with sigma one half: the pixel
        // distance RMS concentrates near sigma times sqrt(2).
        assert!(rms > 0.4 && rms < 1.1, "rms {rms}");
    }

    #[test]
    fn look_at_projects_target_to_principal_point() {
        let cam = look_at_camera(0, Point3::new(0.3, -0.8, 0.6), Point3::new(0.0, 0.0, 0.05));
        let px = project(&cam, &Point3::new(0.0, 0.0, 0.05)).unwrap();
        approx::assert_relative_eq!(px[0], 320.0, epsilon = 1e-9);
        approx::assert_relative_eq!(px[1], 320.0, epsilon = 1e-9);
        // Straight up in the world moves the pixel up the image.
        let above = project(&cam, &Point3::new(0.0, 0.0, 0.15)).unwrap();
        assert!(above[1] < 320.0);
        // World x to the right of the view moves the pixel right.
        let r = cam.pose.rotation() * Vector3::x_axis().into_inner();
        assert!(r.x > 0.0 || r.y != 0.0); // sanity on the frame build
    }

    #[test]
    fn classify_pair_agrees_with_scenario_intent() {
        // The lean construction promises exact touch on two pairs.
        let spec = ScenarioSpec::new(ScenarioKind::Lean, 2, 2);
        let s = generate_scenario(&spec).unwrap();
        let eps = GeometryParams::default().contact_eps;
        let lean = &s.scene.objects()[1].obb;
        let upright = &s.scene.objects()[0].obb;
        assert_eq!(
            crate::geometry::classify_pair(lean, upright, eps),
            PairRelation::Contact
        );
        assert_eq!(
            crate::geometry::classify_pair(lean, s.scene.table(), eps),
            PairRelation::Contact
        );
    }
}

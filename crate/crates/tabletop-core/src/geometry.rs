//! Rigid poses, oriented boxes, and the pairwise relations extracted from
//! them.
//!
//! Everything here works in the table frame: a right-handed frame whose
//! x/y plane is the table surface and whose +z axis points up. The table
//! itself is modeled as a thin slab so that it participates in the same
//! box-box tests as every other object.

use nalgebra::{Isometry3, Point3, Quaternion, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::EvidenceSet;
use crate::scene::SceneModel;

/// Rigid transform stored as translation plus unit quaternion.
///
/// The quaternion is renormalized on construction; a quaternion with
/// norm below 1e-9 cannot name a rotation and is rejected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoseWire", into = "PoseWire")]
pub struct Pose6D {
    iso: Isometry3<f64>,
}

impl Pose6D {
    pub fn new(translation: Vector3<f64>, quat_wxyz: [f64; 4]) -> Result<Self> {
        let [w, x, y, z] = quat_wxyz;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if !(norm > 1e-9) || !norm.is_finite() {
            return Err(Error::InvalidScene(format!(
                "quaternion [{w}, {x}, {y}, {z}] is not normalizable"
            )));
        }
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "non-finite translation {translation:?}"
            )));
        }
        // Already-unit quaternions pass through bit-exact, so a
        // serialize/parse round trip is the identity.
        let rotation = if (norm - 1.0).abs() < 1e-12 {
            UnitQuaternion::new_unchecked(q)
        } else {
            UnitQuaternion::from_quaternion(q)
        };
        Ok(Self {
            iso: Isometry3::from_parts(Translation3::from(translation), rotation),
        })
    }

    pub fn identity() -> Self {
        Self { iso: Isometry3::identity() }
    }

    pub fn from_parts(translation: Vector3<f64>, rotation: UnitQuaternion<f64>) -> Self {
        Self { iso: Isometry3::from_parts(Translation3::from(translation), rotation) }
    }

    pub fn translation(&self) -> Vector3<f64> {
        self.iso.translation.vector
    }

    pub fn rotation(&self) -> UnitQuaternion<f64> {
        self.iso.rotation
    }

    pub fn isometry(&self) -> &Isometry3<f64> {
        &self.iso
    }

    pub fn transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        self.iso.transform_point(p)
    }

    pub fn inverse_transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        self.iso.inverse_transform_point(p)
    }

    /// Composition: `self` applied after `rhs`.
    pub fn compose(&self, rhs: &Pose6D) -> Pose6D {
        Pose6D { iso: self.iso * rhs.iso }
    }

    pub fn inverse(&self) -> Pose6D {
        Pose6D { iso: self.iso.inverse() }
    }

    /// Quaternion components in (w, x, y, z) order, the order used by
    /// every file format in this crate.
    pub fn quat_wxyz(&self) -> [f64; 4] {
        let q = self.iso.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }
}

impl From<Isometry3<f64>> for Pose6D {
    fn from(iso: Isometry3<f64>) -> Self {
        Self { iso }
    }
}

#[derive(Serialize, Deserialize)]
struct PoseWire {
    translation: [f64; 3],
    quat: [f64; 4],
}

impl TryFrom<PoseWire> for Pose6D {
    type Error = Error;
    fn try_from(w: PoseWire) -> Result<Self> {
        Pose6D::new(Vector3::from(w.translation), w.quat)
    }
}

impl From<Pose6D> for PoseWire {
    fn from(p: Pose6D) -> Self {
        PoseWire { translation: p.translation().into(), quat: p.quat_wxyz() }
    }
}

/// Oriented bounding box: pose of the box center plus half extents along
/// the box's local axes. Half extents are strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObbWire", into = "ObbWire")]
pub struct Obb {
    pose: Pose6D,
    half_extents: Vector3<f64>,
}

impl Obb {
    pub fn new(pose: Pose6D, half_extents: Vector3<f64>) -> Result<Self> {
        if !half_extents.iter().all(|h| h.is_finite() && *h > 0.0) {
            return Err(Error::InvalidScene(format!(
                "half extents must be strictly positive, got {half_extents:?}"
            )));
        }
        Ok(Self { pose, half_extents })
    }

    /// Axis-aligned box from center and half extents.
    pub fn axis_aligned(center: Vector3<f64>, half_extents: Vector3<f64>) -> Result<Self> {
        Self::new(Pose6D::from_parts(center, UnitQuaternion::identity()), half_extents)
    }

    pub fn pose(&self) -> &Pose6D {
        &self.pose
    }

    pub fn with_pose(&self, pose: Pose6D) -> Obb {
        Obb { pose, half_extents: self.half_extents }
    }

    pub fn half_extents(&self) -> Vector3<f64> {
        self.half_extents
    }

    pub fn center(&self) -> Point3<f64> {
        Point3::from(self.pose.translation())
    }

    /// The eight corners in sign order
    /// `---, +--, -+-, ++-, --+, +-+, -++, +++` (x varies fastest).
    pub fn corners(&self) -> [Point3<f64>; 8] {
        let h = self.half_extents;
        std::array::from_fn(|k| {
            let local = Point3::new(
                if k & 1 == 0 { -h.x } else { h.x },
                if k & 2 == 0 { -h.y } else { h.y },
                if k & 4 == 0 { -h.z } else { h.z },
            );
            self.pose.transform_point(&local)
        })
    }

    /// Local frame axes expressed in the table frame.
    pub fn axes(&self) -> [Vector3<f64>; 3] {
        let m = self.pose.rotation().to_rotation_matrix();
        std::array::from_fn(|i| m.matrix().column(i).into())
    }

    /// Strict interior test: points exactly on a face do not count.
    pub fn contains_point_strict(&self, p: &Point3<f64>) -> bool {
        let local = self.pose.inverse_transform_point(p);
        local.x.abs() < self.half_extents.x
            && local.y.abs() < self.half_extents.y
            && local.z.abs() < self.half_extents.z
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }
}

#[derive(Serialize, Deserialize)]
struct ObbWire {
    center: [f64; 3],
    quat: [f64; 4],
    half_extents: [f64; 3],
}

impl TryFrom<ObbWire> for Obb {
    type Error = Error;
    fn try_from(w: ObbWire) -> Result<Self> {
        Obb::new(
            Pose6D::new(Vector3::from(w.center), w.quat)?,
            Vector3::from(w.half_extents),
        )
    }
}

impl From<Obb> for ObbWire {
    fn from(o: Obb) -> Self {
        ObbWire {
            center: o.pose.translation().into(),
            quat: o.pose.quat_wxyz(),
            half_extents: o.half_extents.into(),
        }
    }
}

/// How two boxes relate once a contact tolerance is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRelation {
    /// Separated by more than the tolerance.
    None,
    /// Touching: the tightest separating axis lies within the tolerance
    /// band around zero.
    Contact,
    /// Interpenetrating deeper than the tolerance, or one box contains
    /// the other.
    Intersect,
}

/// Tolerances for evidence extraction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GeometryParams {
    /// Half-width of the touching band in meters.
    pub contact_eps: f64,
    /// Maximum tilt (radians) of any local axis from the table +z axis
    /// for an object to count as resting stably.
    pub stable_angle_tol: f64,
    /// Sampling density (points per square meter) for the point-sampling
    /// overlap oracle used in randomized tests.
    pub sample_density: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            contact_eps: 0.005,
            stable_angle_tol: 2.0_f64.to_radians(),
            sample_density: 20_000.0,
        }
    }
}

/// Provenance of the table frame: the transform that took sensor-frame
/// estimates into the table frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFrame {
    pub sensor_to_table: Pose6D,
}

/// Re-expresses a sensor-frame pose in the table frame.
pub fn to_table_frame(pose: &Pose6D, frame: &TableFrame) -> Pose6D {
    frame.sensor_to_table.compose(pose)
}

const DEGENERATE_AXIS_SQ: f64 = 1e-12;

/// Classifies a box pair by separating-axis test over the 15 canonical
/// axes (3 + 3 face normals, 9 edge cross products), with a symmetric
/// tolerance band around zero separation.
///
/// Containment is checked first: if all corners of one box lie strictly
/// inside the other there is no separating axis at any tolerance, and
/// the pair is an intersection even when every face is within `eps` of
/// a face of the enclosing box.
pub fn classify_pair(a: &Obb, b: &Obb, contact_eps: f64) -> PairRelation {
    if contains_all_corners(a, b) || contains_all_corners(b, a) {
        return PairRelation::Intersect;
    }

    let a_axes = a.axes();
    let b_axes = b.axes();
    let delta = b.center() - a.center();

    let mut candidates: [Vector3<f64>; 15] = [Vector3::zeros(); 15];
    candidates[..3].copy_from_slice(&a_axes);
    candidates[3..6].copy_from_slice(&b_axes);
    for i in 0..3 {
        for j in 0..3 {
            candidates[6 + 3 * i + j] = a_axes[i].cross(&b_axes[j]);
        }
    }

    let ha = a.half_extents();
    let hb = b.half_extents();
    let mut max_sep = f64::NEG_INFINITY;
    for axis in &candidates {
        let n2 = axis.norm_squared();
        if n2 < DEGENERATE_AXIS_SQ {
            continue;
        }
        let l = axis / n2.sqrt();
        let dist = delta.dot(&l).abs();
        let ra: f64 = (0..3).map(|i| ha[i] * a_axes[i].dot(&l).abs()).sum();
        let rb: f64 = (0..3).map(|i| hb[i] * b_axes[i].dot(&l).abs()).sum();
        let sep = dist - ra - rb;
        if sep > max_sep {
            max_sep = sep;
        }
    }

    if max_sep > contact_eps {
        PairRelation::None
    } else if max_sep >= -contact_eps {
        PairRelation::Contact
    } else {
        PairRelation::Intersect
    }
}

fn contains_all_corners(outer: &Obb, inner: &Obb) -> bool {
    inner.corners().iter().all(|c| outer.contains_point_strict(c))
}

/// An object rests stably when one of its local axes points along the
/// table up axis to within `angle_tol`, in either direction.
pub fn is_stable(obb: &Obb, angle_tol: f64) -> bool {
    let cos_tol = angle_tol.cos();
    obb.axes().iter().any(|axis| axis.z.abs() >= cos_tol)
}

/// Strict comparison of box centers along the table up axis. Equal
/// heights are higher in neither direction.
pub fn is_higher(a: &Obb, b: &Obb) -> bool {
    a.center().z > b.center().z
}

/// Reads the relational evidence off a scene: per-entity `stable`,
/// `table` and `hover`, and pairwise `contact`, `intersect` and `higher`
/// over all entities including the table slab.
///
/// Evidence is closed-world: the returned set lists true atoms only.
pub fn extract_evidence(scene: &SceneModel, params: &GeometryParams) -> Result<EvidenceSet> {
    scene.validate()?;

    let entities = scene.entities();
    let n = entities.len();
    let mut evidence = EvidenceSet::new();
    for (name, _) in &entities {
        evidence.add_constant(name);
    }

    let mut touched = vec![false; n]; // any Contact or Intersect with another entity
    let mut relations = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let rel = classify_pair(entities[i].1, entities[j].1, params.contact_eps);
            if rel != PairRelation::None {
                touched[i] = true;
                touched[j] = true;
            }
            relations.push((i, j, rel));
        }
    }

    for (i, j, rel) in relations {
        let pred = match rel {
            PairRelation::None => continue,
            PairRelation::Contact => "contact",
            PairRelation::Intersect => "intersect",
        };
        evidence.assert_atom(pred, &[&entities[i].0, &entities[j].0], true)?;
        evidence.assert_atom(pred, &[&entities[j].0, &entities[i].0], true)?;
    }

    for (i, (name, obb)) in entities.iter().enumerate() {
        if is_stable(obb, params.stable_angle_tol) {
            evidence.assert_atom("stable", &[name], true)?;
        }
        if !touched[i] {
            evidence.assert_atom("hover", &[name], true)?;
        }
        for (other, other_obb) in &entities {
            if name != other && is_higher(obb, other_obb) {
                evidence.assert_atom("higher", &[name, other], true)?;
            }
        }
    }

    evidence.assert_atom("table", &[SceneModel::TABLE_CONSTANT], true)?;
    Ok(evidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cube_at(x: f64, y: f64, z: f64) -> Obb {
        Obb::axis_aligned(Vector3::new(x, y, z), Vector3::new(0.5, 0.5, 0.5)).unwrap()
    }

    const EPS: f64 = 0.005;

    #[test]
    fn corner_order_matches_sign_pattern() {
        let cube = unit_cube_at(0.0, 0.0, 0.0);
        let expected = [
            [-0.5, -0.5, -0.5],
            [0.5, -0.5, -0.5],
            [-0.5, 0.5, -0.5],
            [0.5, 0.5, -0.5],
            [-0.5, -0.5, 0.5],
            [0.5, -0.5, 0.5],
            [-0.5, 0.5, 0.5],
            [0.5, 0.5, 0.5],
        ];
        for (corner, want) in cube.corners().iter().zip(expected) {
            assert_relative_eq!(corner.coords, Vector3::from(want), epsilon = 1e-12);
        }
    }

    #[test]
    fn corners_follow_pose() {
        let pose = Pose6D::from_parts(
            Vector3::new(1.0, 2.0, 3.0),
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2),
        );
        let obb = Obb::new(pose, Vector3::new(0.1, 0.2, 0.3)).unwrap();
        // Local (-0.1, -0.2, -0.3) rotates to (0.2, -0.1, -0.3) under +90 deg yaw.
        let first = obb.corners()[0];
        assert_relative_eq!(first.coords, Vector3::new(1.2, 1.9, 2.7), epsilon = 1e-12);
    }

    #[test]
    fn zero_quaternion_is_rejected() {
        assert!(Pose6D::new(Vector3::zeros(), [0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn quaternion_is_renormalized() {
        let pose = Pose6D::new(Vector3::zeros(), [2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(pose.rotation().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nonpositive_half_extent_is_rejected() {
        assert!(Obb::axis_aligned(Vector3::zeros(), Vector3::new(0.1, 0.0, 0.1)).is_err());
        assert!(Obb::axis_aligned(Vector3::zeros(), Vector3::new(0.1, -0.2, 0.1)).is_err());
    }

    #[test]
    fn separated_cubes_classify_none() {
        let a = unit_cube_at(0.0, 0.0, 0.0);
        let b = unit_cube_at(3.0, 0.0, 0.0);
        assert_eq!(classify_pair(&a, &b, EPS), PairRelation::None);
    }

    #[test]
    fn flush_faces_classify_contact() {
        let a = unit_cube_at(0.0, 0.0, 0.0);
        let b = unit_cube_at(1.0, 0.0, 0.0);
        assert_eq!(classify_pair(&a, &b, EPS), PairRelation::Contact);
    }

    #[test]
    fn small_gap_inside_band_classifies_contact() {
        let a = unit_cube_at(0.0, 0.0, 0.0);
        let b = unit_cube_at(1.004, 0.0, 0.0);
        assert_eq!(classify_pair(&a, &b, EPS), PairRelation::Contact);
        let c = unit_cube_at(0.996, 0.0, 0.0);
        assert_eq!(classify_pair(&a, &c, EPS), PairRelation::Contact);
    }

    #[test]
    fn deep_overlap_classifies_intersect() {
        let a = unit_cube_at(0.0, 0.0, 0.0);
        let b = unit_cube_at(0.9, 0.0, 0.0);
        assert_eq!(classify_pair(&a, &b, EPS), PairRelation::Intersect);
    }

    #[test]
    fn contained_box_classifies_intersect() {
        let outer = unit_cube_at(0.0, 0.0, 0.0);
        let inner =
            Obb::axis_aligned(Vector3::new(0.3, 0.0, 0.0), Vector3::new(0.15, 0.1, 0.1)).unwrap();
        assert_eq!(classify_pair(&outer, &inner, EPS), PairRelation::Intersect);
        assert_eq!(classify_pair(&inner, &outer, EPS), PairRelation::Intersect);
    }

    #[test]
    fn rotated_cube_vertex_near_face_classifies_contact() {
        // Cube b is yawed 45 degrees; its edge (through the +x vertex of the
        // rotated square cross-section) sits 1 mm from the +x face of a.
        let yaw = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_4);
        let half_diag = 0.5 * std::f64::consts::SQRT_2;
        let b = Obb::new(
            Pose6D::from_parts(Vector3::new(0.5 + half_diag + 0.001, 0.0, 0.0), yaw),
            Vector3::new(0.5, 0.5, 0.5),
        )
        .unwrap();
        let a = unit_cube_at(0.0, 0.0, 0.0);
        assert_eq!(classify_pair(&a, &b, EPS), PairRelation::Contact);
    }

    #[test]
    fn stability_respects_angle_tolerance() {
        let tol = 2.0_f64.to_radians();
        let tilt = |deg: f64| {
            let rot = UnitQuaternion::from_axis_angle(&Vector3::x_axis(), (deg as f64).to_radians());
            Obb::new(
                Pose6D::from_parts(Vector3::new(0.0, 0.0, 0.05), rot),
                Vector3::new(0.05, 0.05, 0.05),
            )
            .unwrap()
        };
        assert!(is_stable(&tilt(0.0), tol));
        assert!(is_stable(&tilt(1.0), tol));
        assert!(!is_stable(&tilt(3.0), tol));
        // A box rotated a full quarter turn is resting on another face.
        assert!(is_stable(&tilt(90.0), tol));
    }

    #[test]
    fn higher_is_strict_on_center_height() {
        let low = unit_cube_at(0.0, 0.0, 0.0);
        let high = unit_cube_at(0.0, 0.0, 1.0);
        assert!(is_higher(&high, &low));
        assert!(!is_higher(&low, &high));
        let same = unit_cube_at(5.0, 5.0, 0.0);
        assert!(!is_higher(&low, &same));
        assert!(!is_higher(&same, &low));
    }

    #[test]
    fn table_frame_transform_round_trips() {
        let frame = TableFrame {
            sensor_to_table: Pose6D::from_parts(
                Vector3::new(0.1, -0.2, 0.8),
                UnitQuaternion::from_axis_angle(&Vector3::y_axis(), 0.3),
            ),
        };
        let sensor_pose = Pose6D::from_parts(
            Vector3::new(0.4, 0.1, 1.2),
            UnitQuaternion::from_axis_angle(&Vector3::x_axis(), -0.7),
        );
        let table_pose = to_table_frame(&sensor_pose, &frame);
        let back = frame.sensor_to_table.inverse().compose(&table_pose);
        assert_relative_eq!(
            back.translation(),
            sensor_pose.translation(),
            epsilon = 1e-12
        );
        assert!(back.rotation().angle_to(&sensor_pose.rotation()) < 1e-12);
    }

    #[test]
    fn pose_json_round_trips() {
        let pose = Pose6D::from_parts(
            Vector3::new(0.25, -0.5, 0.125),
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 0.5),
        );
        let json = serde_json::to_string(&pose).unwrap();
        let back: Pose6D = serde_json::from_str(&json).unwrap();
        assert_relative_eq!(back.translation(), pose.translation(), epsilon = 1e-15);
    }

    #[test]
    fn obb_json_rejects_bad_extents() {
        let json = r#"{"center":[0,0,0],"quat":[1,0,0,0],"half_extents":[0.1,0.0,0.1]}"#;
        assert!(serde_json::from_str::<Obb>(json).is_err());
    }
}

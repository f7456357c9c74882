//! Pinhole cameras and keypoint likelihoods.
//!
//! A measurement ties an object to pixel observations of known model
//! points (keypoints in the object's local frame) across one or more
//! calibrated cameras. The likelihood of a pose is a product of
//! independent per-axis Gaussians around the reprojected keypoints,
//! evaluated in log space.

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pose6D;
use crate::scene::SceneModel;

/// Additive log-likelihood stand-in for a keypoint that projects behind
/// the camera. Finite so that proposal weighting can still compare
/// candidates, yet low enough that any in-front pose dominates.
pub const BEHIND_CAMERA_FLOOR: f64 = -1e9;

/// Calibrated pinhole camera. `pose` is the camera's pose in the table
/// frame (camera x right, y down, z forward).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub cam_id: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub pose: Pose6D,
}

impl CameraModel {
    fn require(cams: &[CameraModel], cam_id: u32) -> Result<&CameraModel> {
        cams.iter()
            .find(|c| c.cam_id == cam_id)
            .ok_or_else(|| Error::Schema(format!("no camera with id {cam_id}")))
    }
}

/// Projects a table-frame point to pixel coordinates.
pub fn project(cam: &CameraModel, point: &Point3<f64>) -> Result<[f64; 2]> {
    let local = cam.pose.inverse_transform_point(point);
    if local.z <= 0.0 {
        return Err(Error::BehindCamera { depth: local.z });
    }
    Ok([
        cam.fx * local.x / local.z + cam.cx,
        cam.fy * local.y / local.z + cam.cy,
    ])
}

pub(crate) mod point3_array {
    use nalgebra::Point3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Point3<f64>, s: S) -> Result<S::Ok, S::Error> {
        [p.x, p.y, p.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point3<f64>, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Point3::new(x, y, z))
    }
}

/// One observed keypoint: its position in the object frame and the pixel
/// where one camera saw it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    #[serde(with = "point3_array")]
    pub model: Point3<f64>,
    pub obs: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraObservations {
    pub cam_id: u32,
    pub points: Vec<Keypoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Object id this measurement constrains.
    pub object: u32,
    pub cameras: Vec<CameraObservations>,
}

/// Pixel noise of the keypoint detector; standard deviations are
/// strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl NoiseParams {
    pub fn new(sigma_x: f64, sigma_y: f64) -> Result<Self> {
        if !(sigma_x > 0.0 && sigma_y > 0.0) {
            return Err(Error::Schema(format!(
                "noise sigmas must be positive, got ({sigma_x}, {sigma_y})"
            )));
        }
        Ok(Self { sigma_x, sigma_y })
    }

    pub fn isotropic(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma)
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self { sigma_x: 1.0, sigma_y: 1.0 }
    }
}

/// Log-likelihood of one object's measurement under a candidate pose:
/// the sum over cameras and keypoints of per-axis Gaussian log densities
/// at the reprojections, with [`BEHIND_CAMERA_FLOOR`] substituted for
/// keypoints that fall behind a camera.
pub fn object_log_likelihood(
    measurement: &Measurement,
    pose: &Pose6D,
    cams: &[CameraModel],
    noise: &NoiseParams,
) -> Result<f64> {
    let two_pi_sqrt = (2.0 * std::f64::consts::PI).sqrt();
    let norm_x = -(noise.sigma_x * two_pi_sqrt).ln();
    let norm_y = -(noise.sigma_y * two_pi_sqrt).ln();
    let mut total = 0.0;
    for obs in &measurement.cameras {
        let cam = CameraModel::require(cams, obs.cam_id)?;
        for kp in &obs.points {
            let world = pose.transform_point(&kp.model);
            match project(cam, &world) {
                Ok([u, v]) => {
                    let dx = u - kp.obs[0];
                    let dy = v - kp.obs[1];
                    total += norm_x - dx * dx / (2.0 * noise.sigma_x * noise.sigma_x);
                    total += norm_y - dy * dy / (2.0 * noise.sigma_y * noise.sigma_y);
                }
                Err(Error::BehindCamera { .. }) => total += BEHIND_CAMERA_FLOOR,
                Err(other) => return Err(other),
            }
        }
    }
    Ok(total)
}

/// Log-likelihood of a whole scene: the sum over measurements of the
/// measured object's log-likelihood at its scene pose. Objects without
/// measurements contribute zero.
pub fn scene_log_likelihood(
    scene: &SceneModel,
    measurements: &[Measurement],
    cams: &[CameraModel],
    noise: &NoiseParams,
) -> Result<f64> {
    let mut total = 0.0;
    for m in measurements {
        let object = scene
            .object(m.object)
            .ok_or_else(|| Error::Schema(format!("measurement references unknown object {}", m.object)))?;
        total += object_log_likelihood(m, object.obb.pose(), cams, noise)?;
    }
    Ok(total)
}

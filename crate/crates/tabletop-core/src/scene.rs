//! The scene model: the table slab plus identified object boxes.
//!
//! A `SceneModel` is the state refined by the pose chain and the input to
//! evidence extraction. Object ids are arbitrary unique integers supplied
//! by the caller; logical constants are derived from them (`O7` for id 7,
//! `table` for the slab).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Obb, Pose6D, TableFrame};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: u32,
    pub obb: Obb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneWire", into = "SceneWire")]
pub struct SceneModel {
    table: Obb,
    objects: Vec<SceneObject>,
    frame: Option<TableFrame>,
}

impl SceneModel {
    /// Logical constant naming the table slab.
    pub const TABLE_CONSTANT: &'static str = "table";

    /// Objects are stored sorted by id; duplicate ids are rejected.
    pub fn new(table: Obb, mut objects: Vec<SceneObject>, frame: Option<TableFrame>) -> Result<Self> {
        objects.sort_by_key(|o| o.id);
        if let Some(pair) = objects.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidScene(format!("duplicate object id {}", pair[0].id)));
        }
        Ok(Self { table, objects, frame })
    }

    /// The standard 2 m x 2 m x 2 cm slab whose top surface is z = 0.
    pub fn standard_table() -> Obb {
        Obb::axis_aligned(Vector3::new(0.0, 0.0, -0.01), Vector3::new(1.0, 1.0, 0.01))
            .expect("standard table extents are positive")
    }

    pub fn table(&self) -> &Obb {
        &self.table
    }

    pub fn objects(&self) -> &[SceneObject] {
        &self.objects
    }

    pub fn object(&self, id: u32) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn set_object_pose(&mut self, id: u32, pose: Pose6D) -> Result<()> {
        match self.objects.iter_mut().find(|o| o.id == id) {
            Some(obj) => {
                obj.obb = obj.obb.with_pose(pose);
                Ok(())
            }
            None => Err(Error::Schema(format!("no object with id {id}"))),
        }
    }

    pub fn frame(&self) -> Option<&TableFrame> {
        self.frame.as_ref()
    }

    pub fn constant_name(id: u32) -> String {
        format!("O{id}")
    }

    /// Logical constants in canonical order: table first, then objects by id.
    pub fn constants(&self) -> Vec<String> {
        let mut out = vec![Self::TABLE_CONSTANT.to_owned()];
        out.extend(self.objects.iter().map(|o| Self::constant_name(o.id)));
        out
    }

    /// All boxes with their constant names, table first.
    pub fn entities(&self) -> Vec<(String, &Obb)> {
        let mut out = vec![(Self::TABLE_CONSTANT.to_owned(), &self.table)];
        out.extend(
            self.objects
                .iter()
                .map(|o| (Self::constant_name(o.id), &o.obb)),
        );
        out
    }

    /// Re-checks invariants that deserialization alone cannot express.
    pub fn validate(&self) -> Result<()> {
        if let Some(pair) = self.objects.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidScene(format!("duplicate object id {}", pair[0].id)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

#[derive(Serialize, Deserialize)]
struct SceneWire {
    table: Obb,
    objects: Vec<SceneObject>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<TableFrame>,
}

impl TryFrom<SceneWire> for SceneModel {
    type Error = Error;
    fn try_from(w: SceneWire) -> Result<Self> {
        SceneModel::new(w.table, w.objects, w.frame)
    }
}

impl From<SceneModel> for SceneWire {
    fn from(s: SceneModel) -> Self {
        SceneWire { table: s.table, objects: s.objects, frame: s.frame }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_box(id: u32, x: f64) -> SceneObject {
        SceneObject {
            id,
            obb: Obb::axis_aligned(Vector3::new(x, 0.0, 0.05), Vector3::new(0.05, 0.05, 0.05))
                .unwrap(),
        }
    }

    #[test]
    fn objects_are_sorted_by_id() {
        let scene = SceneModel::new(
            SceneModel::standard_table(),
            vec![small_box(3, 0.3), small_box(1, 0.1)],
            None,
        )
        .unwrap();
        let ids: Vec<u32> = scene.objects().iter().map(|o| o.id).collect();
        assert_eq!(ids, vec![1, 3]);
        assert_eq!(scene.constants(), vec!["table", "O1", "O3"]);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = SceneModel::new(
            SceneModel::standard_table(),
            vec![small_box(2, 0.0), small_box(2, 0.4)],
            None,
        );
        assert!(matches!(err, Err(Error::InvalidScene(_))));
    }

    #[test]
    fn json_round_trip_preserves_scene() {
        let scene = SceneModel::new(
            SceneModel::standard_table(),
            vec![small_box(1, 0.0), small_box(2, 0.2)],
            None,
        )
        .unwrap();
        let back = SceneModel::from_json(&scene.to_json()).unwrap();
        assert_eq!(back, scene);
    }

    #[test]
    fn json_with_duplicate_ids_is_rejected() {
        let scene_json = r#"{
            "table": {"center":[0,0,-0.01],"quat":[1,0,0,0],"half_extents":[1,1,0.01]},
            "objects": [
                {"id":1,"obb":{"center":[0,0,0.05],"quat":[1,0,0,0],"half_extents":[0.05,0.05,0.05]}},
                {"id":1,"obb":{"center":[0.3,0,0.05],"quat":[1,0,0,0],"half_extents":[0.05,0.05,0.05]}}
            ]
        }"#;
        assert!(SceneModel::from_json(scene_json).is_err());
    }
}

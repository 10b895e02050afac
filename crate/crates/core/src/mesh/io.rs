//! JSON mesh files: `{"vertices": [[x, y], ...], "elements": [[v0, v1, ...], ...],
//! "boundary_vertices": [...]}` with the last field optional.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Point, PolygonalMesh};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<Point>,
    pub elements: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_vertices: Option<Vec<usize>>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &PolygonalMesh) -> Self {
        Self {
            vertices: mesh.vertices().to_vec(),
            elements: mesh.elements().to_vec(),
            boundary_vertices: Some(
                (0..mesh.num_vertices())
                    .filter(|&v| mesh.is_boundary_vertex(v))
                    .collect(),
            ),
        }
    }

    /// Builds the mesh; a supplied boundary vertex list must agree with the
    /// one derived from the topology.
    pub fn into_mesh(self) -> Result<PolygonalMesh> {
        let given = self.boundary_vertices;
        let mesh = PolygonalMesh::new(self.vertices, self.elements)?;
        if let Some(mut given) = given {
            given.sort_unstable();
            given.dedup();
            let derived: Vec<usize> = (0..mesh.num_vertices())
                .filter(|&v| mesh.is_boundary_vertex(v))
                .collect();
            if given != derived {
                return Err(Error::InvalidMesh(
                    "boundary_vertices disagrees with the mesh topology".into(),
                ));
            }
        }
        Ok(mesh)
    }
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolygonalMesh> {
    let text = std::fs::read_to_string(path)?;
    let file: MeshFile = serde_json::from_str(&text)?;
    file.into_mesh()
}

pub fn write_mesh(mesh: &PolygonalMesh, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&MeshFile::from_mesh(mesh))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_lshape_mesh, refine};

    #[test]
    fn roundtrip() {
        let m = refine(&build_lshape_mesh(1).unwrap(), &[1]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.json");
        write_mesh(&m, &path).unwrap();
        let r = read_mesh(&path).unwrap();
        assert_eq!(r.vertices(), m.vertices());
        assert_eq!(r.elements(), m.elements());
    }

    #[test]
    fn boundary_list_is_checked() {
        let text = r#"{"vertices": [[0,0],[1,0],[0,1]], "elements": [[0,1,2]], "boundary_vertices": [0, 1]}"#;
        let file: MeshFile = serde_json::from_str(text).unwrap();
        assert!(file.into_mesh().is_err());
        let text = r#"{"vertices": [[0,0],[1,0],[0,1]], "elements": [[0,1,2]]}"#;
        let file: MeshFile = serde_json::from_str(text).unwrap();
        assert!(file.into_mesh().is_ok());
    }
}

//! JSON persistence of assembled systems.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::kernel::Kernel;
use crate::linalg::SymMatrix;
use crate::mesh::Mesh;

use super::GramPair;

/// `{ "mesh": <mesh file>, "s": s, "S": packed upper, "M": packed upper }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub mesh: String,
    pub s: f64,
    #[serde(rename = "S")]
    pub stiffness: Vec<f64>,
    #[serde(rename = "M")]
    pub mass: Vec<f64>,
}

pub fn save_system(gram: &GramPair, mesh_ref: &str, path: &Path) -> Result<()> {
    let file = SystemFile {
        mesh: mesh_ref.to_string(),
        s: gram.kernel().s(),
        stiffness: gram.s().packed().to_vec(),
        mass: gram.m().packed().to_vec(),
    };
    fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

/// Reads a system file back; `mesh` must be the mesh it was assembled on.
pub fn load_system(path: &Path, mesh: Arc<Mesh>) -> Result<GramPair> {
    let file: SystemFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    let n = mesh.dof_count();
    if file.stiffness.len() != n * (n + 1) / 2 {
        return domain("system size does not match the mesh");
    }
    let kernel = Kernel::new(mesh.dim(), file.s)?;
    let s = SymMatrix::from_packed(n, file.stiffness)?;
    let m = SymMatrix::from_packed(n, file.mass)?;
    GramPair::new(s, m, mesh, kernel)
}
